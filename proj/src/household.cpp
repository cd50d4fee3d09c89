#include "respact/household.hpp"

#include <algorithm>
#include <stdexcept>

namespace respact::env {

bool is_openable_class(std::string_view cls) {
    return cls == "cabinet" || cls == "drawer" || cls == "fridge" || cls == "microwave";
}

bool is_lamp_class(std::string_view cls) { return cls == "desklamp"; }

void WorldState::add_receptacle(const EntityRef& id, std::optional<bool> open) {
    const bool openable = is_openable_class(id.class_name);
    receptacles[id.str()] = Receptacle{id, openable, openable ? open.value_or(false) : true};
}

void WorldState::add_object(const EntityRef& id, const std::string& location) {
    objects[id.str()] = ObjectState{id, location};
    if (location == kInventory) inventory = id.str();
}

namespace {

bool listing_order(const EntityRef& a, const EntityRef& b) {
    if (a.class_name != b.class_name) return a.class_name < b.class_name;
    return a.index > b.index;
}

const ObjectState* find_object(const WorldState& s, const std::string& name) {
    auto it = s.objects.find(name);
    return it == s.objects.end() ? nullptr : &it->second;
}

const Receptacle* find_receptacle(const WorldState& s, const std::string& name) {
    auto it = s.receptacles.find(name);
    return it == s.receptacles.end() ? nullptr : &it->second;
}

std::string arrival_text(const WorldState& s, const Receptacle& r) {
    const std::string name = r.id.str();
    if (!r.accessible()) return "The " + name + " is closed.";
    return "On the " + name + ", you see " + list_entities(s.contents(name)) + ".";
}

StepResult nothing(const WorldState& s) { return StepResult{s, kNothingHappens, false}; }

StepResult transform_held(const WorldState& s, const EnvAction& a, std::string_view appliance, const char* verb,
                          void (*apply)(ObjectState&)) {
    const std::string obj = a.object->str();
    const std::string rec = a.receptacle->str();
    const Receptacle* r = find_receptacle(s, rec);
    if (r == nullptr || r->id.class_name != appliance || s.agent_at != rec || s.inventory != obj) return nothing(s);
    StepResult out{s, {}, true};
    apply(out.state.objects.at(obj));
    out.observation = std::string("You ") + verb + " the " + obj + " using the " + rec + ".";
    return out;
}

}  // namespace

std::vector<EntityRef> WorldState::contents(const std::string& receptacle) const {
    std::vector<EntityRef> out;
    for (const auto& [name, obj] : objects)
        if (obj.location == receptacle) out.push_back(obj.id);
    std::sort(out.begin(), out.end(), listing_order);
    return out;
}

std::vector<EntityRef> WorldState::receptacle_ids() const {
    std::vector<EntityRef> out;
    for (const auto& [name, r] : receptacles) out.push_back(r.id);
    std::sort(out.begin(), out.end(), listing_order);
    return out;
}

void WorldState::check_invariants() const {
    std::size_t held = 0;
    for (const auto& [name, obj] : objects) {
        if (name != obj.id.str()) throw std::logic_error("object key mismatch: " + name);
        if (obj.location == kInventory) {
            ++held;
            if (inventory != name) throw std::logic_error("inventory does not match held object " + name);
        } else if (!receptacles.count(obj.location)) {
            throw std::logic_error("object " + name + " at unknown location " + obj.location);
        }
        if (obj.lamp_on && !obj.is_lamp()) throw std::logic_error("only lamps can be switched on");
    }
    if (held > 1) throw std::logic_error("inventory holds more than one object");
    if (inventory && held == 0) throw std::logic_error("inventory names an object that is not held");
    for (const auto& [name, r] : receptacles) {
        if (name != r.id.str()) throw std::logic_error("receptacle key mismatch: " + name);
        if (r.openable != is_openable_class(r.id.class_name)) throw std::logic_error("openable flag mismatch: " + name);
        if (!r.openable && !r.is_open) throw std::logic_error("non-openable receptacle marked closed: " + name);
    }
    if (agent_at != kStart && !receptacles.count(agent_at)) throw std::logic_error("agent at unknown location");
}

std::uint64_t WorldState::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    mix(agent_at);
    mix(inventory.value_or(""));
    for (const auto& [name, r] : receptacles) {
        mix(name);
        mix(r.is_open ? "o" : "c");
    }
    for (const auto& [name, o] : objects) {
        mix(name);
        mix(o.location);
        const char flags[] = {static_cast<char>('0' + static_cast<int>(o.temperature)),
                              static_cast<char>('0' + static_cast<int>(o.cleanliness)), o.lamp_on ? '1' : '0', 0};
        mix(flags);
    }
    return h;
}

std::string list_entities(const std::vector<EntityRef>& ids) {
    if (ids.empty()) return "nothing";
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += ", ";
        if (i > 0 && i + 1 == ids.size()) out += "and ";
        out += "a " + ids[i].str();
    }
    return out;
}

std::string describe_room(const WorldState& state) {
    return "You are in the middle of a room. Looking quickly around you, you see " +
           list_entities(state.receptacle_ids()) + ".";
}

std::string initial_observation(const WorldState& state, const TaskGoal& goal) {
    return describe_room(state) + "\nYour task is to: " + goal.describe();
}

StepResult step(const WorldState& s, const EnvAction& a) {
    if (!a.well_formed()) return nothing(s);

    switch (a.verb) {
        case grammar::Verb::Look: {
            if (s.agent_at == kStart) return {s, describe_room(s), true};
            return {s, arrival_text(s, s.receptacles.at(s.agent_at)), true};
        }
        case grammar::Verb::GoTo: {
            const std::string rec = a.receptacle->str();
            const Receptacle* r = find_receptacle(s, rec);
            if (r == nullptr) return nothing(s);
            StepResult out{s, arrival_text(s, *r), true};
            out.state.agent_at = rec;
            return out;
        }
        case grammar::Verb::Open: {
            const std::string rec = a.receptacle->str();
            const Receptacle* r = find_receptacle(s, rec);
            if (r == nullptr || !r->openable || r->is_open || s.agent_at != rec) return nothing(s);
            StepResult out{s, {}, true};
            out.state.receptacles.at(rec).is_open = true;
            out.observation = "You open the " + rec + ". The " + rec + " is open. In it, you see " +
                              list_entities(s.contents(rec)) + ".";
            return out;
        }
        case grammar::Verb::Close: {
            const std::string rec = a.receptacle->str();
            const Receptacle* r = find_receptacle(s, rec);
            if (r == nullptr || !r->openable || !r->is_open || s.agent_at != rec) return nothing(s);
            StepResult out{s, "You close the " + rec + ".", true};
            out.state.receptacles.at(rec).is_open = false;
            return out;
        }
        case grammar::Verb::Take: {
            const std::string obj = a.object->str();
            const std::string rec = a.receptacle->str();
            const ObjectState* o = find_object(s, obj);
            const Receptacle* r = find_receptacle(s, rec);
            if (o == nullptr || r == nullptr || o->is_lamp() || o->location != rec || s.agent_at != rec ||
                !r->accessible() || s.inventory)
                return nothing(s);
            StepResult out{s, "You pick up the " + obj + " from the " + rec + ".", true};
            out.state.objects.at(obj).location = kInventory;
            out.state.inventory = obj;
            return out;
        }
        case grammar::Verb::Put: {
            const std::string obj = a.object->str();
            const std::string rec = a.receptacle->str();
            if (find_receptacle(s, rec) == nullptr || s.agent_at != rec || s.inventory != obj) return nothing(s);
            StepResult out{s, "You put the " + obj + " in/on the " + rec + ".", true};
            out.state.objects.at(obj).location = rec;
            out.state.inventory.reset();
            return out;
        }
        case grammar::Verb::Clean:
            return transform_held(s, a, "sinkbasin", "clean",
                                  [](ObjectState& o) { o.cleanliness = Cleanliness::Clean; });
        case grammar::Verb::Heat:
            return transform_held(s, a, "microwave", "heat", [](ObjectState& o) { o.temperature = Temperature::Hot; });
        case grammar::Verb::Cool:
            return transform_held(s, a, "fridge", "cool", [](ObjectState& o) { o.temperature = Temperature::Cold; });
        case grammar::Verb::Toggle:
        case grammar::Verb::Use: {
            const EntityRef& target = a.verb == grammar::Verb::Use ? *a.receptacle : a.toggle_target();
            const std::string name = target.str();
            const ObjectState* o = find_object(s, name);
            if (o == nullptr || !o->is_lamp() || o->location != s.agent_at) return nothing(s);
            StepResult out{s, "You turn on the " + name + ".", true};
            out.state.objects.at(name).lamp_on = true;
            return out;
        }
    }
    return nothing(s);
}

bool goal_satisfied(const WorldState& s, const TaskGoal& goal) {
    if (goal.type == TaskType::Examine) {
        if (!s.inventory) return false;
        const ObjectState* held = find_object(s, *s.inventory);
        if (held == nullptr || held->id.class_name != goal.object_class) return false;
        return std::any_of(s.objects.begin(), s.objects.end(), [&](const auto& kv) {
            return kv.second.is_lamp() && kv.second.lamp_on && kv.second.location == s.agent_at;
        });
    }

    std::size_t placed = 0;
    for (const auto& [name, o] : s.objects) {
        if (o.id.class_name != goal.object_class || o.location == kInventory) continue;
        const Receptacle* r = find_receptacle(s, o.location);
        if (r == nullptr || r->id.class_name != goal.target_receptacle_class) continue;
        switch (goal.type) {
            case TaskType::Clean:
                if (o.cleanliness != Cleanliness::Clean) continue;
                break;
            case TaskType::Heat:
                if (o.temperature != Temperature::Hot) continue;
                break;
            case TaskType::Cool:
                if (o.temperature != Temperature::Cold) continue;
                break;
            default: break;
        }
        ++placed;
    }
    return placed >= (goal.type == TaskType::PickTwo ? 2u : 1u);
}

bool replay_solves(const WorldState& state, const TaskGoal& goal, const OraclePlan& plan) {
    WorldState cur = state;
    for (const std::string& line : plan) {
        auto parsed = grammar::parse_action(line);
        if (!parsed) return false;
        StepResult r = step(cur, *parsed);
        if (!r.valid) return false;
        cur = std::move(r.state);
    }
    return goal_satisfied(cur, goal);
}

}  // namespace respact::env
