#include <algorithm>
#include <random>
#include <stdexcept>

#include "respact/household.hpp"

namespace respact::env {

const SpawnEntry* LayoutSpec::spawn_for(std::string_view object_class) const {
    for (const SpawnEntry& e : spawns)
        if (e.object_class == object_class) return &e;
    return nullptr;
}

bool LayoutSpec::has_receptacle_class(std::string_view cls) const {
    return std::any_of(receptacles.begin(), receptacles.end(),
                       [&](const ReceptacleSpec& r) { return r.class_name == cls && r.count > 0; });
}

std::vector<TaskTemplate> LayoutSpec::tasks_of(TaskType type) const {
    std::vector<TaskTemplate> out;
    for (const TaskTemplate& t : tasks)
        if (t.type == type) out.push_back(t);
    return out;
}

namespace {

LayoutSpec make_kitchen() {
    LayoutSpec k;
    k.name = "kitchen-small";
    k.receptacles = {{"cabinet", 4},   {"coffeemachine", 1}, {"countertop", 2}, {"diningtable", 1},
                     {"drawer", 2},    {"fridge", 1},        {"garbagecan", 1}, {"microwave", 1},
                     {"shelf", 2},     {"sinkbasin", 1},     {"stoveburner", 2}, {"toaster", 1}};
    k.spawns = {
        {"apple", {"countertop", "fridge", "diningtable", "garbagecan"}, 0.5, 2},
        {"bread", {"countertop", "diningtable", "cabinet"}, 0.4, 1},
        {"creditcard", {"countertop", "diningtable"}, 0.3, 1},
        {"cup", {"cabinet", "countertop", "shelf", "diningtable"}, 0.5, 2},
        {"egg", {"fridge", "countertop", "garbagecan"}, 0.5, 2},
        {"knife", {"countertop", "drawer", "diningtable"}, 0.5, 2},
        {"lettuce", {"fridge", "countertop", "diningtable"}, 0.4, 1},
        {"mug", {"countertop", "cabinet", "shelf", "coffeemachine", "diningtable"}, 0.6, 2},
        {"pan", {"stoveburner", "cabinet", "countertop"}, 0.5, 2},
        {"peppershaker", {"countertop", "shelf", "cabinet", "diningtable"}, 0.4, 2},
        {"plate", {"cabinet", "countertop", "diningtable", "shelf"}, 0.5, 2},
        {"potato", {"countertop", "fridge", "diningtable", "garbagecan", "cabinet"}, 0.5, 2},
        {"saltshaker", {"countertop", "shelf", "cabinet", "diningtable"}, 0.5, 3},
        {"spatula", {"drawer", "countertop"}, 0.3, 2},
        {"spoon", {"drawer", "countertop", "diningtable"}, 0.5, 3},
        {"tomato", {"fridge", "countertop", "diningtable"}, 0.5, 2},
    };
    k.tasks = {
        {TaskType::Pick, "saltshaker", "cabinet"},   {TaskType::Pick, "peppershaker", "drawer"},
        {TaskType::Pick, "mug", "shelf"},            {TaskType::Pick, "spoon", "diningtable"},
        {TaskType::Pick, "knife", "cabinet"},        {TaskType::Clean, "mug", "coffeemachine"},
        {TaskType::Clean, "plate", "cabinet"},       {TaskType::Clean, "knife", "countertop"},
        {TaskType::Clean, "pan", "stoveburner"},     {TaskType::Clean, "spoon", "drawer"},
        {TaskType::Clean, "lettuce", "diningtable"}, {TaskType::Clean, "cup", "shelf"},
        {TaskType::Heat, "mug", "coffeemachine"},    {TaskType::Heat, "apple", "countertop"},
        {TaskType::Heat, "potato", "diningtable"},   {TaskType::Heat, "egg", "garbagecan"},
        {TaskType::Heat, "tomato", "countertop"},    {TaskType::Heat, "bread", "countertop"},
        {TaskType::Heat, "cup", "cabinet"},          {TaskType::Cool, "apple", "diningtable"},
        {TaskType::Cool, "potato", "countertop"},    {TaskType::Cool, "tomato", "diningtable"},
        {TaskType::Cool, "lettuce", "countertop"},   {TaskType::Cool, "mug", "cabinet"},
        {TaskType::Cool, "bread", "diningtable"},    {TaskType::Cool, "pan", "stoveburner"},
        {TaskType::PickTwo, "saltshaker", "cabinet"}, {TaskType::PickTwo, "spoon", "diningtable"},
        {TaskType::PickTwo, "plate", "shelf"},       {TaskType::PickTwo, "mug", "cabinet"},
    };
    return k;
}

LayoutSpec make_bedroom() {
    LayoutSpec b;
    b.name = "bedroom-small";
    b.receptacles = {{"armchair", 2},   {"bed", 1},           {"countertop", 1}, {"desk", 1},
                     {"diningtable", 1}, {"drawer", 3},       {"dresser", 1},    {"garbagecan", 1},
                     {"laundryhamper", 1}, {"shelf", 2},      {"sidetable", 2}};
    b.spawns = {
        {"alarmclock", {"desk", "sidetable", "dresser", "shelf"}, 0.5, 1},
        {"book", {"bed", "desk", "sidetable", "shelf", "drawer", "diningtable"}, 0.6, 2},
        {"cd", {"drawer", "desk", "shelf", "sidetable"}, 0.5, 2},
        {"cellphone", {"bed", "desk", "sidetable", "armchair", "dresser"}, 0.5, 2},
        {"cloth", {"laundryhamper", "bed", "drawer", "dresser"}, 0.4, 2},
        {"creditcard", {"countertop", "diningtable", "drawer", "sidetable", "armchair", "desk", "shelf"}, 0.6, 3},
        {"desklamp", {"desk", "sidetable"}, 0.5, 1},
        {"keychain", {"dresser", "sidetable", "drawer", "shelf"}, 0.5, 2},
        {"mug", {"desk", "sidetable", "dresser", "shelf"}, 0.4, 1},
        {"pen", {"drawer", "desk", "sidetable", "shelf"}, 0.5, 2},
        {"pencil", {"desk", "drawer", "sidetable", "countertop"}, 0.5, 2},
        {"pillow", {"bed", "armchair"}, 0.5, 2},
        {"watch", {"dresser", "sidetable", "drawer"}, 0.4, 1},
    };
    b.tasks = {
        {TaskType::Pick, "pillow", "armchair"},        {TaskType::Pick, "cd", "shelf"},
        {TaskType::Pick, "keychain", "dresser"},       {TaskType::Pick, "cellphone", "bed"},
        {TaskType::Pick, "book", "desk"},              {TaskType::Examine, "book", "desklamp"},
        {TaskType::Examine, "cd", "desklamp"},         {TaskType::Examine, "pen", "desklamp"},
        {TaskType::Examine, "pencil", "desklamp"},     {TaskType::Examine, "alarmclock", "desklamp"},
        {TaskType::Examine, "creditcard", "desklamp"}, {TaskType::Examine, "cellphone", "desklamp"},
        {TaskType::Examine, "keychain", "desklamp"},   {TaskType::Examine, "watch", "desklamp"},
        {TaskType::PickTwo, "creditcard", "dresser"},  {TaskType::PickTwo, "cd", "shelf"},
        {TaskType::PickTwo, "pen", "drawer"},          {TaskType::PickTwo, "pencil", "drawer"},
        {TaskType::PickTwo, "cellphone", "sidetable"}, {TaskType::PickTwo, "keychain", "drawer"},
    };
    return b;
}

std::optional<std::string> appliance_needed(TaskType type) {
    switch (type) {
        case TaskType::Clean: return "sinkbasin";
        case TaskType::Heat: return "microwave";
        case TaskType::Cool: return "fridge";
        default: return std::nullopt;
    }
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

std::vector<EntityRef> candidate_slots(const WorldState& w, const SpawnEntry& e, std::string_view exclude_class) {
    std::vector<EntityRef> out;
    for (const EntityRef& id : w.receptacle_ids()) {
        if (id.class_name == exclude_class) continue;
        if (std::find(e.receptacle_classes.begin(), e.receptacle_classes.end(), id.class_name) !=
            e.receptacle_classes.end())
            out.push_back(id);
    }
    // receptacle_ids() uses listing order; sort ascending so seeds map to stable slots.
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

const std::vector<LayoutSpec>& builtin_layouts() {
    static const std::vector<LayoutSpec> layouts{make_kitchen(), make_bedroom()};
    return layouts;
}

const LayoutSpec* find_layout(std::string_view name) {
    for (const LayoutSpec& l : builtin_layouts())
        if (l.name == name) return &l;
    return nullptr;
}

std::optional<std::string> unsatisfiable_reason(const LayoutSpec& layout, const TaskGoal& goal) {
    try {
        goal.validate();
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    const SpawnEntry* entry = layout.spawn_for(goal.object_class);
    if (entry == nullptr) return layout.name + " never spawns " + goal.object_class;
    if (is_lamp_class(goal.object_class)) return goal.object_class + " cannot be picked up";
    const int needed = goal.type == TaskType::PickTwo ? 2 : 1;
    if (entry->max_count < needed)
        return layout.name + " spawns at most " + std::to_string(entry->max_count) + " " + goal.object_class;

    const std::string exclude = goal.type == TaskType::Examine ? std::string() : goal.target_receptacle_class;
    const bool has_slot = std::any_of(entry->receptacle_classes.begin(), entry->receptacle_classes.end(),
                                      [&](const std::string& c) { return c != exclude && layout.has_receptacle_class(c); });
    if (!has_slot) return "no receptacle in " + layout.name + " can hold a fresh " + goal.object_class;

    if (goal.type != TaskType::Examine && !layout.has_receptacle_class(goal.target_receptacle_class))
        return layout.name + " has no " + goal.target_receptacle_class;
    if (auto appliance = appliance_needed(goal.type); appliance && !layout.has_receptacle_class(*appliance))
        return layout.name + " has no " + *appliance;
    if (goal.type == TaskType::Examine) {
        const SpawnEntry* lamp = layout.spawn_for("desklamp");
        const bool lamp_slot =
            lamp != nullptr && std::any_of(lamp->receptacle_classes.begin(), lamp->receptacle_classes.end(),
                                           [&](const std::string& c) { return layout.has_receptacle_class(c); });
        if (!lamp_slot) return layout.name + " cannot place a desklamp";
    }
    return std::nullopt;
}

Expected<GeneratedWorld, UnsatisfiableGoal> generate(const LayoutSpec& layout, const TaskGoal& goal,
                                                     std::uint64_t seed) {
    if (auto reason = unsatisfiable_reason(layout, goal)) return unexpected(UnsatisfiableGoal{*reason});

    Rng rng(seed);
    WorldState w;
    for (const ReceptacleSpec& spec : layout.receptacles)
        for (int i = 1; i <= spec.count; ++i) w.add_receptacle(EntityRef{spec.class_name, i});

    std::map<std::string, int> spawned;
    auto spawn = [&](const SpawnEntry& entry, std::string_view exclude) {
        const auto slots = candidate_slots(w, entry, exclude);
        if (slots.empty()) return false;
        const EntityRef& slot = slots[rng.below(slots.size())];
        const int index = ++spawned[entry.object_class];
        w.add_object(EntityRef{entry.object_class, index}, slot.str());
        return true;
    };
    // Goal objects never start on a target-class receptacle, so fresh worlds
    // do not satisfy their goal.
    auto exclusion_for = [&](const std::string& cls) -> std::string {
        return cls == goal.object_class && goal.type != TaskType::Examine ? goal.target_receptacle_class : "";
    };

    const SpawnEntry& goal_entry = *layout.spawn_for(goal.object_class);
    const int needed = goal.type == TaskType::PickTwo ? 2 : 1;
    const int goal_count = std::min(goal_entry.max_count, needed + static_cast<int>(rng.below(2)));
    for (int i = 0; i < goal_count; ++i) spawn(goal_entry, exclusion_for(goal.object_class));
    if (goal.type == TaskType::Examine) spawn(*layout.spawn_for("desklamp"), "");

    const int span = std::max(0, layout.max_objects - layout.min_objects);
    const int target_total = layout.min_objects + static_cast<int>(rng.below(static_cast<std::size_t>(span) + 1));
    for (int round = 0; round < 32 && static_cast<int>(w.objects.size()) < target_total; ++round) {
        for (const SpawnEntry& entry : layout.spawns) {
            if (static_cast<int>(w.objects.size()) >= target_total) break;
            if (spawned[entry.object_class] >= entry.max_count) continue;
            if (rng.unit() >= entry.probability) continue;
            spawn(entry, exclusion_for(entry.object_class));
        }
    }

    w.check_invariants();
    auto plan = oracle_solve(w, goal);
    if (!plan) throw std::logic_error("generated world is unsolvable: " + plan.error().reason);
    if (!replay_solves(w, goal, *plan)) throw std::logic_error("oracle plan failed replay");
    return GeneratedWorld{std::move(w), std::move(*plan)};
}

}  // namespace respact::env
