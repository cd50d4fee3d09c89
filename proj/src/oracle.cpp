#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#include "respact/household.hpp"

namespace respact::env {

namespace {

std::optional<std::string> appliance_for(TaskType type) {
    switch (type) {
        case TaskType::Clean: return "sinkbasin";
        case TaskType::Heat: return "microwave";
        case TaskType::Cool: return "fridge";
        default: return std::nullopt;
    }
}

// Everything a pruned plan can touch. States that agree on these fields are
// interchangeable for the search.
struct Relevance {
    std::vector<std::string> goal_objects;
    std::vector<std::string> lamps;
    std::vector<std::string> receptacles;

    std::string key(const WorldState& s) const {
        std::string k = s.agent_at;
        k += '|';
        k += s.inventory.value_or("-");
        for (const auto* group : {&goal_objects, &lamps}) {
            for (const std::string& name : *group) {
                const ObjectState& o = s.objects.at(name);
                k += '|';
                k += o.location;
                k += static_cast<char>('0' + static_cast<int>(o.temperature));
                k += static_cast<char>('0' + static_cast<int>(o.cleanliness));
                k += o.lamp_on ? '1' : '0';
            }
        }
        k += '|';
        for (const std::string& name : receptacles) k += s.receptacles.at(name).is_open ? '1' : '0';
        return k;
    }
};

Relevance relevance_for(const WorldState& s, const TaskGoal& goal) {
    Relevance rel;
    std::set<std::string> recs;
    for (const auto& [name, o] : s.objects) {
        if (o.is_lamp()) {
            if (goal.type == TaskType::Examine) {
                rel.lamps.push_back(name);
                recs.insert(o.location);
            }
        } else if (o.id.class_name == goal.object_class) {
            rel.goal_objects.push_back(name);
            if (o.location != kInventory) recs.insert(o.location);
        }
    }
    const auto appliance = appliance_for(goal.type);
    for (const auto& [name, r] : s.receptacles) {
        if (goal.type != TaskType::Examine && r.id.class_name == goal.target_receptacle_class) recs.insert(name);
        if (appliance && r.id.class_name == *appliance) recs.insert(name);
    }
    rel.receptacles.assign(recs.begin(), recs.end());
    return rel;
}

std::vector<EnvAction> candidate_actions(const WorldState& s, const TaskGoal& goal, const Relevance& rel) {
    std::vector<EnvAction> out;
    for (const std::string& name : rel.receptacles)
        if (name != s.agent_at) out.push_back(EnvAction::go_to(s.receptacles.at(name).id));
    if (s.agent_at == kStart) return out;

    const Receptacle& here = s.receptacles.at(s.agent_at);
    const bool goal_object_here = std::any_of(rel.goal_objects.begin(), rel.goal_objects.end(), [&](const auto& n) {
        return s.objects.at(n).location == s.agent_at;
    });
    if (here.openable && !here.is_open && goal_object_here) out.push_back(EnvAction::open(here.id));

    if (!s.inventory) {
        for (const std::string& n : rel.goal_objects)
            if (s.objects.at(n).location == s.agent_at) out.push_back(EnvAction::take(s.objects.at(n).id, here.id));
    } else {
        const EntityRef& held = s.objects.at(*s.inventory).id;
        if (goal.type != TaskType::Examine && here.id.class_name == goal.target_receptacle_class)
            out.push_back(EnvAction::put(held, here.id));
        const auto appliance = appliance_for(goal.type);
        if (appliance && here.id.class_name == *appliance) {
            if (goal.type == TaskType::Clean) out.push_back(EnvAction::clean(held, here.id));
            if (goal.type == TaskType::Heat) out.push_back(EnvAction::heat(held, here.id));
            if (goal.type == TaskType::Cool) out.push_back(EnvAction::cool(held, here.id));
        }
    }
    for (const std::string& n : rel.lamps) {
        const ObjectState& lamp = s.objects.at(n);
        if (lamp.location == s.agent_at && !lamp.lamp_on) out.push_back(EnvAction::use(lamp.id));
    }
    return out;
}

}  // namespace

Expected<OraclePlan, Unsolvable> oracle_solve(const WorldState& state, const TaskGoal& goal, std::size_t state_limit) {
    if (goal_satisfied(state, goal)) return OraclePlan{};

    const Relevance rel = relevance_for(state, goal);
    if (rel.goal_objects.empty()) return unexpected(Unsolvable{"no " + goal.object_class + " in the world"});
    if (goal.type == TaskType::PickTwo && rel.goal_objects.size() < 2)
        return unexpected(Unsolvable{"fewer than two " + goal.object_class});
    if (goal.type == TaskType::Examine && rel.lamps.empty()) return unexpected(Unsolvable{"no desklamp"});

    struct Node {
        WorldState state;
        std::ptrdiff_t parent;
        std::string action;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::string, std::size_t> seen;
    std::deque<std::size_t> frontier;

    nodes.push_back({state, -1, {}});
    seen.emplace(rel.key(state), 0);
    frontier.push_back(0);

    while (!frontier.empty()) {
        const std::size_t cur = frontier.front();
        frontier.pop_front();
        for (const EnvAction& a : candidate_actions(nodes[cur].state, goal, rel)) {
            StepResult r = step(nodes[cur].state, a);
            if (!r.valid) continue;
            auto [it, inserted] = seen.emplace(rel.key(r.state), nodes.size());
            if (!inserted) continue;
            const bool solved = goal_satisfied(r.state, goal);
            nodes.push_back({std::move(r.state), static_cast<std::ptrdiff_t>(cur), grammar::format_action(a)});
            if (solved) {
                OraclePlan plan;
                for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(nodes.size()) - 1; nodes[i].parent >= 0;
                     i = nodes[i].parent)
                    plan.push_back(nodes[i].action);
                std::reverse(plan.begin(), plan.end());
                return plan;
            }
            if (nodes.size() >= state_limit) return unexpected(Unsolvable{"state limit reached"});
            frontier.push_back(nodes.size() - 1);
        }
    }
    return unexpected(Unsolvable{"state space exhausted"});
}

}  // namespace respact::env
