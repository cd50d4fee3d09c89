#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "respact/core.hpp"
#include "respact/expected.hpp"
#include "respact/grammar.hpp"
#include "respact/serialization.hpp"

namespace respact::env {

using grammar::EntityRef;
using grammar::EnvAction;

enum class Temperature { Normal, Hot, Cold };
enum class Cleanliness { Dirty, Clean };

inline constexpr const char* kStart = "start";
inline constexpr const char* kInventory = "inventory";

// cabinet, drawer, fridge and microwave carry an open/closed flag.
bool is_openable_class(std::string_view receptacle_class);
bool is_lamp_class(std::string_view object_class);

struct Receptacle {
    EntityRef id;
    bool openable = false;
    bool is_open = true;

    bool accessible() const { return !openable || is_open; }
    friend bool operator==(const Receptacle&, const Receptacle&) = default;
};

struct ObjectState {
    EntityRef id;
    std::string location;  // receptacle name or "inventory"
    Temperature temperature = Temperature::Normal;
    Cleanliness cleanliness = Cleanliness::Dirty;
    bool lamp_on = false;

    bool is_lamp() const { return is_lamp_class(id.class_name); }
    friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct WorldState {
    std::map<std::string, Receptacle> receptacles;  // keyed by "drawer 1"
    std::map<std::string, ObjectState> objects;     // keyed by "creditcard 2"
    std::string agent_at = kStart;
    std::optional<std::string> inventory;

    // Convenience for fixtures. Openable receptacles start closed unless `open`.
    void add_receptacle(const EntityRef& id, std::optional<bool> open = std::nullopt);
    void add_object(const EntityRef& id, const std::string& location);

    // Objects at a receptacle, ordered by class then descending index (the
    // order observation text lists them in).
    std::vector<EntityRef> contents(const std::string& receptacle) const;
    std::vector<EntityRef> receptacle_ids() const;

    // Throws std::logic_error when a state invariant is broken.
    void check_invariants() const;
    // Stable 64-bit digest of the full state.
    std::uint64_t fingerprint() const;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

// "a cellphone 2, a creditcard 4, and a pencil 1" / "a mug 1" / "nothing"
std::string list_entities(const std::vector<EntityRef>& ids);

// "You are in the middle of a room. Looking quickly around you, you see ..."
std::string describe_room(const WorldState& state);
// Room description plus the "Your task is to: ..." line.
std::string initial_observation(const WorldState& state, const TaskGoal& goal);

struct StepResult {
    WorldState state;
    std::string observation;
    bool valid = false;
};

inline constexpr const char* kNothingHappens = "Nothing happens.";

// Pure transition function. Failed preconditions leave the state untouched
// and answer "Nothing happens.".
StepResult step(const WorldState& state, const EnvAction& action);

bool goal_satisfied(const WorldState& state, const TaskGoal& goal);

// Canonical action strings.
using OraclePlan = std::vector<std::string>;

struct Unsolvable {
    std::string reason;
};

inline constexpr std::size_t kDefaultStateLimit = 1'000'000;

// Shortest plan by breadth-first search. Actions that can never shorten a plan
// (closing, looking, touching goal-irrelevant entities) are not expanded.
Expected<OraclePlan, Unsolvable> oracle_solve(const WorldState& state, const TaskGoal& goal,
                                              std::size_t state_limit = kDefaultStateLimit);

// Replays a plan through step(); true iff every step is valid and the goal holds at the end.
bool replay_solves(const WorldState& state, const TaskGoal& goal, const OraclePlan& plan);

// ---------------------------------------------------------------------------
// Layouts and world generation

struct ReceptacleSpec {
    std::string class_name;
    int count = 1;
};

struct SpawnEntry {
    std::string object_class;
    std::vector<std::string> receptacle_classes;
    double probability = 0.5;
    int max_count = 1;
};

struct TaskTemplate {
    TaskType type;
    std::string object_class;
    std::string target_class;
};

struct LayoutSpec {
    std::string name;
    std::vector<ReceptacleSpec> receptacles;
    std::vector<SpawnEntry> spawns;
    std::vector<TaskTemplate> tasks;
    int min_objects = 8;
    int max_objects = 15;

    const SpawnEntry* spawn_for(std::string_view object_class) const;
    bool has_receptacle_class(std::string_view cls) const;
    std::vector<TaskTemplate> tasks_of(TaskType type) const;
};

// kitchen-small, bedroom-small
const std::vector<LayoutSpec>& builtin_layouts();
const LayoutSpec* find_layout(std::string_view name);

struct UnsatisfiableGoal {
    std::string reason;
};

struct GeneratedWorld {
    WorldState world;
    OraclePlan plan;
};

// Deterministic in (layout, goal, seed). The emitted plan is verified by replay.
Expected<GeneratedWorld, UnsatisfiableGoal> generate(const LayoutSpec& layout, const TaskGoal& goal, std::uint64_t seed);

// Why `goal` cannot be realized by `layout`, if it cannot.
std::optional<std::string> unsatisfiable_reason(const LayoutSpec& layout, const TaskGoal& goal);

// JSON schema documented in README ("World and layout JSON").
Json to_json(const WorldState& state);
WorldState world_from_json(const Json& j);
Json to_json(const LayoutSpec& layout);
LayoutSpec layout_from_json(const Json& j);

}  // namespace respact::env
