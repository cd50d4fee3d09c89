#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace respact {

// ---------------------------------------------------------------------------
// Agent decisions: the augmented action space. Think and Speak live in the
// language space, Act carries an unparsed environment command.
// ---------------------------------------------------------------------------

enum class DecisionKind { Think, Speak, Act };

struct Decision {
    DecisionKind kind;
    std::string text;

    // Throw std::invalid_argument when text is blank.
    static Decision think(std::string text);
    static Decision speak(std::string text);
    static Decision act(std::string text);
    static Decision make(DecisionKind kind, std::string text);

    friend bool operator==(const Decision&, const Decision&) = default;
};

enum class Persona { HelpfulKnowledgeable, HelpfulPerturbed, Unhelpful, Human, LLM };

struct UserResponse {
    std::string text;
    Persona persona = Persona::Human;

    friend bool operator==(const UserResponse&, const UserResponse&) = default;
};

struct Observation {
    std::string text;

    friend bool operator==(const Observation&, const Observation&) = default;
};

enum class Source { Agent, Environment, User };

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

Timestamp now_ms();

struct Event {
    std::size_t step = 0;
    Source source = Source::Agent;
    std::variant<Decision, Observation, UserResponse> payload;
    bool invalid = false;
    Timestamp ts{};

    // "think" | "speak" | "act" | "observation" | "reply"
    std::string_view kind() const;
    const std::string& text() const;
    const Decision* decision() const { return std::get_if<Decision>(&payload); }

    friend bool operator==(const Event&, const Event&) = default;
};

enum class TaskType { Pick, Clean, Heat, Cool, Examine, PickTwo };

inline constexpr TaskType kAllTaskTypes[] = {TaskType::Pick, TaskType::Clean,   TaskType::Heat,
                                             TaskType::Cool, TaskType::Examine, TaskType::PickTwo};

struct TaskGoal {
    TaskType type = TaskType::Pick;
    std::string object_class;
    std::string target_receptacle_class;

    // Goal line as shown to the agent, e.g. "put two creditcard in dresser."
    std::string describe() const;
    // Throws std::invalid_argument on a broken invariant (Examine must target "desklamp").
    void validate() const;

    friend bool operator==(const TaskGoal&, const TaskGoal&) = default;
};

enum class Outcome { Success, Failure, BudgetExhausted, Aborted };

struct Counters {
    std::size_t think_count = 0;
    std::size_t speak_count = 0;
    std::size_t act_count = 0;
    std::size_t invalid_count = 0;

    friend bool operator==(const Counters&, const Counters&) = default;
};

// The agent's context: an append-only log of decisions and the responses they
// received, plus the episode's outcome once it terminates.
class Episode {
public:
    Episode() = default;
    Episode(std::string episode_id, TaskGoal task, std::uint64_t seed, std::string initial_observation,
            std::optional<Persona> persona = std::nullopt);

    const std::string& episode_id() const { return episode_id_; }
    const TaskGoal& task() const { return task_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& initial_observation() const { return initial_observation_; }
    std::optional<Persona> persona() const { return persona_; }
    const std::vector<Event>& events() const { return events_; }
    const Counters& counters() const { return counters_; }
    std::optional<Outcome> outcome() const { return outcome_; }
    bool done() const { return outcome_.has_value(); }

    // Number of agent decisions recorded so far.
    std::size_t decisions() const;

    // Enforces step ordering and the invalid-flag rule; throws std::logic_error.
    void append(Event event);
    // Throws std::logic_error if an outcome was already set.
    void set_outcome(Outcome outcome);

    friend bool operator==(const Episode&, const Episode&) = default;

private:
    std::string episode_id_;
    TaskGoal task_;
    std::uint64_t seed_ = 0;
    std::string initial_observation_;
    std::optional<Persona> persona_;
    std::vector<Event> events_;
    Counters counters_;
    std::optional<Outcome> outcome_;
};

// Tallies recomputed purely from the event log.
Counters recount(const Episode& episode);

// Enum <-> string helpers used by every serializer.
std::string_view to_string(DecisionKind kind);
std::string_view to_string(Persona persona);
std::string_view to_string(Source source);
std::string_view to_string(TaskType type);
std::string_view to_string(Outcome outcome);
std::optional<DecisionKind> decision_kind_from_string(std::string_view s);
std::optional<Persona> persona_from_string(std::string_view s);
std::optional<Source> source_from_string(std::string_view s);
std::optional<TaskType> task_type_from_string(std::string_view s);
std::optional<Outcome> outcome_from_string(std::string_view s);

std::string format_rfc3339(Timestamp ts);
std::optional<Timestamp> parse_rfc3339(std::string_view s);

}  // namespace respact
