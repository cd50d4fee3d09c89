#include "respact/core.hpp"

#include <array>
#include <cstdio>
#include <ctime>
#include <stdexcept>

#include "respact/text.hpp"

namespace respact {

Decision Decision::make(DecisionKind kind, std::string text) {
    if (text::trim(text).empty()) throw std::invalid_argument("decision text must not be blank");
    return Decision{kind, std::move(text)};
}

Decision Decision::think(std::string text) { return make(DecisionKind::Think, std::move(text)); }
Decision Decision::speak(std::string text) { return make(DecisionKind::Speak, std::move(text)); }
Decision Decision::act(std::string text) { return make(DecisionKind::Act, std::move(text)); }

Timestamp now_ms() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string_view Event::kind() const {
    if (const auto* d = std::get_if<Decision>(&payload)) return to_string(d->kind);
    if (std::holds_alternative<Observation>(payload)) return "observation";
    return "reply";
}

const std::string& Event::text() const {
    return std::visit([](const auto& p) -> const std::string& { return p.text; }, payload);
}

std::string TaskGoal::describe() const {
    switch (type) {
        case TaskType::Pick: return "put some " + object_class + " on " + target_receptacle_class + ".";
        case TaskType::Clean:
            return "clean some " + object_class + " and put it in " + target_receptacle_class + ".";
        case TaskType::Heat:
            return "heat some " + object_class + " and put it in " + target_receptacle_class + ".";
        case TaskType::Cool:
            return "cool some " + object_class + " and put it in " + target_receptacle_class + ".";
        case TaskType::Examine: return "look at " + object_class + " under the desklamp.";
        case TaskType::PickTwo: return "put two " + object_class + " in " + target_receptacle_class + ".";
    }
    return {};
}

void TaskGoal::validate() const {
    if (object_class.empty()) throw std::invalid_argument("task goal needs an object class");
    if (target_receptacle_class.empty()) throw std::invalid_argument("task goal needs a target class");
    if (type == TaskType::Examine && target_receptacle_class != "desklamp")
        throw std::invalid_argument("examine goals must target the desklamp");
}

Episode::Episode(std::string episode_id, TaskGoal task, std::uint64_t seed, std::string initial_observation,
                 std::optional<Persona> persona)
    : episode_id_(std::move(episode_id)),
      task_(std::move(task)),
      seed_(seed),
      initial_observation_(std::move(initial_observation)),
      persona_(persona) {}

std::size_t Episode::decisions() const {
    return counters_.think_count + counters_.speak_count + counters_.act_count;
}

void Episode::append(Event event) {
    if (outcome_) throw std::logic_error("episode already finished");
    const Decision* last = events_.empty() ? nullptr : events_.back().decision();

    if (event.source == Source::Agent) {
        const Decision* d = event.decision();
        if (d == nullptr) throw std::logic_error("agent events must carry a decision");
        if (last != nullptr) throw std::logic_error("previous decision has no response yet");
        if (event.step != decisions()) throw std::logic_error("decision steps must increase from 0");
        if (event.invalid) throw std::logic_error("only environment events can be invalid");
        switch (d->kind) {
            case DecisionKind::Think: ++counters_.think_count; break;
            case DecisionKind::Speak: ++counters_.speak_count; break;
            case DecisionKind::Act: ++counters_.act_count; break;
        }
        events_.push_back(std::move(event));
        return;
    }

    if (last == nullptr) throw std::logic_error("responses must follow a decision");
    if (event.step != events_.back().step) throw std::logic_error("response step must match its decision");
    if (event.source == Source::User) {
        if (!std::holds_alternative<UserResponse>(event.payload))
            throw std::logic_error("user events must carry a reply");
        if (last->kind != DecisionKind::Speak) throw std::logic_error("user replies answer Speak only");
        if (event.invalid) throw std::logic_error("only environment events can be invalid");
    } else {
        if (!std::holds_alternative<Observation>(event.payload))
            throw std::logic_error("environment events must carry an observation");
        if (last->kind == DecisionKind::Speak) throw std::logic_error("Speak is answered by the user");
        if (event.invalid && last->kind != DecisionKind::Act)
            throw std::logic_error("invalid flag is only allowed after an Act");
        if (event.invalid) ++counters_.invalid_count;
    }
    events_.push_back(std::move(event));
}

void Episode::set_outcome(Outcome outcome) {
    if (outcome_) throw std::logic_error("episode outcome already set");
    outcome_ = outcome;
}

Counters recount(const Episode& episode) {
    Counters c;
    for (const Event& e : episode.events()) {
        if (const Decision* d = e.decision()) {
            switch (d->kind) {
                case DecisionKind::Think: ++c.think_count; break;
                case DecisionKind::Speak: ++c.speak_count; break;
                case DecisionKind::Act: ++c.act_count; break;
            }
        } else if (e.invalid) {
            ++c.invalid_count;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// String tables

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s) {
    for (const auto& [value, name] : table)
        if (name == s) return value;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [v, name] : table)
        if (v == value) return name;
    return "?";
}

constexpr std::array<std::pair<DecisionKind, std::string_view>, 3> kDecisionKinds{{
    {DecisionKind::Think, "think"},
    {DecisionKind::Speak, "speak"},
    {DecisionKind::Act, "act"},
}};

constexpr std::array<std::pair<Persona, std::string_view>, 5> kPersonas{{
    {Persona::HelpfulKnowledgeable, "helpful"},
    {Persona::HelpfulPerturbed, "perturbed"},
    {Persona::Unhelpful, "unhelpful"},
    {Persona::Human, "human"},
    {Persona::LLM, "llm"},
}};

constexpr std::array<std::pair<Source, std::string_view>, 3> kSources{{
    {Source::Agent, "agent"},
    {Source::Environment, "environment"},
    {Source::User, "user"},
}};

constexpr std::array<std::pair<TaskType, std::string_view>, 6> kTaskTypes{{
    {TaskType::Pick, "pick"},
    {TaskType::Clean, "clean"},
    {TaskType::Heat, "heat"},
    {TaskType::Cool, "cool"},
    {TaskType::Examine, "examine"},
    {TaskType::PickTwo, "pick_two"},
}};

constexpr std::array<std::pair<Outcome, std::string_view>, 4> kOutcomes{{
    {Outcome::Success, "success"},
    {Outcome::Failure, "failure"},
    {Outcome::BudgetExhausted, "budget_exhausted"},
    {Outcome::Aborted, "aborted"},
}};

}  // namespace

std::string_view to_string(DecisionKind kind) { return name_of(kDecisionKinds, kind); }
std::string_view to_string(Persona persona) { return name_of(kPersonas, persona); }
std::string_view to_string(Source source) { return name_of(kSources, source); }
std::string_view to_string(TaskType type) { return name_of(kTaskTypes, type); }
std::string_view to_string(Outcome outcome) { return name_of(kOutcomes, outcome); }

std::optional<DecisionKind> decision_kind_from_string(std::string_view s) { return lookup(kDecisionKinds, s); }
std::optional<Persona> persona_from_string(std::string_view s) { return lookup(kPersonas, s); }
std::optional<Source> source_from_string(std::string_view s) { return lookup(kSources, s); }
std::optional<TaskType> task_type_from_string(std::string_view s) { return lookup(kTaskTypes, s); }
std::optional<Outcome> outcome_from_string(std::string_view s) { return lookup(kOutcomes, s); }

std::string format_rfc3339(Timestamp ts) {
    const auto since_epoch = ts.time_since_epoch().count();
    auto secs = static_cast<std::time_t>(since_epoch / 1000);
    auto millis = static_cast<int>(since_epoch % 1000);
    if (millis < 0) {
        millis += 1000;
        --secs;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
    return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view s) {
    const std::string str(s);
    std::tm tm{};
    int millis = 0;
    int consumed = 0;
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                    &tm.tm_min, &tm.tm_sec, &consumed) != 6)
        return std::nullopt;
    std::string_view rest = s.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        int digits = 0;
        while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
            if (digits < 3) millis = millis * 10 + (rest.front() - '0');
            ++digits;
            rest.remove_prefix(1);
        }
        for (; digits < 3; ++digits) millis *= 10;
    }
    if (rest != "Z") return std::nullopt;
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    const std::time_t secs = timegm(&tm);
    return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + millis));
}

}  // namespace respact
