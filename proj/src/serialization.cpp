#include "respact/serialization.hpp"

#include <fstream>
#include <sstream>

namespace respact {

namespace {

template <typename T>
T required(const Json& j, const char* key) {
    if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad field '") + key + "': " + e.what());
    }
}

Json counters_json(const Counters& c) {
    return Json{{"think", c.think_count}, {"speak", c.speak_count}, {"act", c.act_count}, {"invalid", c.invalid_count}};
}

Counters counters_from_json(const Json& j) {
    return Counters{required<std::size_t>(j, "think"), required<std::size_t>(j, "speak"),
                    required<std::size_t>(j, "act"), required<std::size_t>(j, "invalid")};
}

}  // namespace

Json to_json(const TaskGoal& goal) {
    return Json{{"type", to_string(goal.type)},
                {"object", goal.object_class},
                {"target", goal.target_receptacle_class},
                {"text", goal.describe()}};
}

TaskGoal task_goal_from_json(const Json& j) {
    const auto type = task_type_from_string(required<std::string>(j, "type"));
    if (!type) throw FormatError("unknown task type");
    TaskGoal goal{*type, required<std::string>(j, "object"), required<std::string>(j, "target")};
    try {
        goal.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    return goal;
}

Json to_json(const Event& event) {
    return Json{{"step", event.step},
                {"source", to_string(event.source)},
                {"kind", event.kind()},
                {"text", event.text()},
                {"invalid", event.invalid},
                {"ts", format_rfc3339(event.ts)}};
}

Event event_from_json(const Json& j, Persona reply_persona) {
    Event e;
    e.step = required<std::size_t>(j, "step");
    const auto source = source_from_string(required<std::string>(j, "source"));
    if (!source) throw FormatError("unknown event source");
    e.source = *source;
    const auto kind = required<std::string>(j, "kind");
    auto text = required<std::string>(j, "text");
    e.invalid = required<bool>(j, "invalid");
    const auto ts = parse_rfc3339(required<std::string>(j, "ts"));
    if (!ts) throw FormatError("bad timestamp");
    e.ts = *ts;

    if (*source == Source::Agent) {
        const auto dk = decision_kind_from_string(kind);
        if (!dk) throw FormatError("unknown decision kind '" + kind + "'");
        try {
            e.payload = Decision::make(*dk, std::move(text));
        } catch (const std::invalid_argument& err) {
            throw FormatError(err.what());
        }
    } else if (*source == Source::User) {
        if (kind != "reply") throw FormatError("user events must be replies");
        e.payload = UserResponse{std::move(text), reply_persona};
    } else {
        if (kind != "observation") throw FormatError("environment events must be observations");
        e.payload = Observation{std::move(text)};
    }
    return e;
}

Json episode_header_json(const Episode& episode) {
    Json j{{"episode_id", episode.episode_id()},
           {"task", to_json(episode.task())},
           {"seed", episode.seed()},
           {"initial_observation", episode.initial_observation()}};
    j["persona"] = episode.persona() ? Json(to_string(*episode.persona())) : Json(nullptr);
    return j;
}

Json episode_trailer_json(const Episode& episode) {
    Json j{{"episode_id", episode.episode_id()}, {"counters", counters_json(episode.counters())}};
    j["outcome"] = episode.outcome() ? Json(to_string(*episode.outcome())) : Json(nullptr);
    return j;
}

void write_episode_jsonl(std::ostream& out, const Episode& episode) {
    out << episode_header_json(episode).dump() << '\n';
    for (const Event& e : episode.events()) out << to_json(e).dump() << '\n';
    if (episode.outcome()) out << episode_trailer_json(episode).dump() << '\n';
}

std::string episode_to_jsonl(const Episode& episode) {
    std::ostringstream out;
    write_episode_jsonl(out, episode);
    return out.str();
}

std::vector<Episode> read_episodes_jsonl(std::istream& in) {
    std::vector<Episode> episodes;
    std::optional<Episode> current;
    Persona reply_persona = Persona::Human;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            if (j.contains("task")) {
                if (current) episodes.push_back(std::move(*current));
                std::optional<Persona> persona;
                if (j.contains("persona") && !j["persona"].is_null()) {
                    persona = persona_from_string(j["persona"].get<std::string>());
                    if (!persona) throw FormatError("unknown persona");
                }
                reply_persona = persona.value_or(Persona::Human);
                current.emplace(required<std::string>(j, "episode_id"), task_goal_from_json(j["task"]),
                                required<std::uint64_t>(j, "seed"), required<std::string>(j, "initial_observation"),
                                persona);
            } else if (j.contains("counters")) {
                if (!current) throw FormatError("outcome line without an episode header");
                if (required<std::string>(j, "episode_id") != current->episode_id())
                    throw FormatError("outcome line belongs to another episode");
                if (counters_from_json(j["counters"]) != current->counters())
                    throw FormatError("stored counters disagree with the event log");
                if (!j["outcome"].is_null()) {
                    const auto outcome = outcome_from_string(j["outcome"].get<std::string>());
                    if (!outcome) throw FormatError("unknown outcome");
                    current->set_outcome(*outcome);
                }
                episodes.push_back(std::move(*current));
                current.reset();
            } else {
                if (!current) throw FormatError("event line without an episode header");
                current->append(event_from_json(j, reply_persona));
            }
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::logic_error& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (current) episodes.push_back(std::move(*current));
    return episodes;
}

std::vector<Episode> read_episodes_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return read_episodes_jsonl(in);
}

}  // namespace respact
