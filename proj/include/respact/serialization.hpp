#pragma once

// JSON Lines episode logs.
//
// One episode is written as:
//   {"episode_id":..,"task":{..},"seed":..,"persona":..,"initial_observation":..}
//   {"step":..,"source":..,"kind":..,"text":..,"invalid":..,"ts":..}   (one per event)
//   {"episode_id":..,"outcome":..,"counters":{..}}
// A file may hold any number of episodes back to back.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "respact/core.hpp"

namespace respact {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json to_json(const TaskGoal& goal);
TaskGoal task_goal_from_json(const Json& j);

Json to_json(const Event& event);
// Event records carry no persona; replies get `reply_persona`.
Event event_from_json(const Json& j, Persona reply_persona = Persona::Human);

Json episode_header_json(const Episode& episode);
Json episode_trailer_json(const Episode& episode);

void write_episode_jsonl(std::ostream& out, const Episode& episode);
std::string episode_to_jsonl(const Episode& episode);

// Throws FormatError on malformed input. A trailing episode without its
// outcome line is returned with no outcome.
std::vector<Episode> read_episodes_jsonl(std::istream& in);
std::vector<Episode> read_episodes_jsonl_file(const std::string& path);

}  // namespace respact
