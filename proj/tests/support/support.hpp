#pragma once

// Fixtures, generators and brute-force references shared by the unit and
// acceptance tests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "respact/core.hpp"
#include "respact/grammar.hpp"
#include "respact/household.hpp"
#include "respact/prompts.hpp"

namespace respact::testing {

std::filesystem::path data_dir();

// Bedroom with three creditcards on the countertop, and the annotated
// exemplar that solves it.
env::WorldState creditcard_world();
TaskGoal creditcard_goal();
prompts::Transcript creditcard_transcript();

// One instance of each of the eleven productions, then every action line of
// the two annotated creditcard trajectories (with and without dialogue).
const std::vector<std::string>& production_examples();
const std::vector<std::string>& annotated_action_lines();

// A random well-formed action over a small vocabulary of classes.
grammar::EnvAction random_action(std::mt19937_64& rng);

// Every well-formed action over the entities of `world` (plus look).
std::vector<grammar::EnvAction> all_actions(const env::WorldState& world);

// Shortest plan length by breadth-first search over step() with no pruning.
// nullopt when the goal is unreachable within `state_limit` states.
std::optional<std::size_t> unpruned_bfs(const env::WorldState& world, const TaskGoal& goal,
                                        std::size_t state_limit = 200'000);

// A tiny random world that holds what `type` needs (three to five receptacles,
// two to four objects). Small enough for unpruned_bfs.
struct SmallWorld {
    env::WorldState world;
    TaskGoal goal;
};
SmallWorld random_small_world(std::mt19937_64& rng, TaskType type);

struct GeneratedPair {
    std::string layout;
    TaskGoal goal;
    std::uint64_t seed;
    env::GeneratedWorld gen;
};
// `count` generated (world, goal) pairs cycling through the six task types.
std::vector<GeneratedPair> generated_pairs(std::size_t count, std::uint64_t seed);

// Speak utterances with the dialogue act each one is meant to carry.
struct LabelledUtterance {
    std::string text;
    std::string act;
};
const std::vector<LabelledUtterance>& utterance_pool();

// A finished episode with random decisions, validity flags and outcome.
Episode synthetic_episode(std::mt19937_64& rng, std::string id, std::optional<TaskType> type = std::nullopt);

}  // namespace respact::testing
