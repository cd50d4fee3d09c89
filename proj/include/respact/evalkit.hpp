#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "respact/core.hpp"
#include "respact/dialogue_schema.hpp"
#include "respact/expected.hpp"
#include "respact/household.hpp"
#include "respact/llm_client.hpp"
#include "respact/orchestrator.hpp"
#include "respact/policies.hpp"
#include "respact/prompts.hpp"
#include "respact/serialization.hpp"

namespace respact::eval {

struct EmptySample {
    std::string what;
};

struct MismatchedTaskLists {
    std::string detail;
};

// Percentage of Success outcomes.
Expected<double, EmptySample> success_rate(std::span<const Outcome> outcomes);

struct Cell {
    std::size_t successes = 0;
    std::size_t total = 0;

    double rate() const { return total == 0 ? 0.0 : 100.0 * static_cast<double>(successes) / static_cast<double>(total); }
    friend bool operator==(const Cell&, const Cell&) = default;
};

// Speak turns per successful episode; population standard deviation.
struct SpeakStats {
    double mean = 0;
    double stddev = 0;
    std::size_t episodes = 0;

    friend bool operator==(const SpeakStats&, const SpeakStats&) = default;
};

Expected<SpeakStats, EmptySample> speak_turn_stats(std::span<const Episode> episodes);

// Share of all decisions, in percent. Acts that failed count as invalid only.
struct ActionDistribution {
    double think = 0;
    double speak = 0;
    double act = 0;
    double invalid = 0;
    std::size_t decisions = 0;

    friend bool operator==(const ActionDistribution&, const ActionDistribution&) = default;
};

ActionDistribution action_distribution(std::span<const Episode> episodes);

// invalid_count -> number of episodes
std::map<std::size_t, std::size_t> invalid_histogram(std::span<const Episode> episodes);

struct MetricsReport {
    std::size_t episodes = 0;
    std::map<TaskType, Cell> per_task;  // only task types that occurred
    Cell overall;
    std::map<Outcome, std::size_t> outcomes;
    ActionDistribution actions;
    std::map<std::size_t, std::size_t> invalid_histogram;
    std::optional<SpeakStats> speak_turns;  // absent without successes
    dialogue::ActHistogram dialog_acts;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport compute_report(std::span<const Episode> episodes);
// Same as compute_report over the episodes stored in a JSONL log.
MetricsReport recompute_report(const std::filesystem::path& jsonl);

// Average and best-of-k success rates over runs that used different prompt
// packs on the same task list.
struct PackAggregate {
    std::size_t packs = 0;
    std::map<TaskType, double> avg;
    std::map<TaskType, double> best;
    double avg_overall = 0;
    // Best per-task rates weighted by task counts.
    double best_overall = 0;
};

Expected<PackAggregate, MismatchedTaskLists> aggregate_packs(std::span<const MetricsReport> reports);

// sum(rate[t] * count[t]) / sum(count[t]) over the task types in `counts`.
double weighted_rate(const std::map<TaskType, double>& rates, const std::map<TaskType, std::size_t>& counts);

Json to_json(const MetricsReport& report);
Json to_json(const PackAggregate& agg);
// task,successes,total,success_rate rows plus an "all" row.
std::string to_csv(const MetricsReport& report);

// ---------------------------------------------------------------------------
// Task lists

struct TaskMix {
    std::vector<std::pair<TaskType, std::size_t>> counts;

    std::size_t total() const;
    // 24 pick, 31 clean, 23 heat, 21 cool, 18 examine, 17 pick_two
    static TaskMix benchmark();
    // "table1-mix", a single task type, or "pick=3,heat=2"
    static Expected<TaskMix, std::string> parse(std::string_view spec);
};

struct TaskSpec {
    std::size_t index = 0;
    TaskGoal goal;
    std::string layout;
    std::uint64_t seed = 0;
};

// Deterministic in (mix, layout, episodes, seed). "auto" picks, per task, a
// built-in layout that supports the task type. Without `episodes` the list
// has mix.total() entries; otherwise the shuffled mix is cut or repeated.
Expected<std::vector<TaskSpec>, std::string> make_task_list(const TaskMix& mix, const std::string& layout,
                                                            std::optional<std::size_t> episodes, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Suites

struct PolicySpec {
    enum class Kind { Oracle, Scripted, LLM };
    Kind kind = Kind::Scripted;
    prompts::PromptStyle style = prompts::PromptStyle::ReSpAct;
    std::optional<std::size_t> permutation;  // LLM only; nullopt runs every pack

    // oracle | scripted-respact | llm:<style>[:<perm>|:all]
    static Expected<PolicySpec, std::string> parse(std::string_view spec);
    std::string str() const;
};

struct SuiteConfig {
    std::string layout = "auto";
    TaskMix mix = TaskMix::benchmark();
    std::optional<std::size_t> episodes;
    PolicySpec policy;
    Persona persona = Persona::HelpfulKnowledgeable;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    LoopConfig loop;
    policies::ScriptedConfig scripted;
    llm::ChatConfig chat;
    std::filesystem::path data_dir = prompts::default_data_dir();
};

struct SuiteHooks {
    // Replaces the HTTP chat client (tests, offline runs).
    llm::ChatClient* chat = nullptr;
    // Human persona I/O; defaults to stdin/stdout.
    std::istream* human_in = nullptr;
    std::ostream* human_out = nullptr;
    // JSONL log, written in task order as episodes complete.
    std::ostream* jsonl = nullptr;
    // Checked between episodes; set to stop early.
    const std::atomic<bool>* stop = nullptr;
    // Called after each finished episode (from worker threads, serialized).
    std::function<void(const Episode&)> progress;
};

struct SuiteResult {
    std::vector<Episode> episodes;
    MetricsReport report;
    std::vector<MetricsReport> per_pack;  // LLM runs over several packs
    std::optional<PackAggregate> packs;
    bool interrupted = false;
};

// One world per task, generated from the task's layout and seed.
Expected<env::GeneratedWorld, std::string> build_world(const TaskSpec& task);

Expected<SuiteResult, std::string> run_suite(const SuiteConfig& cfg, const SuiteHooks& hooks = {});

}  // namespace respact::eval
