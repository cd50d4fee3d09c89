#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "respact/evalkit.hpp"
#include "support.hpp"

using namespace respact;
using namespace respact::eval;

namespace {

MetricsReport report_with(std::map<TaskType, Cell> cells) {
    MetricsReport r;
    for (const auto& [t, c] : cells) {
        r.per_task[t] = c;
        r.overall.successes += c.successes;
        r.overall.total += c.total;
    }
    return r;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("respact-" + std::to_string(::getpid()) + "-" + name);
}

}  // namespace

TEST(Evalkit, SuccessRate) {
    const std::vector<Outcome> o = {Outcome::Success, Outcome::Failure, Outcome::Success, Outcome::Aborted};
    EXPECT_DOUBLE_EQ(*success_rate(o), 50.0);
    EXPECT_FALSE(success_rate({}));
}

TEST(Evalkit, SpeakStatsUseSuccessfulEpisodesOnly) {
    std::mt19937_64 rng(1);
    std::vector<Episode> eps;
    for (int i = 0; i < 80; ++i) eps.push_back(respact::testing::synthetic_episode(rng, std::to_string(i)));
    std::vector<double> xs;
    for (const auto& e : eps)
        if (e.outcome() == Outcome::Success) xs.push_back(static_cast<double>(e.counters().speak_count));
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const auto s = speak_turn_stats(eps);
    ASSERT_TRUE(s);
    EXPECT_NEAR(s->mean, mean, 1e-12);
    EXPECT_NEAR(s->stddev, std::sqrt(var / static_cast<double>(xs.size())), 1e-12);
    EXPECT_EQ(s->episodes, xs.size());

    std::vector<Episode> failures;
    for (auto& e : eps)
        if (e.outcome() != Outcome::Success) failures.push_back(e);
    EXPECT_FALSE(speak_turn_stats(failures));
}

// Published best-of-6 per-task rates weighted by the 134-game task counts.
TEST(Evalkit, BenchmarkWeightingOfPublishedCells) {
    const std::map<TaskType, double> best = {{TaskType::Pick, 82.6}, {TaskType::Clean, 96.7},
                                             {TaskType::Heat, 100.0}, {TaskType::Cool, 77.2},
                                             {TaskType::Examine, 94.4}, {TaskType::PickTwo, 64.7}};
    std::map<TaskType, std::size_t> counts;
    for (const auto& [t, n] : TaskMix::benchmark().counts) counts[t] = n;
    EXPECT_EQ(TaskMix::benchmark().total(), 134u);
    const double overall = weighted_rate(best, counts);
    EXPECT_NEAR(overall, 11700.4 / 134.0, 1e-9);
    EXPECT_NEAR(overall, 87.3, 0.5);
}

TEST(Evalkit, AggregatePacks) {
    const std::vector<MetricsReport> reports = {
        report_with({{TaskType::Pick, {1, 2}}, {TaskType::Heat, {3, 4}}}),
        report_with({{TaskType::Pick, {2, 2}}, {TaskType::Heat, {0, 4}}}),
        report_with({{TaskType::Pick, {0, 2}}, {TaskType::Heat, {2, 4}}}),
    };
    const auto agg = aggregate_packs(reports);
    ASSERT_TRUE(agg);
    EXPECT_EQ(agg->packs, 3u);
    EXPECT_NEAR(agg->avg.at(TaskType::Pick), 50.0, 1e-12);
    EXPECT_NEAR(agg->avg.at(TaskType::Heat), 125.0 / 3.0, 1e-12);
    EXPECT_NEAR(agg->best.at(TaskType::Pick), 100.0, 1e-12);
    EXPECT_NEAR(agg->best.at(TaskType::Heat), 75.0, 1e-12);
    EXPECT_NEAR(agg->avg_overall, (400.0 / 6 + 200.0 / 6 + 200.0 / 6) / 3, 1e-12);
    EXPECT_NEAR(agg->best_overall, (100.0 * 2 + 75.0 * 4) / 6, 1e-12);
}

TEST(Evalkit, AggregateRejectsDifferentTaskLists) {
    const std::vector<MetricsReport> reports = {report_with({{TaskType::Pick, {1, 2}}}),
                                                report_with({{TaskType::Pick, {1, 3}}})};
    EXPECT_FALSE(aggregate_packs(reports));
    EXPECT_FALSE(aggregate_packs({}));
}

TEST(Evalkit, TaskMixParsing) {
    EXPECT_EQ(TaskMix::parse("table1-mix")->total(), 134u);
    EXPECT_EQ(TaskMix::parse("heat")->total(), 1u);
    const auto m = TaskMix::parse("pick=3,heat=2");
    ASSERT_TRUE(m);
    EXPECT_EQ(m->total(), 5u);
    EXPECT_FALSE(TaskMix::parse("juggle=3"));
    EXPECT_FALSE(TaskMix::parse("pick=x"));
    EXPECT_FALSE(TaskMix::parse(""));
}

TEST(Evalkit, PolicySpecParsing) {
    EXPECT_EQ(PolicySpec::parse("oracle")->kind, PolicySpec::Kind::Oracle);
    EXPECT_EQ(PolicySpec::parse("scripted-respact")->kind, PolicySpec::Kind::Scripted);
    const auto all = PolicySpec::parse("llm:react:all");
    ASSERT_TRUE(all);
    EXPECT_EQ(all->style, prompts::PromptStyle::ReAct);
    EXPECT_FALSE(all->permutation);
    EXPECT_EQ(PolicySpec::parse("llm:respact-schema:4")->permutation, 4u);
    EXPECT_EQ(PolicySpec::parse("llm:respact:4")->str(), "llm:respact:4");
    EXPECT_FALSE(PolicySpec::parse("llm:reflexion"));
    EXPECT_FALSE(PolicySpec::parse("random"));
}

TEST(Evalkit, TaskListsAreDeterministicAndSized) {
    const auto a = make_task_list(TaskMix::benchmark(), "auto", std::nullopt, 7);
    const auto b = make_task_list(TaskMix::benchmark(), "auto", std::nullopt, 7);
    ASSERT_TRUE(a && b);
    ASSERT_EQ(a->size(), 134u);
    for (std::size_t i = 0; i < a->size(); ++i) {
        EXPECT_EQ((*a)[i].goal, (*b)[i].goal);
        EXPECT_EQ((*a)[i].seed, (*b)[i].seed);
    }
    std::map<TaskType, std::size_t> counts;
    for (const auto& t : *a) ++counts[t.goal.type];
    for (const auto& [t, n] : TaskMix::benchmark().counts) EXPECT_EQ(counts[t], n);
    EXPECT_EQ(make_task_list(TaskMix::benchmark(), "auto", 10, 7)->size(), 10u);
    EXPECT_EQ(make_task_list(*TaskMix::parse("pick=2"), "auto", 5, 7)->size(), 5u);
    EXPECT_FALSE(make_task_list(*TaskMix::parse("heat=1"), "bedroom-small", std::nullopt, 7));
    EXPECT_FALSE(make_task_list(*TaskMix::parse("pick=1"), "castle", std::nullopt, 7));
}

TEST(Evalkit, RecomputedReportEqualsTheLiveOne) {
    SuiteConfig cfg;
    cfg.mix = *TaskMix::parse("pick=3,clean=2,examine=2,pick_two=2");
    cfg.seed = 5;
    cfg.workers = 3;
    const auto path = temp_file("live.jsonl");
    SuiteResult result;
    {
        std::ofstream out(path);
        SuiteHooks hooks;
        hooks.jsonl = &out;
        auto r = run_suite(cfg, hooks);
        ASSERT_TRUE(r) << r.error();
        result = std::move(*r);
    }
    EXPECT_EQ(result.report.episodes, 9u);
    EXPECT_EQ(recompute_report(path), result.report);
    std::filesystem::remove(path);
}

TEST(Evalkit, WorkersDoNotChangeResults) {
    SuiteConfig cfg;
    cfg.mix = *TaskMix::parse("pick=2,cool=2,pick_two=2");
    cfg.persona = Persona::Unhelpful;
    cfg.seed = 9;
    std::ostringstream one, many;
    SuiteHooks h1, h2;
    h1.jsonl = &one;
    h2.jsonl = &many;
    auto a = run_suite(cfg, h1);
    cfg.workers = 4;
    auto b = run_suite(cfg, h2);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(a->report, b->report);
    // Timestamps differ; compare the outcome lines.
    auto trailers = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream in(s);
        for (std::string l; std::getline(in, l);)
            if (l.find("\"outcome\"") != std::string::npos) out.push_back(l);
        return out;
    };
    EXPECT_EQ(trailers(one.str()), trailers(many.str()));
}

TEST(Evalkit, StopFlagInterrupts) {
    SuiteConfig cfg;
    cfg.mix = *TaskMix::parse("pick=4");
    std::atomic<bool> stop{true};
    SuiteHooks hooks;
    hooks.stop = &stop;
    auto r = run_suite(cfg, hooks);
    ASSERT_TRUE(r);
    EXPECT_TRUE(r->interrupted);
    EXPECT_LT(r->episodes.size(), 4u);
}

TEST(Evalkit, LlmRunCoversEveryPack) {
    SuiteConfig cfg;
    cfg.mix = *TaskMix::parse("pick=2");
    cfg.policy = *PolicySpec::parse("llm:respact:all");
    cfg.loop.max_steps = 4;
    cfg.data_dir = respact::testing::data_dir();
    std::size_t calls = 0;
    llm::FunctionChatClient client([&](const std::vector<llm::ChatMessage>& m) {
        ++calls;
        EXPECT_EQ(m.front().role, "system");
        return std::string("Act: look");
    });
    SuiteHooks hooks;
    hooks.chat = &client;
    auto r = run_suite(cfg, hooks);
    ASSERT_TRUE(r) << r.error();
    EXPECT_EQ(r->per_pack.size(), 6u);
    ASSERT_TRUE(r->packs);
    EXPECT_EQ(r->packs->packs, 6u);
    EXPECT_EQ(r->episodes.size(), 12u);
    EXPECT_EQ(calls, 12u * 4u);
    EXPECT_DOUBLE_EQ(r->packs->best_overall, 0.0);
}

TEST(Evalkit, HumanPersonaReadsTheStream) {
    SuiteConfig cfg;
    cfg.mix = *TaskMix::parse("pick=1");
    cfg.persona = Persona::Human;
    cfg.workers = 4;
    std::istringstream in("");
    std::ostringstream out;
    SuiteHooks hooks;
    hooks.human_in = &in;
    hooks.human_out = &out;
    auto r = run_suite(cfg, hooks);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->episodes.front().outcome(), Outcome::Aborted);  // stdin closed at the first question
    EXPECT_NE(out.str().find("Where do you suggest"), std::string::npos);
}

TEST(Evalkit, CsvAndJsonShapes) {
    const auto r = report_with({{TaskType::Pick, {1, 2}}});
    EXPECT_EQ(to_csv(r), "task,successes,total,success_rate\npick,1,2,50\nall,1,2,50\n");
    const Json j = to_json(r);
    EXPECT_EQ(j["per_task"]["pick"]["success_rate"], 50.0);
    EXPECT_TRUE(j["speak_turns"].is_null());
}
