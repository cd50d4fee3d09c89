#include <gtest/gtest.h>

#include "respact/orchestrator.hpp"
#include "respact/policies.hpp"
#include "respact/user_sim.hpp"
#include "support.hpp"

using namespace respact;

namespace {

class ThrowingPolicy : public PolicyPort {
public:
    std::optional<Decision> decide(const Episode&) override { throw PolicyFailure("endpoint down"); }
};

class SilentUser : public UserPort {
public:
    UserResponse respond(const Episode&, const std::string&) override { throw UserChannelClosed("gone"); }
};

class RecordingSink : public EventSink {
public:
    void on_event(const Episode&, const Event& e) override { events.push_back(e); }
    void on_finish(const Episode& ep) override { finished = ep.outcome(); }
    std::vector<Event> events;
    std::optional<Outcome> finished;
};

users::ReplayUser nobody() { return users::ReplayUser({}); }

}  // namespace

TEST(Orchestrator, LookForeverHitsTheStepBudgetExactly) {
    for (std::size_t budget : {1u, 7u, 50u}) {
        policies::ConstantPolicy look(Decision::act("look"));
        auto user = nobody();
        LoopConfig cfg;
        cfg.max_steps = budget;
        const Episode ep = run_episode(respact::testing::creditcard_world(), respact::testing::creditcard_goal(), look, user, cfg);
        EXPECT_EQ(ep.outcome(), Outcome::BudgetExhausted);
        EXPECT_EQ(ep.decisions(), budget);
        EXPECT_EQ(ep.counters().invalid_count, 0u);
    }
}

TEST(Orchestrator, GibberishStopsAfterTheInvalidStreak) {
    policies::ConstantPolicy gibberish(Decision::act("xyzzy plugh"));
    auto user = nobody();
    LoopConfig cfg;
    cfg.max_consecutive_invalid = 4;
    const auto world = respact::testing::creditcard_world();
    RecordingSink sink;
    EpisodeRunner runner("g", world, respact::testing::creditcard_goal(), 0, gibberish, &user, cfg, &sink);
    runner.run();
    EXPECT_EQ(runner.episode().outcome(), Outcome::BudgetExhausted);
    EXPECT_EQ(runner.episode().decisions(), 4u);
    EXPECT_EQ(runner.episode().counters().invalid_count, 4u);
    EXPECT_EQ(runner.world(), world);
    for (const Event& e : runner.episode().events())
        if (e.source == Source::Environment) EXPECT_EQ(e.text(), "Nothing happens.");
    EXPECT_EQ(sink.events, runner.episode().events());
    EXPECT_EQ(sink.finished, Outcome::BudgetExhausted);
}

TEST(Orchestrator, ValidActResetsTheStreak) {
    policies::ReplayPolicy p({Decision::act("bad"), Decision::act("bad"), Decision::act("look"), Decision::act("bad"),
                              Decision::act("bad")});
    auto user = nobody();
    LoopConfig cfg;
    cfg.max_consecutive_invalid = 3;
    const Episode ep = run_episode(respact::testing::creditcard_world(), respact::testing::creditcard_goal(), p, user, cfg);
    EXPECT_EQ(ep.outcome(), Outcome::Failure);  // replay ran out first
    EXPECT_EQ(ep.counters().invalid_count, 4u);
}

TEST(Orchestrator, OraclePlanSucceedsWithoutSpeaking) {
    for (const auto& pair : respact::testing::generated_pairs(12, 8)) {
        policies::OraclePolicy oracle(pair.gen.plan);
        auto user = nobody();
        const Episode ep = run_episode(pair.gen.world, pair.goal, oracle, user);
        EXPECT_EQ(ep.outcome(), Outcome::Success) << pair.goal.describe();
        EXPECT_EQ(ep.counters().act_count, pair.gen.plan.size());
        EXPECT_EQ(ep.counters().speak_count, 0u);
        EXPECT_EQ(ep.counters(), recount(ep));
    }
}

TEST(Orchestrator, RouteThinkAndAct) {
    auto w = respact::testing::creditcard_world();
    EXPECT_EQ(route_environment(Decision::think("hmm"), 0, w).text(), "OK.");
    const Event bad = route_environment(Decision::act("open cabinet 99"), 1, w);
    EXPECT_TRUE(bad.invalid);
    EXPECT_EQ(bad.text(), "Nothing happens.");
    EXPECT_EQ(w, respact::testing::creditcard_world());
    const Event good = route_environment(Decision::act("go to bed 1"), 2, w);
    EXPECT_FALSE(good.invalid);
    EXPECT_EQ(w.agent_at, "bed 1");
}

TEST(Orchestrator, SpeakNeverTouchesTheWorld) {
    policies::ReplayPolicy p({Decision::speak("Where is the creditcard?"), Decision::speak("Anything else?")});
    users::ReplayUser user({"On the countertop.", "No."});
    const auto world = respact::testing::creditcard_world();
    EpisodeRunner runner("s", world, respact::testing::creditcard_goal(), 0, p, &user);
    runner.run();
    EXPECT_EQ(runner.world().fingerprint(), world.fingerprint());
    EXPECT_EQ(runner.episode().counters().speak_count, 2u);
    EXPECT_EQ(runner.episode().events()[1].text(), "On the countertop.");
}

TEST(Orchestrator, PolicyFailureAborts) {
    ThrowingPolicy p;
    auto user = nobody();
    const Episode ep = run_episode(respact::testing::creditcard_world(), respact::testing::creditcard_goal(), p, user);
    EXPECT_EQ(ep.outcome(), Outcome::Aborted);
    EXPECT_TRUE(ep.events().empty());
}

TEST(Orchestrator, ClosedUserChannelAborts) {
    policies::ConstantPolicy ask(Decision::speak("Where?"));
    SilentUser user;
    const Episode ep = run_episode(respact::testing::creditcard_world(), respact::testing::creditcard_goal(), ask, user);
    EXPECT_EQ(ep.outcome(), Outcome::Aborted);
}

TEST(Orchestrator, RunnerPausesForAReply) {
    policies::ReplayPolicy p({Decision::think("plan"), Decision::speak("Where?"), Decision::act("go to countertop 1")});
    EpisodeRunner runner("r", respact::testing::creditcard_world(), respact::testing::creditcard_goal(), 0, p, nullptr);
    EXPECT_THROW(runner.reply({"early", Persona::Human}), std::logic_error);
    EXPECT_EQ(runner.run(), RunState::AwaitingUser);
    EXPECT_EQ(runner.step(), RunState::AwaitingUser);  // no progress while waiting
    EXPECT_THROW(runner.reply({"  ", Persona::Human}), std::invalid_argument);
    runner.reply({"countertop", Persona::Human});
    EXPECT_EQ(runner.state(), RunState::Running);
    EXPECT_EQ(runner.run(), RunState::Done);
    EXPECT_EQ(runner.episode().outcome(), Outcome::Failure);
    EXPECT_EQ(runner.episode().counters(), (Counters{1, 1, 1, 0}));
}

TEST(Orchestrator, ReplyRespectsTheBudget) {
    policies::ConstantPolicy ask(Decision::speak("Where?"));
    LoopConfig cfg;
    cfg.max_steps = 1;
    EpisodeRunner runner("b", respact::testing::creditcard_world(), respact::testing::creditcard_goal(), 0, ask, nullptr, cfg);
    EXPECT_EQ(runner.run(), RunState::AwaitingUser);
    runner.reply({"there", Persona::Human});
    EXPECT_EQ(runner.state(), RunState::Done);
    EXPECT_EQ(runner.episode().outcome(), Outcome::BudgetExhausted);
}

TEST(Orchestrator, RejectsZeroBudgets) {
    policies::ConstantPolicy look(Decision::act("look"));
    LoopConfig cfg;
    cfg.max_steps = 0;
    EXPECT_THROW(EpisodeRunner("z", respact::testing::creditcard_world(), respact::testing::creditcard_goal(), 0, look, nullptr, cfg),
                 std::invalid_argument);
}
