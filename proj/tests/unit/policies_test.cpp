#include <gtest/gtest.h>

#include "respact/dialogue_schema.hpp"
#include "respact/policies.hpp"
#include "respact/user_sim.hpp"
#include "support.hpp"

using namespace respact;
using namespace respact::policies;

namespace {

std::vector<std::string> acts_after_first_reply(const Episode& ep) {
    std::vector<std::string> out;
    bool replied = false;
    for (const Event& e : ep.events()) {
        if (e.source == Source::User) replied = true;
        if (replied && e.decision() && e.decision()->kind == DecisionKind::Act) out.push_back(e.text());
    }
    return out;
}

env::WorldState two_dressers() {
    env::WorldState w;
    w.add_receptacle({"bed", 1});
    w.add_receptacle({"dresser", 1});
    w.add_receptacle({"dresser", 2});
    w.add_receptacle({"shelf", 1});
    w.add_object({"book", 1}, "dresser 2");
    w.add_object({"pen", 1}, "dresser 1");
    return w;
}

}  // namespace

TEST(Policies, AnnotatedTranscriptReplays) {
    const auto t = respact::testing::creditcard_transcript();
    auto p = ReplayPolicy::from_transcript(t);
    users::ReplayUser user(t.human_replies());
    const Episode ep = run_episode(respact::testing::creditcard_world(), respact::testing::creditcard_goal(), p, user);
    EXPECT_EQ(ep.outcome(), Outcome::Success);
    EXPECT_EQ(ep.counters().speak_count, 2u);
    EXPECT_EQ(ep.counters().invalid_count, 0u);
    // Each observation matches the annotated one.
    std::vector<std::string> annotated;
    for (const auto& l : t.lines)
        if (l.kind == prompts::TranscriptLine::Kind::Observation) annotated.push_back(l.text);
    std::vector<std::string> got;
    for (const Event& e : ep.events())
        if (e.source == Source::Environment) got.push_back(e.text());
    EXPECT_EQ(got, annotated);
}

TEST(Policies, OraclePolicyLooksAfterThePlan) {
    OraclePolicy p({"go to dresser 1"});
    Episode ctx;
    EXPECT_EQ(p.decide(ctx), Decision::act("go to dresser 1"));
    EXPECT_EQ(p.decide(ctx), Decision::act("look"));
    EXPECT_EQ(p.decide(ctx), Decision::act("look"));
}

TEST(Policies, ScriptedAsksTwiceOnTheCreditcardWorld) {
    const auto w = respact::testing::creditcard_world();
    const auto plan = *env::oracle_solve(w, respact::testing::creditcard_goal());
    ScriptedReSpActPolicy p;
    users::HelpfulUser user(plan, w);
    const Episode ep = run_episode(w, respact::testing::creditcard_goal(), p, user);
    EXPECT_EQ(ep.outcome(), Outcome::Success);
    EXPECT_EQ(ep.counters().speak_count, 2u);
    EXPECT_EQ(ep.counters().invalid_count, 0u);
    std::vector<dialogue::DialogAct> acts;
    for (const Event& e : ep.events())
        if (e.decision() && e.decision()->kind == DecisionKind::Speak) acts.push_back(dialogue::classify(e.text()));
    EXPECT_EQ(acts, (std::vector{dialogue::DialogAct::ReqForObjLocAndOD, dialogue::DialogAct::AlternateQuestions}));
}

TEST(Policies, ScriptedFollowsAnIndexedHint) {
    ScriptedReSpActPolicy p;
    users::ReplayUser user({"Hmm let me think. Can you please check the dresser 2?"});
    const Episode ep = run_episode(two_dressers(), {TaskType::Pick, "book", "shelf"}, p, user);
    const auto acts = acts_after_first_reply(ep);
    ASSERT_FALSE(acts.empty());
    EXPECT_EQ(acts[0], "go to dresser 2");
    EXPECT_EQ(ep.outcome(), Outcome::Success);
}

TEST(Policies, ScriptedTriesEveryInstanceOfAnIndexFreeHint) {
    ScriptedReSpActPolicy p;
    users::ReplayUser user({"Hmm let me think. Can you please check the dresser?"});
    const Episode ep = run_episode(two_dressers(), {TaskType::Pick, "book", "shelf"}, p, user);
    const auto acts = acts_after_first_reply(ep);
    ASSERT_GE(acts.size(), 2u);
    EXPECT_EQ(acts[0], "go to dresser 1");
    EXPECT_EQ(acts[1], "go to dresser 2");
    EXPECT_EQ(ep.outcome(), Outcome::Success);
}

TEST(Policies, ScriptedSweepsWhenTheReplyIsUseless) {
    ScriptedReSpActPolicy p;
    users::ReplayUser user({"I have no idea, sorry."});
    const Episode ep = run_episode(two_dressers(), {TaskType::Pick, "book", "shelf"}, p, user);
    EXPECT_EQ(ep.outcome(), Outcome::Success);
    EXPECT_EQ(ep.counters().speak_count, 1u);
}

TEST(Policies, ScriptedSolvesEveryTaskTypeWithAHelpfulUser) {
    for (const auto& pair : respact::testing::generated_pairs(36, 21)) {
        ScriptedReSpActPolicy p;
        users::HelpfulUser user(pair.gen.plan, pair.gen.world);
        const Episode ep = run_episode(pair.gen.world, pair.goal, p, user);
        EXPECT_EQ(ep.outcome(), Outcome::Success) << pair.layout << " " << pair.goal.describe() << " seed " << pair.seed;
        EXPECT_EQ(ep.counters().invalid_count, 0u);
    }
}

namespace {

Episode run_llm(prompts::PromptStyle style, llm::FunctionChatClient& client) {
    const prompts::PromptPack pack{style, TaskType::PickTwo, 0, "sys", "ex1", "ex2"};
    LLMPolicy p(pack, client);
    users::ReplayUser user({"On the countertop."});
    LoopConfig cfg;
    cfg.max_steps = 3;
    return run_episode(respact::testing::creditcard_world(), respact::testing::creditcard_goal(), p, user, cfg);
}

}  // namespace

TEST(Policies, LlmPolicyParsesTaggedReplies) {
    int calls = 0;
    llm::FunctionChatClient client([&](const std::vector<llm::ChatMessage>&) -> std::string {
        switch (calls++) {
            case 0: return "Think: Let me ask.";
            case 1: return "Speak: Where is the creditcard?";
            default: return "Act: go to countertop 1";
        }
    });
    const Episode ep = run_llm(prompts::PromptStyle::ReSpAct, client);
    EXPECT_EQ(ep.counters(), (Counters{1, 1, 1, 0}));
}

TEST(Policies, LlmPolicyRetriesThenAborts) {
    int calls = 0;
    llm::FunctionChatClient client([&](const std::vector<llm::ChatMessage>&) {
        ++calls;
        return std::string("   ");
    });
    const Episode ep = run_llm(prompts::PromptStyle::ReSpAct, client);
    EXPECT_EQ(ep.outcome(), Outcome::Aborted);
    EXPECT_EQ(calls, 3);  // first try plus two retries
}

TEST(Policies, LlmPolicyRecoversFromOneBadReply) {
    int calls = 0;
    llm::FunctionChatClient client([&](const std::vector<llm::ChatMessage>&) {
        return calls++ == 0 ? std::string("") : std::string("look");
    });
    const Episode ep = run_llm(prompts::PromptStyle::ReSpAct, client);
    EXPECT_EQ(ep.outcome(), Outcome::BudgetExhausted);
    EXPECT_EQ(ep.counters().act_count, 3u);
}

TEST(Policies, LlmTransportErrorsAbort) {
    llm::FunctionChatClient client([](const std::vector<llm::ChatMessage>&) -> std::string {
        throw llm::ChatError("connection refused");
    });
    EXPECT_EQ(run_llm(prompts::PromptStyle::ReSpAct, client).outcome(), Outcome::Aborted);
}

TEST(Policies, ReactStyleCannotSpeak) {
    llm::FunctionChatClient client([](const std::vector<llm::ChatMessage>&) { return std::string("Speak: Where?"); });
    const Episode ep = run_llm(prompts::PromptStyle::ReAct, client);
    EXPECT_EQ(ep.counters().speak_count, 0u);
    EXPECT_EQ(ep.counters().invalid_count, 3u);
}
