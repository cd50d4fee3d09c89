#include <gtest/gtest.h>

#include <random>

#include "respact/core.hpp"
#include "support.hpp"

using namespace respact;

namespace {

Event agent(std::size_t step, Decision d) {
    Event e;
    e.step = step;
    e.source = Source::Agent;
    e.payload = std::move(d);
    return e;
}

Event env_obs(std::size_t step, std::string text, bool invalid = false) {
    Event e;
    e.step = step;
    e.source = Source::Environment;
    e.payload = Observation{std::move(text)};
    e.invalid = invalid;
    return e;
}

Episode blank() { return Episode("e", {TaskType::Pick, "mug", "shelf"}, 1, "room"); }

}  // namespace

TEST(Decision, RejectsBlankText) {
    EXPECT_THROW(Decision::think("   "), std::invalid_argument);
    EXPECT_THROW(Decision::speak(""), std::invalid_argument);
    EXPECT_THROW(Decision::act("\t\n"), std::invalid_argument);
    EXPECT_EQ(Decision::act("look").kind, DecisionKind::Act);
}

TEST(TaskGoal, ExamineMustTargetDesklamp) {
    EXPECT_THROW((TaskGoal{TaskType::Examine, "book", "shelf"}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((TaskGoal{TaskType::Examine, "book", "desklamp"}.validate()));
}

TEST(TaskGoal, DescribesPickTwoLikeTheTranscripts) {
    EXPECT_EQ((TaskGoal{TaskType::PickTwo, "creditcard", "dresser"}.describe()), "put two creditcard in dresser.");
}

TEST(Episode, CountsDecisionsAndInvalidActs) {
    Episode ep = blank();
    ep.append(agent(0, Decision::think("plan")));
    ep.append(env_obs(0, "OK."));
    ep.append(agent(1, Decision::act("go to shelf 9")));
    ep.append(env_obs(1, "Nothing happens.", true));
    ep.append(agent(2, Decision::speak("Where is the mug?")));
    Event reply;
    reply.step = 2;
    reply.source = Source::User;
    reply.payload = UserResponse{"On the shelf.", Persona::Human};
    ep.append(reply);
    EXPECT_EQ(ep.counters(), (Counters{1, 1, 1, 1}));
    EXPECT_EQ(ep.counters(), recount(ep));
    EXPECT_EQ(ep.decisions(), 3u);
}

TEST(Episode, RejectsOutOfOrderSteps) {
    Episode ep = blank();
    ep.append(agent(0, Decision::think("plan")));
    ep.append(env_obs(0, "OK."));
    EXPECT_THROW(ep.append(agent(0, Decision::think("again"))), std::logic_error);
    EXPECT_THROW(ep.append(agent(5, Decision::think("skip"))), std::logic_error);
}

TEST(Episode, InvalidFlagOnlyAfterAct) {
    Episode ep = blank();
    ep.append(agent(0, Decision::think("plan")));
    EXPECT_THROW(ep.append(env_obs(0, "OK.", true)), std::logic_error);
}

TEST(Episode, OutcomeIsSetOnce) {
    Episode ep = blank();
    ep.set_outcome(Outcome::Failure);
    EXPECT_THROW(ep.set_outcome(Outcome::Success), std::logic_error);
}

TEST(Episode, RecountAgreesOnSyntheticLogs) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const Episode ep = respact::testing::synthetic_episode(rng, "s" + std::to_string(i));
        EXPECT_EQ(ep.counters(), recount(ep));
    }
}

TEST(Episode, AnnotatedCreditcardTranscriptCounts) {
    const auto t = respact::testing::creditcard_transcript();
    std::size_t think = 0, speak = 0, act = 0;
    for (const auto& d : t.decisions()) {
        think += d.kind == DecisionKind::Think;
        speak += d.kind == DecisionKind::Speak;
        act += d.kind == DecisionKind::Act;
    }
    // Hand count of the annotated exemplar.
    EXPECT_EQ(think, 8u);
    EXPECT_EQ(speak, 2u);
    EXPECT_EQ(act, 8u);
}

TEST(Enums, RoundTripThroughStrings) {
    for (TaskType t : kAllTaskTypes) EXPECT_EQ(task_type_from_string(to_string(t)), t);
    for (Outcome o : {Outcome::Success, Outcome::Failure, Outcome::BudgetExhausted, Outcome::Aborted})
        EXPECT_EQ(outcome_from_string(to_string(o)), o);
    for (Persona p : {Persona::HelpfulKnowledgeable, Persona::HelpfulPerturbed, Persona::Unhelpful, Persona::Human,
                      Persona::LLM})
        EXPECT_EQ(persona_from_string(to_string(p)), p);
    EXPECT_FALSE(task_type_from_string("juggle"));
}

TEST(Timestamps, Rfc3339RoundTrip) {
    const Timestamp t{std::chrono::milliseconds(1'700'000'000'123)};
    const std::string s = format_rfc3339(t);
    EXPECT_EQ(s, "2023-11-14T22:13:20.123Z");
    EXPECT_EQ(parse_rfc3339(s), t);
    EXPECT_FALSE(parse_rfc3339("yesterday"));
}
