#include <gtest/gtest.h>

#include <sstream>

#include "respact/dialogue_schema.hpp"
#include "respact/prompts.hpp"
#include "support.hpp"

using namespace respact;
using namespace respact::prompts;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

bool dialogue_line(const std::string& l) { return l.rfind("> speak:", 0) == 0 || l.rfind("> Human:", 0) == 0; }

}  // namespace

TEST(Prompts, ThreeExemplarsGiveSixOrderedPacks) {
    const std::vector<std::string> ex = {"A\nYour task is to: a\n", "B\nYour task is to: b\n", "C\nYour task is to: c\n"};
    const auto packs = build_packs(PromptStyle::ReSpAct, TaskType::Pick, ex, "sys");
    ASSERT_EQ(packs.size(), 6u);
    const std::vector<std::pair<int, int>> order = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(packs[i].permutation, i);
        EXPECT_EQ(packs[i].first, ex[order[i].first]);
        EXPECT_EQ(packs[i].second, ex[order[i].second]);
        EXPECT_EQ(packs[i].system_prompt, "sys");
    }
    EXPECT_THROW(build_packs(PromptStyle::ReAct, TaskType::Pick, std::span(ex).first(1), "s"), std::invalid_argument);
}

TEST(Prompts, ReactPackIsRespactWithoutDialogue) {
    const auto lib = PromptLibrary::load(respact::testing::data_dir());
    for (TaskType t : kAllTaskTypes) {
        const auto respact = lib.packs(PromptStyle::ReSpAct, t);
        const auto react = lib.packs(PromptStyle::ReAct, t);
        ASSERT_EQ(respact.size(), react.size());
        for (std::size_t i = 0; i < respact.size(); ++i) {
            for (auto [full, stripped] : {std::pair{respact[i].first, react[i].first}, {respact[i].second, react[i].second}}) {
                std::vector<std::string> kept;
                for (const auto& l : lines_of(full))
                    if (!dialogue_line(l)) kept.push_back(l);
                EXPECT_EQ(lines_of(stripped), kept);
            }
        }
    }
}

TEST(Prompts, SchemaPackTagsEverySpeakLine) {
    const auto lib = PromptLibrary::load(respact::testing::data_dir());
    for (const auto& pack : lib.packs(PromptStyle::ReSpActSchema, TaskType::PickTwo))
        for (const auto& l : lines_of(pack.first + pack.second))
            if (l.rfind("> speak:", 0) == 0) EXPECT_TRUE(dialogue::validate_schema_output(l.substr(9))) << l;
}

TEST(Prompts, LibraryHasThreeExemplarsPerTask) {
    const auto lib = PromptLibrary::load(respact::testing::data_dir());
    for (TaskType t : kAllTaskTypes) {
        EXPECT_EQ(lib.exemplars(t).size(), 3u) << to_string(t);
        EXPECT_EQ(lib.packs(PromptStyle::ReSpAct, t).size(), 6u);
    }
    EXPECT_FALSE(lib.system_prompt(PromptStyle::ReAct).empty());
    EXPECT_NE(lib.user_prompt(Persona::HelpfulKnowledgeable).find("{oracle_text}"), std::string::npos);
    EXPECT_THROW(PromptLibrary::load("/nonexistent"), std::runtime_error);
}

TEST(Prompts, TranscriptRoundTrip) {
    const std::string text = read_text_file(respact::testing::data_dir() / "exemplars" / "pick_two" / "1.txt");
    const Transcript t = parse_transcript(text);
    EXPECT_EQ(render_transcript(t), text);
    EXPECT_EQ(t.human_replies().size(), 2u);
    EXPECT_THROW(parse_transcript("> look\n"), std::invalid_argument);
}

TEST(Prompts, ParseReply) {
    EXPECT_EQ(*parse_reply("Think: I should look in the drawer."), Decision::think("I should look in the drawer."));
    EXPECT_EQ(*parse_reply("> speak: Where is the mug?"), Decision::speak("Where is the mug?"));
    EXPECT_EQ(*parse_reply("ACT: go to drawer 1"), Decision::act("go to drawer 1"));
    EXPECT_EQ(*parse_reply("go to drawer 1"), Decision::act("go to drawer 1"));
    EXPECT_EQ(*parse_reply("Speak: I found three creditcards.\nWhich two?\nAct: take x"),
              Decision::speak("I found three creditcards. Which two?"));
    EXPECT_EQ(*parse_reply("act: open drawer 1\nmore text"), Decision::act("open drawer 1"));
    EXPECT_FALSE(parse_reply(""));
    EXPECT_FALSE(parse_reply("  \n > \n"));
    EXPECT_FALSE(parse_reply("think:"));
}

TEST(Prompts, RenderMessagesFollowsTheContext) {
    const PromptPack pack{PromptStyle::ReSpAct, TaskType::PickTwo, 0, "SYSTEM", "EX1\n", "EX2\n"};
    Episode ep("m", respact::testing::creditcard_goal(), 0, "ROOM\nYour task is to: put two creditcard in dresser.");
    Event d{0, Source::Agent, Decision::speak("Where?")};
    Event r{0, Source::User, UserResponse{"On the countertop.", Persona::Human}};
    Event a{1, Source::Agent, Decision::act("go to countertop 1")};
    Event o{1, Source::Environment, Observation{"On the countertop 1, you see nothing."}};
    for (auto* e : {&d, &r, &a, &o}) ep.append(*e);
    const auto msgs = render_messages(pack, ep);
    ASSERT_EQ(msgs.size(), 6u);
    EXPECT_EQ(msgs[0], (llm::ChatMessage{"system", "SYSTEM"}));
    EXPECT_EQ(msgs[1].content,
              "Interact with a household to solve a task. Here are two examples.\nEX1\n\nEX2\n\nHere is the task.\n"
              "ROOM\nYour task is to: put two creditcard in dresser.");
    EXPECT_EQ(msgs[2], (llm::ChatMessage{"assistant", "Speak: Where?"}));
    EXPECT_EQ(msgs[3], (llm::ChatMessage{"user", "Human: On the countertop."}));
    EXPECT_EQ(msgs[4], (llm::ChatMessage{"assistant", "Act: go to countertop 1"}));
    EXPECT_EQ(msgs[5], (llm::ChatMessage{"user", "On the countertop 1, you see nothing."}));
}

TEST(Prompts, StyleNames) {
    for (auto s : {PromptStyle::ReAct, PromptStyle::ReSpAct, PromptStyle::ReSpActSchema})
        EXPECT_EQ(prompt_style_from_string(to_string(s)), s);
    EXPECT_FALSE(prompt_style_from_string("reflexion"));
}
