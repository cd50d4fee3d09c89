#include <gtest/gtest.h>

#include "respact/household.hpp"
#include "support.hpp"

using namespace respact;
using namespace respact::env;

TEST(Layouts, BuiltinsCoverEveryTaskType) {
    for (TaskType t : kAllTaskTypes) {
        bool covered = false;
        for (const auto& l : builtin_layouts()) covered |= !l.tasks_of(t).empty();
        EXPECT_TRUE(covered) << to_string(t);
    }
    EXPECT_NE(find_layout("kitchen-small"), nullptr);
    EXPECT_NE(find_layout("bedroom-small"), nullptr);
    EXPECT_EQ(find_layout("castle"), nullptr);
}

TEST(Layouts, EveryTemplateGeneratesASolvableWorld) {
    for (const auto& l : builtin_layouts()) {
        for (const auto& t : l.tasks) {
            const TaskGoal goal{t.type, t.object_class, t.target_class};
            EXPECT_FALSE(unsatisfiable_reason(l, goal)) << l.name << " " << goal.describe();
            for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
                auto gen = generate(l, goal, seed);
                ASSERT_TRUE(gen) << l.name << " " << goal.describe() << ": " << gen.error().reason;
                EXPECT_TRUE(replay_solves(gen->world, goal, gen->plan));
                EXPECT_FALSE(goal_satisfied(gen->world, goal));
                EXPECT_NO_THROW(gen->world.check_invariants());
                if (t.type == TaskType::PickTwo) {
                    int n = 0;
                    for (const auto& [name, o] : gen->world.objects) n += o.id.class_name == t.object_class;
                    EXPECT_GE(n, 2);
                }
            }
        }
    }
}

TEST(Layouts, GenerationIsDeterministic) {
    const auto& l = *find_layout("kitchen-small");
    const TaskGoal goal{TaskType::Heat, "mug", "coffeemachine"};
    auto a = generate(l, goal, 42);
    auto b = generate(l, goal, 42);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(a->world, b->world);
    EXPECT_EQ(a->plan, b->plan);
}

TEST(Layouts, UnsatisfiableGoalsAreReported) {
    const auto& bedroom = *find_layout("bedroom-small");
    EXPECT_TRUE(unsatisfiable_reason(bedroom, {TaskType::Heat, "mug", "desk"}));
    EXPECT_FALSE(generate(bedroom, {TaskType::Heat, "mug", "desk"}, 1));
    const auto& kitchen = *find_layout("kitchen-small");
    EXPECT_TRUE(unsatisfiable_reason(kitchen, {TaskType::Pick, "unicorn", "shelf"}));
}

TEST(Layouts, LayoutJsonRoundTrip) {
    for (const auto& l : builtin_layouts()) {
        const LayoutSpec back = layout_from_json(to_json(l));
        EXPECT_EQ(back.name, l.name);
        EXPECT_EQ(to_json(back), to_json(l));
    }
}
