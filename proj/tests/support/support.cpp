#include "support.hpp"

#include <deque>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "respact/serialization.hpp"

namespace respact::testing {

using grammar::EntityRef;
using grammar::EnvAction;

std::filesystem::path data_dir() { return prompts::default_data_dir(); }

env::WorldState creditcard_world() {
    std::ifstream in(data_dir() / "fixtures" / "creditcard_bedroom.json");
    if (!in) throw std::runtime_error("missing fixtures/creditcard_bedroom.json");
    return env::world_from_json(Json::parse(in));
}

TaskGoal creditcard_goal() { return {TaskType::PickTwo, "creditcard", "dresser"}; }

prompts::Transcript creditcard_transcript() {
    return prompts::parse_transcript(prompts::read_text_file(data_dir() / "exemplars" / "pick_two" / "1.txt"));
}

const std::vector<std::string>& production_examples() {
    static const std::vector<std::string> v = {
        "put mug 1 in/on shelf 1", "go to drawer 1",          "take creditcard 2 from countertop 1",
        "open drawer 1",           "toggle desklamp 1",       "close drawer 1",
        "clean mug 1 with sinkbasin 1", "heat mug 1 with microwave 1", "cool apple 1 with fridge 1",
        "use desklamp 1",          "look",
    };
    return v;
}

const std::vector<std::string>& annotated_action_lines() {
    static const std::vector<std::string> v = {
        "go to drawer 1",
        "open drawer 1",
        "go to drawer 2",
        "open drawer 2",
        "go to countertop 1",
        "take creditcard 2 from countertop 1",
        "go to dresser 1",
        "put creditcard 2 in/on dresser 1",
        "take creditcard 3 from countertop 1",
        "put creditcard 3 in/on dresser 1",
    };
    return v;
}

namespace {

const std::vector<std::string> kObjectClasses = {"apple", "creditcard", "mug", "cd", "saltshaker", "desklamp", "pen"};
const std::vector<std::string> kReceptacleClasses = {"countertop", "drawer", "sinkbasin", "microwave",
                                                     "fridge",     "dresser", "cabinet"};

EntityRef pick(std::mt19937_64& rng, const std::vector<std::string>& classes) {
    std::uniform_int_distribution<int> idx(1, 30);
    return {classes[rng() % classes.size()], idx(rng)};
}

}  // namespace

EnvAction random_action(std::mt19937_64& rng) {
    const auto verb = grammar::kAllVerbs[rng() % std::size(grammar::kAllVerbs)];
    const EntityRef o = pick(rng, kObjectClasses);
    const EntityRef r = pick(rng, kReceptacleClasses);
    switch (verb) {
        case grammar::Verb::Put: return EnvAction::put(o, r);
        case grammar::Verb::GoTo: return EnvAction::go_to(r);
        case grammar::Verb::Take: return EnvAction::take(o, r);
        case grammar::Verb::Open: return EnvAction::open(r);
        case grammar::Verb::Toggle: return EnvAction::toggle(rng() % 2 ? o : r);
        case grammar::Verb::Close: return EnvAction::close(r);
        case grammar::Verb::Clean: return EnvAction::clean(o, r);
        case grammar::Verb::Heat: return EnvAction::heat(o, r);
        case grammar::Verb::Cool: return EnvAction::cool(o, r);
        case grammar::Verb::Use: return EnvAction::use(rng() % 2 ? o : r);
        case grammar::Verb::Look: return EnvAction::look();
    }
    return EnvAction::look();
}

std::vector<EnvAction> all_actions(const env::WorldState& world) {
    std::vector<EntityRef> objs, recs;
    for (const auto& [name, o] : world.objects) objs.push_back(o.id);
    for (const auto& [name, r] : world.receptacles) recs.push_back(r.id);
    std::vector<EntityRef> any = objs;
    any.insert(any.end(), recs.begin(), recs.end());

    std::vector<EnvAction> out{EnvAction::look()};
    for (const auto& r : recs) {
        out.push_back(EnvAction::go_to(r));
        out.push_back(EnvAction::open(r));
        out.push_back(EnvAction::close(r));
        for (const auto& o : objs) {
            out.push_back(EnvAction::put(o, r));
            out.push_back(EnvAction::take(o, r));
            out.push_back(EnvAction::clean(o, r));
            out.push_back(EnvAction::heat(o, r));
            out.push_back(EnvAction::cool(o, r));
        }
    }
    for (const auto& x : any) {
        out.push_back(EnvAction::toggle(x));
        out.push_back(EnvAction::use(x));
    }
    return out;
}

std::optional<std::size_t> unpruned_bfs(const env::WorldState& world, const TaskGoal& goal, std::size_t state_limit) {
    if (env::goal_satisfied(world, goal)) return 0;
    const auto actions = all_actions(world);
    std::unordered_set<std::uint64_t> seen{world.fingerprint()};
    std::deque<std::pair<env::WorldState, std::size_t>> frontier{{world, 0}};
    while (!frontier.empty()) {
        auto [state, depth] = std::move(frontier.front());
        frontier.pop_front();
        for (const EnvAction& a : actions) {
            env::StepResult r = env::step(state, a);
            if (!r.valid) continue;
            if (!seen.insert(r.state.fingerprint()).second) continue;
            if (env::goal_satisfied(r.state, goal)) return depth + 1;
            if (seen.size() > state_limit) return std::nullopt;
            frontier.emplace_back(std::move(r.state), depth + 1);
        }
    }
    return std::nullopt;
}

SmallWorld random_small_world(std::mt19937_64& rng, TaskType type) {
    static const std::vector<std::string> portable = {"apple", "mug", "cd", "pen"};
    static const std::vector<std::string> holders = {"countertop", "drawer", "shelf", "cabinet"};

    const std::string obj = portable[rng() % portable.size()];
    std::string source = holders[rng() % holders.size()];
    std::string target = holders[rng() % holders.size()];
    while (target == source) target = holders[rng() % holders.size()];

    SmallWorld out;
    out.goal = {type, obj, type == TaskType::Examine ? "desklamp" : target};
    env::WorldState& w = out.world;
    w.add_receptacle({source, 1});
    w.add_receptacle({target, 1});
    if (type == TaskType::Clean) w.add_receptacle({"sinkbasin", 1});
    if (type == TaskType::Heat) w.add_receptacle({"microwave", 1});
    if (type == TaskType::Cool) w.add_receptacle({"fridge", 1});
    if (rng() % 2) {
        std::string extra = holders[rng() % holders.size()];
        w.add_receptacle({extra, extra == source || extra == target ? 2 : 1});
    }

    w.add_object({obj, 1}, source + " 1");
    if (type == TaskType::PickTwo) {
        const auto recs = w.receptacle_ids();
        std::string where = source + " 1";
        for (const auto& r : recs)
            if (r.class_name != target && rng() % 2) where = r.str();
        w.add_object({obj, 2}, where);
    }
    if (type == TaskType::Examine) w.add_object({"desklamp", 1}, target + " 1");
    if (rng() % 2) {
        const std::string other = obj == "pen" ? "cd" : "pen";
        w.add_object({other, 1}, target + " 1");
    }
    return out;
}

std::vector<GeneratedPair> generated_pairs(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<GeneratedPair> out;
    std::size_t failures = 0;
    for (std::size_t i = 0; out.size() < count; ++i) {
        const TaskType type = kAllTaskTypes[i % std::size(kAllTaskTypes)];
        std::vector<const env::LayoutSpec*> layouts;
        for (const auto& l : env::builtin_layouts())
            if (!l.tasks_of(type).empty()) layouts.push_back(&l);
        const env::LayoutSpec& layout = *layouts[rng() % layouts.size()];
        const auto templates = layout.tasks_of(type);
        const auto& t = templates[rng() % templates.size()];
        const TaskGoal goal{t.type, t.object_class, t.target_class};
        const std::uint64_t s = rng();
        auto gen = env::generate(layout, goal, s);
        if (!gen) {
            if (++failures > count) throw std::runtime_error("generate keeps failing: " + gen.error().reason);
            continue;
        }
        out.push_back({layout.name, goal, s, std::move(*gen)});
    }
    return out;
}

const std::vector<LabelledUtterance>& utterance_pool() {
    static const std::vector<LabelledUtterance> pool = {
        {"What should I do now?", "ReqForInstruction"},
        {"Which 2 books should I pick?", "RequestOtherInfo"},
        {"The knife 1 is on the countertop 1.", "InfoObjectLocAndOD"},
        {"I am looking for a mug. Where is the mug?", "ReqForObjLocAndOD"},
        {"I saw the pillow on the armchair.", "InformationOther"},
        {"Which of the two creditcards. creditcard 1 or creditcard 2?", "AlternateQuestions"},
        {"Yes. I will proceed with that.", "Affirm"},
        {"No. I don't think so.", "Deny"},
        {"I am at the drawer 1. It is closed Should I open it?", "OtherInterfaceComment"},
        {"Not able to do it. Please help", "NotifyFailure"},
        {"I need to find a mug. Where do you suggest I should look for the mug first?", "ReqForObjLocAndOD"},
        {"I found three creditcards. creditcard (4), creditcard (3), creditcard (2). Which two should I put in the "
         "dresser?",
         "AlternateQuestions"},
        {"[Affirm]: Sure, I will do that.", "Affirm"},
        {"<NotifyFailure>: The microwave does not respond.", "NotifyFailure"},
        {"[InformationOther]: Where is the mug?", "InformationOther"},
    };
    return pool;
}

Episode synthetic_episode(std::mt19937_64& rng, std::string id, std::optional<TaskType> type) {
    static const std::vector<std::pair<std::string, std::string>> objects = {
        {"mug", "shelf"}, {"apple", "countertop"}, {"creditcard", "dresser"}, {"plate", "cabinet"}};
    const TaskType t = type.value_or(kAllTaskTypes[rng() % std::size(kAllTaskTypes)]);
    const auto& [obj, target] = objects[rng() % objects.size()];
    const TaskGoal goal{t, obj, t == TaskType::Examine ? "desklamp" : target};

    Episode ep(std::move(id), goal, rng(), "You are in the middle of a room.\nYour task is to: " + goal.describe(),
               Persona::HelpfulKnowledgeable);
    const std::size_t n = rng() % 25;
    for (std::size_t step = 0; step < n; ++step) {
        Event d;
        d.step = step;
        d.source = Source::Agent;
        d.ts = now_ms();
        Event r;
        r.step = step;
        r.ts = now_ms();
        switch (rng() % 4) {
            case 0:
                d.payload = Decision::think("Let me think about step " + std::to_string(step) + ".");
                r.source = Source::Environment;
                r.payload = Observation{"OK."};
                break;
            case 1:
                d.payload = Decision::speak(utterance_pool()[rng() % utterance_pool().size()].text);
                r.source = Source::User;
                r.payload = UserResponse{"Hmm let me think. Can you please check the shelf 1?",
                                         Persona::HelpfulKnowledgeable};
                break;
            default: {
                const bool invalid = rng() % 3 == 0;
                d.payload = Decision::act(invalid ? "jump around" : "go to shelf 1");
                r.source = Source::Environment;
                r.payload = Observation{invalid ? env::kNothingHappens : "On the shelf 1, you see nothing."};
                r.invalid = invalid;
                break;
            }
        }
        ep.append(std::move(d));
        ep.append(std::move(r));
    }
    static constexpr Outcome outcomes[] = {Outcome::Success, Outcome::Success, Outcome::Failure,
                                           Outcome::BudgetExhausted, Outcome::Aborted};
    ep.set_outcome(outcomes[rng() % std::size(outcomes)]);
    return ep;
}

}  // namespace respact::testing
