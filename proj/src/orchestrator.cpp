#include "respact/orchestrator.hpp"

#include "respact/text.hpp"

namespace respact {

Event route_environment(const Decision& decision, std::size_t step, env::WorldState& world) {
    Event e;
    e.step = step;
    e.source = Source::Environment;
    e.ts = now_ms();
    if (decision.kind == DecisionKind::Think) {
        e.payload = Observation{"OK."};
        return e;
    }
    if (decision.kind != DecisionKind::Act) throw std::logic_error("Speak is routed to the user");

    auto parsed = grammar::parse_action(decision.text);
    if (!parsed) {
        e.payload = Observation{env::kNothingHappens};
        e.invalid = true;
        return e;
    }
    env::StepResult r = env::step(world, *parsed);
    e.payload = Observation{std::move(r.observation)};
    e.invalid = !r.valid;
    if (r.valid) world = std::move(r.state);
    return e;
}

Event route_user(const Decision& speak, std::size_t step, const Episode& context, UserPort& user) {
    if (speak.kind != DecisionKind::Speak) throw std::logic_error("only Speak is routed to the user");
    UserResponse r = user.respond(context, speak.text);
    if (text::trim(r.text).empty()) throw UserChannelClosed("user returned an empty reply");
    Event e;
    e.step = step;
    e.source = Source::User;
    e.payload = std::move(r);
    e.ts = now_ms();
    return e;
}

EpisodeRunner::EpisodeRunner(std::string episode_id, env::WorldState world, TaskGoal goal, std::uint64_t seed,
                             PolicyPort& policy, UserPort* user, LoopConfig cfg, EventSink* sink,
                             std::optional<Persona> persona)
    : episode_(std::move(episode_id), goal, seed, env::initial_observation(world, goal), persona),
      world_(std::move(world)),
      policy_(policy),
      user_(user),
      cfg_(cfg),
      sink_(sink) {
    if (cfg_.max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");
    if (cfg_.max_consecutive_invalid == 0) throw std::invalid_argument("max_consecutive_invalid must be at least 1");
}

RunState EpisodeRunner::state() const {
    if (episode_.done()) return RunState::Done;
    if (awaiting_) return RunState::AwaitingUser;
    return RunState::Running;
}

void EpisodeRunner::append(Event event) {
    episode_.append(std::move(event));
    if (sink_ != nullptr) sink_->on_event(episode_, episode_.events().back());
}

void EpisodeRunner::finish(Outcome outcome) {
    awaiting_ = false;
    episode_.set_outcome(outcome);
    if (sink_ != nullptr) sink_->on_finish(episode_);
}

void EpisodeRunner::after_response() {
    if (episode_.done()) return;
    if (invalid_streak_ >= cfg_.max_consecutive_invalid || episode_.decisions() >= cfg_.max_steps)
        finish(Outcome::BudgetExhausted);
}

RunState EpisodeRunner::step() {
    if (state() != RunState::Running) return state();
    if (episode_.decisions() >= cfg_.max_steps) {
        finish(Outcome::BudgetExhausted);
        return state();
    }

    std::optional<Decision> decision;
    try {
        decision = policy_.decide(episode_);
    } catch (const std::exception&) {
        finish(Outcome::Aborted);
        return state();
    }
    if (!decision) {
        finish(Outcome::Failure);
        return state();
    }

    const std::size_t step_no = episode_.decisions();
    Event agent_event;
    agent_event.step = step_no;
    agent_event.source = Source::Agent;
    agent_event.payload = *decision;
    agent_event.ts = now_ms();
    append(std::move(agent_event));

    switch (decision->kind) {
        case DecisionKind::Think: append(route_environment(*decision, step_no, world_)); break;
        case DecisionKind::Speak:
            if (user_ == nullptr) {
                awaiting_ = true;
                return state();
            }
            try {
                append(route_user(*decision, step_no, episode_, *user_));
            } catch (const std::exception&) {
                finish(Outcome::Aborted);
                return state();
            }
            break;
        case DecisionKind::Act: {
            Event response = route_environment(*decision, step_no, world_);
            invalid_streak_ = response.invalid ? invalid_streak_ + 1 : 0;
            append(std::move(response));
            if (env::goal_satisfied(world_, episode_.task())) finish(Outcome::Success);
            break;
        }
    }
    after_response();
    return state();
}

RunState EpisodeRunner::run(std::size_t max_decisions) {
    for (std::size_t i = 0; i < max_decisions && state() == RunState::Running; ++i) step();
    return state();
}

void EpisodeRunner::reply(UserResponse response) {
    if (!awaiting_) throw std::logic_error("no Speak is awaiting a reply");
    if (text::trim(response.text).empty()) throw std::invalid_argument("reply text must not be empty");
    Event e;
    e.step = episode_.events().back().step;
    e.source = Source::User;
    e.payload = std::move(response);
    e.ts = now_ms();
    awaiting_ = false;
    append(std::move(e));
    after_response();
}

void EpisodeRunner::abort() {
    if (!episode_.done()) finish(Outcome::Aborted);
}

Episode run_episode(const env::WorldState& world, const TaskGoal& goal, PolicyPort& policy, UserPort& user,
                    const LoopConfig& cfg, EventSink* sink, std::string episode_id, std::uint64_t seed,
                    std::optional<Persona> persona) {
    EpisodeRunner runner(std::move(episode_id), world, goal, seed, policy, &user, cfg, sink, persona);
    runner.run();
    return runner.episode();
}

}  // namespace respact
