#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "respact/core.hpp"
#include "respact/household.hpp"

namespace respact {

struct LoopConfig {
    std::size_t max_steps = 50;
    std::size_t max_consecutive_invalid = 10;
    bool require_user_reply = true;
};

// Raised by a policy that cannot produce a decision (transport error, timeout,
// unusable model output). The episode ends Aborted.
class PolicyFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by a user channel that went away (human disconnected, stdin closed).
class UserChannelClosed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PolicyPort {
public:
    virtual ~PolicyPort() = default;
    // nullopt means the policy has stopped; the episode then ends in Failure.
    virtual std::optional<Decision> decide(const Episode& context) = 0;
};

class UserPort {
public:
    virtual ~UserPort() = default;
    // Called exactly once per Speak.
    virtual UserResponse respond(const Episode& context, const std::string& utterance) = 0;
};

class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void on_event(const Episode& episode, const Event& event) = 0;
    virtual void on_finish(const Episode&) {}
};

// Response to a non-Speak decision: "OK." for Think, the environment's
// answer for Act. Parse failures and failed preconditions come back as
// "Nothing happens." with invalid=true and leave `world` untouched.
Event route_environment(const Decision& decision, std::size_t step, env::WorldState& world);

// Response to a Speak decision, asked of `user`.
Event route_user(const Decision& speak, std::size_t step, const Episode& context, UserPort& user);

enum class RunState { Running, AwaitingUser, Done };

// The decide/route/fold loop as a resumable state machine. With a UserPort
// every Speak is answered synchronously; without one the runner pauses in
// AwaitingUser until reply() is called.
class EpisodeRunner {
public:
    EpisodeRunner(std::string episode_id, env::WorldState world, TaskGoal goal, std::uint64_t seed,
                  PolicyPort& policy, UserPort* user, LoopConfig cfg = {}, EventSink* sink = nullptr,
                  std::optional<Persona> persona = std::nullopt);

    // One decision and its response.
    RunState step();
    // Steps until paused, done, or `max_decisions` decisions were taken.
    RunState run(std::size_t max_decisions = std::numeric_limits<std::size_t>::max());

    // Supplies the pending Speak's reply. Throws std::logic_error when not
    // awaiting and std::invalid_argument for blank text.
    void reply(UserResponse response);
    void abort();

    RunState state() const;
    bool awaiting_user() const { return awaiting_; }
    const Episode& episode() const { return episode_; }
    const env::WorldState& world() const { return world_; }
    const LoopConfig& config() const { return cfg_; }
    std::size_t invalid_streak() const { return invalid_streak_; }

private:
    void append(Event event);
    void finish(Outcome outcome);
    void after_response();

    Episode episode_;
    env::WorldState world_;
    PolicyPort& policy_;
    UserPort* user_;
    LoopConfig cfg_;
    EventSink* sink_;
    bool awaiting_ = false;
    std::size_t invalid_streak_ = 0;
};

Episode run_episode(const env::WorldState& world, const TaskGoal& goal, PolicyPort& policy, UserPort& user,
                    const LoopConfig& cfg = {}, EventSink* sink = nullptr, std::string episode_id = "episode-0",
                    std::uint64_t seed = 0, std::optional<Persona> persona = std::nullopt);

}  // namespace respact
