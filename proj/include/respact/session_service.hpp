#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

#include "respact/expected.hpp"
#include "respact/llm_client.hpp"
#include "respact/orchestrator.hpp"
#include "respact/policies.hpp"
#include "respact/prompts.hpp"
#include "respact/serialization.hpp"

namespace respact::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    unsigned short port = 8080;  // 0 picks a free port
    std::string static_dir;
    std::size_t max_sessions = 64;  // live (unfinished) sessions
    int reply_timeout_seconds = 600;
    bool wizard_enabled = false;
    LoopConfig loop;
    std::filesystem::path data_dir = prompts::default_data_dir();
    llm::ChatConfig chat;
    llm::ChatClient* chat_override = nullptr;
};

struct ApiError {
    int status;
    std::string code;
    std::string message;
    Json extra = Json::object();

    Json body() const;
};

struct ApiResponse {
    int status = 200;
    Json body;
};

using ApiResult = Expected<ApiResponse, ApiError>;

// One interactive episode. The agent runs server-side; the person at the
// other end answers each Speak through reply().
class Session {
public:
    Session(std::string id, env::GeneratedWorld gen, TaskGoal goal, std::uint64_t seed,
            std::unique_ptr<PolicyPort> policy, LoopConfig loop, bool auto_advance, std::string layout);

    const std::string& id() const { return id_; }
    const TaskGoal& goal() const { return goal_; }

    // All members below lock the session.
    ApiResult advance();
    ApiResult reply(const Json& body);
    Json transcript(bool wizard) const;
    Json state() const;
    bool done() const;
    // Aborts an unanswered Speak older than `timeout`. True if it aborted.
    bool expire(std::chrono::steady_clock::time_point now, std::chrono::seconds timeout);
    void abort();

    // Blocks until events beyond `seen` exist, the episode is done, or
    // `wait` elapses. Returns the new events and whether the episode is done.
    std::pair<std::vector<Event>, bool> wait_events(std::size_t seen, std::chrono::milliseconds wait) const;
    std::optional<Outcome> outcome() const;

private:
    Json state_locked() const;
    std::vector<Event> run_locked(std::size_t from);

    std::string id_;
    env::GeneratedWorld gen_;
    TaskGoal goal_;
    std::string layout_;
    std::unique_ptr<PolicyPort> policy_;
    std::unique_ptr<EpisodeRunner> runner_;
    bool auto_advance_;
    std::chrono::steady_clock::time_point awaiting_since_;

    mutable std::mutex mu_;
    mutable std::condition_variable changed_;
};

// Routes the JSON API to sessions. Transport-independent; the HTTP server
// and the tests both drive it.
class SessionManager {
public:
    explicit SessionManager(ServiceConfig cfg);

    // body: {layout?, task_type? ("random"), policy?, seed?, auto_advance?}
    ApiResult create(const Json& body);
    ApiResult advance(const std::string& id);
    ApiResult reply(const std::string& id, const Json& body);
    ApiResult transcript(const std::string& id, bool wizard);
    ApiResult status(const std::string& id);

    std::shared_ptr<Session> find(const std::string& id) const;
    // Aborts sessions that waited longer than the reply timeout.
    std::size_t sweep(std::chrono::steady_clock::time_point now = std::chrono::steady_clock::now());
    std::size_t live_sessions() const;
    const ServiceConfig& config() const { return cfg_; }

private:
    std::string new_id();
    llm::ChatClient& chat();

    ServiceConfig cfg_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::mt19937_64 ids_;
    std::optional<prompts::PromptLibrary> library_;
    std::unique_ptr<llm::ChatClient> chat_;
};

// HTTP + WebSocket front end. Endpoints:
//   GET  /healthz
//   POST /api/sessions
//   GET  /api/sessions/{id}
//   POST /api/sessions/{id}/advance
//   POST /api/sessions/{id}/reply
//   GET  /api/sessions/{id}/transcript[?wizard=true]
//   WS   /api/sessions/{id}/events
//   GET  /*  files below static_dir
class Server {
public:
    explicit Server(ServiceConfig cfg);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds and starts serving in background threads; returns the bound port.
    unsigned short start();
    void stop();
    SessionManager& sessions();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Runs until SIGINT/SIGTERM. Returns the process exit code.
int serve_forever(const ServiceConfig& cfg);

}  // namespace respact::service
