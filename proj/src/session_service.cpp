#include "respact/session_service.hpp"

#include <cstdio>

#include "respact/evalkit.hpp"
#include "respact/text.hpp"

namespace respact::service {

Json ApiError::body() const {
    Json j = extra.is_object() ? extra : Json::object();
    j["error"] = code;
    j["message"] = message;
    return j;
}

namespace {

Json events_json(const std::vector<Event>& events) {
    Json arr = Json::array();
    for (const Event& e : events) arr.push_back(to_json(e));
    return arr;
}

Json outcome_json(std::optional<Outcome> o) { return o ? Json(std::string(to_string(*o))) : Json(nullptr); }

}  // namespace

Session::Session(std::string id, env::GeneratedWorld gen, TaskGoal goal, std::uint64_t seed,
                 std::unique_ptr<PolicyPort> policy, LoopConfig loop, bool auto_advance, std::string layout)
    : id_(std::move(id)),
      gen_(std::move(gen)),
      goal_(std::move(goal)),
      layout_(std::move(layout)),
      policy_(std::move(policy)),
      auto_advance_(auto_advance) {
    runner_ = std::make_unique<EpisodeRunner>(id_, gen_.world, goal_, seed, *policy_, nullptr, loop, nullptr,
                                              Persona::Human);
}

Json Session::state_locked() const {
    const Episode& ep = runner_->episode();
    return {{"awaiting_user", runner_->awaiting_user()},
            {"done", ep.done()},
            {"outcome", outcome_json(ep.outcome())},
            {"decisions", ep.decisions()}};
}

Json Session::state() const {
    std::lock_guard lock(mu_);
    return state_locked();
}

bool Session::done() const {
    std::lock_guard lock(mu_);
    return runner_->episode().done();
}

std::optional<Outcome> Session::outcome() const {
    std::lock_guard lock(mu_);
    return runner_->episode().outcome();
}

std::vector<Event> Session::run_locked(std::size_t from) {
    if (auto_advance_)
        runner_->run();
    else
        runner_->step();
    if (runner_->awaiting_user()) awaiting_since_ = std::chrono::steady_clock::now();
    const auto& events = runner_->episode().events();
    return {events.begin() + static_cast<std::ptrdiff_t>(from), events.end()};
}

ApiResult Session::advance() {
    std::vector<Event> fresh;
    Json st;
    {
        std::lock_guard lock(mu_);
        const Episode& ep = runner_->episode();
        if (ep.done())
            return unexpected(ApiError{409, "done", "the episode has ended", {{"outcome", outcome_json(ep.outcome())}}});
        if (runner_->awaiting_user())
            return unexpected(ApiError{409, "awaiting_user", "the agent is waiting for a reply"});
        fresh = run_locked(ep.events().size());
        st = state_locked();
    }
    changed_.notify_all();
    return ApiResponse{200, {{"events", events_json(fresh)}, {"state", st}}};
}

ApiResult Session::reply(const Json& body) {
    std::vector<Event> fresh;
    Json st;
    {
        std::lock_guard lock(mu_);
        const Episode& ep = runner_->episode();
        if (ep.done())
            return unexpected(ApiError{409, "done", "the episode has ended", {{"outcome", outcome_json(ep.outcome())}}});
        if (!runner_->awaiting_user())
            return unexpected(ApiError{409, "not_awaiting_user", "the agent has not asked anything"});
        if (!body.is_object() || !body.contains("text") || !body["text"].is_string())
            return unexpected(ApiError{422, "invalid_reply", "body must be {\"text\": string}"});
        const std::string text = text::trim(body["text"].get<std::string>());
        if (text.empty()) return unexpected(ApiError{422, "invalid_reply", "reply text must not be empty"});

        const std::size_t from = ep.events().size();
        runner_->reply({text, Persona::Human});
        if (auto_advance_ && runner_->state() == RunState::Running) runner_->run();
        if (runner_->awaiting_user()) awaiting_since_ = std::chrono::steady_clock::now();
        const auto& events = runner_->episode().events();
        fresh.assign(events.begin() + static_cast<std::ptrdiff_t>(from), events.end());
        st = state_locked();
    }
    changed_.notify_all();
    return ApiResponse{200, {{"events", events_json(fresh)}, {"state", st}}};
}

Json Session::transcript(bool wizard) const {
    std::lock_guard lock(mu_);
    const Episode& ep = runner_->episode();
    const Counters& c = ep.counters();
    Json j{{"session_id", id_},
           {"layout", layout_},
           {"goal", to_json(goal_)},
           {"goal_text", goal_.describe()},
           {"initial_observation", ep.initial_observation()},
           {"events", events_json(ep.events())},
           {"counters",
            {{"think", c.think_count}, {"speak", c.speak_count}, {"act", c.act_count}, {"invalid", c.invalid_count}}},
           {"state", state_locked()}};
    if (wizard) {
        j["world"] = env::to_json(runner_->world());
        j["oracle_plan"] = gen_.plan;
    }
    return j;
}

bool Session::expire(std::chrono::steady_clock::time_point now, std::chrono::seconds timeout) {
    {
        std::lock_guard lock(mu_);
        if (!runner_->awaiting_user() || now - awaiting_since_ < timeout) return false;
        runner_->abort();
    }
    changed_.notify_all();
    return true;
}

void Session::abort() {
    {
        std::lock_guard lock(mu_);
        runner_->abort();
    }
    changed_.notify_all();
}

std::pair<std::vector<Event>, bool> Session::wait_events(std::size_t seen, std::chrono::milliseconds wait) const {
    std::unique_lock lock(mu_);
    changed_.wait_for(lock, wait, [&] {
        return runner_->episode().events().size() > seen || runner_->episode().done();
    });
    const auto& events = runner_->episode().events();
    std::vector<Event> fresh;
    if (events.size() > seen) fresh.assign(events.begin() + static_cast<std::ptrdiff_t>(seen), events.end());
    return {std::move(fresh), runner_->episode().done()};
}

// ---------------------------------------------------------------------------

SessionManager::SessionManager(ServiceConfig cfg) : cfg_(std::move(cfg)), ids_(std::random_device{}()) {}

std::string SessionManager::new_id() {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ids_()));
    return buf;
}

llm::ChatClient& SessionManager::chat() {
    if (cfg_.chat_override != nullptr) return *cfg_.chat_override;
    if (!chat_) chat_ = std::make_unique<llm::HttpChatClient>(llm::ChatConfig::from_env(cfg_.chat));
    return *chat_;
}

ApiResult SessionManager::create(const Json& body) {
    if (!body.is_object()) return unexpected(ApiError{400, "bad_request", "body must be a JSON object"});
    auto field = [&](const char* key, Json::value_t type) -> std::optional<Json> {
        if (!body.contains(key) || body[key].is_null()) return std::nullopt;
        const bool ok = body[key].type() == type ||
                        (type == Json::value_t::number_unsigned && body[key].is_number_integer() && body[key] >= 0);
        if (!ok) throw ApiError{400, "bad_request", std::string("field '") + key + "' has the wrong type"};
        return body[key];
    };

    std::string layout = "auto", task = "random", policy_text = "scripted-respact";
    std::uint64_t seed = 0;
    bool auto_advance = false;
    try {
        if (auto v = field("layout", Json::value_t::string)) layout = v->get<std::string>();
        if (auto v = field("task_type", Json::value_t::string)) task = v->get<std::string>();
        if (auto v = field("policy", Json::value_t::string)) policy_text = v->get<std::string>();
        if (auto v = field("seed", Json::value_t::number_unsigned))
            seed = v->get<std::uint64_t>();
        else {
            std::lock_guard lock(mu_);
            seed = ids_();
        }
        if (auto v = field("auto_advance", Json::value_t::boolean)) auto_advance = v->get<bool>();
    } catch (const ApiError& e) {
        return unexpected(e);
    }

    // Pick layout and task from the seed where the caller left them open.
    std::mt19937_64 rng(seed);
    std::vector<const env::LayoutSpec*> layouts;
    if (layout == "auto") {
        for (const auto& l : env::builtin_layouts()) layouts.push_back(&l);
    } else if (const auto* l = env::find_layout(layout)) {
        layouts.push_back(l);
    } else {
        return unexpected(ApiError{400, "bad_request", "unknown layout '" + layout + "'"});
    }
    std::optional<TaskType> type;
    if (task != "random") {
        type = task_type_from_string(task);
        if (!type) return unexpected(ApiError{400, "bad_request", "unknown task_type '" + task + "'"});
        std::erase_if(layouts, [&](const env::LayoutSpec* l) { return l->tasks_of(*type).empty(); });
        if (layouts.empty())
            return unexpected(ApiError{400, "bad_request", "layout '" + layout + "' cannot realize " + task + " tasks"});
    }
    const env::LayoutSpec& spec = *layouts[rng() % layouts.size()];
    std::vector<env::TaskTemplate> templates = type ? spec.tasks_of(*type) : spec.tasks;
    const env::TaskTemplate& tmpl = templates[rng() % templates.size()];
    const TaskGoal goal{tmpl.type, tmpl.object_class, tmpl.target_class};

    auto policy_spec = eval::PolicySpec::parse(policy_text);
    if (!policy_spec) return unexpected(ApiError{400, "bad_request", policy_spec.error()});

    auto gen = env::generate(spec, goal, seed);
    if (!gen) return unexpected(ApiError{400, "bad_request", gen.error().reason});

    std::unique_ptr<PolicyPort> policy;
    try {
        switch (policy_spec->kind) {
            case eval::PolicySpec::Kind::Oracle: policy = std::make_unique<policies::OraclePolicy>(gen->plan); break;
            case eval::PolicySpec::Kind::Scripted: policy = std::make_unique<policies::ScriptedReSpActPolicy>(); break;
            case eval::PolicySpec::Kind::LLM: {
                std::lock_guard lock(mu_);
                if (!library_) library_ = prompts::PromptLibrary::load(cfg_.data_dir);
                auto packs = library_->packs(policy_spec->style, goal.type);
                const std::size_t p = policy_spec->permutation.value_or(0);
                if (p >= packs.size()) return unexpected(ApiError{400, "bad_request", "prompt pack index out of range"});
                policy = std::make_unique<policies::LLMPolicy>(packs[p], chat());
                break;
            }
        }
    } catch (const std::exception& e) {
        return unexpected(ApiError{400, "bad_request", e.what()});
    }

    std::lock_guard lock(mu_);
    std::size_t live = 0;
    for (const auto& [id, s] : sessions_) live += !s->done();
    if (live >= cfg_.max_sessions) return unexpected(ApiError{503, "at_capacity", "too many live sessions"});

    std::string id = new_id();
    while (sessions_.count(id)) id = new_id();
    auto session = std::make_shared<Session>(id, std::move(*gen), goal, seed, std::move(policy), cfg_.loop,
                                             auto_advance, spec.name);
    sessions_[id] = session;
    return ApiResponse{201,
                       {{"session_id", id},
                        {"goal_text", goal.describe()},
                        {"goal", to_json(goal)},
                        {"layout", spec.name},
                        {"seed", seed},
                        {"initial_observation", session->transcript(false)["initial_observation"]},
                        {"state", session->state()}}};
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

namespace {
ApiError not_found(const std::string& id) { return {404, "not_found", "no session '" + id + "'"}; }
}  // namespace

ApiResult SessionManager::advance(const std::string& id) {
    auto s = find(id);
    if (!s) return unexpected(not_found(id));
    return s->advance();
}

ApiResult SessionManager::reply(const std::string& id, const Json& body) {
    auto s = find(id);
    if (!s) return unexpected(not_found(id));
    return s->reply(body);
}

ApiResult SessionManager::transcript(const std::string& id, bool wizard) {
    auto s = find(id);
    if (!s) return unexpected(not_found(id));
    if (wizard && !cfg_.wizard_enabled)
        return unexpected(ApiError{403, "wizard_disabled", "wizard transcripts are disabled on this server"});
    return ApiResponse{200, s->transcript(wizard)};
}

ApiResult SessionManager::status(const std::string& id) {
    auto s = find(id);
    if (!s) return unexpected(not_found(id));
    return ApiResponse{200, {{"session_id", id}, {"goal_text", s->goal().describe()}, {"state", s->state()}}};
}

std::size_t SessionManager::sweep(std::chrono::steady_clock::time_point now) {
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, s] : sessions_) all.push_back(s);
    }
    std::size_t n = 0;
    for (auto& s : all) n += s->expire(now, std::chrono::seconds(cfg_.reply_timeout_seconds));
    return n;
}

std::size_t SessionManager::live_sessions() const {
    std::lock_guard lock(mu_);
    std::size_t live = 0;
    for (const auto& [id, s] : sessions_) live += !s->done();
    return live;
}

}  // namespace respact::service
