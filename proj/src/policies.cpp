#include "respact/policies.hpp"

#include <algorithm>
#include <regex>

#include "respact/text.hpp"

namespace respact::policies {

using grammar::EntityRef;
using grammar::Verb;

OraclePolicy::OraclePolicy(env::OraclePlan plan) : plan_(std::move(plan)) {}

std::optional<Decision> OraclePolicy::decide(const Episode&) {
    if (next_ >= plan_.size()) return Decision::act("look");
    return Decision::act(plan_[next_++]);
}

ReplayPolicy::ReplayPolicy(std::vector<Decision> decisions) : decisions_(std::move(decisions)) {}

ReplayPolicy ReplayPolicy::from_transcript(const prompts::Transcript& t) { return ReplayPolicy(t.decisions()); }

std::optional<Decision> ReplayPolicy::decide(const Episode&) {
    if (next_ >= decisions_.size()) return std::nullopt;
    return decisions_[next_++];
}

// ---------------------------------------------------------------------------

namespace {

std::vector<EntityRef> entities_in(std::string_view s) {
    static const std::regex entity(R"(\ba ([a-z]+) (\d+))");
    std::vector<EntityRef> out;
    const std::string str(s);
    for (auto it = std::sregex_iterator(str.begin(), str.end(), entity); it != std::sregex_iterator(); ++it)
        out.push_back({(*it)[1].str(), std::stoi((*it)[2].str())});
    return out;
}

// Entities listed after "you see" in an observation.
std::vector<EntityRef> seen_in(const std::string& obs) {
    const auto pos = text::to_lower(obs).find("you see");
    if (pos == std::string::npos) return {};
    return entities_in(std::string_view(obs).substr(pos));
}

const char* appliance_for(TaskType t) {
    switch (t) {
        case TaskType::Clean: return "sinkbasin";
        case TaskType::Heat: return "microwave";
        case TaskType::Cool: return "fridge";
        default: return "";
    }
}

const char* verb_for(TaskType t) {
    switch (t) {
        case TaskType::Clean: return "clean";
        case TaskType::Heat: return "heat";
        case TaskType::Cool: return "cool";
        default: return "";
    }
}

std::string paren(const EntityRef& e) { return e.class_name + " (" + std::to_string(e.index) + ")"; }

std::string count_word(std::size_t n) {
    static const char* words[] = {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"};
    return n < 10 ? words[n] : std::to_string(n);
}

bool needs_processing(TaskType t) { return t == TaskType::Clean || t == TaskType::Heat || t == TaskType::Cool; }

}  // namespace

ScriptedReSpActPolicy::ScriptedReSpActPolicy(ScriptedConfig cfg) : cfg_(cfg) {}

void ScriptedReSpActPolicy::start(const Episode& context) {
    started_ = true;
    goal_ = context.task();
    const std::string& obs = context.initial_observation();
    receptacles_ = entities_in(obs.substr(0, obs.find('\n')));
    std::sort(receptacles_.begin(), receptacles_.end(), [](const EntityRef& a, const EntityRef& b) {
        return std::tie(a.class_name, a.index) < std::tie(b.class_name, b.index);
    });
    at_ = env::kStart;
    set_search(goal_.object_class);
}

std::optional<Decision> ScriptedReSpActPolicy::decide(const Episode& context) {
    const bool fresh = !started_;
    if (fresh) start(context);

    const auto& events = context.events();
    const Decision* last = nullptr;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (const Decision* d = events[i].decision())
            last = d;
        else if (i >= seen_events_ && last != nullptr)
            absorb(*last, events[i]);
    }
    seen_events_ = events.size();

    if (!queued_.empty()) {
        Decision d = queued_.front();
        queued_.pop_front();
        return d;
    }
    if (fresh) {
        const std::string& c = goal_.object_class;
        const std::string t = goal_.target_receptacle_class;
        std::string plan;
        switch (goal_.type) {
            case TaskType::Pick: plan = "find and take a " + c + ", then put it in/on " + t; break;
            case TaskType::Clean:
            case TaskType::Heat:
            case TaskType::Cool:
                plan = "find and take a " + c + ", then " + verb_for(goal_.type) + " it with " +
                       appliance_for(goal_.type) + ", then put it in/on " + t;
                break;
            case TaskType::Examine: plan = "find and take a " + c + ", then find and use a desklamp"; break;
            case TaskType::PickTwo:
                plan = "find and take the first " + c + ", then put it in " + t + ", then find and take the second " +
                       c + ", then put it in " + t;
                break;
        }
        return Decision::think("To solve the task, I need to " + plan + ".");
    }
    return next();
}

void ScriptedReSpActPolicy::absorb(const Decision& decision, const Event& response) {
    if (decision.kind == DecisionKind::Think) return;
    if (decision.kind == DecisionKind::Speak) {
        absorb_user(response.text());
        return;
    }

    auto a = grammar::parse_action(decision.text);
    if (!a || response.invalid) {
        ++failed_acts_;
        if (a && a->verb == Verb::Take) {
            auto& list = contents_[a->receptacle->str()];
            list.erase(std::remove(list.begin(), list.end(), *a->object), list.end());
        }
        if (a && a->receptacle) visited_.insert(a->receptacle->str());
        return;
    }
    failed_acts_ = 0;

    const std::string& obs = response.text();
    const std::string r = a->receptacle ? a->receptacle->str() : "";
    switch (a->verb) {
        case Verb::GoTo:
            at_ = r;
            visited_.insert(r);
            if (obs.find(" is closed.") != std::string::npos) {
                closed_.insert(r);
            } else {
                closed_.erase(r);
                contents_[r] = seen_in(obs);
            }
            break;
        case Verb::Open:
            closed_.erase(r);
            contents_[r] = seen_in(obs);
            break;
        case Verb::Take: {
            holding_ = *a->object;
            processed_ = false;
            auto& list = contents_[r];
            list.erase(std::remove(list.begin(), list.end(), *a->object), list.end());
            break;
        }
        case Verb::Put:
            contents_[r].push_back(*a->object);
            placed_.insert(a->object->str());
            holding_.reset();
            reset_search();
            break;
        case Verb::Clean:
        case Verb::Heat:
        case Verb::Cool: processed_ = true; break;
        default: break;
    }
}

void ScriptedReSpActPolicy::absorb_user(const std::string& reply) {
    const Ask ask = pending_ask_;
    pending_ask_ = Ask::None;
    if (ask == Ask::Location) {
        const auto named = mentioned_receptacles(reply);
        if (named.empty()) {
            // Nothing usable in the answer: search on our own.
            sweeping_ = true;
            return;
        }
        queue_.clear();
        for (const auto& r : named)
            if (!explored(r)) queue_.push_back(r);
    } else if (ask == Ask::Choice) {
        const std::regex mention("\\b" + search_class_ + " \\(?(\\d+)\\)?");
        const std::string lower = text::to_lower(reply);
        preferred_.clear();
        for (auto it = std::sregex_iterator(lower.begin(), lower.end(), mention); it != std::sregex_iterator(); ++it) {
            EntityRef e{search_class_, std::stoi((*it)[1].str())};
            if (std::find(preferred_.begin(), preferred_.end(), e) == preferred_.end()) preferred_.push_back(e);
        }
    }
}

void ScriptedReSpActPolicy::set_search(const std::string& cls) {
    if (cls == search_class_) return;
    search_class_ = cls;
    reset_search();
}

void ScriptedReSpActPolicy::reset_search() {
    queue_.clear();
    asks_ = 0;
    sweeping_ = false;
}

bool ScriptedReSpActPolicy::explored(const std::string& receptacle) const {
    return visited_.count(receptacle) && !closed_.count(receptacle);
}

std::string ScriptedReSpActPolicy::first_of_class(const std::string& cls) const {
    for (const auto& r : receptacles_)
        if (r.class_name == cls) return r.str();
    return cls + " 1";
}

std::vector<EntityRef> ScriptedReSpActPolicy::known(const std::string& cls) const {
    std::vector<EntityRef> out;
    auto add = [&](const EntityRef& e) {
        if (e.class_name == cls && !placed_.count(e.str()) && (!holding_ || *holding_ != e) &&
            std::find(out.begin(), out.end(), e) == out.end())
            out.push_back(e);
    };
    auto present = [&](const EntityRef& e) { return where_is(e).has_value(); };
    for (const auto& p : preferred_)
        if (present(p)) add(p);
    if (auto it = contents_.find(at_); it != contents_.end() && !closed_.count(at_))
        for (const auto& e : it->second) add(e);
    for (const auto& r : receptacles_) {
        auto it = contents_.find(r.str());
        if (it == contents_.end() || closed_.count(r.str())) continue;
        for (const auto& e : it->second) add(e);
    }
    return out;
}

std::optional<std::string> ScriptedReSpActPolicy::where_is(const EntityRef& obj) const {
    for (const auto& [r, list] : contents_)
        if (!closed_.count(r) && std::find(list.begin(), list.end(), obj) != list.end()) return r;
    return std::nullopt;
}

std::vector<std::string> ScriptedReSpActPolicy::mentioned_receptacles(const std::string& reply) const {
    const std::string lower = text::to_lower(reply);
    std::set<std::string> classes;
    for (const auto& r : receptacles_) classes.insert(r.class_name);

    std::vector<std::pair<std::ptrdiff_t, std::string>> hits;
    for (const auto& cls : classes) {
        const std::regex re("\\b" + cls + "s?\\b(?: \\(?(\\d+)\\)?)?");
        for (auto it = std::sregex_iterator(lower.begin(), lower.end(), re); it != std::sregex_iterator(); ++it) {
            const std::string idx = (*it)[1].matched ? (*it)[1].str() : "";
            bool exact = false;
            if (!idx.empty()) {
                const EntityRef e{cls, std::stoi(idx)};
                exact = std::find(receptacles_.begin(), receptacles_.end(), e) != receptacles_.end();
                if (exact) hits.push_back({it->position(), e.str()});
            }
            if (!exact)
                for (const auto& r : receptacles_)
                    if (r.class_name == cls) hits.push_back({it->position(), r.str()});
        }
    }
    std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> out;
    for (const auto& [pos, name] : hits)
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return out;
}

Decision ScriptedReSpActPolicy::then(Decision now, Decision later) {
    queued_.push_back(std::move(later));
    return now;
}

std::optional<Decision> ScriptedReSpActPolicy::milestone() {
    if (!holding_) {
        if (goal_.type == TaskType::PickTwo && placed_.size() == 1 && announced_.insert("placed-first").second)
            return Decision::think("Now I put the first " + goal_.object_class + " in " +
                                   goal_.target_receptacle_class + ". Next, I need to find the second " +
                                   goal_.object_class + ".");
        return std::nullopt;
    }
    const std::string o = paren(*holding_);
    const std::string target = first_of_class(goal_.target_receptacle_class);
    if (announced_.insert("took " + holding_->str()).second) {
        std::string next;
        if (needs_processing(goal_.type))
            next = "go to " + first_of_class(appliance_for(goal_.type)) + " and " + verb_for(goal_.type) + " it";
        else if (goal_.type == TaskType::Examine)
            next = "find a desklamp";
        else
            next = "put it in/on " + target;
        return Decision::think("Now I take the " + o + ". Next, I need to " + next + ".");
    }
    if (processed_ && announced_.insert("processed " + holding_->str()).second)
        return Decision::think("Now I " + std::string(verb_for(goal_.type)) + " the " + o +
                               ". Next, I need to put it in/on " + target + ".");
    return std::nullopt;
}

std::optional<Decision> ScriptedReSpActPolicy::next() {
    if (failed_acts_ >= cfg_.max_failed_acts) return std::nullopt;
    if (auto m = milestone()) return m;

    if (!holding_) return find_object();

    const std::string held = holding_->str();
    if (needs_processing(goal_.type) && !processed_) {
        const std::string appliance = first_of_class(appliance_for(goal_.type));
        if (at_ != appliance) return Decision::act("go to " + appliance);
        return Decision::act(std::string(verb_for(goal_.type)) + " " + held + " with " + appliance);
    }
    if (goal_.type == TaskType::Examine) {
        set_search("desklamp");
        auto lamps = known("desklamp");
        if (lamps.empty()) return search("desklamp");
        const std::string r = *where_is(lamps.front());
        if (at_ != r) return Decision::act("go to " + r);
        return Decision::act("use " + lamps.front().str());
    }
    const std::string target = first_of_class(goal_.target_receptacle_class);
    if (at_ != target) return Decision::act("go to " + target);
    return Decision::act("put " + held + " in/on " + target);
}

std::optional<Decision> ScriptedReSpActPolicy::find_object() {
    const std::string& cls = goal_.object_class;
    set_search(cls);

    if (goal_.type == TaskType::PickTwo && !chose_) {
        std::vector<EntityRef> visible;
        if (auto it = contents_.find(at_); it != contents_.end() && !closed_.count(at_))
            for (const auto& e : it->second)
                if (e.class_name == cls && !placed_.count(e.str())) visible.push_back(e);
        if (visible.size() >= 2) {
            chose_ = true;
            pending_ask_ = Ask::Choice;
            std::string listing;
            for (std::size_t i = 0; i < visible.size(); ++i) listing += (i ? ", " : "") + paren(visible[i]);
            const std::string found = "I found " + count_word(visible.size()) + " " + cls + "s. " + listing + ".";
            return then(Decision::think("Now " + found + " Let me ask which two I should pick."),
                        Decision::speak(found + " Which two should I put in the " + goal_.target_receptacle_class +
                                        "?"));
        }
    }

    auto candidates = known(cls);
    if (!candidates.empty()) {
        const EntityRef& o = candidates.front();
        const std::string r = *where_is(o);
        if (at_ != r) return Decision::act("go to " + r);
        return then(Decision::think("Now I find the " + paren(o) + ". Next, I need to take it."),
                    Decision::act("take " + o.str() + " from " + r));
    }
    return search(cls);
}

std::optional<Decision> ScriptedReSpActPolicy::search(const std::string& cls) {
    if (at_ != env::kStart && closed_.count(at_)) return Decision::act("open " + at_);

    while (!queue_.empty()) {
        const std::string r = queue_.front();
        queue_.pop_front();
        if (!explored(r)) return Decision::act("go to " + r);
    }

    if (!sweeping_ && asks_ < cfg_.max_location_questions) {
        ++asks_;
        pending_ask_ = Ask::Location;
        if (asks_ == 1)
            return then(Decision::think("First I need to find a " + cls + ". Let me ask where to look for the " + cls +
                                        "."),
                        Decision::speak("I need to find a " + cls + ". Where do you suggest I should look for the " +
                                        cls + " first?"));
        return Decision::speak("I could not find a " + cls + " there. Where else do you suggest I should look for the " +
                               cls + "?");
    }

    if (!sweeping_) sweeping_ = true;
    for (const auto& r : receptacles_)
        if (!explored(r.str())) queue_.push_back(r.str());
    if (queue_.empty()) return std::nullopt;
    const std::string r = queue_.front();
    queue_.pop_front();
    return Decision::act("go to " + r);
}

// ---------------------------------------------------------------------------

LLMPolicy::LLMPolicy(prompts::PromptPack pack, llm::ChatClient& client, int max_retries)
    : pack_(std::move(pack)), client_(client), max_retries_(max_retries) {}

std::optional<Decision> LLMPolicy::decide(const Episode& context) {
    const auto messages = prompts::render_messages(pack_, context);
    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        std::string reply;
        try {
            reply = client_.complete(messages);
        } catch (const llm::ChatError& e) {
            throw PolicyFailure(e.what());
        }
        auto parsed = prompts::parse_reply(reply);
        if (!parsed) {
            last_error = parsed.error();
            continue;
        }
        // ReAct has no dialogue channel; an utterance goes to the environment and fails there.
        if (pack_.style == prompts::PromptStyle::ReAct && parsed->kind == DecisionKind::Speak)
            return Decision::act("speak: " + parsed->text);
        return *parsed;
    }
    throw PolicyFailure("no usable model output: " + last_error);
}

}  // namespace respact::policies
