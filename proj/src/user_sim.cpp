#include "respact/user_sim.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <regex>
#include <set>

#include "respact/text.hpp"

namespace respact::users {

QueryType detect_query(std::string_view utterance) {
    if (text::contains_word_ci(utterance, "where")) return QueryType::Location;
    if (text::contains_word_ci(utterance, "which")) return QueryType::Disambiguation;
    return QueryType::Other;
}

std::string queried_class(std::string_view utterance, const env::WorldState& world, const std::string& fallback) {
    const std::string u = text::to_lower(utterance);
    std::set<std::string> classes{fallback};
    for (const auto& [name, obj] : world.objects) classes.insert(obj.id.class_name);

    std::string best = fallback;
    std::ptrdiff_t best_pos = -1;
    for (const auto& cls : classes) {
        if (cls.empty()) continue;
        const std::regex word("\\b" + cls + "s?\\b");
        for (auto it = std::sregex_iterator(u.begin(), u.end(), word); it != std::sregex_iterator(); ++it)
            if (it->position() > best_pos) {
                best_pos = it->position();
                best = cls;
            }
    }
    return best;
}

env::WorldState replay_world(const env::WorldState& initial, const Episode& context) {
    env::WorldState w = initial;
    const auto& events = context.events();
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        const Decision* d = events[i].decision();
        if (d == nullptr || d->kind != DecisionKind::Act || events[i + 1].invalid) continue;
        if (auto a = grammar::parse_action(d->text)) {
            auto r = env::step(w, *a);
            if (r.valid) w = std::move(r.state);
        }
    }
    return w;
}

std::vector<std::string> plan_receptacles(const env::OraclePlan& plan, const env::WorldState& world) {
    std::vector<std::string> out;
    for (const auto& s : plan) {
        auto a = grammar::parse_action(s);
        if (!a || !a->receptacle) continue;
        const std::string name = a->receptacle->str();
        if (world.receptacles.count(name) && std::find(out.begin(), out.end(), name) == out.end())
            out.push_back(name);
    }
    return out;
}

namespace {

std::string join_instances(const std::vector<grammar::EntityRef>& refs) {
    std::string out;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i > 0) out += i + 1 == refs.size() ? " and " : ", ";
        out += refs[i].str();
    }
    return out;
}

}  // namespace

HelpfulUser::HelpfulUser(env::OraclePlan plan, env::WorldState initial)
    : plan_(std::move(plan)), initial_(std::move(initial)) {}

std::optional<HelpfulUser::Hint> HelpfulUser::hint(const Episode& context, const std::string& cls) const {
    const env::WorldState now = replay_world(initial_, context);
    Hint h;
    std::string last_goto;
    for (const auto& s : plan_) {
        auto a = grammar::parse_action(s);
        if (!a) continue;
        if (a->verb == grammar::Verb::GoTo) last_goto = a->receptacle->str();

        if ((a->verb == grammar::Verb::Use || a->verb == grammar::Verb::Toggle) && env::is_lamp_class(cls)) {
            const grammar::EntityRef& lamp = a->verb == grammar::Verb::Use ? *a->receptacle : a->toggle_target();
            if (lamp.class_name == cls && h.receptacle.empty() && !last_goto.empty()) h.receptacle = last_goto;
        }
        if (a->verb == grammar::Verb::Take && a->object->class_name == cls) {
            if (std::find(h.picks.begin(), h.picks.end(), *a->object) == h.picks.end()) h.picks.push_back(*a->object);
            auto it = now.objects.find(a->object->str());
            if (h.receptacle.empty() && it != now.objects.end() && it->second.location == a->receptacle->str())
                h.receptacle = a->receptacle->str();
        }
    }
    if (h.receptacle.empty() && h.picks.empty()) return std::nullopt;
    return h;
}

UserResponse HelpfulUser::respond(const Episode& context, const std::string& utterance) {
    const std::string cls = queried_class(utterance, initial_, context.task().object_class);
    UserResponse r{"", Persona::HelpfulKnowledgeable};
    switch (detect_query(utterance)) {
        case QueryType::Location: {
            auto h = hint(context, cls);
            r.text = h && !h->receptacle.empty() ? "Hmm let me think. Can you please check the " + h->receptacle + "?"
                                                 : "Sorry, I am not sure where that is.";
            break;
        }
        case QueryType::Disambiguation: {
            auto h = hint(context, cls);
            r.text = h && !h->picks.empty() ? "Just " + join_instances(h->picks) + "." : "Sorry, I am not sure about that.";
            break;
        }
        case QueryType::Other: r.text = "Okay, sounds good."; break;
    }
    return r;
}

UserResponse PerturbedUser::respond(const Episode& context, const std::string& utterance) {
    const std::string cls = queried_class(utterance, initial_, context.task().object_class);
    UserResponse r{"", Persona::HelpfulPerturbed};
    auto receptacle_class = [](const std::string& name) { return text::split_words(name).front(); };
    switch (detect_query(utterance)) {
        case QueryType::Location: {
            auto h = hint(context, cls);
            r.text = h && !h->receptacle.empty()
                         ? "Hmm let me think. Can you please check the " + receptacle_class(h->receptacle) + "?"
                         : "Sorry, I am not sure where that is.";
            break;
        }
        case QueryType::Disambiguation: {
            auto h = hint(context, cls);
            if (h && !h->receptacle.empty())
                r.text = "Hmm, maybe the " + cls + "s on the " + receptacle_class(h->receptacle) + ".";
            else
                r.text = "Sorry, I am not sure about that.";
            break;
        }
        case QueryType::Other: r.text = "Okay, sounds good."; break;
    }
    return r;
}

UnhelpfulUser::UnhelpfulUser(const env::OraclePlan& plan, const env::WorldState& initial, std::uint64_t seed)
    : rng_(seed) {
    const auto on_path = plan_receptacles(plan, initial);
    for (const auto& [name, rec] : initial.receptacles)
        if (std::find(on_path.begin(), on_path.end(), name) == on_path.end()) candidates_.push_back(name);
    if (candidates_.empty())
        for (const auto& [name, rec] : initial.receptacles) candidates_.push_back(name);
    if (candidates_.empty()) throw std::invalid_argument("UnhelpfulUser needs a world with receptacles");
}

UserResponse UnhelpfulUser::respond(const Episode&, const std::string& utterance) {
    if (detect_query(utterance) == QueryType::Other) return {"Hmm I am not sure.", Persona::Unhelpful};
    const std::string& pick = candidates_[rng_() % candidates_.size()];
    return {"Hmm I am not sure maybe check the " + pick + "?", Persona::Unhelpful};
}

ReplayUser::ReplayUser(std::vector<std::string> replies, Persona persona)
    : replies_(replies.begin(), replies.end()), persona_(persona) {}

UserResponse ReplayUser::respond(const Episode&, const std::string&) {
    if (replies_.empty()) throw UserChannelClosed("no recorded replies left");
    UserResponse r{std::move(replies_.front()), persona_};
    replies_.pop_front();
    return r;
}

StreamUser::StreamUser(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

UserResponse StreamUser::respond(const Episode&, const std::string& utterance) {
    out_ << "\nAgent: " << utterance << "\n";
    std::string line;
    while (true) {
        out_ << "You: " << std::flush;
        if (!std::getline(in_, line)) throw UserChannelClosed("input closed");
        line = text::trim(line);
        if (!line.empty()) return {line, Persona::Human};
    }
}

std::string format_plan(const env::OraclePlan& plan) {
    std::string out = "[";
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (i > 0) out += ", ";
        out += "'" + plan[i] + "'";
    }
    return out + "]";
}

std::string render_user_prompt(const std::string& tmpl, const env::OraclePlan& plan, const std::string& query) {
    std::string out = tmpl;
    auto sub = [&out](const std::string& key, const std::string& value) {
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
            out.replace(pos, key.size(), value);
    };
    sub("{oracle_text}", format_plan(plan));
    sub("{query}", query);
    return out;
}

LLMUser::LLMUser(env::OraclePlan plan, std::string prompt_template, llm::ChatClient& client, Persona persona)
    : plan_(std::move(plan)), template_(std::move(prompt_template)), client_(client), persona_(persona) {}

UserResponse LLMUser::respond(const Episode&, const std::string& utterance) {
    std::string reply;
    try {
        reply = client_.complete({{"user", render_user_prompt(template_, plan_, utterance)}});
    } catch (const llm::ChatError& e) {
        throw UserChannelClosed(e.what());
    }
    reply = text::trim(reply);
    if (reply.empty()) throw UserChannelClosed("language-model user returned nothing");
    return {reply, persona_};
}

}  // namespace respact::users
