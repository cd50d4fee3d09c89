#include "respact/dialogue_schema.hpp"

#include <regex>
#include <set>

#include "respact/text.hpp"

namespace respact::dialogue {

std::string_view to_string(DialogAct act) {
    switch (act) {
        case DialogAct::ReqForInstruction: return "ReqForInstruction";
        case DialogAct::RequestOtherInfo: return "RequestOtherInfo";
        case DialogAct::InfoObjectLocAndOD: return "InfoObjectLocAndOD";
        case DialogAct::ReqForObjLocAndOD: return "ReqForObjLocAndOD";
        case DialogAct::InformationOther: return "InformationOther";
        case DialogAct::AlternateQuestions: return "AlternateQuestions";
        case DialogAct::Affirm: return "Affirm";
        case DialogAct::Deny: return "Deny";
        case DialogAct::OtherInterfaceComment: return "OtherInterfaceComment";
        case DialogAct::NotifyFailure: return "NotifyFailure";
    }
    return "?";
}

std::optional<DialogAct> act_from_string(std::string_view name) {
    for (DialogAct act : kAllActs)
        if (to_string(act) == name) return act;
    return std::nullopt;
}

std::string_view to_string(SchemaViolation::Kind kind) {
    switch (kind) {
        case SchemaViolation::Kind::MissingTag: return "MissingTag";
        case SchemaViolation::Kind::UnknownAct: return "UnknownAct";
        case SchemaViolation::Kind::EmptyBody: return "EmptyBody";
    }
    return "?";
}

namespace {

struct Tag {
    std::string name;
    std::string body;
};

// "[Name]: body" or "<Name>: body"
std::optional<Tag> split_tag(std::string_view utterance) {
    const std::string u = text::trim(utterance);
    if (u.empty() || (u[0] != '[' && u[0] != '<')) return std::nullopt;
    const char close = u[0] == '[' ? ']' : '>';
    const auto end = u.find(close);
    if (end == std::string::npos || end + 1 >= u.size() || u[end + 1] != ':') return std::nullopt;
    return Tag{u.substr(1, end - 1), text::trim(std::string_view(u).substr(end + 2))};
}

// Words that can precede a number without naming an object instance
// ("which 2 books", "the 3 of them").
const std::set<std::string>& non_instance_words() {
    static const std::set<std::string> words{"which", "what", "the", "all", "these", "those", "any", "only",
                                             "just", "pick", "take", "get", "find", "choose", "select",
                                             "put", "of", "first", "last", "step", "about"};
    return words;
}

std::size_t instance_mentions(const std::string& lower) {
    static const std::regex mention(R"(([a-z]+) \(?(\d+)\)?)");
    std::set<std::string> seen;
    for (auto it = std::sregex_iterator(lower.begin(), lower.end(), mention); it != std::sregex_iterator(); ++it) {
        const std::string word = (*it)[1];
        if (non_instance_words().count(word)) continue;
        seen.insert(word + " " + (*it)[2].str());
    }
    return seen.size();
}

bool any_of_ci(const std::string& lower, std::initializer_list<std::string_view> needles) {
    for (auto n : needles)
        if (lower.find(n) != std::string::npos) return true;
    return false;
}

std::string first_word(const std::string& lower) {
    std::size_t i = 0;
    while (i < lower.size() && std::isalpha(static_cast<unsigned char>(lower[i]))) ++i;
    return lower.substr(0, i);
}

}  // namespace

DialogAct classify(std::string_view utterance) {
    if (auto tag = split_tag(utterance))
        if (auto act = act_from_string(tag->name)) return *act;

    const std::string u = text::to_lower(text::trim(utterance));
    const bool question = u.find('?') != std::string::npos;

    if (text::contains_word_ci(u, "where")) return DialogAct::ReqForObjLocAndOD;

    static const std::regex location_statement(R"(\b[a-z]+( \d+)? (is|are) (on|in|inside|at) the [a-z]+)");
    if (!question && std::regex_search(u, location_statement)) return DialogAct::InfoObjectLocAndOD;

    if (text::contains_word_ci(u, "which") && (u.find(" or ") != std::string::npos || instance_mentions(u) >= 2))
        return DialogAct::AlternateQuestions;

    if (any_of_ci(u, {"not able", "unable", "issue with", "failed", "cannot", "can't", "could not", "couldn't"}))
        return DialogAct::NotifyFailure;

    const std::string lead = first_word(u);
    if (lead == "yes" || lead == "yeah" || lead == "sure" || lead == "okay" || lead == "ok")
        return DialogAct::Affirm;
    if (lead == "no" || lead == "nope") return DialogAct::Deny;

    if (any_of_ci(u, {"what should i do", "what do i do", "what next", "next step", "what now", "what else should i do"}))
        return DialogAct::ReqForInstruction;

    if (question && (text::contains_word_ci(u, "which") || any_of_ci(u, {"how many", "what kind", "what type"})))
        return DialogAct::RequestOtherInfo;

    if (text::starts_with_ci(u, "i am at") || text::starts_with_ci(u, "i'm at") ||
        any_of_ci(u, {"it is closed", "it is open", "is closed", "is open"}))
        return DialogAct::OtherInterfaceComment;

    return DialogAct::InformationOther;
}

Expected<DialogAct, SchemaViolation> validate_schema_output(std::string_view utterance) {
    auto tag = split_tag(utterance);
    if (!tag) return unexpected(SchemaViolation{SchemaViolation::Kind::MissingTag, "expected '[DialogAct]: ...'"});
    auto act = act_from_string(tag->name);
    if (!act) return unexpected(SchemaViolation{SchemaViolation::Kind::UnknownAct, "unknown act '" + tag->name + "'"});
    if (tag->body.empty()) return unexpected(SchemaViolation{SchemaViolation::Kind::EmptyBody, "no utterance after tag"});
    return *act;
}

ActHistogram empty_histogram() {
    ActHistogram h;
    for (DialogAct act : kAllActs) h[act] = 0;
    return h;
}

ActHistogram act_histogram(std::span<const Episode> episodes) {
    ActHistogram h = empty_histogram();
    for (const Episode& ep : episodes)
        for (const Event& e : ep.events())
            if (const Decision* d = e.decision(); d && d->kind == DecisionKind::Speak) ++h[classify(d->text)];
    return h;
}

ActHistogram operator+(const ActHistogram& a, const ActHistogram& b) {
    ActHistogram h = empty_histogram();
    for (const auto& [act, n] : a) h[act] += n;
    for (const auto& [act, n] : b) h[act] += n;
    return h;
}

}  // namespace respact::dialogue
