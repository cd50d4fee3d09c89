#include "respact/grammar.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <vector>

#include "respact/text.hpp"

namespace respact::grammar {

std::string EntityRef::str() const { return class_name + " " + std::to_string(index); }

std::optional<EntityRef> parse_entity(std::string_view text) {
    const auto words = text::split_words(text);
    if (words.size() != 2) return std::nullopt;
    std::string cls = text::to_lower(words[0]);
    if (cls.empty()) return std::nullopt;
    for (char c : cls)
        if (c < 'a' || c > 'z') return std::nullopt;
    const std::string& digits = words[1];
    int index = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || index < 1) return std::nullopt;
    return EntityRef{std::move(cls), index};
}

std::string_view verb_name(Verb verb) {
    switch (verb) {
        case Verb::Put: return "put";
        case Verb::GoTo: return "go to";
        case Verb::Take: return "take";
        case Verb::Open: return "open";
        case Verb::Toggle: return "toggle";
        case Verb::Close: return "close";
        case Verb::Clean: return "clean";
        case Verb::Heat: return "heat";
        case Verb::Cool: return "cool";
        case Verb::Use: return "use";
        case Verb::Look: return "look";
    }
    return "?";
}

EnvAction EnvAction::put(EntityRef o, EntityRef r) { return {Verb::Put, std::move(o), std::move(r)}; }
EnvAction EnvAction::go_to(EntityRef r) { return {Verb::GoTo, std::nullopt, std::move(r)}; }
EnvAction EnvAction::take(EntityRef o, EntityRef r) { return {Verb::Take, std::move(o), std::move(r)}; }
EnvAction EnvAction::open(EntityRef r) { return {Verb::Open, std::nullopt, std::move(r)}; }
EnvAction EnvAction::toggle(EntityRef t) { return {Verb::Toggle, std::move(t), std::nullopt}; }
EnvAction EnvAction::close(EntityRef r) { return {Verb::Close, std::nullopt, std::move(r)}; }
EnvAction EnvAction::clean(EntityRef o, EntityRef r) { return {Verb::Clean, std::move(o), std::move(r)}; }
EnvAction EnvAction::heat(EntityRef o, EntityRef r) { return {Verb::Heat, std::move(o), std::move(r)}; }
EnvAction EnvAction::cool(EntityRef o, EntityRef r) { return {Verb::Cool, std::move(o), std::move(r)}; }
EnvAction EnvAction::use(EntityRef r) { return {Verb::Use, std::nullopt, std::move(r)}; }
EnvAction EnvAction::look() { return {Verb::Look, std::nullopt, std::nullopt}; }

bool EnvAction::well_formed() const {
    switch (verb) {
        case Verb::Put:
        case Verb::Take:
        case Verb::Clean:
        case Verb::Heat:
        case Verb::Cool: return object && receptacle;
        case Verb::GoTo:
        case Verb::Open:
        case Verb::Close:
        case Verb::Use: return !object && receptacle;
        case Verb::Toggle: return object.has_value() != receptacle.has_value();
        case Verb::Look: return !object && !receptacle;
    }
    return false;
}

const EntityRef& EnvAction::toggle_target() const {
    if (object) return *object;
    if (receptacle) return *receptacle;
    throw std::logic_error("toggle without a target");
}

std::string_view to_string(ParseError::Kind kind) {
    switch (kind) {
        case ParseError::Kind::UnknownVerb: return "UnknownVerb";
        case ParseError::Kind::ArityMismatch: return "ArityMismatch";
        case ParseError::Kind::BadEntityRef: return "BadEntityRef";
    }
    return "?";
}

namespace {

struct Token {
    std::string lower;
    std::size_t begin;
    std::size_t end;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ') ++i;
        out.push_back({text::to_lower(std::string_view(s).substr(b, i - b)), b, i});
        ++i;
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view raw) : norm_(text::normalize_space(raw)), toks_(tokenize(norm_)) {}

    Expected<EnvAction, ParseError> run() {
        if (toks_.empty()) return fail(ParseError::Kind::UnknownVerb, 0, 0, "empty command");
        const std::string& v = toks_[0].lower;

        if (v == "look") {
            if (toks_.size() != 1) return fail(ParseError::Kind::ArityMismatch, 1, toks_.size(), "look takes no arguments");
            return EnvAction::look();
        }
        if (v == "go") {
            if (toks_.size() < 2 || toks_[1].lower != "to")
                return fail(ParseError::Kind::UnknownVerb, 0, std::min<std::size_t>(2, toks_.size()),
                            "expected 'go to'");
            return unary(Verb::GoTo, 2);
        }
        if (v == "open") return unary(Verb::Open, 1);
        if (v == "close") return unary(Verb::Close, 1);
        if (v == "use") return unary(Verb::Use, 1);
        if (v == "toggle") return unary(Verb::Toggle, 1);
        if (v == "take") return binary(Verb::Take, {"from"});
        if (v == "put") return binary(Verb::Put, {"in/on", "in", "on"});
        if (v == "clean") return binary(Verb::Clean, {"with"});
        if (v == "heat") return binary(Verb::Heat, {"with"});
        if (v == "cool") return binary(Verb::Cool, {"with"});
        return fail(ParseError::Kind::UnknownVerb, 0, 1, "unknown verb '" + toks_[0].lower + "'");
    }

private:
    Unexpected<ParseError> fail(ParseError::Kind kind, std::size_t first_tok, std::size_t last_tok,
                                std::string message) const {
        std::size_t b = norm_.size(), e = norm_.size();
        if (first_tok < last_tok && last_tok <= toks_.size()) {
            b = toks_[first_tok].begin;
            e = toks_[last_tok - 1].end;
        }
        return unexpected(ParseError{kind, b, e, std::move(message)});
    }

    std::optional<EntityRef> entity(std::size_t first, std::size_t last) const {
        if (first >= last) return std::nullopt;
        return parse_entity(std::string_view(norm_).substr(toks_[first].begin, toks_[last - 1].end - toks_[first].begin));
    }

    Expected<EnvAction, ParseError> unary(Verb verb, std::size_t first) {
        if (first >= toks_.size()) return fail(ParseError::Kind::ArityMismatch, 0, toks_.size(), "missing target");
        auto ref = entity(first, toks_.size());
        if (!ref) return fail(ParseError::Kind::BadEntityRef, first, toks_.size(), "expected '<class> <index>'");
        EnvAction a{verb, std::nullopt, std::nullopt};
        if (verb == Verb::Toggle)
            a.object = std::move(*ref);
        else
            a.receptacle = std::move(*ref);
        return a;
    }

    Expected<EnvAction, ParseError> binary(Verb verb, std::initializer_list<std::string_view> separators) {
        std::size_t sep = 0;
        for (std::size_t i = 1; i < toks_.size() && sep == 0; ++i)
            for (auto s : separators)
                if (toks_[i].lower == s) {
                    sep = i;
                    break;
                }
        if (sep == 0) return fail(ParseError::Kind::ArityMismatch, 0, toks_.size(), "missing preposition");
        if (sep == 1 || sep + 1 >= toks_.size())
            return fail(ParseError::Kind::ArityMismatch, 0, toks_.size(), "missing object or receptacle");
        auto obj = entity(1, sep);
        if (!obj) return fail(ParseError::Kind::BadEntityRef, 1, sep, "expected '<class> <index>'");
        auto rec = entity(sep + 1, toks_.size());
        if (!rec) return fail(ParseError::Kind::BadEntityRef, sep + 1, toks_.size(), "expected '<class> <index>'");
        return EnvAction{verb, std::move(*obj), std::move(*rec)};
    }

    std::string norm_;
    std::vector<Token> toks_;
};

}  // namespace

Expected<EnvAction, ParseError> parse_action(std::string_view raw) { return Parser(raw).run(); }

std::string format_action(const EnvAction& a) {
    if (!a.well_formed()) throw std::invalid_argument("format_action: malformed action");
    switch (a.verb) {
        case Verb::Put: return "put " + a.object->str() + " in/on " + a.receptacle->str();
        case Verb::GoTo: return "go to " + a.receptacle->str();
        case Verb::Take: return "take " + a.object->str() + " from " + a.receptacle->str();
        case Verb::Open: return "open " + a.receptacle->str();
        case Verb::Toggle: return "toggle " + a.toggle_target().str();
        case Verb::Close: return "close " + a.receptacle->str();
        case Verb::Clean: return "clean " + a.object->str() + " with " + a.receptacle->str();
        case Verb::Heat: return "heat " + a.object->str() + " with " + a.receptacle->str();
        case Verb::Cool: return "cool " + a.object->str() + " with " + a.receptacle->str();
        case Verb::Use: return "use " + a.receptacle->str();
        case Verb::Look: return "look";
    }
    return {};
}

}  // namespace respact::grammar
