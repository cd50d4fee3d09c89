#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "respact/expected.hpp"

namespace respact::grammar {

// "drawer 1", "creditcard 2"
struct EntityRef {
    std::string class_name;
    int index = 1;

    std::string str() const;
    friend bool operator==(const EntityRef&, const EntityRef&) = default;
    friend auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

// Parses "class index" (class lowercased). Returns nullopt unless the
// class is [a-z]+ after lowering and the index is a positive integer.
std::optional<EntityRef> parse_entity(std::string_view text);

enum class Verb { Put, GoTo, Take, Open, Toggle, Close, Clean, Heat, Cool, Use, Look };

inline constexpr Verb kAllVerbs[] = {Verb::Put,    Verb::GoTo,  Verb::Take,  Verb::Open, Verb::Toggle, Verb::Close,
                                     Verb::Clean,  Verb::Heat,  Verb::Cool,  Verb::Use,  Verb::Look};

std::string_view verb_name(Verb verb);

struct EnvAction {
    Verb verb = Verb::Look;
    std::optional<EntityRef> object;
    std::optional<EntityRef> receptacle;

    static EnvAction put(EntityRef object, EntityRef receptacle);
    static EnvAction go_to(EntityRef receptacle);
    static EnvAction take(EntityRef object, EntityRef receptacle);
    static EnvAction open(EntityRef receptacle);
    // Canonical toggle targets sit in the object slot.
    static EnvAction toggle(EntityRef target);
    static EnvAction close(EntityRef receptacle);
    static EnvAction clean(EntityRef object, EntityRef receptacle);
    static EnvAction heat(EntityRef object, EntityRef receptacle);
    static EnvAction cool(EntityRef object, EntityRef receptacle);
    static EnvAction use(EntityRef receptacle);
    static EnvAction look();

    // Arity rules per verb.
    bool well_formed() const;
    // Toggle target, whichever slot holds it.
    const EntityRef& toggle_target() const;

    friend bool operator==(const EnvAction&, const EnvAction&) = default;
};

struct ParseError {
    enum class Kind { UnknownVerb, ArityMismatch, BadEntityRef };
    Kind kind;
    // Offending span, as offsets into the whitespace-normalized input.
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string message;
};

std::string_view to_string(ParseError::Kind kind);

// Accepts exactly the eleven productions:
//   put O in/on R | go to R | take O from R | open R | toggle X | close R
//   clean O with R | heat O with R | cool O with R | use R | look
// Whitespace is collapsed, verbs are case-insensitive, "in" and "on" are
// accepted in place of "in/on".
Expected<EnvAction, ParseError> parse_action(std::string_view raw);

// Canonical surface form. Precondition: a.well_formed().
std::string format_action(const EnvAction& a);

}  // namespace respact::grammar
