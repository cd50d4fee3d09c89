#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "respact/core.hpp"
#include "respact/expected.hpp"

namespace respact::dialogue {

enum class DialogAct {
    ReqForInstruction,
    RequestOtherInfo,
    InfoObjectLocAndOD,
    ReqForObjLocAndOD,
    InformationOther,
    AlternateQuestions,
    Affirm,
    Deny,
    OtherInterfaceComment,
    NotifyFailure,
};

inline constexpr std::array<DialogAct, 10> kAllActs{
    DialogAct::ReqForInstruction,  DialogAct::RequestOtherInfo, DialogAct::InfoObjectLocAndOD,
    DialogAct::ReqForObjLocAndOD,  DialogAct::InformationOther, DialogAct::AlternateQuestions,
    DialogAct::Affirm,             DialogAct::Deny,             DialogAct::OtherInterfaceComment,
    DialogAct::NotifyFailure,
};

std::string_view to_string(DialogAct act);
std::optional<DialogAct> act_from_string(std::string_view name);

// Ordered rule cascade, first match wins:
//   explicit "[Act]:" / "<Act>:" tag, location question, location statement,
//   which-question offering alternatives, failure report, yes/no lead,
//   next-step question, other which/how-many question, interface remark,
//   otherwise InformationOther.
DialogAct classify(std::string_view utterance);

struct SchemaViolation {
    enum class Kind { MissingTag, UnknownAct, EmptyBody };
    Kind kind;
    std::string detail;
};

std::string_view to_string(SchemaViolation::Kind kind);

// ok (the tagged act) iff the utterance starts with "[Act]:" or "<Act>:" for
// one of the ten acts and has a non-empty body.
Expected<DialogAct, SchemaViolation> validate_schema_output(std::string_view utterance);

// Always holds all ten keys.
using ActHistogram = std::map<DialogAct, std::size_t>;

ActHistogram empty_histogram();
ActHistogram act_histogram(std::span<const Episode> episodes);
ActHistogram operator+(const ActHistogram& a, const ActHistogram& b);

}  // namespace respact::dialogue
