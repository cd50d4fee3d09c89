#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "respact/household.hpp"
#include "respact/llm_client.hpp"
#include "respact/orchestrator.hpp"

namespace respact::users {

enum class QueryType { Location, Disambiguation, Other };

// "where" asks for a location, "which" asks to choose between instances,
// anything else is answered with an acknowledgement.
QueryType detect_query(std::string_view utterance);

// The object class an utterance is about: the last object class of `world`
// mentioned (singular or plural), else `fallback`.
std::string queried_class(std::string_view utterance, const env::WorldState& world, const std::string& fallback);

// `initial` with every valid act of `context` applied.
env::WorldState replay_world(const env::WorldState& initial, const Episode& context);

// Receptacles named anywhere in the plan.
std::vector<std::string> plan_receptacles(const env::OraclePlan& plan, const env::WorldState& world);

// Answers from the oracle plan. Location questions name the receptacle of the
// first plan pickup of the queried class that is still where the plan
// expects it ("Hmm let me think. Can you please check the dresser 1?");
// desklamp questions name the receptacle visited before the plan uses the
// lamp. "which" questions list the plan's instances. Only receptacles that
// appear in the plan are ever mentioned.
class HelpfulUser : public UserPort {
public:
    HelpfulUser(env::OraclePlan plan, env::WorldState initial);
    UserResponse respond(const Episode& context, const std::string& utterance) override;

protected:
    struct Hint {
        std::string receptacle;                // "countertop 1"
        std::vector<grammar::EntityRef> picks; // plan instances of the class
    };
    std::optional<Hint> hint(const Episode& context, const std::string& cls) const;

    env::OraclePlan plan_;
    env::WorldState initial_;
};

// Same knowledge as HelpfulUser but drops instance indices and hedges
// ("Can you please check the countertop?", "maybe the creditcards on the countertop").
class PerturbedUser : public HelpfulUser {
public:
    using HelpfulUser::HelpfulUser;
    UserResponse respond(const Episode& context, const std::string& utterance) override;
};

// Answers location and choice questions with a receptacle drawn uniformly
// from those not on the oracle path (all receptacles if that set is empty).
class UnhelpfulUser : public UserPort {
public:
    UnhelpfulUser(const env::OraclePlan& plan, const env::WorldState& initial, std::uint64_t seed);
    UserResponse respond(const Episode& context, const std::string& utterance) override;
    const std::vector<std::string>& candidates() const { return candidates_; }

private:
    std::vector<std::string> candidates_;
    std::mt19937_64 rng_;
};

// Replies from a fixed list, in order. Throws UserChannelClosed when exhausted.
class ReplayUser : public UserPort {
public:
    explicit ReplayUser(std::vector<std::string> replies, Persona persona = Persona::Human);
    UserResponse respond(const Episode& context, const std::string& utterance) override;

private:
    std::deque<std::string> replies_;
    Persona persona_;
};

// A person at a terminal. Prints the question to `out`, reads one line from `in`.
class StreamUser : public UserPort {
public:
    StreamUser(std::istream& in, std::ostream& out);
    UserResponse respond(const Episode& context, const std::string& utterance) override;

private:
    std::istream& in_;
    std::ostream& out_;
};

// "['go to dresser 1', 'take newspaper 1 from dresser 1']"
std::string format_plan(const env::OraclePlan& plan);
// Substitutes {oracle_text} and {query}.
std::string render_user_prompt(const std::string& tmpl, const env::OraclePlan& plan, const std::string& query);

// A language-model user primed with one of the persona prompts.
class LLMUser : public UserPort {
public:
    LLMUser(env::OraclePlan plan, std::string prompt_template, llm::ChatClient& client, Persona persona);
    UserResponse respond(const Episode& context, const std::string& utterance) override;

private:
    env::OraclePlan plan_;
    std::string template_;
    llm::ChatClient& client_;
    Persona persona_;
};

}  // namespace respact::users
