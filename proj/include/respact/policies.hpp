#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "respact/household.hpp"
#include "respact/llm_client.hpp"
#include "respact/orchestrator.hpp"
#include "respact/prompts.hpp"

namespace respact::policies {

// Emits the oracle plan as Acts, then "look" forever.
class OraclePolicy : public PolicyPort {
public:
    explicit OraclePolicy(env::OraclePlan plan);
    std::optional<Decision> decide(const Episode& context) override;

private:
    env::OraclePlan plan_;
    std::size_t next_ = 0;
};

// Emits a recorded decision sequence, then stops.
class ReplayPolicy : public PolicyPort {
public:
    explicit ReplayPolicy(std::vector<Decision> decisions);
    static ReplayPolicy from_transcript(const prompts::Transcript& t);
    std::optional<Decision> decide(const Episode& context) override;

private:
    std::vector<Decision> decisions_;
    std::size_t next_ = 0;
};

// Repeats one decision forever.
class ConstantPolicy : public PolicyPort {
public:
    explicit ConstantPolicy(Decision d) : d_(std::move(d)) {}
    std::optional<Decision> decide(const Episode&) override { return d_; }

private:
    Decision d_;
};

struct ScriptedConfig {
    // The agent follows every receptacle the user names and asks again after
    // each miss. It sweeps the unvisited receptacles on its own once a reply
    // names nothing usable or after this many questions for one target.
    std::size_t max_location_questions = 20;
    // Gives up after this many invalid acts in a row.
    std::size_t max_failed_acts = 3;
};

// Deterministic ReSpAct-style agent without a language model. It plans in
// Think turns, asks the user where to look, follows the receptacles named in
// the reply, asks which instances to use when several are in view on a
// two-object task, and searches systematically when the user is no help.
class ScriptedReSpActPolicy : public PolicyPort {
public:
    explicit ScriptedReSpActPolicy(ScriptedConfig cfg = {});
    std::optional<Decision> decide(const Episode& context) override;

private:
    enum class Ask { None, Location, Choice };

    void start(const Episode& context);
    void absorb(const Decision& decision, const Event& response);
    void absorb_user(const std::string& reply);
    std::optional<Decision> next();
    std::optional<Decision> find_object();
    std::optional<Decision> search(const std::string& cls);
    void set_search(const std::string& cls);
    void reset_search();
    std::optional<Decision> milestone();

    std::vector<grammar::EntityRef> known(const std::string& cls) const;
    std::optional<std::string> where_is(const grammar::EntityRef& obj) const;
    bool explored(const std::string& receptacle) const;
    std::string first_of_class(const std::string& cls) const;
    std::vector<std::string> mentioned_receptacles(const std::string& reply) const;
    Decision then(Decision now, Decision later);

    ScriptedConfig cfg_;
    TaskGoal goal_;
    bool started_ = false;
    std::size_t seen_events_ = 0;

    std::vector<grammar::EntityRef> receptacles_;  // by class, then index
    std::map<std::string, std::vector<grammar::EntityRef>> contents_;
    std::set<std::string> closed_;
    std::set<std::string> visited_;
    std::string at_;
    std::optional<grammar::EntityRef> holding_;
    std::set<std::string> placed_;
    std::vector<grammar::EntityRef> preferred_;
    bool chose_ = false;
    bool processed_ = false;
    std::set<std::string> announced_;

    std::string search_class_;
    std::deque<std::string> queue_;
    std::size_t asks_ = 0;
    bool sweeping_ = false;
    Ask pending_ask_ = Ask::None;
    std::size_t failed_acts_ = 0;
    std::deque<Decision> queued_;
};

// Prompted language model behind an OpenAI-compatible chat endpoint.
// Malformed replies are retried; persistent failure raises PolicyFailure.
class LLMPolicy : public PolicyPort {
public:
    LLMPolicy(prompts::PromptPack pack, llm::ChatClient& client, int max_retries = 2);
    std::optional<Decision> decide(const Episode& context) override;
    const prompts::PromptPack& pack() const { return pack_; }

private:
    prompts::PromptPack pack_;
    llm::ChatClient& client_;
    int max_retries_;
};

}  // namespace respact::policies
