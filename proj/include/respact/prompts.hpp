#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "respact/core.hpp"
#include "respact/expected.hpp"
#include "respact/llm_client.hpp"

namespace respact::prompts {

// Transcript text format used by exemplars and fixtures:
//
//   <room description>
//   Your task is to: <goal>
//   > think: ...        followed by "OK."
//   > speak: ...        followed by "> Human: ..."
//   > <action>          followed by the observation line
struct TranscriptLine {
    enum class Kind { Think, Speak, Act, Human, Observation };
    Kind kind;
    std::string text;

    friend bool operator==(const TranscriptLine&, const TranscriptLine&) = default;
};

struct Transcript {
    std::string initial_observation;
    std::vector<TranscriptLine> lines;

    std::vector<Decision> decisions() const;
    std::vector<std::string> human_replies() const;

    friend bool operator==(const Transcript&, const Transcript&) = default;
};

// Throws std::invalid_argument when there is no "Your task is to:" line.
Transcript parse_transcript(std::string_view text);
std::string render_transcript(const Transcript& t);
Transcript transcript_of(const Episode& episode);

enum class PromptStyle { ReAct, ReSpAct, ReSpActSchema };

std::string_view to_string(PromptStyle style);
std::optional<PromptStyle> prompt_style_from_string(std::string_view s);

// Deletes every "> speak:" and "> Human:" line.
std::string strip_dialogue(std::string_view transcript);
// Prefixes every untagged speak line with its dialogue act: "> speak: [Act]: ...".
std::string tag_dialogue(std::string_view transcript);

struct PromptPack {
    PromptStyle style;
    TaskType task;
    std::size_t permutation;  // 0-based index into the ordered pairs
    std::string system_prompt;
    std::string first;
    std::string second;

    friend bool operator==(const PromptPack&, const PromptPack&) = default;
};

// One pack per ordered pair of distinct exemplars, in lexicographic order of
// (first, second): (0,1) (0,2) (1,0) (1,2) (2,0) (2,1) for three. Exemplars
// are given in ReSpAct form and converted for the other styles.
std::vector<PromptPack> build_packs(PromptStyle style, TaskType task, std::span<const std::string> exemplars,
                                    const std::string& system_prompt);

std::vector<llm::ChatMessage> render_messages(const PromptPack& pack, const Episode& context);

// Parses one model turn. Strips a leading "> ", reads an optional
// think:/speak:/act: tag (case-insensitive, untagged means act) and keeps
// text up to the next tagged line.
Expected<Decision, std::string> parse_reply(std::string_view reply);

std::filesystem::path default_data_dir();

class PromptLibrary {
public:
    // Reads prompts/ and exemplars/ below `data_dir`. Throws std::runtime_error
    // when a file is missing or a task has fewer than two exemplars.
    static PromptLibrary load(const std::filesystem::path& data_dir = default_data_dir());

    const std::string& system_prompt(PromptStyle style) const;
    // Template for a simulated-user persona (helpful, perturbed, unhelpful).
    const std::string& user_prompt(Persona persona) const;
    const std::vector<std::string>& exemplars(TaskType task) const;
    std::vector<PromptPack> packs(PromptStyle style, TaskType task) const;

private:
    std::map<PromptStyle, std::string> system_;
    std::map<Persona, std::string> users_;
    std::map<TaskType, std::vector<std::string>> exemplars_;
};

std::string read_text_file(const std::filesystem::path& path);

}  // namespace respact::prompts
