#include "respact/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "respact/dialogue_schema.hpp"
#include "respact/text.hpp"

namespace respact::prompts {

namespace {

constexpr std::string_view kTaskLine = "Your task is to:";

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

bool is_prompt_line(const std::string& line) { return line.rfind("> ", 0) == 0; }

// Tag of a "> tag: body" line, lowercased, or "" when untagged.
std::string line_tag(const std::string& line) {
    const std::string body = line.substr(2);
    for (std::string_view tag : {"think:", "speak:", "human:"})
        if (text::starts_with_ci(body, tag)) return std::string(tag.substr(0, tag.size() - 1));
    return "";
}

}  // namespace

std::vector<Decision> Transcript::decisions() const {
    std::vector<Decision> out;
    for (const auto& l : lines) {
        switch (l.kind) {
            case TranscriptLine::Kind::Think: out.push_back(Decision::think(l.text)); break;
            case TranscriptLine::Kind::Speak: out.push_back(Decision::speak(l.text)); break;
            case TranscriptLine::Kind::Act: out.push_back(Decision::act(l.text)); break;
            default: break;
        }
    }
    return out;
}

std::vector<std::string> Transcript::human_replies() const {
    std::vector<std::string> out;
    for (const auto& l : lines)
        if (l.kind == TranscriptLine::Kind::Human) out.push_back(l.text);
    return out;
}

Transcript parse_transcript(std::string_view text_in) {
    const auto lines = split_lines(text_in);
    Transcript t;
    std::size_t i = 0;
    std::string head;
    for (; i < lines.size() && !is_prompt_line(lines[i]); ++i) {
        if (text::trim(lines[i]).empty()) continue;
        if (!head.empty()) head += "\n";
        head += lines[i];
    }
    if (head.find(kTaskLine) == std::string::npos) throw std::invalid_argument("transcript has no task line");
    t.initial_observation = head;

    for (; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (text::trim(line).empty()) continue;
        if (!is_prompt_line(line)) {
            t.lines.push_back({TranscriptLine::Kind::Observation, line});
            continue;
        }
        const std::string tag = line_tag(line);
        const std::string body = text::trim(std::string_view(line).substr(2 + (tag.empty() ? 0 : tag.size() + 1)));
        if (tag == "think")
            t.lines.push_back({TranscriptLine::Kind::Think, body});
        else if (tag == "speak")
            t.lines.push_back({TranscriptLine::Kind::Speak, body});
        else if (tag == "human")
            t.lines.push_back({TranscriptLine::Kind::Human, body});
        else
            t.lines.push_back({TranscriptLine::Kind::Act, body});
    }
    return t;
}

std::string render_transcript(const Transcript& t) {
    std::string out = t.initial_observation + "\n";
    for (const auto& l : t.lines) {
        switch (l.kind) {
            case TranscriptLine::Kind::Think: out += "> think: " + l.text + "\n"; break;
            case TranscriptLine::Kind::Speak: out += "> speak: " + l.text + "\n"; break;
            case TranscriptLine::Kind::Act: out += "> " + l.text + "\n"; break;
            case TranscriptLine::Kind::Human: out += "> Human: " + l.text + "\n"; break;
            case TranscriptLine::Kind::Observation: out += l.text + "\n"; break;
        }
    }
    return out;
}

Transcript transcript_of(const Episode& episode) {
    Transcript t;
    t.initial_observation = episode.initial_observation();
    for (const Event& e : episode.events()) {
        if (const Decision* d = e.decision()) {
            const auto kind = d->kind == DecisionKind::Think   ? TranscriptLine::Kind::Think
                              : d->kind == DecisionKind::Speak ? TranscriptLine::Kind::Speak
                                                               : TranscriptLine::Kind::Act;
            t.lines.push_back({kind, d->text});
        } else if (e.source == Source::User) {
            t.lines.push_back({TranscriptLine::Kind::Human, e.text()});
        } else {
            t.lines.push_back({TranscriptLine::Kind::Observation, e.text()});
        }
    }
    return t;
}

std::string_view to_string(PromptStyle style) {
    switch (style) {
        case PromptStyle::ReAct: return "react";
        case PromptStyle::ReSpAct: return "respact";
        case PromptStyle::ReSpActSchema: return "respact-schema";
    }
    return "?";
}

std::optional<PromptStyle> prompt_style_from_string(std::string_view s) {
    for (auto style : {PromptStyle::ReAct, PromptStyle::ReSpAct, PromptStyle::ReSpActSchema})
        if (to_string(style) == s) return style;
    return std::nullopt;
}

std::string strip_dialogue(std::string_view transcript) {
    std::string out;
    for (const auto& line : split_lines(transcript)) {
        if (is_prompt_line(line)) {
            const std::string tag = line_tag(line);
            if (tag == "speak" || tag == "human") continue;
        }
        out += line + "\n";
    }
    return out;
}

std::string tag_dialogue(std::string_view transcript) {
    std::string out;
    for (const auto& line : split_lines(transcript)) {
        if (is_prompt_line(line) && line_tag(line) == "speak") {
            const std::string body = text::trim(std::string_view(line).substr(2 + 6));
            if (!dialogue::validate_schema_output(body)) {
                out += "> speak: [" + std::string(dialogue::to_string(dialogue::classify(body))) + "]: " + body + "\n";
                continue;
            }
        }
        out += line + "\n";
    }
    return out;
}

std::vector<PromptPack> build_packs(PromptStyle style, TaskType task, std::span<const std::string> exemplars,
                                    const std::string& system_prompt) {
    if (exemplars.size() < 2) throw std::invalid_argument("prompt packs need at least two exemplars");
    auto convert = [style](const std::string& ex) {
        switch (style) {
            case PromptStyle::ReAct: return strip_dialogue(ex);
            case PromptStyle::ReSpActSchema: return tag_dialogue(ex);
            case PromptStyle::ReSpAct: break;
        }
        return ex;
    };
    std::vector<PromptPack> packs;
    for (std::size_t i = 0; i < exemplars.size(); ++i)
        for (std::size_t j = 0; j < exemplars.size(); ++j)
            if (i != j)
                packs.push_back({style, task, packs.size(), system_prompt, convert(exemplars[i]), convert(exemplars[j])});
    return packs;
}

std::vector<llm::ChatMessage> render_messages(const PromptPack& pack, const Episode& context) {
    std::vector<llm::ChatMessage> msgs;
    msgs.push_back({"system", pack.system_prompt});
    msgs.push_back({"user", "Interact with a household to solve a task. Here are two examples.\n" +
                                text::trim(pack.first) + "\n\n" + text::trim(pack.second) +
                                "\n\nHere is the task.\n" + context.initial_observation()});
    for (const Event& e : context.events()) {
        if (const Decision* d = e.decision()) {
            const char* tag = d->kind == DecisionKind::Think ? "Think: " : d->kind == DecisionKind::Speak ? "Speak: " : "Act: ";
            msgs.push_back({"assistant", tag + d->text});
        } else if (e.source == Source::User) {
            msgs.push_back({"user", "Human: " + e.text()});
        } else {
            msgs.push_back({"user", e.text()});
        }
    }
    return msgs;
}

Expected<Decision, std::string> parse_reply(std::string_view reply) {
    std::vector<std::string> lines;
    for (auto& l : split_lines(reply)) {
        std::string t = text::trim(l);
        if (t.rfind(">", 0) == 0) t = text::trim(std::string_view(t).substr(1));
        if (!t.empty()) lines.push_back(t);
    }
    if (lines.empty()) return unexpected(std::string("empty reply"));

    auto tag_of = [](const std::string& line) -> std::optional<std::pair<DecisionKind, std::size_t>> {
        for (auto [tag, kind] : {std::pair<std::string_view, DecisionKind>{"think:", DecisionKind::Think},
                                 {"speak:", DecisionKind::Speak},
                                 {"act:", DecisionKind::Act}})
            if (text::starts_with_ci(line, tag)) return std::pair{kind, tag.size()};
        return std::nullopt;
    };

    DecisionKind kind = DecisionKind::Act;
    std::string body;
    if (auto tag = tag_of(lines[0])) {
        kind = tag->first;
        body = text::trim(std::string_view(lines[0]).substr(tag->second));
    } else {
        body = lines[0];
    }
    // Thoughts and utterances may wrap; actions are single-line.
    if (kind != DecisionKind::Act)
        for (std::size_t i = 1; i < lines.size() && !tag_of(lines[i]); ++i) body += " " + lines[i];
    body = text::trim(body);
    if (body.empty()) return unexpected(std::string("tag without content"));
    return Decision::make(kind, body);
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("RESPACT_DATA_DIR"); env && *env) return env;
    return RESPACT_DEFAULT_DATA_DIR;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& data_dir) {
    PromptLibrary lib;
    const auto prompts = data_dir / "prompts";
    lib.system_[PromptStyle::ReAct] = read_text_file(prompts / "react_main.txt");
    lib.system_[PromptStyle::ReSpAct] = read_text_file(prompts / "respact_main.txt");
    lib.system_[PromptStyle::ReSpActSchema] = read_text_file(prompts / "respact_schema_main.txt");
    lib.users_[Persona::HelpfulKnowledgeable] = read_text_file(prompts / "user_helpful.txt");
    lib.users_[Persona::HelpfulPerturbed] = read_text_file(prompts / "user_perturbed.txt");
    lib.users_[Persona::Unhelpful] = read_text_file(prompts / "user_unhelpful.txt");

    for (TaskType task : kAllTaskTypes) {
        auto& list = lib.exemplars_[task];
        for (int n = 1;; ++n) {
            const auto path = data_dir / "exemplars" / std::string(to_string(task)) / (std::to_string(n) + ".txt");
            if (!std::filesystem::exists(path)) break;
            list.push_back(read_text_file(path));
        }
        if (list.size() < 2)
            throw std::runtime_error("need at least two exemplars for " + std::string(to_string(task)));
    }
    return lib;
}

const std::string& PromptLibrary::system_prompt(PromptStyle style) const { return system_.at(style); }

const std::string& PromptLibrary::user_prompt(Persona persona) const {
    auto it = users_.find(persona);
    if (it == users_.end()) throw std::invalid_argument("no prompt for persona " + std::string(to_string(persona)));
    return it->second;
}

const std::vector<std::string>& PromptLibrary::exemplars(TaskType task) const { return exemplars_.at(task); }

std::vector<PromptPack> PromptLibrary::packs(PromptStyle style, TaskType task) const {
    return build_packs(style, task, exemplars(task), system_prompt(style));
}

}  // namespace respact::prompts
