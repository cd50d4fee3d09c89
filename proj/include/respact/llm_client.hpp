#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace respact::llm {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatConfig {
    // OpenAI-compatible endpoint root, e.g. "http://localhost:8000/v1".
    std::string base_url;
    std::string api_key;
    std::string model = "gpt-4o-mini";
    double temperature = 0.0;
    int timeout_seconds = 60;

    // Fills base_url / api_key from RESPACT_LLM_URL / RESPACT_LLM_KEY when unset.
    static ChatConfig from_env(ChatConfig base);
};

class ChatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    // The assistant message text. Throws ChatError on transport or protocol errors.
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

// POST {base_url}/chat/completions
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(ChatConfig cfg);
    std::string complete(const std::vector<ChatMessage>& messages) override;
    const ChatConfig& config() const { return cfg_; }

private:
    ChatConfig cfg_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;    // base path + "/chat/completions"
};

// Test double around a callable.
class FunctionChatClient : public ChatClient {
public:
    using Fn = std::function<std::string(const std::vector<ChatMessage>&)>;
    explicit FunctionChatClient(Fn fn) : fn_(std::move(fn)) {}
    std::string complete(const std::vector<ChatMessage>& messages) override { return fn_(messages); }

private:
    Fn fn_;
};

}  // namespace respact::llm
