#include "respact/llm_client.hpp"

#include <cstdlib>

#include "httplib.h"
#include "respact/serialization.hpp"

namespace respact::llm {

ChatConfig ChatConfig::from_env(ChatConfig base) {
    if (base.base_url.empty())
        if (const char* url = std::getenv("RESPACT_LLM_URL")) base.base_url = url;
    if (base.api_key.empty())
        if (const char* key = std::getenv("RESPACT_LLM_KEY")) base.api_key = key;
    return base;
}

HttpChatClient::HttpChatClient(ChatConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) throw ChatError("no LLM endpoint configured (set RESPACT_LLM_URL)");
    const auto scheme_end = cfg_.base_url.find("://");
    if (scheme_end == std::string::npos) throw ChatError("LLM endpoint must start with http:// or https://");
    const auto path_begin = cfg_.base_url.find('/', scheme_end + 3);
    origin_ = cfg_.base_url.substr(0, path_begin);
    std::string base_path = path_begin == std::string::npos ? "" : cfg_.base_url.substr(path_begin);
    while (!base_path.empty() && base_path.back() == '/') base_path.pop_back();
    path_ = base_path + "/chat/completions";
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
    Json body{{"model", cfg_.model}, {"temperature", cfg_.temperature}, {"messages", Json::array()}};
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    httplib::Client client(origin_);
    client.set_connection_timeout(cfg_.timeout_seconds);
    client.set_read_timeout(cfg_.timeout_seconds);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw ChatError("LLM request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ChatError("LLM endpoint returned HTTP " + std::to_string(res->status));
    try {
        const Json reply = Json::parse(res->body);
        const Json& content = reply.at("choices").at(0).at("message").at("content");
        return content.is_null() ? std::string{} : content.get<std::string>();
    } catch (const Json::exception& e) {
        throw ChatError(std::string("malformed LLM response: ") + e.what());
    }
}

}  // namespace respact::llm
