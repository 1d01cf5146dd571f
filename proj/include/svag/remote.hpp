#pragma once

// OpenAI-compatible text-completions client. Kept out of llm.hpp so tests and
// tools that never talk to a network don't pay for the TLS-enabled httplib
// header; link against the svag_http target to use this one.

#include "svag/llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <memory>
#include <string>

namespace svag {

inline constexpr const char* kApiKeyEnvVar = "SVA_GAUNTLET_API_KEY";

struct RemoteConfig {
  std::string base_url;  // e.g. "https://api.example.com/v1"
  std::string model;
  int timeout_seconds = 120;
};

// Loads {"base_url": ..., "model": ..., "timeout_seconds": ...} from JSON.
inline RemoteConfig parse_remote_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(ProviderError::Kind::Auth,
                        std::string("provider config is not valid JSON: ") + e.what());
  }
  RemoteConfig cfg;
  if (!j.contains("base_url") || !j.contains("model"))
    throw ProviderError(ProviderError::Kind::Auth,
                        "provider config needs \"base_url\" and \"model\"");
  cfg.base_url = j["base_url"].get<std::string>();
  cfg.model = j["model"].get<std::string>();
  if (j.contains("timeout_seconds")) cfg.timeout_seconds = j["timeout_seconds"].get<int>();
  while (!cfg.base_url.empty() && cfg.base_url.back() == '/') cfg.base_url.pop_back();
  return cfg;
}

class RemoteProvider : public Provider {
 public:
  RemoteProvider(RemoteConfig cfg, std::string api_key)
      : cfg_(std::move(cfg)), api_key_(std::move(api_key)) {
    if (api_key_.empty())
      throw ProviderError(ProviderError::Kind::Auth,
                          std::string("no API key; set ") + kApiKeyEnvVar);
    split_url();
  }

  static std::shared_ptr<RemoteProvider> from_env(RemoteConfig cfg) {
    const char* key = std::getenv(kApiKeyEnvVar);
    return std::make_shared<RemoteProvider>(std::move(cfg), key ? key : "");
  }

  std::string id() const override { return "remote:" + cfg_.model; }

  std::vector<std::string> fetch(const PromptInstance& prompt,
                                 const GenerationParams& params) override {
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["prompt"] = prompt.text;
    body["max_tokens"] = params.max_tokens;
    body["temperature"] = params.temperature;
    body["top_p"] = params.top_p;
    body["n"] = params.n;
    body["frequency_penalty"] = params.frequency_penalty;
    body["presence_penalty"] = params.presence_penalty;
    body["stop"] = params.stop;

    httplib::Result res = post(path_ + "/completions", body.dump());
    if (!res)
      throw ProviderError(ProviderError::Kind::Timeout,
                          "request failed: " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
      throw ProviderError(ProviderError::Kind::Auth,
                          "authentication rejected (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429)
      throw ProviderError(ProviderError::Kind::RateLimited, "rate limited (HTTP 429)");
    if (res->status >= 500)
      throw ProviderError(ProviderError::Kind::Unavailable,
                          "service error (HTTP " + std::to_string(res->status) + ")");
    if (res->status != 200)
      throw ProviderError(ProviderError::Kind::Contract,
                          "unexpected HTTP " + std::to_string(res->status) + ": " + res->body);

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(ProviderError::Kind::Contract,
                          std::string("response is not valid JSON: ") + e.what());
    }
    if (!j.contains("choices") || !j["choices"].is_array())
      throw ProviderError(ProviderError::Kind::Contract, "response has no choices array");
    std::vector<std::string> out;
    for (const auto& choice : j["choices"]) {
      if (!choice.contains("text"))
        throw ProviderError(ProviderError::Kind::Contract, "choice has no text field");
      out.push_back(choice["text"].get<std::string>());
    }
    if (out.empty())
      throw ProviderError(ProviderError::Kind::Contract, "response holds zero choices");
    return out;
  }

 private:
  void split_url() {
    std::string url = cfg_.base_url;
    size_t scheme = url.find("://");
    if (scheme == std::string::npos)
      throw ProviderError(ProviderError::Kind::Auth, "base_url needs a scheme: " + url);
    size_t host_start = scheme + 3;
    size_t slash = url.find('/', host_start);
    host_ = url.substr(0, slash == std::string::npos ? url.size() : slash);
    path_ = slash == std::string::npos ? "" : url.substr(slash);
  }

  httplib::Result post(const std::string& path, const std::string& body) {
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    httplib::Client client(host_);
#else
    if (host_.rfind("https://", 0) == 0)
      throw ProviderError(ProviderError::Kind::Auth,
                          "built without TLS support; use an http:// endpoint");
    httplib::Client client(host_);
#endif
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    client.set_write_timeout(cfg_.timeout_seconds, 0);
    return client.Post(path, headers, body, "application/json");
  }

  RemoteConfig cfg_;
  std::string api_key_;
  std::string host_;  // scheme://authority
  std::string path_;  // prefix before /completions
};

}  // namespace svag
