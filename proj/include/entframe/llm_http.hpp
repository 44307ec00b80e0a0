#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "entframe/error.hpp"
#include "entframe/llm_client.hpp"

// Live HTTP implementation of LlmClient. Speaks a minimal JSON protocol:
//   POST /complete {"prompt": s}              -> {"completion": s}
//   POST /extract  {"document": s, "mention": s} -> {"spans": [s, ...]}
// Credentials come from the environment only (never from files or flags):
//   ENTFRAME_LLM_ENDPOINT  e.g. "http://localhost:8089"
//   ENTFRAME_LLM_API_KEY   optional; sent as a Bearer token

namespace entframe {

struct HttpLlmConfig {
    std::string endpoint;
    std::string api_key;
    int timeout_seconds = 30;
    int max_retries = 3;
};

inline HttpLlmConfig http_config_from_env() {
    HttpLlmConfig config;
    if (const char* endpoint = std::getenv("ENTFRAME_LLM_ENDPOINT")) config.endpoint = endpoint;
    if (const char* key = std::getenv("ENTFRAME_LLM_API_KEY")) config.api_key = key;
    if (config.endpoint.empty())
        throw Error(ErrorKind::MissingLlmClient,
                    "ENTFRAME_LLM_ENDPOINT is not set; cannot reach an LLM over HTTP");
    return config;
}

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty())
            throw Error(ErrorKind::MissingLlmClient, "HTTP LLM client needs an endpoint");
    }

    std::string complete(const std::string& prompt) override {
        nlohmann::json body{{"prompt", prompt}};
        nlohmann::json reply = post("/complete", body);
        if (!reply.contains("completion") || !reply["completion"].is_string())
            throw Error(ErrorKind::HttpError, "/complete reply lacks a string 'completion'");
        return reply["completion"].get<std::string>();
    }

    std::vector<std::string> extract_spans(const std::string& document_text,
                                           const std::string& mention) override {
        nlohmann::json body{{"document", document_text}, {"mention", mention}};
        nlohmann::json reply = post("/extract", body);
        if (!reply.contains("spans") || !reply["spans"].is_array())
            throw Error(ErrorKind::HttpError, "/extract reply lacks a 'spans' array");
        std::vector<std::string> spans;
        for (const auto& item : reply["spans"]) {
            if (!item.is_string())
                throw Error(ErrorKind::HttpError, "/extract spans must all be strings");
            spans.push_back(item.get<std::string>());
        }
        return spans;
    }

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body) {
        std::string last_error;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                auto backoff = std::chrono::milliseconds(
                    static_cast<long>(500.0 * static_cast<double>(1 << (attempt - 1))));
                std::this_thread::sleep_for(backoff);
            }
            httplib::Client client(config_.endpoint);
            client.set_connection_timeout(config_.timeout_seconds, 0);
            client.set_read_timeout(config_.timeout_seconds, 0);
            httplib::Headers headers;
            if (!config_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + config_.api_key);
            httplib::Result result =
                client.Post(path, headers, body.dump(), "application/json");
            if (!result) {
                last_error = "connection failed: " + httplib::to_string(result.error());
                continue; // transport errors are retryable
            }
            if (result->status >= 500) {
                last_error = "server returned status " + std::to_string(result->status);
                continue; // so are server-side failures
            }
            if (result->status != 200)
                throw Error(ErrorKind::HttpError, path + " returned status " +
                                                      std::to_string(result->status) + ": " +
                                                      result->body);
            try {
                return nlohmann::json::parse(result->body);
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::HttpError,
                            path + " reply is not valid JSON: " + std::string(e.what()));
            }
        }
        throw Error(ErrorKind::HttpError, path + " failed after " +
                                              std::to_string(config_.max_retries + 1) +
                                              " attempts; last error: " + last_error);
    }

    HttpLlmConfig config_;
};

} // namespace entframe
