#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "entframe/error.hpp"
#include "entframe/segment.hpp"
#include "entframe/taxonomy.hpp"
#include "entframe/utf8.hpp"

// Abstract LLM access. Three implementations: a deterministic offline stub,
// a record/replay transcript client for tests, and (in llm_http.hpp) a live
// HTTP client. Requests are fingerprinted with FNV-1a over a canonical
// request string; transcripts are JSON Lines keyed by that fingerprint.

namespace entframe {

class LlmClient {
public:
    virtual ~LlmClient() = default;

    virtual std::string complete(const std::string& prompt) = 0;

    // Text span(s) carrying role information about `mention`.
    virtual std::vector<std::string> extract_spans(const std::string& document_text,
                                                   const std::string& mention) = 0;
};

inline std::string complete_request_key(const std::string& prompt) {
    return "complete\x1f" + prompt;
}

inline std::string extract_request_key(const std::string& document_text,
                                       const std::string& mention) {
    return "extract\x1f" + mention + "\x1f" + document_text;
}

inline std::string request_hash(const std::string& request_key) {
    std::uint64_t h = fnv1a64(request_key);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

// Offline stand-in. extract_spans returns the sentences around the first
// occurrence of the mention; complete answers the classification prompt with
// roles chosen by hashing the mention, so downstream parsing and scoring can
// run without network access.
class StubLlmClient : public LlmClient {
public:
    std::string complete(const std::string& prompt) override {
        nlohmann::json rows = nlohmann::json::array();
        for (const std::string& mention : queried_mentions(prompt)) {
            MainRole main = kMainRoles[fnv1a64(mention) % kMainRoles.size()];
            const auto& fines = fine_roles_of(main);
            FineRole fine = fines[fnv1a64(mention + "#fine") % fines.size()];
            rows.push_back(nlohmann::json::array(
                {mention, std::string(to_string(main)),
                 nlohmann::json::array({std::string(to_string(fine))})}));
        }
        return "```json\n" + rows.dump() + "\n```";
    }

    std::vector<std::string> extract_spans(const std::string& document_text,
                                           const std::string& mention) override {
        if (mention.empty() || !utf8_valid(document_text)) return {};
        Segmentation seg = segment(document_text);
        std::vector<std::size_t> picked;
        bool first_found = false;
        for (const SentenceSpan& s : seg.sentences) {
            std::string slice = cp_slice(document_text, s.start, s.end);
            if (slice.find(mention) == std::string::npos) continue;
            picked.push_back(s.index);
            if (!first_found && s.index + 1 < seg.sentences.size())
                picked.push_back(s.index + 1); // the sentence right after often carries the framing
            first_found = true;
            if (picked.size() >= 4) break;
        }
        std::sort(picked.begin(), picked.end());
        picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
        std::vector<std::string> spans;
        for (std::size_t idx : picked) {
            const SentenceSpan& s = seg.sentences[idx];
            spans.push_back(cp_slice(document_text, s.start, s.end));
        }
        return spans;
    }

    // Mentions listed on the line after the "extract the roles" marker.
    static std::vector<std::string> queried_mentions(const std::string& prompt) {
        static const std::string marker =
            "extract the roles for the following entities:\n";
        std::size_t at = prompt.find(marker);
        if (at == std::string::npos) return {};
        std::size_t begin = at + marker.size();
        std::size_t eol = prompt.find('\n', begin);
        std::string line = prompt.substr(begin, eol == std::string::npos ? std::string::npos
                                                                         : eol - begin);
        std::vector<std::string> mentions;
        try {
            nlohmann::json arr = nlohmann::json::parse(line);
            if (arr.is_array())
                for (const auto& item : arr)
                    if (item.is_string()) mentions.push_back(item.get<std::string>());
        } catch (const nlohmann::json::exception&) {
        }
        return mentions;
    }
};

// Replays a JSON Lines transcript {request_hash, prompt, response, timestamp}.
// Identical requests get byte-identical responses; unknown requests fail.
class ReplayLlmClient : public LlmClient {
public:
    explicit ReplayLlmClient(const std::filesystem::path& transcript_path) {
        std::ifstream in(transcript_path);
        if (!in)
            throw Error(ErrorKind::IoError, "cannot open transcript " + transcript_path.string());
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            ++row;
            if (trim(line).empty()) continue;
            try {
                nlohmann::json entry = nlohmann::json::parse(line);
                responses_[entry.at("request_hash").get<std::string>()] =
                    entry.at("response").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::MalformedJson, "transcript line " + std::to_string(row) +
                                ": " + e.what());
            }
        }
    }

    std::string complete(const std::string& prompt) override {
        return lookup(request_hash(complete_request_key(prompt)));
    }

    std::vector<std::string> extract_spans(const std::string& document_text,
                                           const std::string& mention) override {
        std::string raw = lookup(request_hash(extract_request_key(document_text, mention)));
        nlohmann::json arr = nlohmann::json::parse(raw);
        std::vector<std::string> spans;
        for (const auto& item : arr) spans.push_back(item.get<std::string>());
        return spans;
    }

private:
    std::string lookup(const std::string& hash) const {
        auto it = responses_.find(hash);
        if (it == responses_.end())
            throw Error(ErrorKind::ReplayMiss, "no recorded response for request " + hash);
        return it->second;
    }

    std::map<std::string, std::string> responses_;
};

// Wraps another client and appends every exchange to a transcript file.
class RecordingLlmClient : public LlmClient {
public:
    RecordingLlmClient(LlmClient& inner, std::filesystem::path transcript_path)
        : inner_(inner), path_(std::move(transcript_path)) {}

    std::string complete(const std::string& prompt) override {
        std::string response = inner_.complete(prompt);
        record(complete_request_key(prompt), response);
        return response;
    }

    std::vector<std::string> extract_spans(const std::string& document_text,
                                           const std::string& mention) override {
        std::vector<std::string> spans = inner_.extract_spans(document_text, mention);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : spans) arr.push_back(s);
        record(extract_request_key(document_text, mention), arr.dump());
        return spans;
    }

private:
    void record(const std::string& request_key, const std::string& response) {
        std::lock_guard<std::mutex> lock(mutex_);
        std::ofstream out(path_, std::ios::app);
        if (!out) throw Error(ErrorKind::IoError, "cannot append to " + path_.string());
        nlohmann::json entry{{"request_hash", request_hash(request_key)},
                             {"prompt", request_key},
                             {"response", response},
                             {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                               std::chrono::system_clock::now().time_since_epoch())
                                               .count()}};
        out << entry.dump() << '\n';
    }

    LlmClient& inner_;
    std::filesystem::path path_;
    std::mutex mutex_;
};

// Runs `complete` over many prompts with at most `parallelism` in flight.
// Responses are stored by request index, never by completion order.
inline std::vector<std::string> complete_many(LlmClient& client,
                                              const std::vector<std::string>& prompts,
                                              std::size_t parallelism = 1) {
    std::vector<std::string> responses(prompts.size());
    if (parallelism <= 1 || prompts.size() <= 1) {
        for (std::size_t i = 0; i < prompts.size(); ++i)
            responses[i] = client.complete(prompts[i]);
        return responses;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= prompts.size()) return;
            try {
                responses[i] = client.complete(prompts[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    std::size_t n_threads = std::min(parallelism, prompts.size());
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    return responses;
}

} // namespace entframe
