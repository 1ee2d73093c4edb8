#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpgkit/game.hpp"

namespace rpgkit {

struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

struct RateLimitExceeded : TransportError {
    explicit RateLimitExceeded(const std::string& what) : TransportError(what) {}
};

struct ReplayMiss : std::runtime_error {
    explicit ReplayMiss(const std::string& what) : std::runtime_error(what) {}
};

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 4096;
    int timeout_seconds = 120;
};

// Stable across runs and platforms; the replay key.
std::string request_hash(const ChatRequest& req);

class Backend {
public:
    virtual ~Backend() = default;
    // Returns the assistant text. Throws TransportError / RateLimitExceeded /
    // ReplayMiss.
    virtual std::string chat(const ChatRequest& req) = 0;
};

// Serializes bursts: each acquire() waits until the per-second budget
// admits another request. rate <= 0 disables the budget.
class TokenBucket {
public:
    explicit TokenBucket(double requests_per_second, double burst = 1.0);
    void acquire();

private:
    std::mutex mu_;
    double rate_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct HttpResponse {
    int status = 0;  // 0: transport-level failure
    std::string body;
    std::string error;  // set when status == 0
};

using HttpTransport = std::function<HttpResponse(
    const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
    const std::string& body, int timeout_seconds)>;

struct HttpBackendConfig {
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string api_key;
    int max_retries = 3;              // retries after the first attempt
    double initial_backoff_ms = 500;  // doubled per retry, capped
    double max_backoff_ms = 8000;
    double requests_per_second = 0;  // 0: unlimited
    HttpTransport transport;         // default: cpp-httplib
};

// OpenAI-compatible chat-completions client. Transient failures (connect
// errors, 429, 5xx) are retried with capped exponential backoff.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);
    std::string chat(const ChatRequest& req) override;

private:
    HttpBackendConfig cfg_;
    std::unique_ptr<TokenBucket> bucket_;
};

// Deterministic stand-in keyed by request hash; file format is JSONL of
// {"request_hash", "request", "response"} records.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::string& path);
    static ReplayBackend from_text(const std::string& jsonl);
    std::string chat(const ChatRequest& req) override;

private:
    ReplayBackend() = default;
    void load(const std::string& jsonl, const std::string& origin);
    std::map<std::string, std::string> responses_;
};

// Fixed queue of responses, consumed in order.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}
    std::string chat(const ChatRequest& req) override;
    size_t consumed() const { return next_; }

private:
    std::vector<std::string> responses_;
    size_t next_ = 0;
};

// Wraps another backend and appends replay records to a JSONL file.
class RecordingBackend : public Backend {
public:
    RecordingBackend(Backend& inner, std::string path)
        : inner_(inner), path_(std::move(path)) {}
    std::string chat(const ChatRequest& req) override;

private:
    Backend& inner_;
    std::string path_;
    std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Game-creation prompting

// Five example games presented as prior conversation turns, then the
// creation prompt holding the character document and the schema: 11
// messages, final role user. Throws std::invalid_argument unless exactly
// five examples are given.
std::vector<ChatMessage> build_gc_conversation(const std::string& character_doc,
                                               const std::string& schema_doc,
                                               const std::vector<std::string>& example_games);

struct CreateGameConfig {
    std::string model;
    int max_tokens = 8192;
    std::vector<std::string> example_games;
    std::string schema_doc;  // defaults to the built-in schema
};

struct CreateGameOutcome {
    std::string raw_text;             // empty when the transport failed
    std::optional<std::string> transport_error;
    FormatReport format;              // includes the no-json case
    std::optional<GameConfig> game;
};

// One greedy chat call, then candidate extraction and the strict parse.
CreateGameOutcome create_game(Backend& backend, const std::string& character_doc,
                              const CreateGameConfig& cfg);

}  // namespace rpgkit
