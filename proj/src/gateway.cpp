#include "rpgkit/gateway.hpp"

#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rpgkit/util.hpp"

namespace rpgkit {

using nlohmann::json;

namespace {

std::string format_temperature(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", t);
    return buf;
}

json request_snapshot(const ChatRequest& req) {
    json msgs = json::array();
    for (const auto& m : req.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return json{{"model", req.model},
                {"messages", std::move(msgs)},
                {"temperature", format_temperature(req.temperature)},
                {"max_tokens", req.max_tokens}};
}

}  // namespace

std::string request_hash(const ChatRequest& req) {
    return to_hex64(fnv1a64(request_snapshot(req).dump()));
}

// ---------------------------------------------------------------------------
// TokenBucket

TokenBucket::TokenBucket(double requests_per_second, double burst)
    : rate_(requests_per_second),
      capacity_(burst < 1.0 ? 1.0 : burst),
      tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
    if (rate_ <= 0) return;
    std::unique_lock<std::mutex> lock(mu_);
    for (;;) {
        auto now = std::chrono::steady_clock::now();
        tokens_ += std::chrono::duration<double>(now - last_).count() * rate_;
        last_ = now;
        if (tokens_ > capacity_) tokens_ = capacity_;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        double wait_s = (1.0 - tokens_) / rate_;
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
        lock.lock();
    }
}

// ---------------------------------------------------------------------------
// HttpBackend

namespace {

HttpResponse default_transport(const std::string& url,
                               const std::vector<std::pair<std::string, std::string>>& headers,
                               const std::string& body, int timeout_seconds) {
    auto slash = url.find('/', url.find("//") + 2);
    std::string origin = slash == std::string::npos ? url : url.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : url.substr(slash);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_write_timeout(timeout_seconds, 0);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) return {0, "", httplib::to_string(res.error())};
    return {res->status, res->body, ""};
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.transport) cfg_.transport = default_transport;
    if (cfg_.requests_per_second > 0)
        bucket_ = std::make_unique<TokenBucket>(cfg_.requests_per_second);
}

std::string HttpBackend::chat(const ChatRequest& req) {
    json body = request_snapshot(req);
    body["temperature"] = req.temperature;  // the wire wants a number
    std::string url = cfg_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    url += "/chat/completions";
    std::vector<std::pair<std::string, std::string>> headers;
    if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);

    double backoff = cfg_.initial_backoff_ms;
    int last_status = 0;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(backoff));
            backoff = std::min(backoff * 2, cfg_.max_backoff_ms);
        }
        if (bucket_) bucket_->acquire();
        HttpResponse res = cfg_.transport(url, headers, body.dump(), req.timeout_seconds);
        last_status = res.status;
        last_error = res.error;
        if (res.status == 200) {
            json doc = json::parse(res.body, nullptr, false);
            if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty())
                throw TransportError("malformed completion response");
            const json& msg = doc["choices"][0].contains("message")
                                  ? doc["choices"][0]["message"]
                                  : doc["choices"][0];
            if (!msg.contains("content") || !msg["content"].is_string())
                throw TransportError("completion response has no content");
            return msg["content"].get<std::string>();
        }
        bool retriable = res.status == 0 || res.status == 429 || res.status >= 500;
        if (!retriable)
            throw TransportError("http status " + std::to_string(res.status) + ": " + res.body);
    }
    if (last_status == 429)
        throw RateLimitExceeded("rate limited after " + std::to_string(cfg_.max_retries) +
                                " retries");
    throw TransportError("transport failed after " + std::to_string(cfg_.max_retries) +
                         " retries (status " + std::to_string(last_status) + ") " + last_error);
}

// ---------------------------------------------------------------------------
// ReplayBackend

ReplayBackend::ReplayBackend(const std::string& path) {
    load(read_file(path), path);
}

ReplayBackend ReplayBackend::from_text(const std::string& jsonl) {
    ReplayBackend b;
    b.load(jsonl, "<inline>");
    return b;
}

void ReplayBackend::load(const std::string& jsonl, const std::string& origin) {
    size_t start = 0;
    int lineno = 0;
    while (start < jsonl.size()) {
        size_t end = jsonl.find('\n', start);
        if (end == std::string::npos) end = jsonl.size();
        std::string line = jsonl.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (trim(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("request_hash") || !rec.contains("response"))
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": bad replay record");
        responses_[rec["request_hash"].get<std::string>()] = rec["response"].get<std::string>();
    }
}

std::string ReplayBackend::chat(const ChatRequest& req) {
    std::string key = request_hash(req);
    auto it = responses_.find(key);
    if (it == responses_.end()) throw ReplayMiss("no replay record for request " + key);
    return it->second;
}

std::string ScriptedBackend::chat(const ChatRequest&) {
    if (next_ >= responses_.size()) throw ReplayMiss("scripted backend exhausted");
    return responses_[next_++];
}

std::string RecordingBackend::chat(const ChatRequest& req) {
    std::string response = inner_.chat(req);
    json rec{{"request_hash", request_hash(req)},
             {"request", request_snapshot(req)},
             {"response", response}};
    std::lock_guard<std::mutex> lock(mu_);
    append_line(path_, rec.dump());
    return response;
}

// ---------------------------------------------------------------------------
// Game-creation prompting

namespace {

const char* kExampleRequest = "Give me an example game JSON.";

const char* kCreationPromptTemplate =
    R"(Here is a character description:
{wikicontent}

Based on this character, create a detailed game scenario exactly following JSON structure of previous examples and the following schema:
{schema}

## Guidelines
- All numerical values should use consistent ranges (e.g., 0-100)
- Events should have clear cause-and-effect relationships
- Scene progression should depend on variable thresholds
- Include both mandatory and optional events
- Create meaningful connections between variables
- Balance difficulty and achievability
- Ensure all IDs follow consistent formatting (P### for checks, S### for scenes, V### for state variables, H### for hidden variables, E### for events)
- Include proper fail states and success conditions
- Make sure all scenes are specific locations
- Create logical progression paths through the game

Format the response as a single JSON object with all fields properly nested. Must ensure all arrays and objects are properly closed and formatted.)";

std::string fill_placeholder(std::string text, const std::string& key, const std::string& value) {
    auto pos = text.find(key);
    if (pos != std::string::npos) text.replace(pos, key.size(), value);
    return text;
}

}  // namespace

std::vector<ChatMessage> build_gc_conversation(const std::string& character_doc,
                                               const std::string& schema_doc,
                                               const std::vector<std::string>& example_games) {
    if (example_games.size() != 5)
        throw std::invalid_argument("game creation needs exactly 5 example games, got " +
                                    std::to_string(example_games.size()));
    std::vector<ChatMessage> messages;
    for (const auto& example : example_games) {
        messages.push_back({"user", kExampleRequest});
        messages.push_back({"assistant", example});
    }
    std::string prompt = fill_placeholder(kCreationPromptTemplate, "{wikicontent}", character_doc);
    prompt = fill_placeholder(prompt, "{schema}", schema_doc);
    messages.push_back({"user", std::move(prompt)});
    return messages;
}

CreateGameOutcome create_game(Backend& backend, const std::string& character_doc,
                              const CreateGameConfig& cfg) {
    CreateGameOutcome out;
    ChatRequest req;
    req.model = cfg.model;
    req.temperature = 0.0;  // creation is greedy
    req.max_tokens = cfg.max_tokens;
    req.messages = build_gc_conversation(
        character_doc, cfg.schema_doc.empty() ? game_config_schema_json() : cfg.schema_doc,
        cfg.example_games);
    auto record_failure = [&](const char* what) {
        out.transport_error = what;
        out.format.passed = false;
        out.format.failure = FormatReport::Failure::no_json;
        out.format.violations.push_back({"", std::string("transport error: ") + what});
    };
    try {
        out.raw_text = backend.chat(req);
    } catch (const TransportError& e) {
        record_failure(e.what());
        return out;
    } catch (const ReplayMiss& e) {
        record_failure(e.what());
        return out;
    }

    auto candidate = extract_candidate_json(out.raw_text);
    if (!candidate) {
        out.format.passed = false;
        out.format.failure = FormatReport::Failure::no_json;
        out.format.violations.push_back({"", "no JSON object found in model output"});
        return out;
    }
    auto parsed = parse_game(*candidate);
    out.format = std::move(parsed.report);
    out.game = std::move(parsed.game);
    return out;
}

}  // namespace rpgkit
