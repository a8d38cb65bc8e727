#pragma once

#include "sheetloop/embedder.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheetloop::llm {

struct GatewayError : std::runtime_error {
    enum class Kind { Timeout, Refused, Malformed, ScriptMismatch, ScriptExhausted };
    Kind kind;
    GatewayError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;  // first message must be the system prompt
    double temperature = 0.0;
    int max_tokens = 2048;
    std::string model_id;
    std::string session_tag;  // planner | informer | embedder
};

struct ChatResponse {
    std::string content;
    std::string finish_reason = "stop";
    int prompt_tokens = 0;      // 0 for replay
    int completion_tokens = 0;  // 0 for replay
};

/// Stable one-string form of a request; replay matching hashes this after
/// whitespace normalization.
std::string render_request(const ChatRequest& req);
std::string normalize_whitespace(const std::string& text);
std::string request_hash(const ChatRequest& req);  // 16 hex chars

/// Structured exchange log shared by the gateway and the planner. In replay
/// mode timestamps are logical sequence numbers so transcripts are
/// byte-reproducible.
struct TranscriptEntry {
    int index = 0;
    std::string kind;  // "chat" | "embed"
    std::string session_tag;
    int step = -1;  // planner step in effect, -1 outside an episode
    std::uint64_t timestamp = 0;
    // chat
    std::vector<ChatMessage> messages;
    std::string response;
    double temperature = 0.0;
    std::string model_id;
    // embed
    std::vector<std::string> embed_inputs;
    size_t embed_dim = 0;
};

class Transcript {
public:
    void set_step(int step) { step_ = step; }
    int step() const { return step_; }

    void set_logical_time(bool logical) { logical_time_ = logical; }

    TranscriptEntry& append(TranscriptEntry e);
    const std::vector<TranscriptEntry>& entries() const { return entries_; }

    std::string to_json() const;  // stable rendering, written to transcript files

private:
    std::vector<TranscriptEntry> entries_;
    int step_ = -1;
    bool logical_time_ = true;
    std::uint64_t next_tick_ = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual ChatResponse complete(const ChatRequest& req) = 0;
    virtual std::vector<retrieval::Vector> embed(const std::vector<std::string>& texts) = 0;
    virtual bool deterministic() const { return false; }
};

struct ReplayEntry {
    std::string match_kind;  // "hash" | "substring"
    std::string match_value;
    std::string response;
};

/// Scripted backend. Strict mode: every request must match the next entry
/// or a ScriptMismatch with a diff is raised. Non-strict mode scans forward
/// to the first matching unconsumed entry.
class ReplayBackend : public Backend {
public:
    ReplayBackend(std::vector<ReplayEntry> entries, bool strict);

    static std::shared_ptr<ReplayBackend> from_file(const std::string& path);

    ChatResponse complete(const ChatRequest& req) override;
    std::vector<retrieval::Vector> embed(const std::vector<std::string>& texts) override;
    bool deterministic() const override { return true; }

    size_t consumed() const { return next_; }
    size_t size() const { return entries_.size(); }

private:
    std::vector<ReplayEntry> entries_;
    bool strict_;
    size_t next_ = 0;

    bool matches(const ReplayEntry& e, const ChatRequest& req) const;
};

struct HttpBackendConfig {
    std::string endpoint;  // e.g. http://host:port
    std::string model_id;
    std::string api_key;  // resolved from env by the config layer
    int retries = 2;
    int backoff_ms = 250;
    int timeout_s = 60;
};

/// Minimal chat-completion wire client (JSON in, content out); see
/// docs/gateway-wire.md for the exact shapes.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);
    ChatResponse complete(const ChatRequest& req) override;
    std::vector<retrieval::Vector> embed(const std::vector<std::string>& texts) override;

private:
    HttpBackendConfig cfg_;

    std::string post_json(const std::string& path, const std::string& body);
};

/// Uniform entry point: routes chat to the backend, embeddings to either
/// the backend or a local embedder, and records everything in the
/// transcript.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, Transcript* transcript);

    /// Local embedding mode (tests, offline): bypasses the backend.
    void use_local_embedder(retrieval::HashNgramEmbedder embedder);

    ChatResponse complete(const ChatRequest& req);
    std::vector<retrieval::Vector> embed(const std::vector<std::string>& texts);

    Transcript* transcript() { return transcript_; }
    const Backend& backend() const { return *backend_; }

private:
    std::shared_ptr<Backend> backend_;
    Transcript* transcript_;
    std::optional<retrieval::HashNgramEmbedder> local_embedder_;
};

}  // namespace sheetloop::llm
