#include "sheetloop/gateway.hpp"

#include <json.hpp>

#include <cctype>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <thread>

// httplib is pulled in only here; keep it out of the public headers.
#include <httplib.h>

namespace sheetloop::llm {

namespace {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_temperature(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", t);
    return buf;
}

}  // namespace

std::string render_request(const ChatRequest& req) {
    std::string out;
    out += "model: " + req.model_id + "\n";
    out += "temperature: " + format_temperature(req.temperature) + "\n";
    out += "session: " + req.session_tag + "\n";
    for (const auto& m : req.messages) {
        out += "[" + m.role + "]\n" + m.content + "\n";
    }
    return out;
}

std::string normalize_whitespace(const std::string& text) {
    std::string out;
    bool in_ws = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

std::string request_hash(const ChatRequest& req) {
    return hex64(fnv1a(normalize_whitespace(render_request(req))));
}

TranscriptEntry& Transcript::append(TranscriptEntry e) {
    e.index = static_cast<int>(entries_.size());
    e.step = step_;
    if (logical_time_) {
        e.timestamp = next_tick_++;
    } else {
        e.timestamp = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
    }
    entries_.push_back(std::move(e));
    return entries_.back();
}

std::string Transcript::to_json() const {
    Json arr = Json::array();
    for (const auto& e : entries_) {
        Json j;
        j["index"] = e.index;
        j["kind"] = e.kind;
        j["session"] = e.session_tag;
        j["step"] = e.step;
        j["ts"] = e.timestamp;
        if (e.kind == "chat") {
            Json msgs = Json::array();
            for (const auto& m : e.messages) {
                msgs.push_back(Json{{"role", m.role}, {"content", m.content}});
            }
            j["model"] = e.model_id;
            j["temperature"] = format_temperature(e.temperature);
            j["messages"] = std::move(msgs);
            j["response"] = e.response;
        } else {
            j["inputs"] = e.embed_inputs;
            j["dim"] = e.embed_dim;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

// ---- replay backend ----

ReplayBackend::ReplayBackend(std::vector<ReplayEntry> entries, bool strict)
    : entries_(std::move(entries)), strict_(strict) {}

std::shared_ptr<ReplayBackend> ReplayBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw GatewayError(GatewayError::Kind::Malformed, "cannot open replay script '" + path + "'");
    }
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw GatewayError(GatewayError::Kind::Malformed,
                           "bad replay script '" + path + "': " + e.what());
    }
    std::vector<ReplayEntry> entries;
    for (const auto& ej : doc.value("entries", Json::array())) {
        ReplayEntry e;
        if (ej.contains("match")) {
            e.match_kind = ej["match"].value("kind", "substring");
            e.match_value = ej["match"].value("value", "");
        } else {
            e.match_kind = "substring";
        }
        if (e.match_kind != "substring" && e.match_kind != "hash") {
            throw GatewayError(GatewayError::Kind::Malformed,
                               "replay matcher kind must be 'hash' or 'substring'");
        }
        e.response = ej.value("response", "");
        entries.push_back(std::move(e));
    }
    return std::make_shared<ReplayBackend>(std::move(entries), doc.value("strict", true));
}

bool ReplayBackend::matches(const ReplayEntry& e, const ChatRequest& req) const {
    if (e.match_kind == "hash") return e.match_value == request_hash(req);
    if (e.match_value.empty()) return true;
    return normalize_whitespace(render_request(req)).find(normalize_whitespace(e.match_value)) !=
           std::string::npos;
}

ChatResponse ReplayBackend::complete(const ChatRequest& req) {
    if (next_ >= entries_.size()) {
        throw GatewayError(GatewayError::Kind::ScriptExhausted,
                           "replay script exhausted after " + std::to_string(entries_.size()) +
                               " entries (request #" + std::to_string(next_ + 1) + ")");
    }
    if (strict_) {
        const ReplayEntry& e = entries_[next_];
        if (!matches(e, req)) {
            std::string rendered = normalize_whitespace(render_request(req));
            std::string diff = "request #" + std::to_string(next_ + 1) + " does not match " +
                               e.match_kind + " matcher\n--- expected (" + e.match_kind + ") ---\n" +
                               e.match_value + "\n--- got (normalized request";
            if (e.match_kind == "hash") diff += ", hash " + request_hash(req);
            diff += ") ---\n" + rendered;
            throw GatewayError(GatewayError::Kind::ScriptMismatch, diff);
        }
        ++next_;
        return ChatResponse{e.response, "stop", 0, 0};
    }
    for (size_t i = next_; i < entries_.size(); ++i) {
        if (matches(entries_[i], req)) {
            next_ = i + 1;
            return ChatResponse{entries_[i].response, "stop", 0, 0};
        }
    }
    throw GatewayError(GatewayError::Kind::ScriptMismatch,
                       "no remaining replay entry matches the request");
}

std::vector<retrieval::Vector> ReplayBackend::embed(const std::vector<std::string>&) {
    throw GatewayError(GatewayError::Kind::Refused,
                       "replay backend has no embedding support; use the local embedder");
}

// ---- http backend ----

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {}

std::string HttpBackend::post_json(const std::string& path, const std::string& body) {
    httplib::Client client(cfg_.endpoint);
    client.set_connection_timeout(cfg_.timeout_s);
    client.set_read_timeout(cfg_.timeout_s);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    }
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms));
        }
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return res->body;
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
        if (res->status >= 400 && res->status < 500) {
            throw GatewayError(GatewayError::Kind::Refused, last_error);
        }
    }
    throw GatewayError(GatewayError::Kind::Timeout,
                       "backend unreachable after " + std::to_string(cfg_.retries + 1) +
                           " attempt(s): " + last_error);
}

ChatResponse HttpBackend::complete(const ChatRequest& req) {
    Json body;
    body["model"] = req.model_id.empty() ? cfg_.model_id : req.model_id;
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_tokens;
    Json msgs = Json::array();
    for (const auto& m : req.messages) {
        msgs.push_back(Json{{"role", m.role}, {"content", m.content}});
    }
    body["messages"] = std::move(msgs);

    std::string raw = post_json("/v1/chat", body.dump());
    try {
        Json doc = Json::parse(raw);
        ChatResponse out;
        out.content = doc.at("content").get<std::string>();
        out.finish_reason = doc.value("finish_reason", "stop");
        if (doc.contains("usage")) {
            out.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
            out.completion_tokens = doc["usage"].value("completion_tokens", 0);
        }
        return out;
    } catch (const std::exception& e) {
        throw GatewayError(GatewayError::Kind::Malformed,
                           std::string("bad chat response: ") + e.what());
    }
}

std::vector<retrieval::Vector> HttpBackend::embed(const std::vector<std::string>& texts) {
    Json body;
    body["model"] = cfg_.model_id;
    body["input"] = texts;
    std::string raw = post_json("/v1/embed", body.dump());
    try {
        Json doc = Json::parse(raw);
        std::vector<retrieval::Vector> out;
        for (const auto& vj : doc.at("vectors")) {
            out.push_back(vj.get<retrieval::Vector>());
        }
        if (out.size() != texts.size()) {
            throw GatewayError(GatewayError::Kind::Malformed,
                               "embedding count does not match input count");
        }
        return out;
    } catch (const GatewayError&) {
        throw;
    } catch (const std::exception& e) {
        throw GatewayError(GatewayError::Kind::Malformed,
                           std::string("bad embed response: ") + e.what());
    }
}

// ---- gateway ----

Gateway::Gateway(std::shared_ptr<Backend> backend, Transcript* transcript)
    : backend_(std::move(backend)), transcript_(transcript) {
    if (transcript_) transcript_->set_logical_time(backend_->deterministic());
}

void Gateway::use_local_embedder(retrieval::HashNgramEmbedder embedder) {
    local_embedder_ = std::move(embedder);
}

ChatResponse Gateway::complete(const ChatRequest& req) {
    if (req.messages.empty() || req.messages.front().role != "system") {
        throw GatewayError(GatewayError::Kind::Malformed,
                           "first message must carry the system prompt");
    }
    ChatResponse res = backend_->complete(req);
    if (transcript_) {
        TranscriptEntry e;
        e.kind = "chat";
        e.session_tag = req.session_tag;
        e.messages = req.messages;
        e.response = res.content;
        e.temperature = req.temperature;
        e.model_id = req.model_id;
        transcript_->append(std::move(e));
    }
    return res;
}

std::vector<retrieval::Vector> Gateway::embed(const std::vector<std::string>& texts) {
    std::vector<retrieval::Vector> out;
    if (local_embedder_) {
        out = (*local_embedder_)(texts);
    } else {
        out = backend_->embed(texts);
        for (size_t i = 1; i < out.size(); ++i) {
            if (out[i].size() != out[0].size()) {
                throw GatewayError(GatewayError::Kind::Malformed,
                                   "backend returned vectors of differing dimension");
            }
        }
    }
    if (transcript_) {
        TranscriptEntry e;
        e.kind = "embed";
        e.session_tag = "embedder";
        e.embed_inputs = texts;
        e.embed_dim = out.empty() ? 0 : out[0].size();
        transcript_->append(std::move(e));
    }
    return out;
}

}  // namespace sheetloop::llm
