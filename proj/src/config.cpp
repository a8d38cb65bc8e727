#include "sheetloop/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace sheetloop::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string resolve(const std::filesystem::path& base, const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return p.string();
    return (base / p).lexically_normal().string();
}

}  // namespace

AgentConfig AgentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError("bad config JSON in '" + path + "': " + e.what());
    }
    std::filesystem::path base = std::filesystem::path(path).parent_path();

    AgentConfig cfg;
    if (doc.contains("backend")) {
        const Json& b = doc["backend"];
        cfg.backend.kind = b.value("kind", "replay");
        cfg.backend.script = resolve(base, b.value("script", ""));
        cfg.backend.endpoint = b.value("endpoint", "");
        cfg.backend.model_id = b.value("model", "");
        cfg.backend.credentials_env = b.value("credentials_env", "");
        cfg.backend.retries = b.value("retries", 2);
        cfg.backend.backoff_ms = b.value("backoff_ms", 250);
    }
    cfg.options.temperature = doc.value("temperature", 0.0);
    cfg.options.max_tokens = doc.value("max_tokens", 2048);
    cfg.options.max_steps = doc.value("max_steps", 15);
    cfg.options.max_repairs = doc.value("max_repairs", 3);
    cfg.options.max_parse_retries = doc.value("max_parse_retries", 1);
    cfg.options.k = doc.value("k", 3);
    cfg.options.max_prompt_chars = doc.value("max_prompt_chars", 24000u);
    cfg.options.evidence_budget_chars = doc.value("evidence_budget_chars", 4000u);
    cfg.options.enable_informer = doc.value("enable_informer", true);
    cfg.options.enable_retriever = doc.value("enable_retriever", true);
    cfg.options.max_evidence_rows = doc.value("max_evidence_rows", 50u);
    cfg.options.model_id = cfg.backend.model_id;
    if (doc.contains("table_repr")) {
        auto repr = serde::table_repr_from(doc["table_repr"].get<std::string>());
        if (!repr) {
            throw ConfigError("unknown table_repr '" + doc["table_repr"].get<std::string>() +
                              "'");
        }
        cfg.options.table_repr = *repr;
    }
    cfg.window_size = doc.value("window_size", 20);
    cfg.stride = doc.value("stride", 10);
    cfg.min_window = doc.value("min_window", 2);
    cfg.embed_dim = doc.value("embed_dim", 64);
    cfg.embedder = doc.value("embedder", "local");
    cfg.prompt_dir = resolve(base, doc.value("prompt_dir", "assets/prompts"));
    cfg.corpus_dir = resolve(base, doc.value("corpus_dir", ""));
    cfg.index_path = resolve(base, doc.value("index_path", ""));
    cfg.seed = doc.value("seed", 0ull);

    cfg.validate();
    return cfg;
}

void AgentConfig::validate() const {
    if (backend.kind != "replay" && backend.kind != "http") {
        throw ConfigError("backend.kind must be 'replay' or 'http'");
    }
    if (backend.kind == "replay" && backend.script.empty()) {
        throw ConfigError("replay backend needs backend.script");
    }
    if (backend.kind == "http" && backend.endpoint.empty()) {
        throw ConfigError("http backend needs backend.endpoint");
    }
    if (options.temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (options.max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (options.max_repairs < 0) throw ConfigError("max_repairs must be >= 0");
    if (options.k < 1) throw ConfigError("k must be >= 1");
    if (window_size < 1 || stride < 1 || stride > window_size) {
        throw ConfigError("need window_size >= 1 and 1 <= stride <= window_size");
    }
    if (embed_dim < 2) throw ConfigError("embed_dim must be >= 2");
    if (embedder != "local" && embedder != "remote") {
        throw ConfigError("embedder must be 'local' or 'remote'");
    }
    if (embedder == "remote" && backend.kind == "replay") {
        throw ConfigError("the replay backend cannot serve remote embeddings");
    }
    if (options.enable_retriever && corpus_dir.empty() && index_path.empty()) {
        throw ConfigError(
            "enable_retriever is set but neither corpus_dir nor index_path is configured");
    }
    if (options.max_evidence_rows < 1) throw ConfigError("max_evidence_rows must be >= 1");
}

void ModeOverrides::apply(AgentConfig& cfg) const {
    if (enable_informer) cfg.options.enable_informer = *enable_informer;
    if (enable_retriever) cfg.options.enable_retriever = *enable_retriever;
    if (table_repr) cfg.options.table_repr = *table_repr;
}

}  // namespace sheetloop::cli
