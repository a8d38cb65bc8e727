#pragma once

#include "sheetloop/gateway.hpp"
#include "sheetloop/planner.hpp"
#include "sheetloop/snippets.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace sheetloop::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BackendConfig {
    std::string kind = "replay";  // replay | http
    std::string script;           // replay script path
    std::string endpoint;
    std::string model_id;
    std::string credentials_env;  // env var holding the API key
    int retries = 2;
    int backoff_ms = 250;
};

/// Everything a run needs; loaded from a JSON file, env consulted only for
/// credentials. Relative paths resolve against the config file's directory.
struct AgentConfig {
    BackendConfig backend;
    agent::AgentOptions options;
    int window_size = 20;
    int stride = 10;
    int min_window = 2;
    int embed_dim = 64;
    std::string embedder = "local";  // local | remote
    std::string prompt_dir = "assets/prompts";
    std::string corpus_dir;  // retriever corpus (optional when index_path set)
    std::string index_path;  // prebuilt snippet index (optional)
    std::uint64_t seed = 0;

    static AgentConfig load(const std::string& path);  // throws ConfigError
    void validate() const;                             // throws ConfigError
};

/// CLI-level switches that override the config (ablation modes).
struct ModeOverrides {
    std::optional<bool> enable_informer;
    std::optional<bool> enable_retriever;
    std::optional<serde::TableRepr> table_repr;

    void apply(AgentConfig& cfg) const;
};

}  // namespace sheetloop::cli
