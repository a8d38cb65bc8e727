#pragma once

#include "sheetloop/config.hpp"
#include "sheetloop/metrics.hpp"

#include <string>
#include <vector>

namespace sheetloop::cli {

/// One task driven end to end: episode, verdicts, artifacts on disk.
struct TaskRunResult {
    std::string task_id;
    agent::EpisodeResult episode;
    std::vector<evalkit::Verdict> verdicts;
    evalkit::EpisodeEval eval;
    std::string hard_error;  // setup/config failure; episode did not run
};

/// Runs a task against a workbook file and writes
/// out_dir/<task_id>/{result.wbk, transcript.json, verdicts.json,
/// episode.json}. GatewayError aborts the episode but still produces
/// artifacts.
TaskRunResult run_task(const evalkit::TaskSpec& task, const std::string& workbook_path,
                       const AgentConfig& cfg, const std::string& replay_override,
                       const std::string& out_dir);

int cmd_run(const std::string& task_path, const std::string& workbook_path,
            const std::string& config_path, const std::string& out_dir,
            const ModeOverrides& modes);

int cmd_bench(const std::string& suite_path, const std::string& config_path,
              const std::string& out_dir, const ModeOverrides& modes, int workers,
              bool repr_sweep);

int cmd_index(const std::string& corpus_dir, const std::string& config_path,
              const std::string& out_path);

int cmd_validate(const std::string& fixtures_dir);

int cmd_report(const std::vector<std::string>& metrics_files, const std::string& out_path);

/// Corpus files in deterministic order (sorted by filename).
std::vector<std::string> corpus_files(const std::string& dir);

}  // namespace sheetloop::cli
