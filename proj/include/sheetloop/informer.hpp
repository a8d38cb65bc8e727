#pragma once

#include "sheetloop/gateway.hpp"
#include "sheetloop/mirror.hpp"
#include "sheetloop/prompts.hpp"
#include "sheetloop/table_render.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sheetloop::informer {

struct SqlQueryRec {
    std::string text;
    std::string target_table;
    int derived_from_step = 0;
};

/// Evidence grid handed to the Planner (e_t): the execution result of one
/// Informer query, truncated to the evidence row bound.
struct Subview {
    std::vector<std::string> columns;
    std::vector<std::vector<Scalar>> rows;
    SqlQueryRec source_query;
    bool truncated = false;
    size_t total_rows = 0;
};

/// Runs a parsed query against the mirror and shapes the result. Head-biased
/// truncation to max_rows; the full row count rides along for the prompt
/// summary.
Subview execute_query(const RelationalMirror& mirror, const sql::Query& q, size_t max_rows,
                      int step);

serde::TableGrid subview_grid(const Subview& v);

struct InformerOptions {
    size_t max_evidence_rows = 50;
    double temperature = 0.0;
    int max_tokens = 512;
    std::string model_id;
};

/// Mirrors the workbook, asks the gateway for a task-specific query each
/// step, executes it, and returns the subview. Query trouble (off-subset,
/// runtime errors, a declined NO_QUERY) means no evidence, never a failed
/// episode.
class Informer {
public:
    Informer(const agent::PromptTemplates& templates, llm::Gateway& gateway,
             InformerOptions options);

    void attach(const Workbook& wb);  // initial mirror build
    void synchronize(const Workbook& wb, long committed_steps);
    const RelationalMirror& mirror() const { return mirror_; }

    /// q_t = Informer(q_t | I, P^I, A_{t-1}, s_t). One re-prompt on parse
    /// failure, then NoEvidence (recorded in diagnostics()).
    std::optional<Subview> request_evidence(const std::string& instruction,
                                            const std::vector<std::string>& prior_actions,
                                            const std::vector<SheetState>& states, int step);

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    const agent::PromptTemplates& templates_;
    llm::Gateway& gateway_;
    InformerOptions options_;
    RelationalMirror mirror_;
    std::vector<std::string> diagnostics_;

    std::string turn_prompt(const std::string& instruction,
                            const std::vector<std::string>& prior_actions,
                            const std::vector<SheetState>& states,
                            const std::string& diagnostic) const;
};

/// Pulls the SQL out of a chat response: fenced block if present, full text
/// otherwise. "NO_QUERY" (alone) signals a deliberate decline.
std::string extract_sql(const std::string& response);

}  // namespace sheetloop::informer
