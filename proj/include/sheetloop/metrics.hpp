#pragma once

#include "sheetloop/checklist.hpp"
#include "sheetloop/planner.hpp"

#include <map>
#include <string>
#include <vector>

namespace sheetloop::evalkit {

/// One finished episode paired with its checklist verdicts.
struct EpisodeEval {
    std::string task_id;
    agent::EpisodeResult::Status status = agent::EpisodeResult::Status::BudgetExhausted;
    std::vector<Verdict> verdicts;
    std::vector<std::string> categories;
    std::vector<std::string> challenges;
    std::vector<std::string> item_categories;  // parallel to verdicts; may hold ""
    std::string horizon;                       // short | medium | long
};

EpisodeEval make_eval(const TaskSpec& task, agent::EpisodeResult::Status status,
                      std::vector<Verdict> verdicts);

struct CategoryRow {
    int items_total = 0;
    int items_passed = 0;
    double rate() const { return items_total ? 100.0 * items_passed / items_total : 0.0; }
};

struct HorizonRow {
    int episodes = 0;
    int passed = 0;
    double sub_sum = 0.0;  // sum of per-episode subtask fractions
    double pass_at_1() const { return episodes ? 100.0 * passed / episodes : 0.0; }
    double sub_pass_at_1() const { return episodes ? 100.0 * sub_sum / episodes : 0.0; }
};

struct ChallengeRow {
    int episodes = 0;
    double sub_sum = 0.0;
    double rate() const { return episodes ? 100.0 * sub_sum / episodes : 0.0; }
};

struct RunMetrics {
    double exec_at_1 = 0.0;      // % episodes that terminated via DONE without errors
    double pass_at_1 = 0.0;      // % episodes with every checklist item passing
    double sub_pass_at_1 = 0.0;  // mean per-episode subtask pass fraction, x100
    int episodes = 0;
    std::map<std::string, CategoryRow> per_category;    // always the 5 categories
    std::map<std::string, ChallengeRow> per_challenge;  // always the 4 challenges
    std::map<std::string, HorizonRow> per_horizon;      // short | medium | long
};

/// Aggregates the three headline metrics plus the breakdown axes.
/// Throws SchemaError on an empty episode list.
RunMetrics compute_metrics(const std::vector<EpisodeEval>& episodes);

/// Machine-readable metrics (stable JSON) plus a text summary with the
/// category / challenge / horizon tables.
std::string metrics_json(const RunMetrics& m);
std::string metrics_text(const RunMetrics& m);
void emit_report(const RunMetrics& m, const std::string& json_path,
                 const std::string& text_path);

}  // namespace sheetloop::evalkit
