#pragma once

#include "sheetloop/gateway.hpp"
#include "sheetloop/informer.hpp"
#include "sheetloop/prompts.hpp"
#include "sheetloop/sandbox.hpp"
#include "sheetloop/snippets.hpp"
#include "sheetloop/table_render.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sheetloop::agent {

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AgentOptions {
    int max_steps = 15;
    int max_repairs = 3;       // per step: reflect calls plus parse re-prompts
    int max_parse_retries = 1;  // re-prompts per plan/reflect call
    int k = 3;                  // snippets per repair
    serde::TableRepr table_repr = serde::TableRepr::JsonRecords;
    size_t max_prompt_chars = 24000;
    size_t evidence_budget_chars = 4000;
    bool enable_informer = true;
    bool enable_retriever = true;
    double temperature = 0.0;
    int max_tokens = 2048;
    std::string model_id;
    size_t max_evidence_rows = 50;
};

struct PlannerTurn {
    actions::ActionProgram action;
    actions::Observation observation;
};

/// h_t: committed (action, observation) pairs in execution order. Failed
/// attempts live only in the transcript.
struct PlanningHistory {
    std::vector<PlannerTurn> turns;

    std::vector<std::string> action_sources() const;  // A_{t-1}
};

/// Everything one plan call sees; prompt assembly trims oldest history
/// first and never drops the instruction or current sheet states.
struct PlannerContext {
    std::string instruction;
    std::string description;
    std::vector<SheetState> sheet_states;
    const PlanningHistory* history = nullptr;
    std::optional<informer::Subview> evidence;
    const actions::Observation* last_observation = nullptr;
};

struct EpisodeResult {
    enum class Status { Done, BudgetExhausted, Aborted };
    Status status = Status::BudgetExhausted;
    int steps_used = 0;
    int repairs_used = 0;
    PlanningHistory history;
    std::string abort_reason;

    bool done() const { return status == Status::Done; }
};

const char* to_string(EpisodeResult::Status s);

class Planner {
public:
    Planner(const PromptTemplates& templates, const AgentOptions& options,
            llm::Gateway& gateway);

    /// One planning call; re-prompts with the parse diagnostic up to
    /// max_parse_retries (each counts as a repair), then BudgetExceeded.
    actions::ActionProgram plan_step(const PlannerContext& ctx, int& repairs_used);

    /// a_t*: reflection over a failed action, optionally with retrieved
    /// snippets in descending similarity order. Counts one repair (plus
    /// parse re-prompts).
    actions::ActionProgram reflect_and_repair(const PlannerContext& ctx,
                                              const actions::ActionProgram& failed,
                                              const actions::Observation& obs,
                                              const std::vector<retrieval::CodeSnippet>& snippets,
                                              int& repairs_used);

    /// Rendered user prompt for the given context (exposed for budget tests).
    std::string render_turn_prompt(const PlannerContext& ctx) const;

private:
    const PromptTemplates& templates_;
    const AgentOptions& options_;
    llm::Gateway& gateway_;

    std::string system_prompt() const;
    std::string history_text(const PlanningHistory& history, size_t drop_oldest) const;
    std::string evidence_text(const std::optional<informer::Subview>& evidence) const;
    std::string assemble_user(const PlannerContext& ctx) const;  // enforces the budget
    actions::ActionProgram complete_and_parse(const std::string& user_prompt,
                                              const char* what, int& repairs_used);
};

struct EpisodeInputs {
    std::string instruction;
    std::string description;
};

/// The closed loop: evidence -> plan -> sandbox -> (retrieve + reflect on
/// error) -> commit + synchronize, until DONE or budgets run out.
/// GatewayError propagates; sandbox errors are consumed internally.
EpisodeResult run_episode(const EpisodeInputs& task, Workbook& wb, const AgentOptions& options,
                          llm::Gateway& gateway, informer::Informer* informer,
                          const retrieval::SnippetRepository* repo,
                          const PromptTemplates& templates,
                          const actions::Sandbox& sandbox = {});

}  // namespace sheetloop::agent
