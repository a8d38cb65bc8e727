#include "sheetloop/planner.hpp"

#include <algorithm>
#include <map>

namespace sheetloop::agent {

const char* to_string(EpisodeResult::Status s) {
    switch (s) {
        case EpisodeResult::Status::Done: return "done";
        case EpisodeResult::Status::BudgetExhausted: return "budget_exhausted";
        case EpisodeResult::Status::Aborted: return "aborted";
    }
    return "?";
}

std::vector<std::string> PlanningHistory::action_sources() const {
    std::vector<std::string> out;
    out.reserve(turns.size());
    for (const auto& t : turns) out.push_back(t.action.source);
    return out;
}

Planner::Planner(const PromptTemplates& templates, const AgentOptions& options,
                 llm::Gateway& gateway)
    : templates_(templates), options_(options), gateway_(gateway) {}

std::string Planner::system_prompt() const {
    std::string vocab;
    for (const auto& e : actions::action_vocabulary()) {
        vocab += std::string(e.verb) + " " + std::string(e.signature) + "  [" +
                 actions::to_string(e.category) + "]\n";
    }
    return render_template(templates_.planner_system,
                           {{"vocabulary", vocab},
                            {"table_repr", serde::to_string(options_.table_repr)}});
}

std::string Planner::history_text(const PlanningHistory& history, size_t drop_oldest) const {
    std::string out;
    for (size_t i = drop_oldest; i < history.turns.size(); ++i) {
        const PlannerTurn& t = history.turns[i];
        out += "step " + std::to_string(i + 1) + " action:\n" + t.action.source + "\n";
        out += "step " + std::to_string(i + 1) + " result: " + t.observation.message + "\n";
    }
    if (drop_oldest > 0 && !history.turns.empty()) {
        out = "(" + std::to_string(drop_oldest) + " earlier step(s) trimmed)\n" + out;
    }
    return out;
}

std::string Planner::evidence_text(const std::optional<informer::Subview>& evidence) const {
    if (!evidence) return "";
    serde::RenderBudget budget;
    budget.max_chars = options_.evidence_budget_chars;
    std::string table =
        serde::render_table(informer::subview_grid(*evidence), options_.table_repr, budget);
    std::string out = "result of SQL `" + evidence->source_query.text + "`";
    if (evidence->truncated) {
        out += " (showing " + std::to_string(evidence->rows.size()) + " of " +
               std::to_string(evidence->total_rows) + " rows)";
    }
    out += ":\n" + table + "\n";
    return out;
}

std::string Planner::assemble_user(const PlannerContext& ctx) const {
    std::string states;
    for (const auto& st : ctx.sheet_states) states += st.summary() + "\n";
    std::string evidence = evidence_text(ctx.evidence);
    std::string last_obs;
    if (ctx.last_observation && !ctx.last_observation->ok()) {
        last_obs = ctx.last_observation->message;
    }

    size_t turns = ctx.history ? ctx.history->turns.size() : 0;
    const size_t budget = options_.max_prompt_chars;
    const std::string system = system_prompt();

    // Drop oldest history turns until the full prompt fits; the
    // instruction and current sheet states are never dropped.
    for (size_t drop = 0; drop <= turns; ++drop) {
        std::map<std::string, std::string> vars = {
            {"instruction", ctx.instruction},
            {"description", ctx.description},
            {"sheet_states", states},
            {"history", ctx.history ? history_text(*ctx.history, drop) : ""},
            {"evidence", evidence},
            {"last_observation", last_obs},
        };
        std::string user = render_template(templates_.planner_turn, vars);
        if (system.size() + user.size() <= budget) return user;
    }
    throw BudgetExceeded("prompt exceeds max_prompt_chars=" + std::to_string(budget) +
                         " even with all history trimmed");
}

std::string Planner::render_turn_prompt(const PlannerContext& ctx) const {
    return assemble_user(ctx);
}

actions::ActionProgram Planner::complete_and_parse(const std::string& user_prompt,
                                                   const char* what, int& repairs_used) {
    std::string prompt = user_prompt;
    for (int attempt = 0; attempt <= options_.max_parse_retries; ++attempt) {
        llm::ChatRequest req;
        req.session_tag = "planner";
        req.temperature = options_.temperature;
        req.max_tokens = options_.max_tokens;
        req.model_id = options_.model_id;
        req.messages.push_back({"system", system_prompt()});
        req.messages.push_back({"user", prompt});
        llm::ChatResponse res = gateway_.complete(req);

        std::string block = extract_block(res.content);
        actions::ParseOutcome parsed = actions::parse_action(block);
        if (parsed.ok()) return std::move(*parsed.program);

        if (attempt < options_.max_parse_retries) {
            ++repairs_used;  // the re-prompt consumes a repair
            prompt = user_prompt + "\nYour previous reply did not parse: " +
                     parsed.error->render() +
                     "\nResend the corrected action program only.";
            continue;
        }
        throw BudgetExceeded(std::string(what) + ": response failed to parse after " +
                             std::to_string(options_.max_parse_retries + 1) +
                             " attempt(s): " + parsed.error->render());
    }
    throw BudgetExceeded("unreachable");
}

actions::ActionProgram Planner::plan_step(const PlannerContext& ctx, int& repairs_used) {
    return complete_and_parse(assemble_user(ctx), "plan_step", repairs_used);
}

actions::ActionProgram Planner::reflect_and_repair(
    const PlannerContext& ctx, const actions::ActionProgram& failed,
    const actions::Observation& obs, const std::vector<retrieval::CodeSnippet>& snippets,
    int& repairs_used) {
    ++repairs_used;

    std::string snippet_text;
    for (size_t i = 0; i < snippets.size(); ++i) {
        snippet_text += "--- snippet " + std::to_string(i + 1) + " (" +
                        (snippets[i].category.empty() ? "untagged" : snippets[i].category) +
                        ") ---\n" + snippets[i].text + "\n";
    }

    std::map<std::string, std::string> vars = {
        {"instruction", ctx.instruction},
        {"failed_action", failed.source},
        {"observation", obs.message},
        {"snippets", snippet_text},
    };
    std::string user = render_template(templates_.planner_repair, vars);
    return complete_and_parse(user, "reflect_and_repair", repairs_used);
}

EpisodeResult run_episode(const EpisodeInputs& task, Workbook& wb, const AgentOptions& options,
                          llm::Gateway& gateway, informer::Informer* informer,
                          const retrieval::SnippetRepository* repo,
                          const PromptTemplates& templates, const actions::Sandbox& sandbox) {
    Planner planner(templates, options, gateway);
    EpisodeResult result;
    std::vector<SheetState> states = extract_all_states(wb);
    actions::Observation last_failed;
    bool have_failed = false;

    if (informer && options.enable_informer) informer->attach(wb);

    for (int step = 1; step <= options.max_steps; ++step) {
        if (gateway.transcript()) gateway.transcript()->set_step(step);
        result.steps_used = step;

        PlannerContext ctx;
        ctx.instruction = task.instruction;
        ctx.description = task.description;
        ctx.sheet_states = states;
        ctx.history = &result.history;
        ctx.last_observation = have_failed ? &last_failed : nullptr;
        if (informer && options.enable_informer) {
            ctx.evidence = informer->request_evidence(
                task.instruction, result.history.action_sources(), states, step);
        }

        actions::ActionProgram program;
        try {
            program = planner.plan_step(ctx, result.repairs_used);
        } catch (const BudgetExceeded& e) {
            result.status = EpisodeResult::Status::Aborted;
            result.abort_reason = e.what();
            return result;
        }

        actions::Observation obs = sandbox.execute(wb, program);
        int repairs_this_step = 0;
        while (!obs.ok() && repairs_this_step < options.max_repairs) {
            std::vector<retrieval::CodeSnippet> snippets;
            if (options.enable_retriever && repo && !repo->empty()) {
                std::string query =
                    program.source + "\nerror: " +
                    (obs.error_kind ? actions::to_string(*obs.error_kind) : "unknown");
                retrieval::EmbeddingFn embed = [&gateway](const std::vector<std::string>& t) {
                    return gateway.embed(t);
                };
                retrieval::RetrievalResult hits =
                    retrieve_top_k(*repo, query, options.k, embed);
                for (const auto& h : hits.hits) {
                    auto it = std::find_if(repo->snippets().begin(), repo->snippets().end(),
                                           [&](const retrieval::CodeSnippet& s) {
                                               return s.id == h.snippet_id;
                                           });
                    if (it != repo->snippets().end()) snippets.push_back(*it);
                }
            }
            try {
                program =
                    planner.reflect_and_repair(ctx, program, obs, snippets, result.repairs_used);
            } catch (const BudgetExceeded&) {
                break;  // give up on this step, keep the error observation
            }
            ++repairs_this_step;
            obs = sandbox.execute(wb, program);
        }

        if (obs.ok()) {
            have_failed = false;
            states = obs.new_state;
            result.history.turns.push_back(PlannerTurn{program, obs});
            if (informer && options.enable_informer) {
                informer->synchronize(wb, static_cast<long>(result.history.turns.size()));
            }
            if (program.declared_done) {
                result.status = EpisodeResult::Status::Done;
                return result;
            }
        } else {
            last_failed = obs;
            have_failed = true;
        }
    }
    result.status = EpisodeResult::Status::BudgetExhausted;
    return result;
}

}  // namespace sheetloop::agent
