#include "sheetloop/informer.hpp"

namespace sheetloop::informer {

Subview execute_query(const RelationalMirror& mirror, const sql::Query& q, size_t max_rows,
                      int step) {
    const sql::Table* table = mirror.resolve(q.table);
    if (!table) {
        std::string names;
        for (const auto& t : mirror.tables()) {
            if (!names.empty()) names += ", ";
            names += t.aliases.front() + " (" + t.sheet_name + ")";
        }
        throw sql::SqlError(sql::SqlError::Kind::Runtime,
                            "no table '" + q.table + "'; available: " + names);
    }
    sql::Table result = sql::execute_sql(q, *table);
    Subview v;
    v.columns = result.columns;
    v.total_rows = result.rows.size();
    v.source_query = SqlQueryRec{q.source_text, table->name, step};
    if (result.rows.size() > max_rows) {
        v.truncated = true;
        result.rows.resize(max_rows);
    }
    v.rows = std::move(result.rows);
    return v;
}

serde::TableGrid subview_grid(const Subview& v) {
    serde::TableGrid g;
    g.headers = v.columns;
    g.rows = v.rows;
    return g;
}

std::string extract_sql(const std::string& response) {
    return agent::extract_block(response);
}

Informer::Informer(const agent::PromptTemplates& templates, llm::Gateway& gateway,
                   InformerOptions options)
    : templates_(templates), gateway_(gateway), options_(std::move(options)) {}

void Informer::attach(const Workbook& wb) {
    mirror_ = RelationalMirror::build(wb);
}

void Informer::synchronize(const Workbook& wb, long committed_steps) {
    mirror_.synchronize(wb, committed_steps);
}

std::string Informer::turn_prompt(const std::string& instruction,
                                  const std::vector<std::string>& prior_actions,
                                  const std::vector<SheetState>& states,
                                  const std::string& diagnostic) const {
    std::string actions_text;
    for (size_t i = 0; i < prior_actions.size(); ++i) {
        actions_text += "step " + std::to_string(i + 1) + ":\n" + prior_actions[i] + "\n";
    }
    std::string states_text;
    for (const auto& st : states) states_text += st.summary() + "\n";
    std::string tables_text;
    for (const auto& t : mirror_.tables()) {
        tables_text += t.aliases.front() + " (sheet \"" + t.sheet_name + "\"): ";
        for (size_t i = 0; i < t.table.columns.size(); ++i) {
            if (i) tables_text += ", ";
            tables_text += t.table.columns[i];
        }
        tables_text += "\n";
    }
    return agent::render_template(templates_.informer_turn,
                           {{"instruction", instruction},
                            {"prior_actions", actions_text},
                            {"sheet_states", states_text},
                            {"tables", tables_text},
                            {"diagnostic", diagnostic}});
}

std::optional<Subview> Informer::request_evidence(const std::string& instruction,
                                                  const std::vector<std::string>& prior_actions,
                                                  const std::vector<SheetState>& states,
                                                  int step) {
    std::string diagnostic;
    for (int attempt = 0; attempt < 2; ++attempt) {
        llm::ChatRequest req;
        req.session_tag = "informer";
        req.temperature = options_.temperature;
        req.max_tokens = options_.max_tokens;
        req.model_id = options_.model_id;
        req.messages.push_back({"system", templates_.informer_system});
        req.messages.push_back(
            {"user", turn_prompt(instruction, prior_actions, states, diagnostic)});
        llm::ChatResponse res = gateway_.complete(req);

        std::string text = extract_sql(res.content);
        if (text.empty() || text == "NO_QUERY") return std::nullopt;

        sql::Query q;
        try {
            q = sql::parse_sql(text);
        } catch (const sql::SqlError& e) {
            if (attempt == 0) {
                diagnostic = std::string("previous query was rejected: ") + e.what();
                continue;  // one re-prompt with the diagnostic
            }
            diagnostics_.push_back("step " + std::to_string(step) +
                                   ": query rejected twice: " + e.what());
            return std::nullopt;
        }
        try {
            return execute_query(mirror_, q, options_.max_evidence_rows, step);
        } catch (const sql::SqlError& e) {
            diagnostics_.push_back("step " + std::to_string(step) +
                                   ": query failed: " + e.what());
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace sheetloop::informer
