#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sheetloop::agent {

struct PromptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fills {{name}} placeholders from vars (missing names render empty) and
/// keeps {{#name}}...{{/name}} blocks only when vars[name] is non-empty.
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& vars);

/// Recovers the payload from a model response: the first ``` fenced block
/// when present (language tag ignored), otherwise the whole text trimmed.
std::string extract_block(const std::string& response);

/// Prompt wording lives in data files, one per template.
struct PromptTemplates {
    std::string planner_system;
    std::string planner_turn;
    std::string planner_repair;
    std::string informer_system;
    std::string informer_turn;

    static PromptTemplates load(const std::string& dir);  // throws PromptError
};

}  // namespace sheetloop::agent
