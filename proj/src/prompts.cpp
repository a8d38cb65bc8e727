#include "sheetloop/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace sheetloop::agent {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PromptError("missing prompt template '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& vars) {
    std::string out;
    size_t i = 0;
    while (i < tpl.size()) {
        size_t open = tpl.find("{{", i);
        if (open == std::string_view::npos) {
            out.append(tpl.substr(i));
            break;
        }
        out.append(tpl.substr(i, open - i));
        size_t close = tpl.find("}}", open);
        if (close == std::string_view::npos) {
            out.append(tpl.substr(open));
            break;
        }
        std::string_view name = tpl.substr(open + 2, close - open - 2);
        if (!name.empty() && name.front() == '#') {
            // conditional block
            std::string key(name.substr(1));
            std::string end_tag = "{{/" + key + "}}";
            size_t body_start = close + 2;
            size_t end = tpl.find(end_tag, body_start);
            if (end == std::string_view::npos) {
                throw PromptError("unterminated block {{#" + key + "}}");
            }
            auto it = vars.find(key);
            if (it != vars.end() && !it->second.empty()) {
                out += render_template(tpl.substr(body_start, end - body_start), vars);
            }
            i = end + end_tag.size();
            // a conditional block on its own line should not leave a blank line
            if (i < tpl.size() && tpl[i] == '\n' &&
                (it == vars.end() || it->second.empty())) {
                ++i;
            }
            continue;
        }
        auto it = vars.find(std::string(name));
        if (it != vars.end()) out += it->second;
        i = close + 2;
    }
    return out;
}

std::string extract_block(const std::string& response) {
    size_t open = response.find("```");
    if (open != std::string::npos) {
        size_t body = response.find('\n', open);
        if (body != std::string::npos) {
            size_t close = response.find("```", body);
            if (close != std::string::npos) {
                std::string inner = response.substr(body + 1, close - body - 1);
                while (!inner.empty() && (inner.back() == '\n' || inner.back() == '\r')) {
                    inner.pop_back();
                }
                return inner;
            }
        }
    }
    std::string out = response;
    size_t a = out.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = out.find_last_not_of(" \t\r\n");
    return out.substr(a, b - a + 1);
}

PromptTemplates PromptTemplates::load(const std::string& dir) {
    std::filesystem::path base(dir);
    PromptTemplates t;
    t.planner_system = read_file(base / "planner_system.txt");
    t.planner_turn = read_file(base / "planner_turn.txt");
    t.planner_repair = read_file(base / "planner_repair.txt");
    t.informer_system = read_file(base / "informer_system.txt");
    t.informer_turn = read_file(base / "informer_turn.txt");
    return t;
}

}  // namespace sheetloop::agent
