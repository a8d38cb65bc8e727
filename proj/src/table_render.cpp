#include "sheetloop/table_render.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>

namespace sheetloop::serde {

const char* to_string(TableRepr r) {
    switch (r) {
        case TableRepr::JsonRecords: return "json_records";
        case TableRepr::DFLoader: return "dfloader";
        case TableRepr::Markdown: return "markdown";
        case TableRepr::Html: return "html";
    }
    return "?";
}

std::optional<TableRepr> table_repr_from(std::string_view name) {
    if (name == "json_records" || name == "json") return TableRepr::JsonRecords;
    if (name == "dfloader") return TableRepr::DFLoader;
    if (name == "markdown" || name == "md") return TableRepr::Markdown;
    if (name == "html") return TableRepr::Html;
    return std::nullopt;
}

bool TableGrid::operator==(const TableGrid& rhs) const {
    if (headers != rhs.headers || rows.size() != rhs.rows.size()) return false;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rhs.rows[i].size()) return false;
        for (size_t j = 0; j < rows[i].size(); ++j) {
            if (compare_scalars(rows[i][j], rhs.rows[i][j]) != 0 ||
                scalar_kind(rows[i][j]) != scalar_kind(rhs.rows[i][j])) {
                return false;
            }
        }
    }
    return true;
}

namespace {

void escape_json_into(std::string& out, const std::string& s) {
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    escape_json_into(out, s);
    out.push_back('"');
    return out;
}

// JSON and the Python-literal flavor differ only in the null/bool spellings.
std::string scalar_literal(const Scalar& v, bool python) {
    return std::visit(
        [python](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, EmptyCell>) {
                return python ? "None" : "null";
            } else if constexpr (std::is_same_v<T, Decimal>) {
                return x.to_string();
            } else if constexpr (std::is_same_v<T, std::string>) {
                return json_string(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                if (python) return x ? "True" : "False";
                return x ? "true" : "false";
            } else {
                return json_string(x.to_string());
            }
        },
        v);
}

std::string json_record(const TableGrid& g, size_t row) {
    std::string out = "{";
    for (size_t c = 0; c < g.headers.size(); ++c) {
        if (c) out.push_back(',');
        out += json_string(g.headers[c]);
        out.push_back(':');
        out += scalar_literal(g.rows[row][c], false);
    }
    out.push_back('}');
    return out;
}

std::string markdown_cell(const Scalar& v) {
    std::string s = scalar_display(v);
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else if (c == '\n') out.push_back(' ');
        else if (c != '\r') out.push_back(c);
    }
    return out;
}

std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out.push_back(c);
    }
    return out;
}

std::string pad(const std::string& s, size_t width) {
    std::string out = s;
    while (out.size() < width) out.push_back(' ');
    return out;
}

// Per-representation renderer pieces: a fixed head/tail plus one line per
// data row. Truncation then works uniformly on rows.
struct Pieces {
    std::string head;                // before any data row
    std::vector<std::string> lines;  // one per data row
    std::string tail;                // after the rows
    std::string sep;                 // between row lines
};

Pieces build_pieces(const TableGrid& g, TableRepr repr) {
    Pieces p;
    switch (repr) {
        case TableRepr::JsonRecords: {
            if (g.rows.empty()) {
                p.head = "[]";
                return p;
            }
            p.head = "[\n";
            p.tail = "\n]";
            p.sep = ",\n";
            for (size_t r = 0; r < g.rows.size(); ++r) p.lines.push_back(json_record(g, r));
            return p;
        }
        case TableRepr::DFLoader: {
            // Column-wise constructor; assembled separately.
            return p;
        }
        case TableRepr::Markdown: {
            std::vector<size_t> widths(g.headers.size());
            std::vector<std::vector<std::string>> cells(g.rows.size());
            for (size_t c = 0; c < g.headers.size(); ++c) {
                widths[c] = std::max<size_t>(3, markdown_cell(g.headers[c]).size());
            }
            for (size_t r = 0; r < g.rows.size(); ++r) {
                cells[r].resize(g.headers.size());
                for (size_t c = 0; c < g.headers.size(); ++c) {
                    cells[r][c] = markdown_cell(g.rows[r][c]);
                    widths[c] = std::max(widths[c], cells[r][c].size());
                }
            }
            auto row_line = [&](const std::vector<std::string>& vals) {
                std::string line = "|";
                for (size_t c = 0; c < g.headers.size(); ++c) {
                    line += " " + pad(vals[c], widths[c]) + " |";
                }
                return line;
            };
            std::vector<std::string> hdr(g.headers.size());
            for (size_t c = 0; c < g.headers.size(); ++c) hdr[c] = markdown_cell(g.headers[c]);
            p.head = row_line(hdr) + "\n";
            std::string sep_line = "|";
            for (size_t c = 0; c < g.headers.size(); ++c) {
                sep_line += " " + std::string(widths[c], '-') + " |";
            }
            p.head += sep_line;
            if (!g.rows.empty()) p.head += "\n";
            p.sep = "\n";
            for (const auto& r : cells) p.lines.push_back(row_line(r));
            return p;
        }
        case TableRepr::Html: {
            p.head = "<table>\n<tr>";
            for (const auto& h : g.headers) p.head += "<th>" + html_escape(h) + "</th>";
            p.head += "</tr>";
            if (!g.rows.empty()) p.head += "\n";
            p.tail = "\n</table>";
            p.sep = "\n";
            for (const auto& row : g.rows) {
                std::string line = "<tr>";
                for (const auto& v : row) line += "<td>" + html_escape(scalar_display(v)) + "</td>";
                line += "</tr>";
                p.lines.push_back(line);
            }
            if (g.rows.empty()) p.tail = "\n</table>";
            return p;
        }
    }
    return p;
}

std::string assemble(const Pieces& p, size_t n_head_rows) {
    std::string out = p.head;
    for (size_t i = 0; i < n_head_rows; ++i) {
        if (i) out += p.sep;
        out += p.lines[i];
    }
    out += p.tail;
    return out;
}

std::string dfloader_render(const TableGrid& g, size_t n_rows) {
    std::string out = "pd.DataFrame({";
    if (!g.headers.empty()) out += "\n";
    for (size_t c = 0; c < g.headers.size(); ++c) {
        out += json_string(g.headers[c]);
        out += ": [";
        for (size_t r = 0; r < n_rows; ++r) {
            if (r) out += ", ";
            out += scalar_literal(g.rows[r][c], true);
        }
        out += "]";
        if (c + 1 < g.headers.size()) out += ",";
        out += "\n";
    }
    out += "})";
    return out;
}

std::string marker_line(const RenderBudget& b, size_t total_rows) {
    return b.truncation_marker + " (" + std::to_string(total_rows) + " rows total)";
}

}  // namespace

std::string render_table(const TableGrid& grid, TableRepr repr, const RenderBudget& budget) {
    const size_t n = grid.rows.size();

    auto full_render = [&](size_t rows) {
        if (repr == TableRepr::DFLoader) return dfloader_render(grid, rows);
        Pieces p = build_pieces(grid, repr);
        return assemble(p, rows);
    };

    std::string full = full_render(n);
    if (full.size() <= budget.max_chars) return full;

    // Truncate whole rows. Binary search the largest head count whose
    // render plus marker fits; head_tail reserves roughly half the slack
    // for trailing rows.
    const std::string mark = marker_line(budget, n);
    const bool tail_mode =
        budget.policy == RenderBudget::Policy::HeadTail && repr != TableRepr::DFLoader;

    auto head_size = [&](size_t rows) { return full_render(rows).size() + 1 + mark.size(); };

    size_t head_budget = budget.max_chars;
    if (tail_mode) {
        size_t fixed = head_size(0);
        if (fixed < budget.max_chars) head_budget = fixed + (budget.max_chars - fixed) / 2;
    }

    size_t lo = 0, hi = n;
    while (lo < hi) {
        size_t mid = (lo + hi + 1) / 2;
        if (head_size(mid) <= head_budget) lo = mid;
        else hi = mid - 1;
    }

    std::string out = full_render(lo) + "\n" + mark;

    if (tail_mode) {
        Pieces p = build_pieces(grid, repr);
        // Append trailing raw row lines while they fit.
        std::vector<std::string> tail_lines;
        size_t used = out.size();
        for (size_t i = n; i-- > lo;) {
            size_t cost = p.lines[i].size() + 1;
            if (used + cost > budget.max_chars) break;
            tail_lines.push_back(p.lines[i]);
            used += cost;
        }
        for (auto it = tail_lines.rbegin(); it != tail_lines.rend(); ++it) {
            out += "\n" + *it;
        }
    }

    if (out.size() > budget.max_chars) {
        // Budget too small even for the marker: hard cut.
        out.resize(budget.max_chars);
    }
    return out;
}

// ---- parsing ----

namespace {

struct Lexer {
    const std::string& s;
    size_t i = 0;

    explicit Lexer(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }

    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) {
            throw TableParseError(std::string("expected '") + c + "' at offset " +
                                  std::to_string(i));
        }
    }

    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }

    bool eat_word(const char* w) {
        skip_ws();
        size_t len = std::strlen(w);
        if (s.compare(i, len, w) == 0) {
            i += len;
            return true;
        }
        return false;
    }

    std::string read_string() {
        skip_ws();
        if (i >= s.size() || s[i] != '"') throw TableParseError("expected string");
        ++i;
        std::string out;
        while (i < s.size()) {
            char c = s[i];
            if (c == '"') {
                ++i;
                return out;
            }
            if (c == '\\') {
                if (i + 1 >= s.size()) throw TableParseError("bad escape");
                char n = s[i + 1];
                i += 2;
                switch (n) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    case 'b': out.push_back('\b'); break;
                    case 'f': out.push_back('\f'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case '/': out.push_back('/'); break;
                    case 'u': {
                        if (i + 4 > s.size()) throw TableParseError("bad \\u escape");
                        unsigned v = 0;
                        for (int k = 0; k < 4; ++k) {
                            char h = s[i + k];
                            v <<= 4;
                            if (h >= '0' && h <= '9') v += h - '0';
                            else if (h >= 'a' && h <= 'f') v += h - 'a' + 10;
                            else if (h >= 'A' && h <= 'F') v += h - 'A' + 10;
                            else throw TableParseError("bad \\u escape");
                        }
                        i += 4;
                        // UTF-8 encode (BMP only).
                        if (v < 0x80) {
                            out.push_back(static_cast<char>(v));
                        } else if (v < 0x800) {
                            out.push_back(static_cast<char>(0xC0 | (v >> 6)));
                            out.push_back(static_cast<char>(0x80 | (v & 0x3F)));
                        } else {
                            out.push_back(static_cast<char>(0xE0 | (v >> 12)));
                            out.push_back(static_cast<char>(0x80 | ((v >> 6) & 0x3F)));
                            out.push_back(static_cast<char>(0x80 | (v & 0x3F)));
                        }
                        break;
                    }
                    default: throw TableParseError("unknown escape");
                }
                continue;
            }
            out.push_back(c);
            ++i;
        }
        throw TableParseError("unterminated string");
    }

    Decimal read_number() {
        skip_ws();
        size_t start = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' ||
                                s[i] == 'e' || s[i] == 'E' ||
                                ((s[i] == '-' || s[i] == '+') &&
                                 (s[i - 1] == 'e' || s[i - 1] == 'E')))) {
            ++i;
        }
        Decimal d;
        if (start == i || !Decimal::try_parse(s.substr(start, i - start), d)) {
            throw TableParseError("bad number at offset " + std::to_string(start));
        }
        return d;
    }

    void expect_end() {
        skip_ws();
        if (i != s.size()) {
            throw TableParseError("trailing content at offset " + std::to_string(i));
        }
    }
};

Scalar string_to_scalar(const std::string& s) {
    // ISO-shaped strings become dates; everything else stays text.
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        if (auto d = Date::parse(s)) return *d;
    }
    if (s.size() == 19 && s[4] == '-' && s[10] == 'T') {
        if (auto dt = DateTime::parse(s)) return *dt;
    }
    return s;
}

Scalar read_scalar(Lexer& lx, bool python) {
    char c = lx.peek();
    if (c == '"') return string_to_scalar(lx.read_string());
    if (python) {
        if (lx.eat_word("None")) return EmptyCell{};
        if (lx.eat_word("True")) return true;
        if (lx.eat_word("False")) return false;
    } else {
        if (lx.eat_word("null")) return EmptyCell{};
        if (lx.eat_word("true")) return true;
        if (lx.eat_word("false")) return false;
    }
    return lx.read_number();
}

TableGrid parse_json_records(const std::string& text) {
    Lexer lx(text);
    lx.expect('[');
    TableGrid g;
    bool first_record = true;
    if (!lx.eat(']')) {
        while (true) {
            lx.expect('{');
            std::vector<Scalar> row;
            std::vector<std::string> keys;
            if (!lx.eat('}')) {
                while (true) {
                    std::string key = lx.read_string();
                    lx.expect(':');
                    Scalar v = read_scalar(lx, false);
                    keys.push_back(std::move(key));
                    row.push_back(std::move(v));
                    if (lx.eat('}')) break;
                    lx.expect(',');
                }
            }
            if (first_record) {
                g.headers = keys;
                first_record = false;
            } else if (keys != g.headers) {
                throw TableParseError("record keys do not match the first record");
            }
            g.rows.push_back(std::move(row));
            if (lx.eat(']')) break;
            lx.expect(',');
        }
    }
    lx.expect_end();
    return g;
}

TableGrid parse_dfloader(const std::string& text) {
    Lexer lx(text);
    if (!lx.eat_word("pd.DataFrame")) throw TableParseError("expected pd.DataFrame(...)");
    lx.expect('(');
    lx.expect('{');
    TableGrid g;
    std::vector<std::vector<Scalar>> columns;
    if (!lx.eat('}')) {
        while (true) {
            std::string key = lx.read_string();
            lx.expect(':');
            lx.expect('[');
            std::vector<Scalar> col;
            if (!lx.eat(']')) {
                while (true) {
                    col.push_back(read_scalar(lx, true));
                    if (lx.eat(']')) break;
                    lx.expect(',');
                }
            }
            g.headers.push_back(std::move(key));
            columns.push_back(std::move(col));
            if (lx.eat('}')) break;
            lx.expect(',');
        }
    }
    lx.expect(')');
    lx.expect_end();
    for (size_t c = 1; c < columns.size(); ++c) {
        if (columns[c].size() != columns[0].size()) {
            throw TableParseError("column lengths differ (" + g.headers[0] + " has " +
                                  std::to_string(columns[0].size()) + ", " + g.headers[c] +
                                  " has " + std::to_string(columns[c].size()) + ")");
        }
    }
    size_t n = columns.empty() ? 0 : columns[0].size();
    g.rows.assign(n, {});
    for (size_t r = 0; r < n; ++r) {
        g.rows[r].reserve(columns.size());
        for (size_t c = 0; c < columns.size(); ++c) g.rows[r].push_back(columns[c][r]);
    }
    return g;
}

}  // namespace

TableGrid parse_table(const std::string& text, TableRepr repr) {
    switch (repr) {
        case TableRepr::JsonRecords: return parse_json_records(text);
        case TableRepr::DFLoader: return parse_dfloader(text);
        default:
            throw TableParseError(std::string(to_string(repr)) + " is render-only");
    }
}

}  // namespace sheetloop::serde
