#include "sheetloop/action.hpp"

#include "sheetloop/color.hpp"
#include "sheetloop/workbook.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace sheetloop::actions {

const char* to_string(OpCategory c) {
    switch (c) {
        case OpCategory::ValueProcessing: return "Value Processing";
        case OpCategory::WorksheetManagement: return "Worksheet Management";
        case OpCategory::FormatAdjustment: return "Format Adjustment";
        case OpCategory::ChartDesign: return "Chart Design";
        case OpCategory::ContentSummary: return "Content Summary";
    }
    return "?";
}

const std::vector<VocabEntry>& action_vocabulary() {
    using C = OpCategory;
    static const std::vector<VocabEntry> vocab = {
        {Verb::SetCell, "SET_CELL", "<cell> <literal>", C::ValueProcessing},
        {Verb::Insert, "INSERT", "ROWS|COLS <span>", C::ValueProcessing},
        {Verb::Delete, "DELETE", "ROWS|COLS <span> | CELLS <range>", C::ValueProcessing},
        {Verb::AutoFill, "AUTOFILL", "<src-range> TO <dst-range>", C::ValueProcessing},
        {Verb::Sort, "SORT", "<range> BY <col#> ASC|DESC", C::ValueProcessing},
        {Verb::Copy, "COPY", "<src-range> TO <dst-cell-or-range>", C::ValueProcessing},
        {Verb::Replace, "REPLACE", "<range> <old> <new>", C::ValueProcessing},
        {Verb::Hyperlink, "HYPERLINK", "<cell> <url> [<display-text>]", C::ValueProcessing},
        {Verb::Dedupe, "DEDUPE", "<range>", C::ValueProcessing},
        {Verb::Filter, "FILTER", "<range> WHERE <col#> <op> <literal>", C::ValueProcessing},
        {Verb::CreateSheet, "CREATE_SHEET", "<name>", C::WorksheetManagement},
        {Verb::DeleteSheet, "DELETE_SHEET", "<name>", C::WorksheetManagement},
        {Verb::RenameSheet, "RENAME_SHEET", "<old-name> <new-name>", C::WorksheetManagement},
        {Verb::TabColor, "TAB_COLOR", "<sheet> <color>", C::WorksheetManagement},
        {Verb::PageSize, "PAGE_SIZE", "<sheet> A4|A3|A5|LETTER|LEGAL", C::WorksheetManagement},
        {Verb::Orientation, "ORIENTATION", "<sheet> PORTRAIT|LANDSCAPE", C::WorksheetManagement},
        {Verb::FontName, "FONT_NAME", "<range> <font-name>", C::FormatAdjustment},
        {Verb::FontColor, "FONT_COLOR", "<range> <color>", C::FormatAdjustment},
        {Verb::FontSize, "FONT_SIZE", "<range> <points>", C::FormatAdjustment},
        {Verb::FontStyle, "FONT_STYLE", "<range> BOLD|ITALIC ON|OFF", C::FormatAdjustment},
        {Verb::Underline, "UNDERLINE", "<range> ON|OFF", C::FormatAdjustment},
        {Verb::Merge, "MERGE", "<range> [OFF]", C::FormatAdjustment},
        {Verb::Align, "ALIGN", "<range> <h-align> [<v-align>]", C::FormatAdjustment},
        {Verb::Resize, "RESIZE", "ROWS|COLS <span> <size>", C::FormatAdjustment},
        {Verb::Highlight, "HIGHLIGHT", "<range> FILL <color>", C::FormatAdjustment},
        {Verb::NumberFormat, "NUMBER_FORMAT", "<range> <format-code>", C::FormatAdjustment},
        {Verb::ChartType, "CHART_TYPE", "<sheet> <chart#> BAR|LINE|PIE|SCATTER", C::ChartDesign},
        {Verb::ChartData, "CHART_DATA", "<sheet> <chart#> <range>", C::ChartDesign},
        {Verb::ChartTitle, "CHART_TITLE", "<sheet> <chart#> <text>", C::ChartDesign},
        {Verb::ChartLegend, "CHART_LEGEND", "<sheet> <chart#> NONE|LEFT|RIGHT|TOP|BOTTOM",
         C::ChartDesign},
        {Verb::ChartPosition, "CHART_POSITION", "<sheet> <chart#> <anchor-cell>", C::ChartDesign},
        {Verb::ChartAxis, "CHART_AXIS", "<sheet> <chart#> X|Y <title>", C::ChartDesign},
        {Verb::DataLabels, "DATA_LABELS", "<sheet> <chart#> ON|OFF", C::ChartDesign},
        {Verb::Trendline, "TRENDLINE", "<sheet> <chart#> LINEAR|NONE", C::ChartDesign},
        {Verb::Pivot, "PIVOT",
         "<sheet> SOURCE <range> ROWS <col> [COLS <col>] VALUES <col> [FUNC <fn>]",
         C::ContentSummary},
        {Verb::PivotFunction, "PIVOT_FUNCTION", "<sheet> <pivot#> SUM|COUNT|AVG|MIN|MAX",
         C::ContentSummary},
    };
    return vocab;
}

std::string ActionParseError::render() const {
    return error_kind + " at line " + std::to_string(line) + ", column " +
           std::to_string(column) + ": " + message;
}

namespace {

struct Token {
    std::string text;
    bool quoted = false;
    int column = 0;  // 1-based
};

struct ParseFail {
    ActionParseError err;
};

[[noreturn]] void fail(int line, int column, const std::string& msg,
                       const char* kind = "ParseError") {
    throw ParseFail{ActionParseError{kind, line, column, msg}};
}

// Splits a line into tokens. Double-quoted tokens are string literals with
// \" \\ \n \t escapes. Single quotes glue to the following !ref part so
// 'My Sheet'!A1:B2 stays one token.
std::vector<Token> tokenize(const std::string& line, int line_no) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        int col = static_cast<int>(i) + 1;
        // '#' opens a comment only when followed by whitespace or EOL;
        // '#FF0000' stays a color token.
        if (line[i] == '#' &&
            (i + 1 >= line.size() || std::isspace(static_cast<unsigned char>(line[i + 1])))) {
            break;
        }
        if (line[i] == '"') {
            std::string s;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char c = line[i];
                if (c == '\\' && i + 1 < line.size()) {
                    char n = line[i + 1];
                    if (n == 'n') s.push_back('\n');
                    else if (n == 't') s.push_back('\t');
                    else s.push_back(n);
                    i += 2;
                    continue;
                }
                if (c == '"') {
                    ++i;
                    closed = true;
                    break;
                }
                s.push_back(c);
                ++i;
            }
            if (!closed) fail(line_no, col, "unterminated quoted string");
            out.push_back(Token{std::move(s), true, col});
            continue;
        }
        std::string t;
        if (line[i] == '\'') {
            t.push_back(line[i++]);
            while (i < line.size() && line[i] != '\'') t.push_back(line[i++]);
            if (i < line.size()) t.push_back(line[i++]);
        }
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            t.push_back(line[i++]);
        }
        out.push_back(Token{std::move(t), false, col});
    }
    return out;
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

// Row/column span: [sheet!]3[:5] for rows, [sheet!]B[:D] for columns.
// Encoded as a RangeRef covering the span in the relevant axis (the other
// axis is 1..1).
RangeRef parse_span(const Token& tok, bool rows, int line_no) {
    std::string_view text = tok.text;
    std::string sheet;
    // reuse the range parser by synthesizing a full A1 range
    size_t bang = std::string::npos;
    if (!text.empty() && text.front() == '\'') {
        size_t close = text.find('\'', 1);
        if (close != std::string_view::npos && close + 1 < text.size() &&
            text[close + 1] == '!') {
            sheet = std::string(text.substr(1, close - 1));
            text = text.substr(close + 2);
        }
    } else {
        bang = text.find('!');
        if (bang != std::string_view::npos) {
            sheet = std::string(text.substr(0, bang));
            text = text.substr(bang + 1);
        }
    }
    auto parse_edge = [&](std::string_view part) -> int {
        if (part.empty()) fail(line_no, tok.column, "empty span bound");
        if (rows) {
            int v = 0;
            for (char c : part) {
                if (!std::isdigit(static_cast<unsigned char>(c))) {
                    fail(line_no, tok.column, "row span must be numeric: '" + std::string(part) + "'");
                }
                v = v * 10 + (c - '0');
                if (v > 1000000) fail(line_no, tok.column, "row out of bounds");
            }
            if (v < 1) fail(line_no, tok.column, "rows are 1-based");
            return v;
        }
        auto col = column_from_letters(part);
        if (!col) fail(line_no, tok.column, "column span must be letters: '" + std::string(part) + "'");
        return *col;
    };
    size_t colon = text.find(':');
    int a, b;
    if (colon == std::string_view::npos) {
        a = b = parse_edge(text);
    } else {
        a = parse_edge(text.substr(0, colon));
        b = parse_edge(text.substr(colon + 1));
        if (a > b) std::swap(a, b);
    }
    RangeRef r;
    r.sheet = sheet;
    if (rows) {
        r.row1 = a;
        r.row2 = b;
    } else {
        r.col1 = a;
        r.col2 = b;
    }
    return r;
}

RangeRef need_range(const Token& tok, int line_no) {
    auto r = parse_range_ref(tok.text);
    if (!r) fail(line_no, tok.column, "expected a range reference, got '" + tok.text + "'");
    return *r;
}

CellRef need_cell(const Token& tok, int line_no) {
    auto c = parse_cell_ref(tok.text);
    if (!c) fail(line_no, tok.column, "expected a cell reference, got '" + tok.text + "'");
    return *c;
}

int need_int(const Token& tok, int line_no, const char* what) {
    int v = 0;
    if (tok.text.empty()) fail(line_no, tok.column, std::string("expected ") + what);
    for (char c : tok.text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            fail(line_no, tok.column, std::string("expected ") + what + ", got '" + tok.text + "'");
        }
        v = v * 10 + (c - '0');
        if (v > 1000000) fail(line_no, tok.column, std::string(what) + " out of bounds");
    }
    if (v < 1) fail(line_no, tok.column, std::string(what) + " must be >= 1");
    return v;
}

std::string need_color(const Token& tok, int line_no) {
    auto c = parse_color(tok.text);
    if (!c) fail(line_no, tok.column, "unknown color '" + tok.text + "'");
    return *c;
}

CellValue literal_from(const Token& tok) {
    if (tok.quoted) return CellValue(tok.text);
    return parse_cell_literal(tok.text);
}

// Raw remainder of the line after token index `from` (original spacing kept).
std::string rest_of_line(const std::string& line, const std::vector<Token>& toks, size_t from) {
    if (from >= toks.size()) return "";
    size_t start = static_cast<size_t>(toks[from].column - 1);
    std::string out = line.substr(start);
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t' || out.back() == '\r')) {
        out.pop_back();
    }
    return out;
}

const std::map<std::string, Verb>& verb_table() {
    static const std::map<std::string, Verb> table = [] {
        std::map<std::string, Verb> t;
        for (const auto& e : action_vocabulary()) t.emplace(std::string(e.verb), e.id);
        t.emplace("RAW", Verb::Raw);
        return t;
    }();
    return table;
}

void expect_count(const std::vector<Token>& toks, size_t n, int line_no, const char* sig) {
    if (toks.size() != n) {
        int col = toks.size() > n ? toks[n].column
                                  : (toks.empty() ? 1 : toks.back().column);
        fail(line_no, col,
             std::string("expected ") + sig + " (got " + std::to_string(toks.size() - 1) +
                 " argument(s))");
    }
}

void expect_at_least(const std::vector<Token>& toks, size_t n, int line_no, const char* sig) {
    if (toks.size() < n) {
        fail(line_no, toks.empty() ? 1 : toks.back().column, std::string("expected ") + sig);
    }
}

ActionStmt parse_statement(const std::string& line, int line_no) {
    std::vector<Token> toks = tokenize(line, line_no);
    ActionStmt stmt;
    stmt.line = line_no;
    stmt.source = line;

    const Token& head = toks[0];
    std::string kw = upper(head.text);
    auto it = verb_table().find(kw);
    if (it == verb_table().end()) {
        fail(line_no, head.column, "unknown verb '" + head.text + "'", "UnsupportedVerb");
    }
    stmt.verb = it->second;
    stmt.keyword = kw;
    StmtArgs& a = stmt.args;

    switch (stmt.verb) {
        case Verb::SetCell: {
            expect_at_least(toks, 3, line_no, "SET_CELL <cell> <literal>");
            a.cell = need_cell(toks[1], line_no);
            if (toks[2].quoted && toks.size() == 3) {
                a.literal = CellValue(toks[2].text);
            } else {
                std::string rest = rest_of_line(line, toks, 2);
                if (!rest.empty() && rest.front() == '=') {
                    a.literal = CellValue(Formula{rest, EmptyCell{}, false});
                } else if (toks[2].quoted) {
                    fail(line_no, toks[3].column, "unexpected tokens after quoted literal");
                } else {
                    a.literal = parse_cell_literal(rest);
                }
            }
            break;
        }
        case Verb::Insert:
        case Verb::Delete: {
            expect_count(toks, 3, line_no, "ROWS|COLS <span> or CELLS <range>");
            std::string mode = upper(toks[1].text);
            if (mode == "CELLS" && stmt.verb == Verb::Delete) {
                a.mode = "CELLS";
                a.range = need_range(toks[2], line_no);
            } else if (mode == "ROWS" || mode == "COLS") {
                a.mode = mode;
                a.range = parse_span(toks[2], mode == "ROWS", line_no);
            } else {
                fail(line_no, toks[1].column, "expected ROWS, COLS" +
                                                  std::string(stmt.verb == Verb::Delete
                                                                  ? " or CELLS"
                                                                  : "") +
                                                  ", got '" + toks[1].text + "'");
            }
            break;
        }
        case Verb::AutoFill:
        case Verb::Copy: {
            expect_count(toks, 4, line_no, "<src-range> TO <dst>");
            a.range = need_range(toks[1], line_no);
            if (upper(toks[2].text) != "TO") {
                fail(line_no, toks[2].column, "expected TO");
            }
            a.range2 = need_range(toks[3], line_no);
            break;
        }
        case Verb::Sort: {
            expect_count(toks, 5, line_no, "<range> BY <col#> ASC|DESC");
            a.range = need_range(toks[1], line_no);
            if (upper(toks[2].text) != "BY") fail(line_no, toks[2].column, "expected BY");
            a.index = need_int(toks[3], line_no, "key column");
            std::string dir = upper(toks[4].text);
            if (dir != "ASC" && dir != "DESC") {
                fail(line_no, toks[4].column, "expected ASC or DESC");
            }
            a.flag = dir == "ASC";
            break;
        }
        case Verb::Replace: {
            expect_count(toks, 4, line_no, "<range> <old> <new>");
            a.range = need_range(toks[1], line_no);
            a.literal = literal_from(toks[2]);
            a.literal2 = literal_from(toks[3]);
            break;
        }
        case Verb::Hyperlink: {
            expect_at_least(toks, 3, line_no, "<cell> <url> [text]");
            a.cell = need_cell(toks[1], line_no);
            a.text = toks[2].text;
            if (toks.size() > 3) a.text2 = rest_of_line(line, toks, 3);
            break;
        }
        case Verb::Dedupe: {
            expect_count(toks, 2, line_no, "<range>");
            a.range = need_range(toks[1], line_no);
            break;
        }
        case Verb::Filter: {
            expect_count(toks, 6, line_no, "<range> WHERE <col#> <op> <literal>");
            a.range = need_range(toks[1], line_no);
            if (upper(toks[2].text) != "WHERE") fail(line_no, toks[2].column, "expected WHERE");
            a.index = need_int(toks[3], line_no, "filter column");
            static const char* ops[] = {"=", "!=", "<", "<=", ">", ">=", "CONTAINS"};
            std::string op = upper(toks[4].text);
            if (std::find_if(std::begin(ops), std::end(ops),
                             [&](const char* o) { return op == o; }) == std::end(ops)) {
                fail(line_no, toks[4].column, "unknown comparison '" + toks[4].text + "'");
            }
            a.mode = op;
            a.literal = literal_from(toks[5]);
            break;
        }
        case Verb::CreateSheet:
        case Verb::DeleteSheet: {
            expect_count(toks, 2, line_no, "<name>");
            a.text = toks[1].text;
            break;
        }
        case Verb::RenameSheet: {
            expect_count(toks, 3, line_no, "<old-name> <new-name>");
            a.text = toks[1].text;
            a.text2 = toks[2].text;
            break;
        }
        case Verb::TabColor: {
            expect_count(toks, 3, line_no, "<sheet> <color>");
            a.text = toks[1].text;
            a.text2 = need_color(toks[2], line_no);
            break;
        }
        case Verb::PageSize: {
            expect_count(toks, 3, line_no, "<sheet> <size>");
            a.text = toks[1].text;
            std::string size = upper(toks[2].text);
            static const char* sizes[] = {"A4", "A3", "A5", "LETTER", "LEGAL"};
            if (std::find_if(std::begin(sizes), std::end(sizes),
                             [&](const char* s) { return size == s; }) == std::end(sizes)) {
                fail(line_no, toks[2].column, "unknown page size '" + toks[2].text + "'");
            }
            a.text2 = size == "LETTER" ? "letter" : (size == "LEGAL" ? "legal" : size);
            break;
        }
        case Verb::Orientation: {
            expect_count(toks, 3, line_no, "<sheet> PORTRAIT|LANDSCAPE");
            a.text = toks[1].text;
            std::string o = upper(toks[2].text);
            if (o != "PORTRAIT" && o != "LANDSCAPE") {
                fail(line_no, toks[2].column, "expected PORTRAIT or LANDSCAPE");
            }
            a.text2 = o == "PORTRAIT" ? "portrait" : "landscape";
            break;
        }
        case Verb::FontName: {
            expect_at_least(toks, 3, line_no, "<range> <font-name>");
            a.range = need_range(toks[1], line_no);
            a.text = toks[2].quoted ? toks[2].text : rest_of_line(line, toks, 2);
            break;
        }
        case Verb::FontColor: {
            expect_count(toks, 3, line_no, "<range> <color>");
            a.range = need_range(toks[1], line_no);
            a.text = need_color(toks[2], line_no);
            break;
        }
        case Verb::FontSize: {
            expect_count(toks, 3, line_no, "<range> <points>");
            a.range = need_range(toks[1], line_no);
            Decimal d;
            if (!Decimal::try_parse(toks[2].text, d) || d <= Decimal(0)) {
                fail(line_no, toks[2].column, "font size must be a positive number");
            }
            a.number = d;
            break;
        }
        case Verb::FontStyle: {
            expect_count(toks, 4, line_no, "<range> BOLD|ITALIC ON|OFF");
            a.range = need_range(toks[1], line_no);
            std::string which = upper(toks[2].text);
            if (which != "BOLD" && which != "ITALIC") {
                fail(line_no, toks[2].column, "expected BOLD or ITALIC");
            }
            a.mode = which;
            std::string sw = upper(toks[3].text);
            if (sw != "ON" && sw != "OFF") fail(line_no, toks[3].column, "expected ON or OFF");
            a.flag = sw == "ON";
            break;
        }
        case Verb::Underline: {
            expect_count(toks, 3, line_no, "<range> ON|OFF");
            a.range = need_range(toks[1], line_no);
            std::string sw = upper(toks[2].text);
            if (sw != "ON" && sw != "OFF") fail(line_no, toks[2].column, "expected ON or OFF");
            a.flag = sw == "ON";
            break;
        }
        case Verb::Merge: {
            expect_at_least(toks, 2, line_no, "<range> [OFF]");
            a.range = need_range(toks[1], line_no);
            a.flag = true;
            if (toks.size() == 3) {
                if (upper(toks[2].text) != "OFF") {
                    fail(line_no, toks[2].column, "expected OFF");
                }
                a.flag = false;
            } else if (toks.size() > 3) {
                fail(line_no, toks[3].column, "unexpected token");
            }
            break;
        }
        case Verb::Align: {
            expect_at_least(toks, 3, line_no, "<range> <h-align> [<v-align>]");
            if (toks.size() > 4) fail(line_no, toks[4].column, "unexpected token");
            a.range = need_range(toks[1], line_no);
            static const char* hs[] = {"LEFT", "CENTER", "RIGHT"};
            static const char* vs[] = {"TOP", "MIDDLE", "BOTTOM"};
            for (size_t i = 2; i < toks.size(); ++i) {
                std::string w = upper(toks[i].text);
                bool is_h = std::find_if(std::begin(hs), std::end(hs), [&](const char* s) {
                                return w == s;
                            }) != std::end(hs);
                bool is_v = std::find_if(std::begin(vs), std::end(vs), [&](const char* s) {
                                return w == s;
                            }) != std::end(vs);
                if (is_h) {
                    if (!a.text.empty()) fail(line_no, toks[i].column, "duplicate h-align");
                    a.text = w;
                    std::transform(a.text.begin(), a.text.end(), a.text.begin(), ::tolower);
                } else if (is_v) {
                    if (!a.text2.empty()) fail(line_no, toks[i].column, "duplicate v-align");
                    a.text2 = w;
                    std::transform(a.text2.begin(), a.text2.end(), a.text2.begin(), ::tolower);
                } else {
                    fail(line_no, toks[i].column, "unknown alignment '" + toks[i].text + "'");
                }
            }
            break;
        }
        case Verb::Resize: {
            expect_count(toks, 4, line_no, "ROWS|COLS <span> <size>");
            std::string mode = upper(toks[1].text);
            if (mode != "ROWS" && mode != "COLS") {
                fail(line_no, toks[1].column, "expected ROWS or COLS");
            }
            a.mode = mode;
            a.range = parse_span(toks[2], mode == "ROWS", line_no);
            Decimal d;
            if (!Decimal::try_parse(toks[3].text, d) || d <= Decimal(0)) {
                fail(line_no, toks[3].column, "size must be a positive number");
            }
            a.number = d;
            break;
        }
        case Verb::Highlight: {
            expect_count(toks, 4, line_no, "<range> FILL <color>");
            a.range = need_range(toks[1], line_no);
            if (upper(toks[2].text) != "FILL") fail(line_no, toks[2].column, "expected FILL");
            a.text = need_color(toks[3], line_no);
            break;
        }
        case Verb::NumberFormat: {
            expect_count(toks, 3, line_no, "<range> <format-code>");
            a.range = need_range(toks[1], line_no);
            a.text = toks[2].text;
            break;
        }
        case Verb::ChartType:
        case Verb::ChartData:
        case Verb::ChartTitle:
        case Verb::ChartLegend:
        case Verb::ChartPosition:
        case Verb::ChartAxis:
        case Verb::DataLabels:
        case Verb::Trendline: {
            expect_at_least(toks, 4, line_no, "<sheet> <chart#> ...");
            a.text = toks[1].text;
            a.index = need_int(toks[2], line_no, "chart number");
            switch (stmt.verb) {
                case Verb::ChartType: {
                    expect_count(toks, 4, line_no, "<sheet> <chart#> <type>");
                    std::string t = upper(toks[3].text);
                    std::transform(t.begin(), t.end(), t.begin(), ::tolower);
                    if (!chart_type_from(t)) {
                        fail(line_no, toks[3].column, "unknown chart type '" + toks[3].text + "'");
                    }
                    a.mode = t;
                    break;
                }
                case Verb::ChartData:
                    expect_count(toks, 4, line_no, "<sheet> <chart#> <range>");
                    a.range = need_range(toks[3], line_no);
                    break;
                case Verb::ChartTitle:
                    a.text2 = toks[3].quoted && toks.size() == 4 ? toks[3].text
                                                                 : rest_of_line(line, toks, 3);
                    break;
                case Verb::ChartLegend: {
                    expect_count(toks, 4, line_no, "<sheet> <chart#> <position>");
                    std::string p = upper(toks[3].text);
                    static const char* ps[] = {"NONE", "LEFT", "RIGHT", "TOP", "BOTTOM"};
                    if (std::find_if(std::begin(ps), std::end(ps), [&](const char* s) {
                            return p == s;
                        }) == std::end(ps)) {
                        fail(line_no, toks[3].column, "unknown legend position");
                    }
                    a.mode = p;
                    std::transform(a.mode.begin(), a.mode.end(), a.mode.begin(), ::tolower);
                    break;
                }
                case Verb::ChartPosition:
                    expect_count(toks, 4, line_no, "<sheet> <chart#> <anchor-cell>");
                    a.cell = need_cell(toks[3], line_no);
                    break;
                case Verb::ChartAxis: {
                    expect_at_least(toks, 5, line_no, "<sheet> <chart#> X|Y <title>");
                    std::string ax = upper(toks[3].text);
                    if (ax != "X" && ax != "Y") fail(line_no, toks[3].column, "expected X or Y");
                    a.mode = ax;
                    a.text2 = toks[4].quoted && toks.size() == 5 ? toks[4].text
                                                                 : rest_of_line(line, toks, 4);
                    break;
                }
                case Verb::DataLabels: {
                    expect_count(toks, 4, line_no, "<sheet> <chart#> ON|OFF");
                    std::string sw = upper(toks[3].text);
                    if (sw != "ON" && sw != "OFF") {
                        fail(line_no, toks[3].column, "expected ON or OFF");
                    }
                    a.flag = sw == "ON";
                    break;
                }
                case Verb::Trendline: {
                    expect_count(toks, 4, line_no, "<sheet> <chart#> LINEAR|NONE");
                    std::string t = upper(toks[3].text);
                    if (t != "LINEAR" && t != "NONE") {
                        fail(line_no, toks[3].column, "expected LINEAR or NONE");
                    }
                    a.mode = t == "LINEAR" ? "linear" : "none";
                    break;
                }
                default: break;
            }
            break;
        }
        case Verb::Pivot: {
            // PIVOT <sheet> SOURCE <range> ROWS <col> [COLS <col>] VALUES <col> [FUNC <fn>]
            expect_at_least(toks, 7, line_no, "<sheet> SOURCE <range> ROWS <col> VALUES <col>");
            a.text = toks[1].text;
            size_t i = 2;
            auto want_kw = [&](const char* kw) {
                if (i >= toks.size() || upper(toks[i].text) != kw) {
                    fail(line_no, i < toks.size() ? toks[i].column : toks.back().column,
                         std::string("expected ") + kw);
                }
                ++i;
            };
            want_kw("SOURCE");
            if (i >= toks.size()) fail(line_no, toks.back().column, "expected range");
            a.range = need_range(toks[i++], line_no);
            want_kw("ROWS");
            if (i >= toks.size()) fail(line_no, toks.back().column, "expected column letters");
            auto rows_col = column_from_letters(toks[i].text);
            if (!rows_col) fail(line_no, toks[i].column, "expected column letters");
            a.index = *rows_col;
            ++i;
            if (i < toks.size() && upper(toks[i].text) == "COLS") {
                ++i;
                if (i >= toks.size()) fail(line_no, toks.back().column, "expected column letters");
                auto cols_col = column_from_letters(toks[i].text);
                if (!cols_col) fail(line_no, toks[i].column, "expected column letters");
                a.number = Decimal(*cols_col);  // reuse as optional column holder
                ++i;
            }
            want_kw("VALUES");
            if (i >= toks.size()) fail(line_no, toks.back().column, "expected column letters");
            auto values_col = column_from_letters(toks[i].text);
            if (!values_col) fail(line_no, toks[i].column, "expected column letters");
            a.text2 = column_letters(*values_col);
            ++i;
            a.mode = "sum";
            if (i < toks.size()) {
                want_kw("FUNC");
                if (i >= toks.size()) fail(line_no, toks.back().column, "expected function name");
                std::string fn = upper(toks[i].text);
                static const char* fns[] = {"SUM", "COUNT", "AVG", "MIN", "MAX"};
                if (std::find_if(std::begin(fns), std::end(fns), [&](const char* f) {
                        return fn == f;
                    }) == std::end(fns)) {
                    fail(line_no, toks[i].column, "unknown summary function '" + toks[i].text + "'");
                }
                a.mode = fn;
                std::transform(a.mode.begin(), a.mode.end(), a.mode.begin(), ::tolower);
                ++i;
                if (i != toks.size()) fail(line_no, toks[i].column, "unexpected token");
            }
            break;
        }
        case Verb::PivotFunction: {
            expect_count(toks, 4, line_no, "<sheet> <pivot#> <function>");
            a.text = toks[1].text;
            a.index = need_int(toks[2], line_no, "pivot number");
            std::string fn = upper(toks[3].text);
            static const char* fns[] = {"SUM", "COUNT", "AVG", "MIN", "MAX"};
            if (std::find_if(std::begin(fns), std::end(fns), [&](const char* f) {
                    return fn == f;
                }) == std::end(fns)) {
                fail(line_no, toks[3].column, "unknown summary function '" + toks[3].text + "'");
            }
            a.mode = fn;
            std::transform(a.mode.begin(), a.mode.end(), a.mode.begin(), ::tolower);
            break;
        }
        case Verb::Raw: {
            expect_at_least(toks, 3, line_no, "RAW <lang> <payload>");
            a.text = toks[1].text;
            a.text2 = rest_of_line(line, toks, 2);
            break;
        }
    }
    return stmt;
}

}  // namespace

ParseOutcome parse_action(std::string_view source) {
    ActionProgram prog;
    prog.source = std::string(source);

    try {
        int line_no = 0;
        size_t start = 0;
        bool done_seen = false;
        int done_line = 0;
        while (start <= source.size()) {
            size_t nl = source.find('\n', start);
            std::string line(source.substr(
                start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
            ++line_no;
            start = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
            if (!line.empty() && line.back() == '\r') line.pop_back();

            std::vector<Token> toks = tokenize(line, line_no);
            if (toks.empty()) continue;
            if (done_seen) {
                (void)done_line;
                fail(line_no, toks[0].column, "no statements allowed after DONE");
            }
            if (upper(toks[0].text) == "DONE") {
                if (toks.size() > 1) fail(line_no, toks[1].column, "DONE takes no arguments");
                done_seen = true;
                done_line = line_no;
                continue;
            }
            prog.statements.push_back(parse_statement(line, line_no));
        }
        prog.declared_done = done_seen;
        if (prog.statements.empty() && !prog.declared_done) {
            fail(1, 1, "empty program (no statements and no DONE)");
        }
    } catch (const ParseFail& f) {
        return ParseOutcome{std::nullopt, f.err};
    }
    return ParseOutcome{std::move(prog), std::nullopt};
}

}  // namespace sheetloop::actions
