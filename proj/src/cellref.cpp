#include "sheetloop/cellref.hpp"

#include <algorithm>
#include <cctype>

namespace sheetloop {

namespace {

constexpr int kMaxRow = 1000000;
constexpr int kMaxCol = 16384;

// Splits "sheet!rest" respecting single-quoted sheet names ('' escapes a quote).
bool split_sheet(std::string_view text, std::string& sheet, std::string_view& rest) {
    sheet.clear();
    if (!text.empty() && text.front() == '\'') {
        size_t i = 1;
        std::string name;
        while (i < text.size()) {
            if (text[i] == '\'') {
                if (i + 1 < text.size() && text[i + 1] == '\'') {
                    name.push_back('\'');
                    i += 2;
                    continue;
                }
                break;
            }
            name.push_back(text[i]);
            ++i;
        }
        if (i >= text.size() || i + 1 >= text.size() || text[i + 1] != '!') return false;
        sheet = name;
        rest = text.substr(i + 2);
        return true;
    }
    size_t bang = text.find('!');
    if (bang == std::string_view::npos) {
        rest = text;
        return true;
    }
    sheet = std::string(text.substr(0, bang));
    rest = text.substr(bang + 1);
    return !sheet.empty();
}

// Parses A1 coordinates from `text` (whole string must be consumed).
bool parse_a1(std::string_view text, int& row, int& col) {
    size_t i = 0;
    int c = 0;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) {
        c = c * 26 + (std::toupper(static_cast<unsigned char>(text[i])) - 'A' + 1);
        if (c > kMaxCol) return false;
        ++i;
    }
    if (i == 0 || i == text.size()) return false;
    long r = 0;
    size_t digits = 0;
    for (; i < text.size(); ++i, ++digits) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
        r = r * 10 + (text[i] - '0');
        if (r > kMaxRow) return false;
    }
    if (digits == 0 || r < 1 || c < 1) return false;
    row = static_cast<int>(r);
    col = c;
    return true;
}

}  // namespace

std::optional<int> column_from_letters(std::string_view letters) {
    if (letters.empty()) return std::nullopt;
    int c = 0;
    for (char ch : letters) {
        if (!std::isalpha(static_cast<unsigned char>(ch))) return std::nullopt;
        c = c * 26 + (std::toupper(static_cast<unsigned char>(ch)) - 'A' + 1);
        if (c > kMaxCol) return std::nullopt;
    }
    return c;
}

std::string column_letters(int col) {
    std::string out;
    while (col > 0) {
        int rem = (col - 1) % 26;
        out.push_back(static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string CellRef::to_string() const {
    std::string out;
    if (!sheet.empty()) {
        bool quoted = sheet.find_first_of(" !':") != std::string::npos;
        if (quoted) {
            out.push_back('\'');
            for (char c : sheet) {
                out.push_back(c);
                if (c == '\'') out.push_back('\'');
            }
            out.push_back('\'');
        } else {
            out += sheet;
        }
        out.push_back('!');
    }
    out += column_letters(col);
    out += std::to_string(row);
    return out;
}

std::string RangeRef::to_string() const {
    CellRef tl{sheet, row1, col1};
    std::string out = tl.to_string();
    if (row1 != row2 || col1 != col2) {
        out.push_back(':');
        out += column_letters(col2);
        out += std::to_string(row2);
    }
    return out;
}

std::optional<CellRef> parse_cell_ref(std::string_view text) {
    std::string sheet;
    std::string_view rest;
    if (!split_sheet(text, sheet, rest)) return std::nullopt;
    int row = 0, col = 0;
    if (!parse_a1(rest, row, col)) return std::nullopt;
    return CellRef{std::move(sheet), row, col};
}

std::optional<RangeRef> parse_range_ref(std::string_view text) {
    std::string sheet;
    std::string_view rest;
    if (!split_sheet(text, sheet, rest)) return std::nullopt;
    size_t colon = rest.find(':');
    int r1 = 0, c1 = 0, r2 = 0, c2 = 0;
    if (colon == std::string_view::npos) {
        if (!parse_a1(rest, r1, c1)) return std::nullopt;
        r2 = r1;
        c2 = c1;
    } else {
        if (!parse_a1(rest.substr(0, colon), r1, c1)) return std::nullopt;
        if (!parse_a1(rest.substr(colon + 1), r2, c2)) return std::nullopt;
    }
    RangeRef r{std::move(sheet), std::min(r1, r2), std::min(c1, c2), std::max(r1, r2),
               std::max(c1, c2)};
    return r;
}

}  // namespace sheetloop
