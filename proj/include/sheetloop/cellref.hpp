#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sheetloop {

/// 1-based cell coordinate, optionally qualified with a sheet name.
struct CellRef {
    std::string sheet;  // empty = unqualified
    int row = 1;
    int col = 1;

    bool operator==(const CellRef&) const = default;

    std::string to_string() const;  // Sheet!A1 or A1
};

/// Inclusive rectangle, normalized so top-left <= bottom-right.
struct RangeRef {
    std::string sheet;
    int row1 = 1, col1 = 1;
    int row2 = 1, col2 = 1;

    bool operator==(const RangeRef&) const = default;

    int height() const { return row2 - row1 + 1; }
    int width() const { return col2 - col1 + 1; }
    bool contains(int row, int col) const {
        return row >= row1 && row <= row2 && col >= col1 && col <= col2;
    }
    bool intersects(const RangeRef& o) const {
        return row1 <= o.row2 && o.row1 <= row2 && col1 <= o.col2 && o.col1 <= col2;
    }

    static RangeRef cell(const CellRef& c) {
        return RangeRef{c.sheet, c.row, c.col, c.row, c.col};
    }

    std::string to_string() const;  // Sheet!A1:B2 (A1 alone when 1x1)
};

/// "A" -> 1, "AA" -> 27. Empty optional on invalid input.
std::optional<int> column_from_letters(std::string_view letters);
std::string column_letters(int col);

/// Parses [sheet!]A1. Sheet may be bare (no spaces) or single-quoted.
std::optional<CellRef> parse_cell_ref(std::string_view text);
/// Parses [sheet!]A1[:B2]; a single cell yields a 1x1 range.
std::optional<RangeRef> parse_range_ref(std::string_view text);

}  // namespace sheetloop
