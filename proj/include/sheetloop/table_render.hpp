#pragma once

#include "sheetloop/cellvalue.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheetloop::serde {

enum class TableRepr { JsonRecords, DFLoader, Markdown, Html };

const char* to_string(TableRepr r);
std::optional<TableRepr> table_repr_from(std::string_view name);

struct TableParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rectangular grid: headers plus typed data rows (each row padded to the
/// header count).
struct TableGrid {
    std::vector<std::string> headers;
    std::vector<std::vector<Scalar>> rows;

    bool operator==(const TableGrid& rhs) const;
};

struct RenderBudget {
    enum class Policy { Head, HeadTail };

    std::size_t max_chars = 1u << 20;
    std::string truncation_marker = "...";
    Policy policy = Policy::Head;

    static RenderBudget unlimited() { return RenderBudget{}; }
};

/// Renders the grid in the chosen representation, truncating whole rows to
/// honor the budget. Truncated output keeps a parseable prefix (for the
/// parseable formats), then a marker line with the total row count; the
/// head_tail policy appends trailing raw row lines after the marker.
std::string render_table(const TableGrid& grid, TableRepr repr, const RenderBudget& budget);

/// Inverse of render for the parseable representations (json_records,
/// dfloader) on untruncated output. ISO-shaped strings parse back as
/// date/datetime values; every other string stays text.
TableGrid parse_table(const std::string& text, TableRepr repr);

}  // namespace sheetloop::serde
