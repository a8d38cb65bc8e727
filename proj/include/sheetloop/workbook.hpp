#pragma once

#include "sheetloop/cellref.hpp"
#include "sheetloop/cellvalue.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheetloop {

struct WorkbookError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownSheetError : WorkbookError {
    explicit UnknownSheetError(const std::string& name)
        : WorkbookError("no sheet named '" + name + "'") {}
};
struct StaleSnapshotError : WorkbookError {
    StaleSnapshotError() : WorkbookError("snapshot was pruned") {}
};

/// Per-cell style attributes; unset fields inherit nothing (plain default).
struct CellStyle {
    std::optional<std::string> font_name;
    std::optional<Decimal> font_size;
    std::optional<std::string> font_color;  // "#RRGGBB"
    std::optional<bool> bold;
    std::optional<bool> italic;
    std::optional<bool> underline;
    std::optional<std::string> fill_color;  // "#RRGGBB"
    std::optional<std::string> halign;      // left|center|right
    std::optional<std::string> valign;      // top|middle|bottom

    bool empty() const;
    bool operator==(const CellStyle&) const = default;
};

enum class ChartType { Bar, Line, Pie, Scatter };

const char* to_string(ChartType t);
std::optional<ChartType> chart_type_from(std::string_view s);

struct ChartSpec {
    ChartType type = ChartType::Bar;
    std::optional<RangeRef> data_range;  // must lie inside the used region
    std::optional<std::string> title;
    std::optional<std::string> legend;  // none|left|right|top|bottom
    CellRef anchor{"", 1, 1};
    std::optional<std::string> x_axis_title;
    std::optional<std::string> y_axis_title;
    bool data_labels = false;
    std::optional<std::string> trendline;  // "linear"

    bool operator==(const ChartSpec&) const = default;
};

/// Declarative pivot description; no computation happens here.
struct PivotSpec {
    RangeRef source;
    int rows_col = 1;  // absolute sheet column
    std::optional<int> cols_col;
    int values_col = 1;
    std::string func = "sum";  // sum|count|avg|min|max

    bool operator==(const PivotSpec&) const = default;
};

struct PageSetup {
    std::string orientation = "portrait";  // portrait|landscape
    std::string size = "A4";               // A4|A3|A5|letter|legal

    bool operator==(const PageSetup&) const = default;
};

using CellCoord = std::pair<int, int>;  // (row, col), 1-based; map order is row-major

class Sheet {
public:
    explicit Sheet(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    const CellValue& cell(int row, int col) const;
    void set_cell(int row, int col, CellValue v);  // Empty erases
    bool has_cell(int row, int col) const;

    const std::map<CellCoord, CellValue>& grid() const { return grid_; }
    const std::map<CellCoord, std::string>& formats() const { return formats_; }
    const std::map<CellCoord, CellStyle>& styles() const { return styles_; }
    const std::map<CellCoord, std::string>& hyperlinks() const { return hyperlinks_; }

    std::string format(int row, int col) const;
    void set_format(int row, int col, std::string fmt);

    CellStyle style(int row, int col) const;
    CellStyle& style_ref(int row, int col);  // creates on demand
    void set_style(int row, int col, CellStyle s);

    std::string hyperlink(int row, int col) const;
    void set_hyperlink(int row, int col, std::string url);

    const std::vector<RangeRef>& merges() const { return merges_; }
    /// Adds a merge span; returns false when it overlaps an existing span.
    bool add_merge(const RangeRef& r);
    /// Removes every span intersecting `r`; returns count removed.
    int remove_merges_intersecting(const RangeRef& r);

    const std::map<int, Decimal>& row_heights() const { return row_heights_; }
    const std::map<int, Decimal>& col_widths() const { return col_widths_; }
    void set_row_height(int row, Decimal h) { row_heights_[row] = h; }
    void set_col_width(int col, Decimal w) { col_widths_[col] = w; }

    std::vector<ChartSpec>& charts() { return charts_; }
    const std::vector<ChartSpec>& charts() const { return charts_; }
    std::vector<PivotSpec>& pivots() { return pivots_; }
    const std::vector<PivotSpec>& pivots() const { return pivots_; }

    const std::optional<std::string>& tab_color() const { return tab_color_; }
    void set_tab_color(std::optional<std::string> c) { tab_color_ = std::move(c); }

    PageSetup& page() { return page_; }
    const PageSetup& page() const { return page_; }

    /// Highest occupied row/col counting values only (merges and styles
    /// do not extend the used region).
    int used_rows() const;
    int used_cols() const;

    /// Structural row/column edits; shift values, styles, formats,
    /// hyperlinks, merges and explicit dimensions. Chart and pivot ranges
    /// are left untouched.
    void insert_rows(int at, int count);
    void delete_rows(int at, int count);
    void insert_cols(int at, int count);
    void delete_cols(int at, int count);

    /// Clears values, styles, formats and hyperlinks inside `r` (no shift).
    void clear_range(const RangeRef& r);

    bool operator==(const Sheet&) const = default;

private:
    std::string name_;
    std::map<CellCoord, CellValue> grid_;
    std::map<CellCoord, std::string> formats_;
    std::map<CellCoord, CellStyle> styles_;
    std::map<CellCoord, std::string> hyperlinks_;
    std::vector<RangeRef> merges_;
    std::map<int, Decimal> row_heights_;
    std::map<int, Decimal> col_widths_;
    std::vector<ChartSpec> charts_;
    std::vector<PivotSpec> pivots_;
    std::optional<std::string> tab_color_;
    PageSetup page_;
};

/// Compact per-sheet observation fed to the Planner.
struct SheetState {
    std::string sheet_name;
    int n_rows = 0;  // includes the header row
    int n_cols = 0;
    std::vector<std::string> headers;
    std::vector<ColumnDType> col_dtypes;

    bool operator==(const SheetState&) const = default;

    /// One-line rendering used in prompts.
    std::string summary() const;
};

struct Snapshot {
    std::uint64_t id = 0;
};

class Workbook {
public:
    Workbook() = default;

    const std::string& description() const { return description_; }
    void set_description(std::string d) { description_ = std::move(d); }

    const std::optional<std::string>& source_path() const { return source_path_; }
    void set_source_path(std::string p) { source_path_ = std::move(p); }

    const std::vector<Sheet>& sheets() const { return sheets_; }
    std::vector<Sheet>& sheets() { return sheets_; }

    Sheet& add_sheet(const std::string& name);  // throws WorkbookError on duplicate/empty
    void remove_sheet(const std::string& name);
    void rename_sheet(const std::string& old_name, const std::string& new_name);

    Sheet* find_sheet(const std::string& name);
    const Sheet* find_sheet(const std::string& name) const;
    Sheet& sheet(const std::string& name);              // throws UnknownSheetError
    const Sheet& sheet(const std::string& name) const;  // throws UnknownSheetError
    int sheet_index(const std::string& name) const;     // -1 when missing

    Snapshot take_snapshot() const;
    void restore_snapshot(const Snapshot& snap);  // throws StaleSnapshotError
    /// Drops one snapshot (it becomes stale).
    void release_snapshot(const Snapshot& snap);
    void prune_snapshots();

    bool operator==(const Workbook& rhs) const {
        return description_ == rhs.description_ && sheets_ == rhs.sheets_;
    }

private:
    std::string description_;
    std::vector<Sheet> sheets_;
    std::optional<std::string> source_path_;

    struct Captured {
        std::string description;
        std::vector<Sheet> sheets;
    };
    mutable std::map<std::uint64_t, Captured> snapshots_;
    mutable std::uint64_t next_snapshot_id_ = 1;
};

SheetState extract_sheet_state(const Workbook& wb, const std::string& sheet_name);
std::vector<SheetState> extract_all_states(const Workbook& wb);

}  // namespace sheetloop
