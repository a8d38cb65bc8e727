#pragma once

#include "sheetloop/workbook.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sheetloop::evalkit {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CriterionKind {
    CellValues,
    FormulaText,
    StyleAttrs,
    NumberFormat,
    SheetExists,
    SheetName,
    SheetTabColor,
    PageSetup,
    RowColDims,
    MergeState,
    ChartAttrs,
    PivotAttrs,
    SortedBy,
    DistinctRows,
    HyperlinkTarget,
};

const char* to_string(CriterionKind k);
std::optional<CriterionKind> criterion_from(std::string_view name);

/// Comparison region: an A1 range, a named object ("chart 1" / "pivot 2"),
/// or the sheet itself ("sheet") for sheet-level criteria.
struct Area {
    enum class Kind { Range, Chart, Pivot, SheetProperty };
    Kind kind = Kind::Range;
    RangeRef range;
    int ordinal = 0;

    static Area parse(const std::string& text);  // throws SchemaError
    std::string to_string() const;
};

/// One subtask verification rule: (Criterion, Sheet Index, Area, Properties).
struct ChecklistItem {
    CriterionKind criterion = CriterionKind::CellValues;
    int sheet_index = 1;  // 1-based ordinal in the workbook
    Area area;
    nlohmann::ordered_json properties;
    std::string category;  // optional manipulation category tag
};

struct TaskSpec {
    std::string id;
    std::string workbook_ref;
    std::string description;
    std::string instruction;
    std::vector<ChecklistItem> checklist;
    std::vector<std::string> categories;
    std::vector<std::string> reasoning_challenges;

    /// short (2-4), medium (5-7), long (8-10); derived from checklist size.
    std::string horizon_level() const;

    static TaskSpec parse(const nlohmann::ordered_json& doc);  // throws SchemaError
    static TaskSpec load(const std::string& path);
};

extern const std::vector<std::string> kManipulationCategories;  // the 5
extern const std::vector<std::string> kReasoningChallenges;     // the 4

std::string horizon_for(size_t subtasks);  // throws SchemaError outside 2..10

struct Verdict {
    int item_index = 0;  // 0-based
    bool pass = false;
    std::string detail;
};

/// Read-only, model-free evaluation: one verdict per item; unresolvable
/// areas fail that item with a detail instead of aborting. Numeric
/// comparisons use the item tolerance (default 1e-9 absolute), text is
/// exact after trailing-space strip.
std::vector<Verdict> evaluate_checklist(const Workbook& result, const TaskSpec& task);

}  // namespace sheetloop::evalkit
