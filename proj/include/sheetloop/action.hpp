#pragma once

#include "sheetloop/cellref.hpp"
#include "sheetloop/cellvalue.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sheetloop::actions {

/// The 36 manipulation verbs (five categories), plus the RAW escape hatch
/// which is not part of the vocabulary.
enum class Verb {
    // Value Processing
    SetCell, Insert, Delete, AutoFill, Sort, Copy, Replace, Hyperlink, Dedupe, Filter,
    // Worksheet Management
    CreateSheet, DeleteSheet, RenameSheet, TabColor, PageSize, Orientation,
    // Format Adjustment
    FontName, FontColor, FontSize, FontStyle, Underline, Merge, Align, Resize, Highlight,
    NumberFormat,
    // Chart Design
    ChartType, ChartData, ChartTitle, ChartLegend, ChartPosition, ChartAxis, DataLabels,
    Trendline,
    // Content Summary
    Pivot, PivotFunction,
    // escape hatch
    Raw,
};

enum class OpCategory {
    ValueProcessing,
    WorksheetManagement,
    FormatAdjustment,
    ChartDesign,
    ContentSummary,
};

const char* to_string(OpCategory c);

struct VocabEntry {
    Verb id;
    std::string_view verb;       // keyword as written in programs
    std::string_view signature;  // argument shape, for docs and prompts
    OpCategory category;
};

/// Exactly the 36 operations; RAW and DONE are excluded.
const std::vector<VocabEntry>& action_vocabulary();

/// Parsed arguments; which fields are set depends on the verb.
struct StmtArgs {
    std::optional<CellRef> cell;
    std::optional<RangeRef> range;
    std::optional<RangeRef> range2;
    CellValue literal;
    CellValue literal2;
    std::string text;
    std::string text2;
    std::optional<Decimal> number;
    int index = 0;  // chart/pivot ordinal, key column
    std::string mode;
    bool flag = false;
};

struct ActionStmt {
    Verb verb = Verb::SetCell;
    std::string keyword;
    StmtArgs args;
    int line = 0;        // 1-based line in the program source
    std::string source;  // the statement's source line
};

struct ActionProgram {
    std::string source;
    std::vector<ActionStmt> statements;
    bool declared_done = false;
};

/// Observation-compatible parse diagnostic.
struct ActionParseError {
    std::string error_kind;  // "ParseError" or "UnsupportedVerb"
    int line = 0;
    int column = 0;
    std::string message;

    std::string render() const;
};

struct ParseOutcome {
    std::optional<ActionProgram> program;
    std::optional<ActionParseError> error;

    bool ok() const { return program.has_value(); }
};

/// Parses a full program: one statement per line, '#' comments, optional
/// final DONE line. An empty program is only valid when DONE is present.
ParseOutcome parse_action(std::string_view source);

}  // namespace sheetloop::actions
