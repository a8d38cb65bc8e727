#pragma once

#include "sheetloop/workbook.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace sheetloop {

struct FormulaError : std::runtime_error {
    enum class Kind { Syntax, BadRef, Type, Runtime };
    Kind kind;
    FormulaError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct FormulaOutcome {
    Scalar value = EmptyCell{};
    /// False when the formula uses a function outside the whitelist; the
    /// cell then stores the source text with an empty cache.
    bool evaluated = false;
};

/// Evaluates `source` ("=SUM(A2:A10)") against the workbook, resolving
/// unqualified references in `host_sheet`. Referenced formula cells
/// contribute their cached values; there is no dependency recalculation.
///
/// Whitelist: SUM, AVERAGE, COUNT, MAX, MIN, IF, arithmetic (+ - * /),
/// comparisons, parentheses, cell and range references. An unknown
/// function name yields evaluated=false; malformed syntax, bad references
/// and type errors throw FormulaError.
FormulaOutcome evaluate_formula(const Workbook& wb, const std::string& host_sheet,
                                std::string_view source);

}  // namespace sheetloop
