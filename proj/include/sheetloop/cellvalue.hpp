#pragma once

#include "sheetloop/datetime.hpp"
#include "sheetloop/decimal.hpp"

#include <string>
#include <variant>

namespace sheetloop {

struct EmptyCell {
    bool operator==(const EmptyCell&) const = default;
};

/// A non-formula cell value.
using Scalar = std::variant<EmptyCell, Decimal, std::string, bool, Date, DateTime>;

/// Formula source plus its cached evaluation result. The cache is always a
/// scalar; `evaluated` is false when the function was outside the supported
/// whitelist (cache stays empty in that case).
struct Formula {
    std::string source;  // includes leading '='
    Scalar cached = EmptyCell{};
    bool evaluated = false;

    bool operator==(const Formula&) const = default;
};

enum class ValueKind { Empty, Number, Text, Bool, Date, DateTime, Formula };

class CellValue {
public:
    CellValue() : v_(EmptyCell{}) {}
    CellValue(Decimal d) : v_(std::move(d)) {}
    CellValue(std::string s) : v_(std::move(s)) {}
    CellValue(const char* s) : v_(std::string(s)) {}
    CellValue(bool b) : v_(b) {}
    CellValue(Date d) : v_(d) {}
    CellValue(DateTime dt) : v_(dt) {}
    CellValue(Formula f) : v_(std::move(f)) {}
    CellValue(Scalar s);

    ValueKind kind() const;
    /// Kind used for dtype inference and comparisons: formulas report the
    /// kind of their cached value.
    ValueKind value_kind() const;

    bool is_empty() const { return kind() == ValueKind::Empty; }

    /// The scalar behind this value (formula -> cached result).
    Scalar scalar() const;

    const Decimal* as_number() const;
    const std::string* as_text() const;
    const bool* as_bool() const;
    const Date* as_date() const;
    const DateTime* as_datetime() const;
    const Formula* as_formula() const;

    /// Human-readable form: canonical decimals, ISO dates, true/false,
    /// formulas show their cached value.
    std::string display() const;

    bool operator==(const CellValue& rhs) const { return v_ == rhs.v_; }

private:
    std::variant<EmptyCell, Decimal, std::string, bool, Date, DateTime, Formula> v_;
};

/// Interprets bare text the way cell writes do: bool literals, decimal
/// numbers, ISO/US dates, ISO datetimes; anything else stays text.
CellValue parse_cell_literal(std::string_view text);

/// Scalar ordering used by Sort and the SQL engine. Values of the same kind
/// compare naturally; Empty sorts after everything; distinct kinds order by
/// a fixed rank (number < text < bool < date < datetime).
/// Returns -1/0/1.
int compare_scalars(const Scalar& a, const Scalar& b);

std::string scalar_display(const Scalar& s);
ValueKind scalar_kind(const Scalar& s);

enum class ColumnDType { Number, Text, Bool, Date, Mixed, Empty };

const char* to_string(ColumnDType t);
const char* to_string(ValueKind k);

}  // namespace sheetloop
