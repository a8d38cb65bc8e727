#pragma once

#include "sheetloop/cellvalue.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sheetloop::sql {

struct SqlError : std::runtime_error {
    enum class Kind { Parse, Runtime };
    Kind kind;
    SqlError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

/// Named in-memory table with typed cells.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Scalar>> rows;

    /// Case-insensitive lookup; -1 when absent.
    int find_column(std::string_view name) const;
};

struct ColumnRef {
    std::string name;
};

using Operand = std::variant<ColumnRef, Scalar>;

struct Expr {
    enum class Kind { And, Or, Not, Cmp, Like, In, Between };
    Kind kind = Kind::Cmp;
    std::unique_ptr<Expr> a, b;  // And/Or children; Not uses a

    Operand lhs;
    std::string op;  // = != <> < <= > >=
    Operand rhs;
    std::string pattern;        // Like
    std::vector<Scalar> list;   // In
    Scalar lo, hi;              // Between
    bool negated = false;       // NOT LIKE / NOT IN / NOT BETWEEN
};

struct SelectItem {
    enum class Agg { None, Count, Sum, Avg, Min, Max };
    Agg agg = Agg::None;
    bool count_star = false;
    std::string column;  // empty for COUNT(*)
    std::string label;   // output column name
};

struct OrderKey {
    std::string column;
    bool asc = true;
};

/// One query in the supported subset:
///   SELECT [DISTINCT] */items FROM table [WHERE ...] [GROUP BY cols]
///   [ORDER BY keys] [LIMIT n]
struct Query {
    std::string source_text;
    bool distinct = false;
    bool select_star = false;
    std::vector<SelectItem> items;
    std::string table;
    std::unique_ptr<Expr> where;
    std::vector<std::string> group_by;
    std::vector<OrderKey> order_by;
    std::optional<long> limit;
};

/// Parses under the documented grammar; anything outside the subset fails
/// here, never mid-execution.
Query parse_sql(std::string_view text);

/// Runs a parsed query; comparison semantics (case-sensitive '=',
/// case-insensitive LIKE, chronological date comparison) are documented in
/// docs/sql-subset.md. Throws SqlError{Runtime} on e.g. number/text
/// comparisons.
Table execute_sql(const Query& q, const Table& table);

}  // namespace sheetloop::sql
