#include "sheetloop/cellvalue.hpp"

#include <algorithm>

namespace sheetloop {

CellValue::CellValue(Scalar s) {
    std::visit([this](auto&& x) { v_ = std::move(x); }, std::move(s));
}

ValueKind CellValue::kind() const {
    return static_cast<ValueKind>(v_.index());
}

ValueKind CellValue::value_kind() const {
    if (const auto* f = std::get_if<Formula>(&v_)) {
        return scalar_kind(f->cached);
    }
    return kind();
}

Scalar CellValue::scalar() const {
    if (const auto* f = std::get_if<Formula>(&v_)) return f->cached;
    Scalar out;
    std::visit(
        [&out](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (!std::is_same_v<T, Formula>) out = x;
        },
        v_);
    return out;
}

const Decimal* CellValue::as_number() const { return std::get_if<Decimal>(&v_); }
const std::string* CellValue::as_text() const { return std::get_if<std::string>(&v_); }
const bool* CellValue::as_bool() const { return std::get_if<bool>(&v_); }
const Date* CellValue::as_date() const { return std::get_if<Date>(&v_); }
const DateTime* CellValue::as_datetime() const { return std::get_if<DateTime>(&v_); }
const Formula* CellValue::as_formula() const { return std::get_if<Formula>(&v_); }

std::string CellValue::display() const { return scalar_display(scalar()); }

std::string scalar_display(const Scalar& s) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, EmptyCell>) {
                return "";
            } else if constexpr (std::is_same_v<T, Decimal>) {
                return x.to_string();
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else {
                return x.to_string();
            }
        },
        s);
}

ValueKind scalar_kind(const Scalar& s) {
    return static_cast<ValueKind>(s.index());
}

CellValue parse_cell_literal(std::string_view text) {
    if (text.empty()) return CellValue{};
    if (text == "true" || text == "TRUE" || text == "True") return CellValue(true);
    if (text == "false" || text == "FALSE" || text == "False") return CellValue(false);
    Decimal d;
    if (Decimal::try_parse(text, d)) return CellValue(d);
    if (auto date = Date::parse(text)) return CellValue(*date);
    if (auto dt = DateTime::parse(text)) return CellValue(*dt);
    return CellValue(std::string(text));
}

namespace {

// Rank for cross-kind ordering; Empty handled separately (always last).
int kind_rank(ValueKind k) {
    switch (k) {
        case ValueKind::Number: return 0;
        case ValueKind::Text: return 1;
        case ValueKind::Bool: return 2;
        case ValueKind::Date: return 3;
        case ValueKind::DateTime: return 4;
        default: return 5;
    }
}

template <typename T>
int cmp3(const T& a, const T& b) {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

}  // namespace

int compare_scalars(const Scalar& a, const Scalar& b) {
    ValueKind ka = scalar_kind(a);
    ValueKind kb = scalar_kind(b);
    bool ea = ka == ValueKind::Empty;
    bool eb = kb == ValueKind::Empty;
    if (ea || eb) return ea == eb ? 0 : (ea ? 1 : -1);
    if (ka != kb) return cmp3(kind_rank(ka), kind_rank(kb));
    switch (ka) {
        case ValueKind::Number:
            return std::get<Decimal>(a).compare(std::get<Decimal>(b));
        case ValueKind::Text:
            return cmp3(std::get<std::string>(a), std::get<std::string>(b));
        case ValueKind::Bool:
            return cmp3(std::get<bool>(a), std::get<bool>(b));
        case ValueKind::Date:
            return cmp3(std::get<Date>(a), std::get<Date>(b));
        case ValueKind::DateTime:
            return cmp3(std::get<DateTime>(a), std::get<DateTime>(b));
        default:
            return 0;
    }
}

const char* to_string(ColumnDType t) {
    switch (t) {
        case ColumnDType::Number: return "number";
        case ColumnDType::Text: return "text";
        case ColumnDType::Bool: return "bool";
        case ColumnDType::Date: return "date";
        case ColumnDType::Mixed: return "mixed";
        case ColumnDType::Empty: return "empty";
    }
    return "?";
}

const char* to_string(ValueKind k) {
    switch (k) {
        case ValueKind::Empty: return "empty";
        case ValueKind::Number: return "number";
        case ValueKind::Text: return "text";
        case ValueKind::Bool: return "bool";
        case ValueKind::Date: return "date";
        case ValueKind::DateTime: return "datetime";
        case ValueKind::Formula: return "formula";
    }
    return "?";
}

}  // namespace sheetloop
