#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sheetloop {

struct DecimalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact decimal number: value = mantissa / 10^scale.
///
/// Mantissa is a signed 64-bit integer, scale is the count of fractional
/// digits (>= 0). Always stored normalized (no trailing fractional zeros,
/// zero is {0, 0}). Division and overflow reduction round half away from
/// zero at a fixed maximum of 12 fractional digits, so every operation is
/// deterministic across platforms.
class Decimal {
public:
    static constexpr int kMaxScale = 12;

    Decimal() = default;
    Decimal(std::int64_t integer) : mant_(integer) {}

    static Decimal parse(std::string_view text);
    /// Returns false instead of throwing on malformed text.
    static bool try_parse(std::string_view text, Decimal& out);
    static Decimal from_mantissa(std::int64_t mantissa, std::int32_t scale);

    /// Canonical rendering: plain decimal notation, no exponent,
    /// no trailing fractional zeros ("41100", "-3.14", "0.5").
    std::string to_string() const;

    std::int64_t mantissa() const { return mant_; }
    std::int32_t scale() const { return scale_; }
    bool is_zero() const { return mant_ == 0; }
    bool is_integer() const { return scale_ == 0; }

    /// Nearest double; used only where exactness is not required
    /// (style dimensions, report percentages).
    double to_double() const;

    Decimal operator-() const;
    Decimal operator+(const Decimal& rhs) const;
    Decimal operator-(const Decimal& rhs) const;
    Decimal operator*(const Decimal& rhs) const;
    Decimal operator/(const Decimal& rhs) const;  // throws DecimalError on /0

    int compare(const Decimal& rhs) const;  // -1, 0, 1
    bool operator==(const Decimal& rhs) const { return compare(rhs) == 0; }
    bool operator!=(const Decimal& rhs) const { return compare(rhs) != 0; }
    bool operator<(const Decimal& rhs) const { return compare(rhs) < 0; }
    bool operator<=(const Decimal& rhs) const { return compare(rhs) <= 0; }
    bool operator>(const Decimal& rhs) const { return compare(rhs) > 0; }
    bool operator>=(const Decimal& rhs) const { return compare(rhs) >= 0; }

    Decimal abs() const;

    /// |this - rhs| <= tol, computed exactly.
    bool within(const Decimal& rhs, const Decimal& tol) const;

private:
    std::int64_t mant_ = 0;
    std::int32_t scale_ = 0;

    void normalize();
    static Decimal reduce(__int128 mantissa, std::int32_t scale);
};

}  // namespace sheetloop
