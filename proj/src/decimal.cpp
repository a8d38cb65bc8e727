#include "sheetloop/decimal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace sheetloop {

namespace {

constexpr __int128 kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kInt64Min = std::numeric_limits<std::int64_t>::min();

__int128 pow10_128(int n) {
    __int128 r = 1;
    for (int i = 0; i < n; ++i) r *= 10;
    return r;
}

// Round half away from zero.
__int128 div_round(__int128 value, __int128 divisor) {
    __int128 q = value / divisor;
    __int128 rem = value % divisor;
    if (rem < 0) rem = -rem;
    if (rem * 2 >= divisor) q += (value < 0) ? -1 : 1;
    return q;
}

}  // namespace

void Decimal::normalize() {
    if (mant_ == 0) {
        scale_ = 0;
        return;
    }
    while (scale_ > 0 && mant_ % 10 == 0) {
        mant_ /= 10;
        --scale_;
    }
}

Decimal Decimal::reduce(__int128 mantissa, std::int32_t scale) {
    // Trim trailing zeros early so large intermediates shrink.
    while (scale > 0 && mantissa != 0 && mantissa % 10 == 0) {
        mantissa /= 10;
        --scale;
    }
    if (scale > kMaxScale) {
        mantissa = div_round(mantissa, pow10_128(scale - kMaxScale));
        scale = kMaxScale;
    }
    if (mantissa > kInt64Max || mantissa < kInt64Min) {
        int drop = 0;
        __int128 probe = mantissa < 0 ? -mantissa : mantissa;
        while (probe > kInt64Max && drop < scale) {
            probe /= 10;
            ++drop;
        }
        if (drop > 0) {
            mantissa = div_round(mantissa, pow10_128(drop));
            scale -= drop;
        }
        // Rounding up may re-overflow by one digit.
        if ((mantissa > kInt64Max || mantissa < kInt64Min) && scale > 0) {
            mantissa = div_round(mantissa, 10);
            --scale;
        }
    }
    if (mantissa > kInt64Max || mantissa < kInt64Min) {
        throw DecimalError("decimal overflow");
    }
    Decimal d;
    d.mant_ = static_cast<std::int64_t>(mantissa);
    d.scale_ = scale;
    d.normalize();
    return d;
}

Decimal Decimal::from_mantissa(std::int64_t mantissa, std::int32_t scale) {
    if (scale < 0) throw DecimalError("negative scale");
    return reduce(static_cast<__int128>(mantissa), scale);
}

bool Decimal::try_parse(std::string_view text, Decimal& out) {
    const char* p = text.data();
    const char* end = p + text.size();
    if (p == end) return false;

    bool neg = false;
    if (*p == '+' || *p == '-') {
        neg = (*p == '-');
        ++p;
    }

    __int128 mant = 0;
    int frac_digits = 0;
    int digits = 0;
    bool seen_dot = false;
    int dropped = 0;  // fractional digits past kMaxScale precision window

    for (; p != end; ++p) {
        char c = *p;
        if (c == '.') {
            if (seen_dot) return false;
            seen_dot = true;
            continue;
        }
        if (c == 'e' || c == 'E') break;
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        ++digits;
        if (mant > (kInt64Max / 10) * 10) {
            // Keep significant head; only fractional digits may be dropped.
            if (!seen_dot) return false;
            ++dropped;
            continue;
        }
        mant = mant * 10 + (c - '0');
        if (seen_dot) ++frac_digits;
    }
    if (digits == 0) return false;

    int exponent = 0;
    if (p != end && (*p == 'e' || *p == 'E')) {
        ++p;
        bool eneg = false;
        if (p != end && (*p == '+' || *p == '-')) {
            eneg = (*p == '-');
            ++p;
        }
        if (p == end) return false;
        int ev = 0;
        for (; p != end; ++p) {
            if (!std::isdigit(static_cast<unsigned char>(*p))) return false;
            if (ev < 10000) ev = ev * 10 + (*p - '0');
        }
        exponent = eneg ? -ev : ev;
    }
    if (p != end) return false;
    (void)dropped;

    if (neg) mant = -mant;

    // value = mant * 10^(exponent - frac_digits)
    int scale = frac_digits - exponent;
    try {
        if (scale < 0) {
            if (-scale > 30) return false;
            out = reduce(mant * pow10_128(-scale), 0);
        } else {
            out = reduce(mant, scale);
        }
    } catch (const DecimalError&) {
        return false;
    }
    return true;
}

Decimal Decimal::parse(std::string_view text) {
    Decimal d;
    if (!try_parse(text, d)) {
        throw DecimalError("not a decimal number: '" + std::string(text) + "'");
    }
    return d;
}

std::string Decimal::to_string() const {
    std::string digits = std::to_string(mant_ < 0 ? -static_cast<std::uint64_t>(mant_)
                                                  : static_cast<std::uint64_t>(mant_));
    std::string out;
    if (mant_ < 0) out.push_back('-');
    if (scale_ == 0) {
        out += digits;
        return out;
    }
    if (static_cast<int>(digits.size()) <= scale_) {
        out += "0.";
        out.append(scale_ - digits.size(), '0');
        out += digits;
    } else {
        out.append(digits, 0, digits.size() - scale_);
        out.push_back('.');
        out.append(digits, digits.size() - scale_, std::string::npos);
    }
    return out;
}

double Decimal::to_double() const {
    return std::strtod(to_string().c_str(), nullptr);
}

Decimal Decimal::operator-() const {
    Decimal d = *this;
    if (d.mant_ == std::numeric_limits<std::int64_t>::min()) {
        return reduce(-static_cast<__int128>(d.mant_), d.scale_);
    }
    d.mant_ = -d.mant_;
    return d;
}

Decimal Decimal::operator+(const Decimal& rhs) const {
    std::int32_t s = std::max(scale_, rhs.scale_);
    __int128 a = static_cast<__int128>(mant_) * pow10_128(s - scale_);
    __int128 b = static_cast<__int128>(rhs.mant_) * pow10_128(s - rhs.scale_);
    return reduce(a + b, s);
}

Decimal Decimal::operator-(const Decimal& rhs) const { return *this + (-rhs); }

Decimal Decimal::operator*(const Decimal& rhs) const {
    __int128 prod = static_cast<__int128>(mant_) * static_cast<__int128>(rhs.mant_);
    return reduce(prod, scale_ + rhs.scale_);
}

Decimal Decimal::operator/(const Decimal& rhs) const {
    if (rhs.mant_ == 0) throw DecimalError("division by zero");
    // Compute to kMaxScale fractional digits, rounding half away from zero.
    __int128 num = static_cast<__int128>(mant_) * pow10_128(kMaxScale + rhs.scale_);
    __int128 den = static_cast<__int128>(rhs.mant_) * pow10_128(scale_);
    return reduce(div_round(num, den), kMaxScale);
}

int Decimal::compare(const Decimal& rhs) const {
    if ((mant_ < 0) != (rhs.mant_ < 0)) return mant_ < rhs.mant_ ? -1 : (mant_ == rhs.mant_ ? 0 : 1);
    std::int32_t s = std::max(scale_, rhs.scale_);
    __int128 a = static_cast<__int128>(mant_) * pow10_128(s - scale_);
    __int128 b = static_cast<__int128>(rhs.mant_) * pow10_128(s - rhs.scale_);
    if (a < b) return -1;
    if (a > b) return 1;
    return 0;
}

Decimal Decimal::abs() const { return mant_ < 0 ? -*this : *this; }

bool Decimal::within(const Decimal& rhs, const Decimal& tol) const {
    return (*this - rhs).abs() <= tol;
}

}  // namespace sheetloop
