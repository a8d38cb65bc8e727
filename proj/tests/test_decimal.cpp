#include "sheetloop/decimal.hpp"

#include <doctest.h>

#include <random>

using sheetloop::Decimal;

TEST_SUITE("decimal") {

TEST_CASE("parse and canonical rendering") {
    CHECK(Decimal::parse("41100").to_string() == "41100");
    CHECK(Decimal::parse("-3.14").to_string() == "-3.14");
    CHECK(Decimal::parse("0.500").to_string() == "0.5");
    CHECK(Decimal::parse("000.5").to_string() == "0.5");
    CHECK(Decimal::parse("+7").to_string() == "7");
    CHECK(Decimal::parse("1e3").to_string() == "1000");
    CHECK(Decimal::parse("1.5e-2").to_string() == "0.015");
    CHECK(Decimal::parse("0").to_string() == "0");
    CHECK(Decimal::parse("-0").to_string() == "0");
    CHECK(Decimal::parse("0.0000001").to_string() == "0.0000001");

    Decimal d;
    CHECK_FALSE(Decimal::try_parse("", d));
    CHECK_FALSE(Decimal::try_parse("abc", d));
    CHECK_FALSE(Decimal::try_parse("1.2.3", d));
    CHECK_FALSE(Decimal::try_parse("1 2", d));
    CHECK_FALSE(Decimal::try_parse(".", d));
}

TEST_CASE("exact arithmetic without binary drift") {
    // 0.1 + 0.2 == 0.3 exactly, unlike doubles.
    CHECK(Decimal::parse("0.1") + Decimal::parse("0.2") == Decimal::parse("0.3"));
    CHECK((Decimal::parse("0.1") + Decimal::parse("0.2")).to_string() == "0.3");
    CHECK(Decimal::parse("1.1") * Decimal::parse("1.1") == Decimal::parse("1.21"));
    CHECK(Decimal::parse("10") / Decimal::parse("4") == Decimal::parse("2.5"));
    CHECK(Decimal::parse("1") / Decimal::parse("3") == Decimal::parse("0.333333333333"));
    CHECK(Decimal::parse("2") / Decimal::parse("3") == Decimal::parse("0.666666666667"));
    CHECK(Decimal(7) - Decimal(10) == Decimal(-3));
}

TEST_CASE("comparisons") {
    CHECK(Decimal::parse("1.5") < Decimal::parse("1.50000001"));
    CHECK(Decimal::parse("2") == Decimal::parse("2.000"));
    CHECK(Decimal::parse("-1") < Decimal::parse("0.5"));
    CHECK(Decimal::parse("100") > Decimal::parse("99.999999"));
    CHECK(Decimal::parse("38") < Decimal::parse("43"));
}

TEST_CASE("tolerance check") {
    Decimal tol = Decimal::parse("0.000000001");
    CHECK(Decimal::parse("1.0000000005").within(Decimal(1), tol));
    CHECK_FALSE(Decimal::parse("1.000000002").within(Decimal(1), tol));
}

TEST_CASE("division by zero throws") {
    CHECK_THROWS_AS(Decimal(1) / Decimal(0), sheetloop::DecimalError);
}

TEST_CASE("overflow reduces scale before giving up") {
    Decimal big = Decimal::parse("9000000000000000000");
    Decimal r = big + Decimal::parse("0.25");  // cannot keep the fraction
    CHECK(r >= big);
    CHECK_THROWS_AS(big * big, sheetloop::DecimalError);
}

TEST_CASE("addition associativity on random decimals") {
    // Sums of values with <= 4 fractional digits stay exact, so grouping
    // must not matter.
    std::mt19937 rng(20240801);
    for (int trial = 0; trial < 200; ++trial) {
        auto rnd = [&] {
            std::int64_t mant = static_cast<std::int64_t>(rng() % 2000000) - 1000000;
            return Decimal::from_mantissa(mant, static_cast<int>(rng() % 5));
        };
        Decimal a = rnd(), b = rnd(), c = rnd();
        CHECK((a + b) + c == a + (b + c));
    }
}

}  // TEST_SUITE
