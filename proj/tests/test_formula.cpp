#include "sheetloop/formula.hpp"

#include <doctest.h>

using namespace sheetloop;

namespace {

Workbook grid_book() {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(1, 1, CellValue(Decimal(10)));          // A1
    s.set_cell(2, 1, CellValue(Decimal(20)));          // A2
    s.set_cell(3, 1, CellValue(Decimal(30)));          // A3
    s.set_cell(1, 2, CellValue("text"));               // B1
    s.set_cell(2, 2, CellValue(Decimal::parse("0.5")));  // B2
    Sheet& t = wb.add_sheet("Other");
    t.set_cell(1, 1, CellValue(Decimal(99)));
    return wb;
}

Scalar eval(const Workbook& wb, const char* src) {
    FormulaOutcome out = evaluate_formula(wb, "S", src);
    REQUIRE(out.evaluated);
    return out.value;
}

}  // namespace

TEST_SUITE("formula") {

TEST_CASE("arithmetic and references") {
    Workbook wb = grid_book();
    CHECK(std::get<Decimal>(eval(wb, "=1+2*3")) == Decimal(7));
    CHECK(std::get<Decimal>(eval(wb, "=(1+2)*3")) == Decimal(9));
    CHECK(std::get<Decimal>(eval(wb, "=A1+A2")) == Decimal(30));
    CHECK(std::get<Decimal>(eval(wb, "=-A1")) == Decimal(-10));
    CHECK(std::get<Decimal>(eval(wb, "=Other!A1+1")) == Decimal(100));
    CHECK(std::get<Decimal>(eval(wb, "=A1/4")) == Decimal::parse("2.5"));
}

TEST_CASE("aggregates") {
    Workbook wb = grid_book();
    CHECK(std::get<Decimal>(eval(wb, "=SUM(A1:A3)")) == Decimal(60));
    CHECK(std::get<Decimal>(eval(wb, "=AVERAGE(A1:A3)")) == Decimal(20));
    CHECK(std::get<Decimal>(eval(wb, "=COUNT(A1:B3)")) == Decimal(4));
    CHECK(std::get<Decimal>(eval(wb, "=MAX(A1:A3)")) == Decimal(30));
    CHECK(std::get<Decimal>(eval(wb, "=MIN(A1:A3, 5)")) == Decimal(5));
    CHECK(std::get<Decimal>(eval(wb, "=SUM(A1:A3, 1, 2)")) == Decimal(63));
    // text cells are skipped by aggregates
    CHECK(std::get<Decimal>(eval(wb, "=SUM(B1:B2)")) == Decimal::parse("0.5"));
}

TEST_CASE("IF") {
    Workbook wb = grid_book();
    CHECK(std::get<std::string>(eval(wb, "=IF(A1>5, \"big\", \"small\")")) == "big");
    CHECK(std::get<std::string>(eval(wb, "=IF(A1>50, \"big\", \"small\")")) == "small");
    CHECK(std::get<bool>(eval(wb, "=IF(A1>50, 1)")) == false);
    CHECK(std::get<Decimal>(eval(wb, "=IF(TRUE, A1+1, 0)")) == Decimal(11));
}

TEST_CASE("comparisons") {
    Workbook wb = grid_book();
    CHECK(std::get<bool>(eval(wb, "=A1=10")));
    CHECK(std::get<bool>(eval(wb, "=A1<>11")));
    CHECK(std::get<bool>(eval(wb, "=B1=\"text\"")));
    CHECK_FALSE(std::get<bool>(eval(wb, "=B1=\"TEXT\"")));
}

TEST_CASE("unknown function is unevaluated, not an error") {
    Workbook wb = grid_book();
    FormulaOutcome out = evaluate_formula(wb, "S", "=VLOOKUP(A1, A1:B3, 2)");
    CHECK_FALSE(out.evaluated);
    CHECK(std::holds_alternative<EmptyCell>(out.value));
}

TEST_CASE("errors") {
    Workbook wb = grid_book();
    CHECK_THROWS_AS(evaluate_formula(wb, "S", "=1/0"), FormulaError);
    CHECK_THROWS_AS(evaluate_formula(wb, "S", "=SUM(A1:A3"), FormulaError);
    CHECK_THROWS_AS(evaluate_formula(wb, "S", "=Nope!A1"), FormulaError);
    CHECK_THROWS_AS(evaluate_formula(wb, "S", "=B1+1"), FormulaError);
    CHECK_THROWS_AS(evaluate_formula(wb, "S", "=AVERAGE(B1)"), FormulaError);
    CHECK_THROWS_AS(evaluate_formula(wb, "S", "nope"), FormulaError);
}

TEST_CASE("formula cells feed cached values to other formulas") {
    Workbook wb = grid_book();
    wb.sheet("S").set_cell(5, 1, CellValue(Formula{"=SUM(A1:A3)", Decimal(60), true}));
    CHECK(std::get<Decimal>(eval(wb, "=A5*2")) == Decimal(120));
}

}  // TEST_SUITE
