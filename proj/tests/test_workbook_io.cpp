#include "sheetloop/workbook_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace sheetloop;

namespace {

Workbook sample_book() {
    Workbook wb;
    wb.set_description("This workbook presents data related to book sales.");
    Sheet& s = wb.add_sheet("Orders");
    s.set_cell(1, 1, CellValue("BookID"));
    s.set_cell(1, 2, CellValue("Book Name"));
    s.set_cell(1, 3, CellValue("Unit Price"));
    s.set_cell(2, 1, CellValue("BK-83024"));
    s.set_cell(2, 2, CellValue("VB Programming"));
    s.set_cell(2, 3, CellValue(Decimal(38)));
    s.set_cell(3, 1, CellValue("BK-83026"));
    s.set_cell(3, 2, CellValue("Access Programming"));
    s.set_cell(3, 3, CellValue(Decimal(35)));
    s.set_cell(4, 1, CellValue(Date{2012, 12, 1}));
    s.set_cell(4, 2, CellValue(true));
    s.set_cell(4, 3, CellValue(Formula{"=SUM(C2:C3)", Decimal(73), true}));
    CellStyle style;
    style.bold = true;
    style.fill_color = "#FFFF00";
    s.set_style(1, 1, style);
    s.set_format(2, 3, "0.00");
    s.set_hyperlink(2, 1, "https://example.com/bk-83024");
    s.add_merge(RangeRef{"", 6, 1, 7, 2});
    s.set_row_height(2, Decimal::parse("18.75"));
    s.set_col_width(2, Decimal(24));
    ChartSpec chart;
    chart.type = ChartType::Bar;
    chart.data_range = RangeRef{"", 1, 2, 3, 3};
    chart.title = "Prices";
    chart.legend = "right";
    chart.anchor = CellRef{"", 8, 1};
    chart.data_labels = true;
    s.charts().push_back(chart);
    PivotSpec pivot;
    pivot.source = RangeRef{"", 1, 1, 3, 3};
    pivot.rows_col = 2;
    pivot.values_col = 3;
    pivot.func = "sum";
    s.pivots().push_back(pivot);
    s.set_tab_color("#FF0000");
    s.page().orientation = "landscape";
    Sheet& t = wb.add_sheet("Summary");
    t.set_cell(1, 1, CellValue("note"));
    return wb;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("workbook_io") {

TEST_CASE("canonical round-trip through parse") {
    Workbook wb = sample_book();
    std::string bytes = canonical_bytes(wb);
    Workbook back = parse_fixture(bytes);
    CHECK(canonical_bytes(back) == bytes);
    CHECK(back == wb);
    CHECK(back.sheet("Orders").cell(2, 3).as_number()->to_string() == "38");
    CHECK(back.sheet("Orders").cell(4, 3).as_formula()->source == "=SUM(C2:C3)");
    CHECK(back.sheet("Orders").hyperlink(2, 1) == "https://example.com/bk-83024");
    CHECK(back.sheet("Orders").charts().size() == 1);
    CHECK(back.sheet("Orders").pivots().size() == 1);
    CHECK(back.sheet("Orders").page().orientation == "landscape");
}

TEST_CASE("save/load through files") {
    Workbook wb = sample_book();
    std::string path = temp_path("io_sample.wbk");
    save_workbook(wb, path);
    Workbook back = load_workbook(path);
    CHECK(canonical_bytes(back) == canonical_bytes(wb));
    CHECK(back.source_path().has_value());
    std::remove(path.c_str());
}

TEST_CASE("simple fixture: [Name, Age] header and two data rows") {
    std::string text = R"fx(workbook-fixture v1
{"description": "", "sheets": [{"name": "S",
  "cells": {"A1": "Name", "B1": "Age", "A2": "Bob", "B2": {"n": "7"},
            "A3": "Ann", "B3": {"n": "9"}}}]}
)fx";
    Workbook wb = parse_fixture(text);
    SheetState st = extract_sheet_state(wb, "S");
    CHECK(st.n_rows == 3);
    CHECK(st.headers == std::vector<std::string>{"Name", "Age"});
}

TEST_CASE("header line is mandatory") {
    CHECK_THROWS_AS(parse_fixture("{}"), FixtureParseError);
    CHECK_THROWS_AS(parse_fixture("workbook-fixture v2\n{}"), FixtureParseError);
}

TEST_CASE("malformed payloads raise FixtureParseError") {
    CHECK_THROWS_AS(parse_fixture("workbook-fixture v1\n{nope"), FixtureParseError);
    CHECK_THROWS_AS(parse_fixture("workbook-fixture v1\n{\"sheets\": 3}"), FixtureParseError);
    // raw JSON numbers are rejected to keep decimals exact
    CHECK_THROWS_AS(parse_fixture("workbook-fixture v1\n"
                                  "{\"sheets\": [{\"name\":\"S\",\"cells\":{\"A1\": 5}}]}"),
                    FixtureParseError);
    // duplicate sheet names
    CHECK_THROWS_AS(parse_fixture("workbook-fixture v1\n"
                                  "{\"sheets\": [{\"name\":\"S\"},{\"name\":\"S\"}]}"),
                    FixtureParseError);
}

TEST_CASE("unknown style attributes drop with a warning record") {
    std::string text = R"fx(workbook-fixture v1
{"sheets": [{"name": "S", "cells": {"A1": "x"},
  "styles": {"A1": {"bold": true, "wobble": 3}}, "frobs": []}]}
)fx";
    std::vector<std::string> warnings;
    Workbook wb = parse_fixture(text, &warnings);
    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].find("frobs") != std::string::npos);
    CHECK(warnings[1].find("wobble") != std::string::npos);
    CHECK(wb.sheet("S").style(1, 1).bold == true);
}

TEST_CASE("formula without cached value evaluates at load") {
    std::string text = R"fx(workbook-fixture v1
{"sheets": [{"name": "S", "cells": {
  "A1": {"n": "2"}, "A2": {"n": "3"}, "A3": {"f": "=SUM(A1:A2)"}}}]}
)fx";
    Workbook wb = parse_fixture(text);
    const Formula* f = wb.sheet("S").cell(3, 1).as_formula();
    REQUIRE(f != nullptr);
    CHECK(f->evaluated);
    CHECK(std::get<Decimal>(f->cached) == Decimal(5));
}

TEST_CASE("xlsx format has no bundled adapter") {
    CHECK_THROWS_AS(load_workbook("whatever.xlsx", WorkbookFormat::Xlsx),
                    UnsupportedFeatureError);
}

TEST_CASE("colors canonicalize on load") {
    std::string text = R"fx(workbook-fixture v1
{"sheets": [{"name": "S", "cells": {"A1": "x"},
  "styles": {"A1": {"fill": "yellow"}}, "tab_color": "#abc"}]}
)fx";
    Workbook wb = parse_fixture(text);
    CHECK(*wb.sheet("S").style(1, 1).fill_color == "#FFFF00");
    CHECK(*wb.sheet("S").tab_color() == "#AABBCC");
}

}  // TEST_SUITE
