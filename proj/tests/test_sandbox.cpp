#include "sheetloop/sandbox.hpp"
#include "sheetloop/workbook_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace sheetloop;
using namespace sheetloop::actions;

namespace {

Workbook orders_book(int data_rows = 30) {
    Workbook wb;
    wb.set_description("book sales");
    Sheet& s = wb.add_sheet("Sheet1");
    s.set_cell(1, 1, CellValue("BookID"));
    s.set_cell(1, 2, CellValue("Book Name"));
    s.set_cell(1, 3, CellValue("Sales"));
    std::mt19937 rng(42);
    for (int r = 0; r < data_rows; ++r) {
        s.set_cell(2 + r, 1, CellValue("BK-" + std::to_string(83000 + r)));
        s.set_cell(2 + r, 2, CellValue("Book " + std::to_string(r % 7)));
        s.set_cell(2 + r, 3, CellValue(Decimal(static_cast<std::int64_t>(rng() % 100))));
    }
    wb.add_sheet("Extra").set_cell(1, 1, CellValue("x"));
    return wb;
}

Observation run(Workbook& wb, const std::string& program) {
    auto parsed = parse_action(program);
    REQUIRE_MESSAGE(parsed.ok(), (parsed.error ? parsed.error->render() : std::string{}));
    return execute_in_sandbox(wb, *parsed.program);
}

}  // namespace

TEST_SUITE("sandbox") {

TEST_CASE("SET_CELL commits and reports touched range + new state") {
    Workbook wb = orders_book(3);
    Observation obs = run(wb, "SET_CELL Sheet1!E1 41100");
    CHECK(obs.ok());
    REQUIRE(obs.touched_ranges.size() == 1);
    CHECK(obs.touched_ranges[0].first == "Sheet1");
    CHECK(obs.touched_ranges[0].second.to_string() == "Sheet1!E1");
    CHECK(*wb.sheet("Sheet1").cell(1, 5).as_number() == Decimal(41100));
    REQUIRE_FALSE(obs.new_state.empty());
    CHECK(obs.new_state[0] == extract_sheet_state(wb, "Sheet1"));
    CHECK(obs.new_state[0].n_cols == 5);
}

TEST_CASE("atomicity: failing statement rolls back the whole program") {
    Workbook wb = orders_book(3);
    std::string before = canonical_bytes(wb);
    Observation obs = run(wb, "SET_CELL Sheet1!A1 changed\nDELETE ROWS Missing!2");
    CHECK_FALSE(obs.ok());
    CHECK(obs.error_kind == ErrorKind::UnknownSheet);
    CHECK(canonical_bytes(wb) == before);  // first statement rolled back too
    CHECK(obs.new_state.empty());
    CHECK(obs.touched_ranges.empty());
    CHECK(obs.message.find("statement 2") != std::string::npos);
    CHECK(obs.message.find("line 2") != std::string::npos);
}

TEST_CASE("HIGHLIGHT records fill color on every cell (style readback)") {
    Workbook wb = orders_book(5);
    Observation obs = run(wb, "HIGHLIGHT Sheet1!A5:C5 FILL yellow");
    CHECK(obs.ok());
    REQUIRE(obs.touched_ranges.size() == 1);
    CHECK(obs.touched_ranges[0].second.to_string() == "Sheet1!A5:C5");
    for (int col = 1; col <= 3; ++col) {
        CHECK(*wb.sheet("Sheet1").style(5, col).fill_color == "#FFFF00");
    }
    CHECK_FALSE(wb.sheet("Sheet1").style(4, 1).fill_color.has_value());
}

TEST_CASE("SORT DESC matches an independent comparison sort of the fixture rows") {
    Workbook wb = orders_book(30);
    const Sheet& before = wb.sheet("Sheet1");

    // Oracle: pull the 30 row-tuples, sort them with std::stable_sort on
    // the numeric key, descending.
    struct Row {
        std::string id, name;
        Decimal sales;
    };
    std::vector<Row> rows;
    for (int r = 2; r <= 31; ++r) {
        rows.push_back(Row{before.cell(r, 1).display(), before.cell(r, 2).display(),
                           *before.cell(r, 3).as_number()});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return b.sales < a.sales; });

    Observation obs = run(wb, "SORT Sheet1!A2:C31 BY 3 DESC");
    CHECK(obs.ok());
    const Sheet& after = wb.sheet("Sheet1");
    for (int i = 0; i < 30; ++i) {
        CAPTURE(i);
        CHECK(after.cell(2 + i, 1).display() == rows[i].id);
        CHECK(after.cell(2 + i, 2).display() == rows[i].name);
        CHECK(*after.cell(2 + i, 3).as_number() == rows[i].sales);
    }
}

TEST_CASE("sort is stable: equal keys keep relative order") {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(1, 1, CellValue("K"));
    s.set_cell(1, 2, CellValue("Tag"));
    const char* tags[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i) {
        s.set_cell(2 + i, 1, CellValue(Decimal(i / 2)));  // keys 0,0,1,1
        s.set_cell(2 + i, 2, CellValue(tags[i]));
    }
    run(wb, "SORT S!A2:B5 BY 1 DESC");
    CHECK(s.cell(2, 2).display() == "c");
    CHECK(s.cell(3, 2).display() == "d");
    CHECK(s.cell(4, 2).display() == "a");
    CHECK(s.cell(5, 2).display() == "b");
}

TEST_CASE("determinism: same workbook and action give identical results") {
    for (int i = 0; i < 2; ++i) {
        Workbook a = orders_book(10);
        Workbook b = orders_book(10);
        Observation oa = run(a, "SORT Sheet1!A2:C11 BY 3 ASC\nHIGHLIGHT Sheet1!A2:C2 FILL red");
        Observation ob = run(b, "SORT Sheet1!A2:C11 BY 3 ASC\nHIGHLIGHT Sheet1!A2:C2 FILL red");
        CHECK(oa.ok());
        CHECK(oa.status == ob.status);
        CHECK(oa.message == ob.message);
        CHECK(canonical_bytes(a) == canonical_bytes(b));
    }
}

TEST_CASE("filter keeps survivors in original order") {
    Workbook wb = orders_book(6);
    Sheet& s = wb.sheet("Sheet1");
    for (int r = 2; r <= 7; ++r) {
        s.set_cell(r, 3, CellValue(Decimal((r % 2) ? 10 : 50)));
    }
    Observation obs = run(wb, "FILTER Sheet1!A2:C7 WHERE 3 > 40");
    CHECK(obs.ok());
    CHECK(s.used_rows() == 4);  // header + 3 survivors
    CHECK(*s.cell(2, 3).as_number() == Decimal(50));
    CHECK(s.cell(2, 1).display() == "BK-83000");
    CHECK(s.cell(3, 1).display() == "BK-83002");
}

TEST_CASE("filter type mismatch is a TypeMismatch error") {
    Workbook wb = orders_book(3);
    Observation obs = run(wb, "FILTER Sheet1!A2:C4 WHERE 1 > 40");  // text column vs number
    CHECK_FALSE(obs.ok());
    CHECK(obs.error_kind == ErrorKind::TypeMismatch);
}

TEST_CASE("dedupe keeps first occurrence") {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(1, 1, CellValue("V"));
    const char* vals[] = {"x", "y", "x", "z", "y"};
    for (int i = 0; i < 5; ++i) s.set_cell(2 + i, 1, CellValue(vals[i]));
    run(wb, "DEDUPE S!A2:A6");
    CHECK(s.used_rows() == 4);
    CHECK(s.cell(2, 1).display() == "x");
    CHECK(s.cell(3, 1).display() == "y");
    CHECK(s.cell(4, 1).display() == "z");
}

TEST_CASE("autofill continues linear progressions") {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(2, 1, CellValue(Decimal(10)));
    s.set_cell(3, 1, CellValue(Decimal(20)));
    run(wb, "AUTOFILL S!A2:A3 TO S!A4:A6");
    CHECK(*s.cell(4, 1).as_number() == Decimal(30));
    CHECK(*s.cell(5, 1).as_number() == Decimal(40));
    CHECK(*s.cell(6, 1).as_number() == Decimal(50));
}

TEST_CASE("autofill copies verbatim when not numeric") {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(2, 1, CellValue("ab"));
    s.set_cell(3, 1, CellValue("cd"));
    run(wb, "AUTOFILL S!A2:A3 TO S!A4:A7");
    CHECK(s.cell(4, 1).display() == "ab");
    CHECK(s.cell(5, 1).display() == "cd");
    CHECK(s.cell(6, 1).display() == "ab");
    CHECK(s.cell(7, 1).display() == "cd");
}

TEST_CASE("formula SET_CELL evaluates against the live grid") {
    Workbook wb = orders_book(3);
    Observation obs = run(wb, "SET_CELL Sheet1!E1 =SUM(C2:C4)");
    CHECK(obs.ok());
    const Formula* f = wb.sheet("Sheet1").cell(1, 5).as_formula();
    REQUIRE(f);
    Decimal expect = *wb.sheet("Sheet1").cell(2, 3).as_number() +
                     *wb.sheet("Sheet1").cell(3, 3).as_number() +
                     *wb.sheet("Sheet1").cell(4, 3).as_number();
    CHECK(std::get<Decimal>(f->cached) == expect);
}

TEST_CASE("worksheet management verbs") {
    Workbook wb = orders_book(2);
    CHECK(run(wb, "CREATE_SHEET Report").ok());
    CHECK(wb.find_sheet("Report"));
    CHECK_FALSE(run(wb, "CREATE_SHEET Report").ok());  // duplicate
    CHECK(run(wb, "RENAME_SHEET Report Summary2").ok());
    CHECK(run(wb, "TAB_COLOR Summary2 yellow").ok());
    CHECK(*wb.sheet("Summary2").tab_color() == "#FFFF00");
    CHECK(run(wb, "ORIENTATION Summary2 LANDSCAPE").ok());
    CHECK(wb.sheet("Summary2").page().orientation == "landscape");
    CHECK(run(wb, "PAGE_SIZE Summary2 A3").ok());
    CHECK(wb.sheet("Summary2").page().size == "A3");
    CHECK(run(wb, "DELETE_SHEET Summary2").ok());
    CHECK_FALSE(wb.find_sheet("Summary2"));
}

TEST_CASE("chart pipeline with bounds checks") {
    Workbook wb = orders_book(5);
    CHECK_FALSE(run(wb, "CHART_DATA Sheet1 1 A1:B3").ok());  // no chart yet
    CHECK(run(wb, "CHART_TYPE Sheet1 1 BAR").ok());
    CHECK_FALSE(run(wb, "CHART_TYPE Sheet1 3 PIE").ok());  // gap in ordinals
    Observation bad = run(wb, "CHART_DATA Sheet1 1 A1:C40");
    CHECK_FALSE(bad.ok());
    CHECK(bad.error_kind == ErrorKind::RangeOutOfBounds);
    CHECK(run(wb, "CHART_DATA Sheet1 1 A1:C6").ok());
    CHECK(run(wb, "CHART_TITLE Sheet1 1 Sales Chart").ok());
    CHECK(run(wb, "CHART_LEGEND Sheet1 1 RIGHT").ok());
    CHECK(run(wb, "CHART_POSITION Sheet1 1 E2").ok());
    CHECK(run(wb, "CHART_AXIS Sheet1 1 Y Units").ok());
    CHECK(run(wb, "DATA_LABELS Sheet1 1 ON").ok());
    CHECK(run(wb, "TRENDLINE Sheet1 1 LINEAR").ok());
    const ChartSpec& c = wb.sheet("Sheet1").charts()[0];
    CHECK(c.type == ChartType::Bar);
    CHECK(c.data_range->to_string() == "A1:C6");
    CHECK(*c.title == "Sales Chart");
    CHECK(*c.legend == "right");
    CHECK(c.anchor.to_string() == "E2");
    CHECK(*c.y_axis_title == "Units");
    CHECK(c.data_labels);
    CHECK(*c.trendline == "linear");
}

TEST_CASE("pivot creation and summary function") {
    Workbook wb = orders_book(5);
    CHECK(run(wb, "PIVOT Sheet1 SOURCE A1:C6 ROWS B VALUES C").ok());
    REQUIRE(wb.sheet("Sheet1").pivots().size() == 1);
    CHECK(wb.sheet("Sheet1").pivots()[0].func == "sum");
    CHECK(run(wb, "PIVOT_FUNCTION Sheet1 1 AVG").ok());
    CHECK(wb.sheet("Sheet1").pivots()[0].func == "avg");
    Observation bad = run(wb, "PIVOT Sheet1 SOURCE A1:C6 ROWS E VALUES C");
    CHECK_FALSE(bad.ok());
    CHECK(bad.error_kind == ErrorKind::RangeOutOfBounds);
}

TEST_CASE("merge / unmerge") {
    Workbook wb = orders_book(3);
    CHECK(run(wb, "MERGE Sheet1!A1:C1").ok());
    CHECK(wb.sheet("Sheet1").merges().size() == 1);
    Observation overlap = run(wb, "MERGE Sheet1!B1:D1");
    CHECK_FALSE(overlap.ok());
    CHECK(overlap.error_kind == ErrorKind::RuntimeFault);
    CHECK(run(wb, "MERGE Sheet1!A1:C1 OFF").ok());
    CHECK(wb.sheet("Sheet1").merges().empty());
}

TEST_CASE("RAW is rejected without an executor and runs with one") {
    Workbook wb = orders_book(2);
    auto parsed = parse_action("RAW python print('x')");
    REQUIRE(parsed.ok());
    Observation rejected = execute_in_sandbox(wb, *parsed.program);
    CHECK_FALSE(rejected.ok());
    CHECK(rejected.error_kind == ErrorKind::UnsupportedVerb);

    Sandbox sandbox;
    sandbox.register_raw_executor(
        "python", [](Workbook& w, const std::string&, auto& touched) {
            w.sheet("Sheet1").set_cell(9, 9, CellValue("raw"));
            touched.push_back({"Sheet1", RangeRef{"Sheet1", 9, 9, 9, 9}});
            return std::string{};
        });
    Observation ok = sandbox.execute(wb, *parsed.program);
    CHECK(ok.ok());
    CHECK(wb.sheet("Sheet1").cell(9, 9).display() == "raw");
}

TEST_CASE("copy buffers overlapping ranges") {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(1, 1, CellValue(Decimal(1)));
    s.set_cell(2, 1, CellValue(Decimal(2)));
    run(wb, "COPY S!A1:A2 TO S!A2");
    CHECK(*s.cell(2, 1).as_number() == Decimal(1));
    CHECK(*s.cell(3, 1).as_number() == Decimal(2));
}

TEST_CASE("replace substring in text, exact elsewhere") {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(1, 1, CellValue("color colour"));
    s.set_cell(2, 1, CellValue(Decimal(5)));
    run(wb, "REPLACE S!A1:A2 color paint");
    CHECK(s.cell(1, 1).display() == "paint colour");
    run(wb, "REPLACE S!A1:A2 5 6");
    CHECK(*s.cell(2, 1).as_number() == Decimal(6));
}

}  // TEST_SUITE
