#include "sheetloop/workbook.hpp"
#include "sheetloop/workbook_io.hpp"
#include "sheetloop/formula.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <random>

using namespace sheetloop;

namespace {

Workbook two_sheet_book() {
    Workbook wb;
    wb.set_description("test workbook");
    Sheet& s = wb.add_sheet("Sheet1");
    s.set_cell(1, 1, CellValue("Name"));
    s.set_cell(1, 2, CellValue("Age"));
    s.set_cell(2, 1, CellValue("Bob"));
    s.set_cell(2, 2, CellValue(Decimal(7)));
    s.set_cell(3, 1, CellValue("Ann"));
    s.set_cell(3, 2, CellValue(Decimal(9)));
    wb.add_sheet("Notes");
    return wb;
}

// Field-by-field grid comparison, independent of canonical serialization.
bool grids_equal(const Sheet& a, const Sheet& b) {
    if (a.grid().size() != b.grid().size()) return false;
    for (const auto& [coord, value] : a.grid()) {
        auto it = b.grid().find(coord);
        if (it == b.grid().end() || !(it->second == value)) return false;
    }
    return a.styles() == b.styles() && a.formats() == b.formats() &&
           a.merges() == b.merges() && a.hyperlinks() == b.hyperlinks();
}

}  // namespace

TEST_SUITE("workbook") {

TEST_CASE("sheet name invariants") {
    Workbook wb;
    wb.add_sheet("A");
    CHECK_THROWS_AS(wb.add_sheet("A"), WorkbookError);
    CHECK_THROWS_AS(wb.add_sheet(""), WorkbookError);
    wb.add_sheet("B");
    CHECK_THROWS_AS(wb.rename_sheet("B", "A"), WorkbookError);
    wb.rename_sheet("B", "C");
    CHECK(wb.find_sheet("C") != nullptr);
    CHECK_THROWS_AS(wb.sheet("missing"), UnknownSheetError);
}

TEST_CASE("sheet state extraction") {
    Workbook wb = two_sheet_book();
    SheetState st = extract_sheet_state(wb, "Sheet1");
    CHECK(st.n_rows == 3);
    CHECK(st.n_cols == 2);
    CHECK(st.headers == std::vector<std::string>{"Name", "Age"});
    REQUIRE(st.col_dtypes.size() == 2);
    CHECK(st.col_dtypes[0] == ColumnDType::Text);
    CHECK(st.col_dtypes[1] == ColumnDType::Number);

    SheetState empty = extract_sheet_state(wb, "Notes");
    CHECK(empty.n_rows == 0);
    CHECK(empty.n_cols == 0);
    CHECK(empty.headers.empty());
}

TEST_CASE("headers only sheet: one row, dtypes empty") {
    Workbook wb;
    Sheet& s = wb.add_sheet("H");
    s.set_cell(1, 1, CellValue("Name"));
    s.set_cell(1, 2, CellValue("Age"));
    SheetState st = extract_sheet_state(wb, "H");
    CHECK(st.n_rows == 1);
    CHECK(st.col_dtypes == std::vector<ColumnDType>{ColumnDType::Empty, ColumnDType::Empty});
}

TEST_CASE("homogeneous and mixed column dtypes") {
    Workbook wb;
    Sheet& s = wb.add_sheet("S");
    s.set_cell(1, 1, CellValue("Salary"));
    s.set_cell(2, 1, CellValue(Decimal(41100)));
    s.set_cell(3, 1, CellValue(Decimal(10350)));
    s.set_cell(1, 2, CellValue("Misc"));
    s.set_cell(2, 2, CellValue("Master"));
    s.set_cell(3, 2, CellValue(Decimal(7)));
    SheetState st = extract_sheet_state(wb, "S");
    CHECK(st.col_dtypes[0] == ColumnDType::Number);
    CHECK(st.col_dtypes[1] == ColumnDType::Mixed);
}

TEST_CASE("dtype inference is row-order insensitive") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Workbook wb;
        Sheet& s = wb.add_sheet("S");
        s.set_cell(1, 1, CellValue("C"));
        std::vector<CellValue> pool = {CellValue(Decimal(1)), CellValue("x"), CellValue(true),
                                       CellValue(Date{2020, 1, 1}), CellValue{}};
        std::vector<CellValue> column;
        for (int i = 0; i < 8; ++i) column.push_back(pool[rng() % pool.size()]);
        for (int i = 0; i < 8; ++i) s.set_cell(2 + i, 1, column[i]);
        auto before = extract_sheet_state(wb, "S").col_dtypes;

        std::shuffle(column.begin(), column.end(), rng);
        Workbook wb2;
        Sheet& s2 = wb2.add_sheet("S");
        s2.set_cell(1, 1, CellValue("C"));
        for (int i = 0; i < 8; ++i) s2.set_cell(2 + i, 1, column[i]);
        CHECK(extract_sheet_state(wb2, "S").col_dtypes == before);
    }
}

TEST_CASE("state extraction is pure: equal grids give equal states") {
    Workbook a = two_sheet_book();
    Workbook b = two_sheet_book();
    b.sheet("Sheet1").set_tab_color("#FF0000");  // styles do not affect the state
    CHECK(extract_sheet_state(a, "Sheet1") == extract_sheet_state(b, "Sheet1"));
}

TEST_CASE("snapshot restore undoes mutations") {
    Workbook wb = two_sheet_book();
    std::string before = canonical_bytes(wb);
    Snapshot snap = wb.take_snapshot();
    wb.sheet("Sheet1").set_cell(1, 1, CellValue("changed"));
    wb.sheet("Sheet1").set_cell(9, 9, CellValue(Decimal(1)));
    CHECK(canonical_bytes(wb) != before);
    wb.restore_snapshot(snap);
    CHECK(canonical_bytes(wb) == before);
    CHECK(wb.sheet("Sheet1").cell(1, 1).display() == "Name");
}

TEST_CASE("restore with no intervening mutations is a no-op") {
    Workbook wb = two_sheet_book();
    std::string before = canonical_bytes(wb);
    Snapshot snap = wb.take_snapshot();
    wb.restore_snapshot(snap);
    CHECK(canonical_bytes(wb) == before);
}

TEST_CASE("nested snapshots restore LIFO, matching deep copies") {
    Workbook wb = two_sheet_book();
    Workbook copy0 = wb;  // deep copy oracle
    Snapshot s1 = wb.take_snapshot();
    wb.sheet("Sheet1").set_cell(5, 1, CellValue("first"));
    Workbook copy1 = wb;
    Snapshot s2 = wb.take_snapshot();
    wb.sheet("Sheet1").set_cell(6, 1, CellValue("second"));

    wb.restore_snapshot(s2);
    CHECK(canonical_bytes(wb) == canonical_bytes(copy1));
    wb.restore_snapshot(s1);
    CHECK(canonical_bytes(wb) == canonical_bytes(copy0));
}

TEST_CASE("pruned snapshots are stale") {
    Workbook wb = two_sheet_book();
    Snapshot snap = wb.take_snapshot();
    wb.prune_snapshots();
    CHECK_THROWS_AS(wb.restore_snapshot(snap), StaleSnapshotError);
}

TEST_CASE("row insert and delete shift cells and dimensions") {
    Workbook wb = two_sheet_book();
    Sheet& s = wb.sheet("Sheet1");
    s.set_row_height(3, Decimal::parse("22.5"));
    s.insert_rows(2, 2);
    CHECK(s.cell(2, 1).is_empty());
    CHECK(s.cell(4, 1).display() == "Bob");
    CHECK(s.row_heights().count(5) == 1);
    s.delete_rows(2, 2);
    CHECK(s.cell(2, 1).display() == "Bob");
    CHECK(s.row_heights().count(3) == 1);
}

TEST_CASE("merge spans stay disjoint") {
    Workbook wb = two_sheet_book();
    Sheet& s = wb.sheet("Sheet1");
    CHECK(s.add_merge(RangeRef{"", 1, 1, 2, 2}));
    CHECK_FALSE(s.add_merge(RangeRef{"", 2, 2, 3, 3}));
    CHECK(s.add_merge(RangeRef{"", 3, 3, 4, 4}));
    CHECK(s.remove_merges_intersecting(RangeRef{"", 1, 1, 4, 4}) == 2);
}

TEST_CASE("300x26 sheet extracts in under 10ms") {
    Workbook wb;
    Sheet& s = wb.add_sheet("Big");
    for (int c = 1; c <= 26; ++c) s.set_cell(1, c, CellValue("H" + std::to_string(c)));
    for (int r = 2; r <= 300; ++r) {
        for (int c = 1; c <= 26; ++c) {
            s.set_cell(r, c, CellValue(Decimal(r * 100 + c)));
        }
    }
    auto t0 = std::chrono::steady_clock::now();
    SheetState st = extract_sheet_state(wb, "Big");
    auto t1 = std::chrono::steady_clock::now();
    CHECK(st.n_rows == 300);
    CHECK(st.n_cols == 26);
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() < 10);
}

TEST_CASE("grid comparison oracle agrees with canonical bytes") {
    Workbook a = two_sheet_book();
    Workbook b = two_sheet_book();
    CHECK(grids_equal(a.sheet("Sheet1"), b.sheet("Sheet1")));
    CHECK(canonical_bytes(a) == canonical_bytes(b));
    b.sheet("Sheet1").set_cell(2, 2, CellValue(Decimal(8)));
    CHECK_FALSE(grids_equal(a.sheet("Sheet1"), b.sheet("Sheet1")));
    CHECK(canonical_bytes(a) != canonical_bytes(b));
}

}  // TEST_SUITE
