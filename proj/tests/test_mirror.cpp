#include "sheetloop/informer.hpp"
#include "sheetloop/mirror.hpp"
#include "sheetloop/sandbox.hpp"

#include <doctest.h>

#include <chrono>
#include <random>

using namespace sheetloop;
using namespace sheetloop::informer;

namespace {

Workbook orders() {
    Workbook wb;
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
    s.set_cell(4, 1, CellValue("BK-83029"));
    s.set_cell(4, 2, CellValue("Network Technology"));
    s.set_cell(4, 3, CellValue(Decimal(43)));
    Sheet& t = wb.add_sheet("Summary");
    t.set_cell(1, 1, CellValue("Total"));
    t.set_cell(2, 1, CellValue(Decimal(116)));
    return wb;
}

bool tables_equal(const sql::Table& a, const sql::Table& b) {
    if (a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
    for (size_t r = 0; r < a.rows.size(); ++r) {
        if (a.rows[r].size() != b.rows[r].size()) return false;
        for (size_t c = 0; c < a.rows[r].size(); ++c) {
            if (compare_scalars(a.rows[r][c], b.rows[r][c]) != 0 ||
                scalar_kind(a.rows[r][c]) != scalar_kind(b.rows[r][c])) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("mirror") {

TEST_CASE("header sanitization") {
    CHECK(sanitize_headers({"BookID", "Book Name", "Unit Price"}) ==
          std::vector<std::string>{"BookID", "Book_Name", "Unit_Price"});
    CHECK(sanitize_headers({"a", "a", "A"}) == std::vector<std::string>{"a", "a_2", "A_3"});
    CHECK(sanitize_headers({"", "2024 Sales", "x!!y"}) ==
          std::vector<std::string>{"col1", "c2024_Sales", "xy"});
    std::vector<std::string> many(100, "dup");
    CHECK_THROWS_AS(sanitize_headers(std::vector<std::string>(101, "dup")),
                    HeaderCollisionUnresolvable);
    CHECK(sanitize_headers(many).size() == 100);  // exactly 99 duplicates is fine
}

TEST_CASE("build: one table per sheet, w aliases the primary sheet") {
    Workbook wb = orders();
    RelationalMirror m = RelationalMirror::build(wb);
    REQUIRE(m.tables().size() == 2);
    CHECK(m.tables()[0].aliases[0] == "w");
    CHECK(m.tables()[1].aliases[0] == "w2");
    CHECK(m.resolve("w") == &m.tables()[0].table);
    CHECK(m.resolve("w2") == &m.tables()[1].table);
    CHECK(m.resolve("Orders") == &m.tables()[0].table);
    CHECK(m.resolve("orders") == &m.tables()[0].table);  // case-insensitive
    CHECK(m.resolve("nope") == nullptr);
    CHECK(m.tables()[0].table.columns ==
          std::vector<std::string>{"BookID", "Book_Name", "Unit_Price"});
    CHECK(m.tables()[0].table.rows.size() == 3);
}

TEST_CASE("select * equals the sheet's data rows in order") {
    Workbook wb = orders();
    RelationalMirror m = RelationalMirror::build(wb);
    sql::Table r = sql::execute_sql(sql::parse_sql("SELECT * FROM w"), *m.resolve("w"));
    const Sheet& s = wb.sheet("Orders");
    REQUIRE(r.rows.size() == 3);
    for (int i = 0; i < 3; ++i) {
        for (int c = 0; c < 3; ++c) {
            CHECK(compare_scalars(r.rows[i][c], s.cell(2 + i, 1 + c).scalar()) == 0);
        }
    }
}

TEST_CASE("synchronize rebuilds and stamps the version") {
    Workbook wb = orders();
    RelationalMirror m = RelationalMirror::build(wb);
    CHECK(m.sync_version() == 0);
    wb.sheet("Orders").set_cell(2, 3, CellValue(Decimal(99)));
    m.synchronize(wb, 1);
    CHECK(m.sync_version() == 1);
    sql::Table r = sql::execute_sql(sql::parse_sql("SELECT * FROM w WHERE Unit_Price > 90"),
                                    *m.resolve("w"));
    CHECK(r.rows.size() == 1);
}

TEST_CASE("after row delete COUNT(*) drops by one") {
    Workbook wb = orders();
    RelationalMirror m = RelationalMirror::build(wb);
    auto count = [&] {
        sql::Table r =
            sql::execute_sql(sql::parse_sql("SELECT COUNT(*) FROM w"), *m.resolve("w"));
        return std::get<Decimal>(r.rows[0][0]);
    };
    CHECK(count() == Decimal(3));
    wb.sheet("Orders").delete_rows(2, 1);
    m.synchronize(wb, 1);
    CHECK(count() == Decimal(2));
}

TEST_CASE("randomized committed actions keep the mirror equal to a fresh build") {
    Workbook wb = orders();
    RelationalMirror m = RelationalMirror::build(wb);
    std::mt19937 rng(99);
    const char* programs[] = {
        "SET_CELL Orders!C2 77",
        "SET_CELL Orders!B5 NewBook",
        "SORT Orders!A2:C4 BY 3 ASC",
        "DELETE CELLS Orders!B3:B3",
        "HIGHLIGHT Orders!A2:C2 FILL yellow",
    };
    long committed = 0;
    for (int step = 0; step < 50; ++step) {
        auto parsed = actions::parse_action(programs[rng() % 5]);
        REQUIRE(parsed.ok());
        actions::Observation obs = actions::execute_in_sandbox(wb, *parsed.program);
        if (!obs.ok()) continue;
        m.synchronize(wb, ++committed);
        RelationalMirror fresh = RelationalMirror::build(wb);
        REQUIRE(m.tables().size() == fresh.tables().size());
        for (size_t t = 0; t < m.tables().size(); ++t) {
            CHECK(tables_equal(m.tables()[t].table, fresh.tables()[t].table));
        }
    }
    CHECK(m.sync_version() == committed);
}

TEST_CASE("300x26 mirror builds in under 50ms") {
    Workbook wb;
    Sheet& s = wb.add_sheet("Big");
    for (int c = 1; c <= 26; ++c) s.set_cell(1, c, CellValue("H" + std::to_string(c)));
    for (int r = 2; r <= 300; ++r) {
        for (int c = 1; c <= 26; ++c) s.set_cell(r, c, CellValue(Decimal(r * 31 + c)));
    }
    auto t0 = std::chrono::steady_clock::now();
    RelationalMirror m = RelationalMirror::build(wb);
    auto t1 = std::chrono::steady_clock::now();
    CHECK(m.tables()[0].table.rows.size() == 299);
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() < 50);
}

TEST_CASE("execute_query truncates with head bias") {
    Workbook wb = orders();
    RelationalMirror m = RelationalMirror::build(wb);
    Subview v = execute_query(m, sql::parse_sql("SELECT * FROM w"), 2, 1);
    CHECK(v.truncated);
    CHECK(v.rows.size() == 2);
    CHECK(v.total_rows == 3);
    CHECK(scalar_display(v.rows[0][0]) == "BK-83024");

    Subview all = execute_query(m, sql::parse_sql("SELECT * FROM w LIMIT 99"), 50, 1);
    CHECK_FALSE(all.truncated);
    CHECK(all.rows.size() == 3);
}

}  // TEST_SUITE
