#include "sheetloop/sql.hpp"

#include <doctest.h>

using namespace sheetloop;
using namespace sheetloop::sql;

namespace {

// The BookSales-style fixture (unit prices 38, 35, 43 as in the vague-
// requirements example).
Table books() {
    Table t;
    t.name = "w";
    t.columns = {"BookID", "Book_Name", "Unit_Price", "Stocked"};
    auto row = [&](const char* id, const char* name, int price, bool stocked) {
        t.rows.push_back({Scalar{std::string(id)}, Scalar{std::string(name)},
                          Scalar{Decimal(price)}, Scalar{stocked}});
    };
    row("BK-83024", "VB Programming", 38, true);
    row("BK-83026", "Access Programming", 35, false);
    row("BK-83029", "Network Technology", 43, true);
    return t;
}

Table run(const char* query, const Table& t) { return execute_sql(parse_sql(query), t); }

}  // namespace

TEST_SUITE("sql") {

TEST_CASE("count star") {
    Table t = books();
    // pad to 30 data rows
    while (t.rows.size() < 30) t.rows.push_back(t.rows[0]);
    Table r = run("SELECT COUNT(*) FROM w", t);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.columns == std::vector<std::string>{"COUNT(*)"});
    CHECK(std::get<Decimal>(r.rows[0][0]) == Decimal(30));
}

TEST_CASE("where filter keeps exactly the matching rows") {
    // brute-force oracle over the fixture rows
    Table t = books();
    Table r = run("SELECT * FROM w WHERE Unit_Price > 40", t);
    std::vector<std::vector<Scalar>> expected;
    for (const auto& row : t.rows) {
        if (std::get<Decimal>(row[2]) > Decimal(40)) expected.push_back(row);
    }
    REQUIRE(r.rows.size() == expected.size());
    REQUIRE(r.rows.size() == 1);
    CHECK(scalar_display(r.rows[0][1]) == "Network Technology");
}

TEST_CASE("like is case-insensitive; equals is case-sensitive") {
    Table t = books();
    Table like = run("SELECT Book_Name FROM w WHERE Book_Name LIKE '%access%'", t);
    REQUIRE(like.rows.size() == 1);
    CHECK(scalar_display(like.rows[0][0]) == "Access Programming");

    Table eq = run("SELECT * FROM w WHERE Book_Name = 'access programming'", t);
    CHECK(eq.rows.empty());
    Table eq2 = run("SELECT * FROM w WHERE Book_Name = 'Access Programming'", t);
    CHECK(eq2.rows.size() == 1);
}

TEST_CASE("the database-books query from the failure-analysis style") {
    Table t = books();
    Table r = run(
        "SELECT * FROM w WHERE Book_Name LIKE '%Access%' OR Book_Name LIKE '%SQL%'", t);
    REQUIRE(r.rows.size() == 1);
    CHECK(scalar_display(r.rows[0][0]) == "BK-83026");
}

TEST_CASE("order by, limit, distinct") {
    Table t = books();
    Table ordered = run("SELECT BookID FROM w ORDER BY Unit_Price DESC", t);
    CHECK(scalar_display(ordered.rows[0][0]) == "BK-83029");
    CHECK(scalar_display(ordered.rows[2][0]) == "BK-83026");

    Table limited = run("SELECT * FROM w ORDER BY Unit_Price ASC LIMIT 2", t);
    CHECK(limited.rows.size() == 2);

    Table over = run("SELECT * FROM w LIMIT 99", t);
    CHECK(over.rows.size() == 3);  // beyond row count returns everything

    Table t2 = books();
    t2.rows.push_back(t2.rows[0]);
    Table d = run("SELECT DISTINCT Book_Name FROM w", t2);
    CHECK(d.rows.size() == 3);
}

TEST_CASE("group by with aggregates") {
    Table t = books();
    t.rows.push_back({Scalar{std::string("BK-9")}, Scalar{std::string("VB Programming")},
                      Scalar{Decimal(42)}, Scalar{true}});
    Table g = run("SELECT Book_Name, COUNT(*), SUM(Unit_Price) FROM w GROUP BY Book_Name", t);
    REQUIRE(g.rows.size() == 3);
    CHECK(g.columns[1] == "COUNT(*)");
    CHECK(g.columns[2] == "SUM(Unit_Price)");
    // first group is first occurrence: VB Programming with rows 38 + 42
    CHECK(scalar_display(g.rows[0][0]) == "VB Programming");
    CHECK(std::get<Decimal>(g.rows[0][1]) == Decimal(2));
    CHECK(std::get<Decimal>(g.rows[0][2]) == Decimal(80));

    Table avg = run("SELECT AVG(Unit_Price), MIN(Unit_Price), MAX(Unit_Price) FROM w", books());
    CHECK(std::get<Decimal>(avg.rows[0][0]) ==
          (Decimal(38) + Decimal(35) + Decimal(43)) / Decimal(3));
    CHECK(std::get<Decimal>(avg.rows[0][1]) == Decimal(35));
    CHECK(std::get<Decimal>(avg.rows[0][2]) == Decimal(43));
}

TEST_CASE("in / between / not") {
    Table t = books();
    CHECK(run("SELECT * FROM w WHERE Unit_Price IN (35, 43)", t).rows.size() == 2);
    CHECK(run("SELECT * FROM w WHERE Unit_Price NOT IN (35, 43)", t).rows.size() == 1);
    CHECK(run("SELECT * FROM w WHERE Unit_Price BETWEEN 35 AND 40", t).rows.size() == 2);
    CHECK(run("SELECT * FROM w WHERE NOT Unit_Price > 40", t).rows.size() == 2);
    CHECK(run("SELECT * FROM w WHERE Stocked = TRUE", t).rows.size() == 2);
}

TEST_CASE("off-subset constructs are rejected at parse time") {
    CHECK_THROWS_AS(parse_sql("SELECT * FROM a JOIN b ON x = y"), SqlError);
    CHECK_THROWS_AS(parse_sql("SELECT ROW_NUMBER() OVER (ORDER BY x) FROM w"), SqlError);
    CHECK_THROWS_AS(parse_sql("INSERT INTO w VALUES (1)"), SqlError);
    CHECK_THROWS_AS(parse_sql("SELECT * FROM w HAVING x > 1"), SqlError);
    CHECK_THROWS_AS(parse_sql("SELECT * FROM (SELECT * FROM w)"), SqlError);
    CHECK_THROWS_AS(parse_sql("DELETE FROM w"), SqlError);
    CHECK_THROWS_AS(parse_sql("SELECT a FROM w GROUP BY b"), SqlError);
    try {
        parse_sql("SELECT * FROM w UNION SELECT * FROM v");
        FAIL("should have thrown");
    } catch (const SqlError& e) {
        CHECK(e.kind == SqlError::Kind::Parse);
    }
}

TEST_CASE("type mismatch in comparison is a runtime error") {
    Table t = books();
    try {
        run("SELECT * FROM w WHERE Book_Name > 40", t);
        FAIL("should have thrown");
    } catch (const SqlError& e) {
        CHECK(e.kind == SqlError::Kind::Runtime);
    }
    CHECK_THROWS_AS(run("SELECT * FROM w WHERE Nope = 1", t), SqlError);
}

TEST_CASE("empty cells never match predicates") {
    Table t;
    t.columns = {"V"};
    t.rows = {{Scalar{Decimal(1)}}, {Scalar{EmptyCell{}}}};
    CHECK(run("SELECT * FROM t WHERE V > 0", t).rows.size() == 1);
    CHECK(run("SELECT * FROM t WHERE V != 99", t).rows.size() == 1);
}

TEST_CASE("date columns compare against date-shaped strings") {
    Table t;
    t.columns = {"Name", "Born"};
    t.rows = {{Scalar{std::string("Alice")}, Scalar{Date{1964, 12, 27}}},
              {Scalar{std::string("John")}, Scalar{Date{1987, 7, 19}}}};
    Table r = run("SELECT Name FROM t WHERE Born > '1985-01-01'", t);
    REQUIRE(r.rows.size() == 1);
    CHECK(scalar_display(r.rows[0][0]) == "John");

    // text dates in mixed sources still order chronologically
    Table t2;
    t2.columns = {"Born"};
    t2.rows = {{Scalar{std::string("12/27/1964")}}, {Scalar{std::string("7/19/1987")}}};
    Table r2 = run("SELECT * FROM t2 WHERE Born > '1985-01-01'", t2);
    CHECK(r2.rows.size() == 1);
}

TEST_CASE("query determinism") {
    Table t = books();
    for (int i = 0; i < 3; ++i) {
        Table a = run("SELECT Book_Name FROM w WHERE Unit_Price >= 35 ORDER BY Book_Name", t);
        Table b = run("SELECT Book_Name FROM w WHERE Unit_Price >= 35 ORDER BY Book_Name", t);
        REQUIRE(a.rows.size() == b.rows.size());
        for (size_t r = 0; r < a.rows.size(); ++r) {
            CHECK(compare_scalars(a.rows[r][0], b.rows[r][0]) == 0);
        }
    }
}

}  // TEST_SUITE
