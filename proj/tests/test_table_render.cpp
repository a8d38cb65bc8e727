#include "sheetloop/table_render.hpp"

#include <doctest.h>

#include <random>

using namespace sheetloop;
using namespace sheetloop::serde;

namespace {

TableGrid name_age() {
    TableGrid g;
    g.headers = {"Name", "Age"};
    g.rows = {{Scalar{std::string("Bob")}, Scalar{Decimal(7)}}};
    return g;
}

// Deterministic random grid with mixed dtypes and at least one data row
// (a zero-row grid has no record keys in json_records, so identity holds
// only for populated grids). Text avoids ISO-date shapes by construction,
// since those intentionally parse as dates.
TableGrid random_grid(std::mt19937& rng, size_t max_rows = 20, size_t max_cols = 10) {
    TableGrid g;
    size_t cols = 1 + rng() % max_cols;
    size_t rows = 1 + rng() % max_rows;
    for (size_t c = 0; c < cols; ++c) g.headers.push_back("col_" + std::to_string(c + 1));
    auto rnd_text = [&] {
        static const char* alphabet[] = {"a", "B", "z", "_", " ", "|", "\"", "\\",
                                         "\n", "\t", "é", "漢", "🙂", "&", "<", ">"};
        std::string s;
        size_t len = rng() % 12;
        for (size_t i = 0; i < len; ++i) s += alphabet[rng() % 16];
        return s;
    };
    for (size_t r = 0; r < rows; ++r) {
        std::vector<Scalar> row;
        for (size_t c = 0; c < cols; ++c) {
            switch (rng() % 6) {
                case 0: row.push_back(EmptyCell{}); break;
                case 1: {
                    std::int64_t mant = static_cast<std::int64_t>(rng() % 2000000) - 1000000;
                    row.push_back(Decimal::from_mantissa(mant, static_cast<int>(rng() % 6)));
                    break;
                }
                case 2: row.push_back(rnd_text()); break;
                case 3: row.push_back(rng() % 2 == 0); break;
                case 4:
                    row.push_back(Date{2000 + static_cast<int>(rng() % 30),
                                       1 + static_cast<int>(rng() % 12),
                                       1 + static_cast<int>(rng() % 28)});
                    break;
                case 5:
                    row.push_back(DateTime{Date{2020, 6, 15}, static_cast<int>(rng() % 24),
                                           static_cast<int>(rng() % 60),
                                           static_cast<int>(rng() % 60)});
                    break;
            }
        }
        g.rows.push_back(std::move(row));
    }
    return g;
}

}  // namespace

TEST_SUITE("table_render") {

TEST_CASE("markdown format definition") {
    std::string md = render_table(name_age(), TableRepr::Markdown, RenderBudget::unlimited());
    CHECK(md == "| Name | Age |\n| ---- | --- |\n| Bob  | 7   |");
}

TEST_CASE("json empty grid renders []") {
    TableGrid g;
    g.headers = {"A"};
    CHECK(render_table(g, TableRepr::JsonRecords, RenderBudget::unlimited()) == "[]");
}

TEST_CASE("json records shape") {
    std::string json = render_table(name_age(), TableRepr::JsonRecords, RenderBudget::unlimited());
    CHECK(json == "[\n{\"Name\":\"Bob\",\"Age\":7}\n]");
}

TEST_CASE("dfloader shape") {
    std::string df = render_table(name_age(), TableRepr::DFLoader, RenderBudget::unlimited());
    CHECK(df == "pd.DataFrame({\n\"Name\": [\"Bob\"],\n\"Age\": [7]\n})");
}

TEST_CASE("html shape") {
    std::string html = render_table(name_age(), TableRepr::Html, RenderBudget::unlimited());
    CHECK(html ==
          "<table>\n<tr><th>Name</th><th>Age</th></tr>\n"
          "<tr><td>Bob</td><td>7</td></tr>\n</table>");
}

TEST_CASE("json round-trip identity on random grids") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        TableGrid g = random_grid(rng, 10, 5);
        std::string text = render_table(g, TableRepr::JsonRecords, RenderBudget::unlimited());
        TableGrid back = parse_table(text, TableRepr::JsonRecords);
        CHECK(back == g);
    }
}

TEST_CASE("dfloader round-trip identity on random grids") {
    std::mt19937 rng(20240818);
    for (int trial = 0; trial < 200; ++trial) {
        TableGrid g = random_grid(rng, 10, 5);
        std::string text = render_table(g, TableRepr::DFLoader, RenderBudget::unlimited());
        TableGrid back = parse_table(text, TableRepr::DFLoader);
        CHECK(back == g);
    }
}

TEST_CASE("unicode text survives byte-exact") {
    TableGrid g;
    g.headers = {"t"};
    g.rows = {{Scalar{std::string("héllo 漢字 🙂 \"q\" \\ | <tag>")}}};
    for (TableRepr r : {TableRepr::JsonRecords, TableRepr::DFLoader}) {
        TableGrid back = parse_table(render_table(g, r, RenderBudget::unlimited()), r);
        CHECK(back == g);
    }
}

TEST_CASE("dfloader mismatched column lengths is a ParseError") {
    CHECK_THROWS_AS(
        parse_table("pd.DataFrame({\"A\": [1, 2], \"B\": [1]})", TableRepr::DFLoader),
        TableParseError);
}

TEST_CASE("markdown and html are render-only") {
    CHECK_THROWS_AS(parse_table("| a |", TableRepr::Markdown), TableParseError);
    CHECK_THROWS_AS(parse_table("<table>", TableRepr::Html), TableParseError);
}

TEST_CASE("budget truncation keeps a parseable prefix and row count") {
    TableGrid g;
    g.headers = {"n", "text"};
    for (int i = 0; i < 400; ++i) {
        g.rows.push_back({Scalar{Decimal(i)}, Scalar{std::string("row number words")}});
    }
    RenderBudget b;
    b.max_chars = 2000;
    std::string out = render_table(g, TableRepr::JsonRecords, b);
    CHECK(out.size() <= 2000);
    CHECK(out.find("(400 rows total)") != std::string::npos);
    std::string prefix = out.substr(0, out.rfind("\n"));  // strip marker line
    TableGrid back = parse_table(prefix, TableRepr::JsonRecords);
    CHECK(back.headers == g.headers);
    CHECK(back.rows.size() < g.rows.size());
    CHECK(back.rows.size() > 0);
    // prefix rows are exactly the head of the source
    for (size_t i = 0; i < back.rows.size(); ++i) {
        CHECK(compare_scalars(back.rows[i][0], g.rows[i][0]) == 0);
    }
}

TEST_CASE("head_tail policy appends trailing rows after the marker") {
    TableGrid g;
    g.headers = {"n"};
    for (int i = 0; i < 100; ++i) g.rows.push_back({Scalar{Decimal(i)}});
    RenderBudget b;
    b.max_chars = 400;
    b.policy = RenderBudget::Policy::HeadTail;
    std::string out = render_table(g, TableRepr::JsonRecords, b);
    CHECK(out.size() <= 400);
    CHECK(out.find("(100 rows total)") != std::string::npos);
    CHECK(out.find("{\"n\":99}") != std::string::npos);
}

TEST_CASE("budget compliance holds for every representation on random grids") {
    std::mt19937 rng(20240819);
    for (int trial = 0; trial < 100; ++trial) {
        TableGrid g = random_grid(rng);
        for (TableRepr r : {TableRepr::JsonRecords, TableRepr::DFLoader, TableRepr::Markdown,
                            TableRepr::Html}) {
            for (size_t budget : {30u, 200u, 4000u}) {
                RenderBudget b;
                b.max_chars = budget;
                CHECK(render_table(g, r, b).size() <= budget);
            }
        }
    }
}

}  // TEST_SUITE
