#include "sheetloop/action.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace sheetloop;
using namespace sheetloop::actions;

TEST_SUITE("actions") {

TEST_CASE("vocabulary is exactly the 36 operations over 5 categories") {
    const auto& vocab = action_vocabulary();
    CHECK(vocab.size() == 36);

    std::map<OpCategory, int> per_category;
    std::set<std::string_view> names;
    for (const auto& e : vocab) {
        ++per_category[e.category];
        names.insert(e.verb);
        CHECK_FALSE(e.signature.empty());
    }
    CHECK(names.size() == 36);  // no duplicate keywords
    CHECK(per_category[OpCategory::ValueProcessing] == 10);
    CHECK(per_category[OpCategory::WorksheetManagement] == 6);
    CHECK(per_category[OpCategory::FormatAdjustment] == 10);
    CHECK(per_category[OpCategory::ChartDesign] == 8);
    CHECK(per_category[OpCategory::ContentSummary] == 2);
}

TEST_CASE("pivot creation is Content Summary") {
    for (const auto& e : action_vocabulary()) {
        if (e.id == Verb::Pivot) {
            CHECK(e.category == OpCategory::ContentSummary);
        }
    }
}

TEST_CASE("SET_CELL parses a calculate-family write") {
    auto out = parse_action("SET_CELL Sheet1!E1 41100");
    REQUIRE(out.ok());
    REQUIRE(out.program->statements.size() == 1);
    const ActionStmt& st = out.program->statements[0];
    CHECK(st.verb == Verb::SetCell);
    CHECK(st.args.cell->sheet == "Sheet1");
    CHECK(st.args.cell->row == 1);
    CHECK(st.args.cell->col == 5);
    CHECK(*st.args.literal.as_number() == Decimal(41100));
    CHECK_FALSE(out.program->declared_done);
}

TEST_CASE("SET_CELL literal flavors") {
    auto text = parse_action("SET_CELL A1 \"hello world\"");
    REQUIRE(text.ok());
    CHECK(*text.program->statements[0].args.literal.as_text() == "hello world");

    auto bare = parse_action("SET_CELL A1 hello world");
    REQUIRE(bare.ok());
    CHECK(*bare.program->statements[0].args.literal.as_text() == "hello world");

    auto date = parse_action("SET_CELL A1 12/27/1964");
    REQUIRE(date.ok());
    CHECK(date.program->statements[0].args.literal.as_date()->year == 1964);

    auto formula = parse_action("SET_CELL A1 =SUM(B1:B9)");
    REQUIRE(formula.ok());
    CHECK(formula.program->statements[0].args.literal.as_formula()->source == "=SUM(B1:B9)");

    auto flag = parse_action("SET_CELL A1 true");
    REQUIRE(flag.ok());
    CHECK(*flag.program->statements[0].args.literal.as_bool() == true);
}

TEST_CASE("SORT parses key column and direction") {
    auto out = parse_action("SORT Sheet1!A2:C31 BY 3 DESC");
    REQUIRE(out.ok());
    const ActionStmt& st = out.program->statements[0];
    CHECK(st.verb == Verb::Sort);
    CHECK(st.args.range->to_string() == "Sheet1!A2:C31");
    CHECK(st.args.index == 3);
    CHECK_FALSE(st.args.flag);  // DESC
}

TEST_CASE("unknown verb is UnsupportedVerb at token 1") {
    auto out = parse_action("FROB A1");
    REQUIRE_FALSE(out.ok());
    CHECK(out.error->error_kind == "UnsupportedVerb");
    CHECK(out.error->line == 1);
    CHECK(out.error->column == 1);
}

TEST_CASE("diagnostics carry line and column") {
    auto out = parse_action("SET_CELL A1 1\nSORT A1:B2 BY x ASC");
    REQUIRE_FALSE(out.ok());
    CHECK(out.error->error_kind == "ParseError");
    CHECK(out.error->line == 2);
    CHECK(out.error->column == 15);
}

TEST_CASE("DONE handling") {
    auto lone = parse_action("DONE");
    REQUIRE(lone.ok());
    CHECK(lone.program->declared_done);
    CHECK(lone.program->statements.empty());

    auto trailing = parse_action("SET_CELL Sheet1!E1 41100\nDONE");
    REQUIRE(trailing.ok());
    CHECK(trailing.program->declared_done);
    CHECK(trailing.program->statements.size() == 1);

    auto after = parse_action("DONE\nSET_CELL A1 1");
    CHECK_FALSE(after.ok());

    auto empty = parse_action("\n# only a comment\n");
    REQUIRE_FALSE(empty.ok());
    CHECK(empty.error->message.find("empty program") != std::string::npos);
}

TEST_CASE("comments and blank lines are skipped") {
    auto out = parse_action("# set the total\nSET_CELL A1 5  # inline note\n\nDONE");
    REQUIRE(out.ok());
    CHECK(out.program->statements.size() == 1);
}

TEST_CASE("quoted sheet names travel through ranges") {
    auto out = parse_action("HIGHLIGHT 'My Sheet'!A5:C5 FILL yellow");
    REQUIRE(out.ok());
    const ActionStmt& st = out.program->statements[0];
    CHECK(st.args.range->sheet == "My Sheet");
    CHECK(st.args.text == "#FFFF00");
}

TEST_CASE("every vocabulary verb round-trips through the parser") {
    // One representative statement per verb; parsing must succeed and bind
    // the right verb.
    const std::map<Verb, std::string> samples = {
        {Verb::SetCell, "SET_CELL A1 5"},
        {Verb::Insert, "INSERT ROWS S!3:4"},
        {Verb::Delete, "DELETE COLS S!B"},
        {Verb::AutoFill, "AUTOFILL A2:A3 TO A4:A9"},
        {Verb::Sort, "SORT A2:C9 BY 1 ASC"},
        {Verb::Copy, "COPY A1:B2 TO D1"},
        {Verb::Replace, "REPLACE A1:A9 old new"},
        {Verb::Hyperlink, "HYPERLINK A1 https://example.com Example"},
        {Verb::Dedupe, "DEDUPE A2:C9"},
        {Verb::Filter, "FILTER A2:C9 WHERE 2 > 40"},
        {Verb::CreateSheet, "CREATE_SHEET Report"},
        {Verb::DeleteSheet, "DELETE_SHEET Report"},
        {Verb::RenameSheet, "RENAME_SHEET Old New"},
        {Verb::TabColor, "TAB_COLOR Sheet1 red"},
        {Verb::PageSize, "PAGE_SIZE Sheet1 A3"},
        {Verb::Orientation, "ORIENTATION Sheet1 LANDSCAPE"},
        {Verb::FontName, "FONT_NAME A1:B2 Times New Roman"},
        {Verb::FontColor, "FONT_COLOR A1:B2 #FF0000"},
        {Verb::FontSize, "FONT_SIZE A1:B2 14"},
        {Verb::FontStyle, "FONT_STYLE A1:B2 BOLD ON"},
        {Verb::Underline, "UNDERLINE A1:B2 ON"},
        {Verb::Merge, "MERGE A1:B2"},
        {Verb::Align, "ALIGN A1:B2 CENTER MIDDLE"},
        {Verb::Resize, "RESIZE COLS S!B:D 14.5"},
        {Verb::Highlight, "HIGHLIGHT A5:C5 FILL yellow"},
        {Verb::NumberFormat, "NUMBER_FORMAT C2:C9 0.00"},
        {Verb::ChartType, "CHART_TYPE Sheet1 1 BAR"},
        {Verb::ChartData, "CHART_DATA Sheet1 1 A1:B9"},
        {Verb::ChartTitle, "CHART_TITLE Sheet1 1 Sales by Quarter"},
        {Verb::ChartLegend, "CHART_LEGEND Sheet1 1 RIGHT"},
        {Verb::ChartPosition, "CHART_POSITION Sheet1 1 E2"},
        {Verb::ChartAxis, "CHART_AXIS Sheet1 1 X Quarter"},
        {Verb::DataLabels, "DATA_LABELS Sheet1 1 ON"},
        {Verb::Trendline, "TRENDLINE Sheet1 1 LINEAR"},
        {Verb::Pivot, "PIVOT Sheet1 SOURCE A1:C9 ROWS B VALUES C FUNC COUNT"},
        {Verb::PivotFunction, "PIVOT_FUNCTION Sheet1 1 AVG"},
    };
    CHECK(samples.size() == action_vocabulary().size());
    for (const auto& [verb, text] : samples) {
        CAPTURE(text);
        auto out = parse_action(text);
        REQUIRE_MESSAGE(out.ok(), (out.error ? out.error->render() : std::string{}));
        CHECK(out.program->statements[0].verb == verb);
    }
}

TEST_CASE("RAW parses but is not vocabulary") {
    auto out = parse_action("RAW python print('hi')");
    REQUIRE(out.ok());
    CHECK(out.program->statements[0].verb == Verb::Raw);
    CHECK(out.program->statements[0].args.text == "python");
    CHECK(out.program->statements[0].args.text2 == "print('hi')");
}

}  // TEST_SUITE
