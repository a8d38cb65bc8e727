#include "sheetloop/checklist.hpp"

#include "sheetloop/color.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace sheetloop::evalkit {

namespace {

using Json = nlohmann::ordered_json;

const struct {
    CriterionKind kind;
    const char* name;
} kCriteria[] = {
    {CriterionKind::CellValues, "cell_values"},
    {CriterionKind::FormulaText, "formula_text"},
    {CriterionKind::StyleAttrs, "style_attrs"},
    {CriterionKind::NumberFormat, "number_format"},
    {CriterionKind::SheetExists, "sheet_exists"},
    {CriterionKind::SheetName, "sheet_name"},
    {CriterionKind::SheetTabColor, "sheet_tab_color"},
    {CriterionKind::PageSetup, "page_setup"},
    {CriterionKind::RowColDims, "row_col_dims"},
    {CriterionKind::MergeState, "merge_state"},
    {CriterionKind::ChartAttrs, "chart_attrs"},
    {CriterionKind::PivotAttrs, "pivot_attrs"},
    {CriterionKind::SortedBy, "sorted_by"},
    {CriterionKind::DistinctRows, "distinct_rows"},
    {CriterionKind::HyperlinkTarget, "hyperlink_target"},
};

}  // namespace

const std::vector<std::string> kManipulationCategories = {
    "Value Processing", "Worksheet Management", "Format Adjustment", "Chart Design",
    "Content Summary",
};

const std::vector<std::string> kReasoningChallenges = {
    "complex computation logic",
    "vague requirements",
    "incoherent data format",
    "information extraction",
};

const char* to_string(CriterionKind k) {
    for (const auto& c : kCriteria) {
        if (c.kind == k) return c.name;
    }
    return "?";
}

std::optional<CriterionKind> criterion_from(std::string_view name) {
    for (const auto& c : kCriteria) {
        if (name == c.name) return c.kind;
    }
    return std::nullopt;
}

Area Area::parse(const std::string& text) {
    Area a;
    if (text == "sheet") {
        a.kind = Kind::SheetProperty;
        return a;
    }
    for (auto [prefix, kind] : {std::pair{"chart ", Kind::Chart}, {"pivot ", Kind::Pivot}}) {
        if (text.rfind(prefix, 0) == 0) {
            a.kind = kind;
            try {
                a.ordinal = std::stoi(text.substr(std::strlen(prefix)));
            } catch (const std::exception&) {
                throw SchemaError("bad area selector '" + text + "'");
            }
            if (a.ordinal < 1) throw SchemaError("area ordinal must be >= 1 in '" + text + "'");
            return a;
        }
    }
    auto r = parse_range_ref(text);
    if (!r || !r->sheet.empty()) {
        throw SchemaError("bad area '" + text + "' (expected range, 'chart n', 'pivot n' or 'sheet')");
    }
    a.kind = Kind::Range;
    a.range = *r;
    return a;
}

std::string Area::to_string() const {
    switch (kind) {
        case Kind::Range: return range.to_string();
        case Kind::Chart: return "chart " + std::to_string(ordinal);
        case Kind::Pivot: return "pivot " + std::to_string(ordinal);
        case Kind::SheetProperty: return "sheet";
    }
    return "?";
}

std::string horizon_for(size_t subtasks) {
    if (subtasks >= 2 && subtasks <= 4) return "short";
    if (subtasks >= 5 && subtasks <= 7) return "medium";
    if (subtasks >= 8 && subtasks <= 10) return "long";
    throw SchemaError("checklist must have 2..10 items, got " + std::to_string(subtasks));
}

std::string TaskSpec::horizon_level() const { return horizon_for(checklist.size()); }

namespace {

// Per-kind required property keys; validated at load so a bad checklist
// fails before any episode starts.
void validate_properties(CriterionKind kind, const Json& props) {
    auto need = [&](const char* key) {
        if (!props.contains(key)) {
            throw SchemaError(std::string(to_string(kind)) + " requires property '" + key + "'");
        }
    };
    switch (kind) {
        case CriterionKind::CellValues: need("values"); break;
        case CriterionKind::FormulaText: need("formulas"); break;
        case CriterionKind::StyleAttrs:
            if (props.empty()) throw SchemaError("style_attrs needs at least one attribute");
            break;
        case CriterionKind::NumberFormat: need("format"); break;
        case CriterionKind::SheetExists: need("exists"); break;
        case CriterionKind::SheetName: need("name"); break;
        case CriterionKind::SheetTabColor: need("color"); break;
        case CriterionKind::PageSetup:
            if (!props.contains("orientation") && !props.contains("size")) {
                throw SchemaError("page_setup needs 'orientation' and/or 'size'");
            }
            break;
        case CriterionKind::RowColDims:
            if (!props.contains("rows") && !props.contains("cols")) {
                throw SchemaError("row_col_dims needs 'rows' and/or 'cols'");
            }
            break;
        case CriterionKind::MergeState: need("merged"); break;
        case CriterionKind::ChartAttrs:
            if (props.empty()) throw SchemaError("chart_attrs needs at least one attribute");
            break;
        case CriterionKind::PivotAttrs:
            if (props.empty()) throw SchemaError("pivot_attrs needs at least one attribute");
            break;
        case CriterionKind::SortedBy:
            need("key_col");
            need("order");
            break;
        case CriterionKind::DistinctRows: break;
        case CriterionKind::HyperlinkTarget: need("url"); break;
    }
}

void validate_area_for(CriterionKind kind, const Area& area) {
    bool wants_chart = kind == CriterionKind::ChartAttrs;
    bool wants_pivot = kind == CriterionKind::PivotAttrs;
    if (wants_chart && area.kind != Area::Kind::Chart) {
        throw SchemaError("chart_attrs requires a 'chart n' area");
    }
    if (wants_pivot && area.kind != Area::Kind::Pivot) {
        throw SchemaError("pivot_attrs requires a 'pivot n' area");
    }
    bool sheet_level = kind == CriterionKind::SheetExists || kind == CriterionKind::SheetName ||
                       kind == CriterionKind::SheetTabColor ||
                       kind == CriterionKind::PageSetup || kind == CriterionKind::RowColDims;
    if (!wants_chart && !wants_pivot && !sheet_level && area.kind != Area::Kind::Range) {
        throw SchemaError(std::string(to_string(kind)) + " requires a range area");
    }
}

}  // namespace

TaskSpec TaskSpec::parse(const Json& doc) {
    TaskSpec t;
    t.id = doc.value("id", "");
    if (t.id.empty()) throw SchemaError("task missing 'id'");
    t.workbook_ref = doc.value("workbook", "");
    t.description = doc.value("description", "");
    t.instruction = doc.value("instruction", "");
    if (t.instruction.empty()) throw SchemaError("task '" + t.id + "' missing 'instruction'");

    for (const auto& c : doc.value("categories", Json::array())) {
        std::string name = c.get<std::string>();
        if (std::find(kManipulationCategories.begin(), kManipulationCategories.end(), name) ==
            kManipulationCategories.end()) {
            throw SchemaError("unknown manipulation category '" + name + "'");
        }
        t.categories.push_back(name);
    }
    for (const auto& c : doc.value("reasoning_challenges", Json::array())) {
        std::string name = c.get<std::string>();
        if (std::find(kReasoningChallenges.begin(), kReasoningChallenges.end(), name) ==
            kReasoningChallenges.end()) {
            throw SchemaError("unknown reasoning challenge '" + name + "'");
        }
        t.reasoning_challenges.push_back(name);
    }

    if (!doc.contains("checklist") || !doc["checklist"].is_array()) {
        throw SchemaError("task '" + t.id + "' missing 'checklist'");
    }
    for (const auto& ij : doc["checklist"]) {
        ChecklistItem item;
        auto kind = criterion_from(ij.value("criterion", ""));
        if (!kind) {
            throw SchemaError("unknown criterion '" + ij.value("criterion", "") + "'");
        }
        item.criterion = *kind;
        item.sheet_index = ij.value("sheet_index", 1);
        if (item.sheet_index < 1) throw SchemaError("sheet_index must be >= 1");
        item.area = Area::parse(ij.value("area", ""));
        item.properties = ij.value("properties", Json::object());
        item.category = ij.value("category", "");
        if (!item.category.empty() &&
            std::find(kManipulationCategories.begin(), kManipulationCategories.end(),
                      item.category) == kManipulationCategories.end()) {
            throw SchemaError("unknown item category '" + item.category + "'");
        }
        validate_properties(item.criterion, item.properties);
        validate_area_for(item.criterion, item.area);
        t.checklist.push_back(std::move(item));
    }

    std::string derived = horizon_for(t.checklist.size());
    if (doc.contains("horizon_level") && doc["horizon_level"].get<std::string>() != derived) {
        throw SchemaError("task '" + t.id + "': declared horizon_level '" +
                          doc["horizon_level"].get<std::string>() +
                          "' contradicts checklist length " +
                          std::to_string(t.checklist.size()) + " (" + derived + ")");
    }
    return t;
}

TaskSpec TaskSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open task file '" + path + "'");
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw SchemaError("bad task JSON in '" + path + "': " + e.what());
    }
    return parse(doc);
}

// ---- evaluation ----

namespace {

struct ItemFail {
    std::string detail;
};

[[noreturn]] void item_fail(const std::string& detail) { throw ItemFail{detail}; }

std::string strip_trailing(const std::string& s) {
    std::string out = s;
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
    return out;
}

Decimal tolerance_of(const Json& props) {
    if (props.contains("tolerance")) {
        return Decimal::parse(props["tolerance"].get<std::string>());
    }
    return Decimal::parse("1e-9");
}

Scalar decode_expected(const Json& j) {
    if (j.is_null()) return EmptyCell{};
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_object()) {
        if (j.contains("n")) return Decimal::parse(j["n"].get<std::string>());
        if (j.contains("d")) {
            auto d = Date::parse(j["d"].get<std::string>());
            if (d) return *d;
        }
        if (j.contains("dt")) {
            auto dt = DateTime::parse(j["dt"].get<std::string>());
            if (dt) return *dt;
        }
    }
    throw SchemaError("bad expected value encoding: " + j.dump());
}

bool scalars_match(const Scalar& actual, const Scalar& expected, const Decimal& tol) {
    ValueKind ka = scalar_kind(actual), ke = scalar_kind(expected);
    if (ke == ValueKind::Empty) return ka == ValueKind::Empty;
    if (ka != ke) return false;
    if (ka == ValueKind::Number) {
        return std::get<Decimal>(actual).within(std::get<Decimal>(expected), tol);
    }
    if (ka == ValueKind::Text) {
        return strip_trailing(std::get<std::string>(actual)) ==
               strip_trailing(std::get<std::string>(expected));
    }
    return compare_scalars(actual, expected) == 0;
}

const Sheet& resolve_sheet(const Workbook& wb, int sheet_index) {
    if (sheet_index < 1 || static_cast<size_t>(sheet_index) > wb.sheets().size()) {
        item_fail("area unresolvable: sheet index " + std::to_string(sheet_index) +
                  " out of range (" + std::to_string(wb.sheets().size()) + " sheet(s))");
    }
    return wb.sheets()[static_cast<size_t>(sheet_index - 1)];
}

std::string canon_color_or_fail(const std::string& text) {
    auto c = parse_color(text);
    if (!c) item_fail("bad color in properties: '" + text + "'");
    return *c;
}

void check_cell_values(const Sheet& s, const Area& area, const Json& props) {
    const Json& values = props["values"];
    if (!values.is_array()) item_fail("'values' must be a 2D array");
    Decimal tol = tolerance_of(props);
    const RangeRef& r = area.range;
    if (static_cast<int>(values.size()) != r.height()) {
        item_fail("'values' has " + std::to_string(values.size()) + " row(s), area " +
                  r.to_string() + " has " + std::to_string(r.height()));
    }
    for (int i = 0; i < r.height(); ++i) {
        const Json& row = values[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != r.width()) {
            item_fail("'values' row " + std::to_string(i + 1) + " does not match area width");
        }
        for (int j = 0; j < r.width(); ++j) {
            Scalar expected = decode_expected(row[static_cast<size_t>(j)]);
            Scalar actual = s.cell(r.row1 + i, r.col1 + j).scalar();
            if (!scalars_match(actual, expected, tol)) {
                CellRef ref{"", r.row1 + i, r.col1 + j};
                item_fail("cell " + ref.to_string() + ": expected " +
                          scalar_display(expected) + " (" +
                          sheetloop::to_string(scalar_kind(expected)) + "), got " +
                          scalar_display(actual) + " (" +
                          sheetloop::to_string(scalar_kind(actual)) + ")");
            }
        }
    }
}

void check_formula_text(const Sheet& s, const Area& area, const Json& props) {
    const Json& formulas = props["formulas"];
    const RangeRef& r = area.range;
    if (!formulas.is_array() || static_cast<int>(formulas.size()) != r.height()) {
        item_fail("'formulas' shape does not match area " + r.to_string());
    }
    for (int i = 0; i < r.height(); ++i) {
        const Json& row = formulas[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != r.width()) {
            item_fail("'formulas' row " + std::to_string(i + 1) + " does not match area width");
        }
        for (int j = 0; j < r.width(); ++j) {
            CellRef ref{"", r.row1 + i, r.col1 + j};
            const Formula* f = s.cell(ref.row, ref.col).as_formula();
            std::string expected = row[static_cast<size_t>(j)].get<std::string>();
            if (!f) item_fail("cell " + ref.to_string() + " holds no formula");
            if (strip_trailing(f->source) != strip_trailing(expected)) {
                item_fail("cell " + ref.to_string() + ": formula is '" + f->source +
                          "', expected '" + expected + "'");
            }
        }
    }
}

void check_style_attrs(const Sheet& s, const Area& area, const Json& props) {
    Decimal tol = tolerance_of(props);
    const RangeRef& r = area.range;
    for (int row = r.row1; row <= r.row2; ++row) {
        for (int col = r.col1; col <= r.col2; ++col) {
            CellStyle st = s.style(row, col);
            CellRef ref{"", row, col};
            auto fail_attr = [&](const char* attr, const std::string& want,
                                 const std::string& got) {
                item_fail("cell " + ref.to_string() + ": " + attr + " is " +
                          (got.empty() ? "unset" : "'" + got + "'") + ", expected '" + want +
                          "'");
            };
            for (const auto& [key, val] : props.items()) {
                if (key == "tolerance") continue;
                if (key == "fill") {
                    std::string want = canon_color_or_fail(val.get<std::string>());
                    if (!st.fill_color || *st.fill_color != want) {
                        fail_attr("fill", want, st.fill_color.value_or(""));
                    }
                } else if (key == "color") {
                    std::string want = canon_color_or_fail(val.get<std::string>());
                    if (!st.font_color || *st.font_color != want) {
                        fail_attr("font color", want, st.font_color.value_or(""));
                    }
                } else if (key == "font") {
                    if (!st.font_name || *st.font_name != val.get<std::string>()) {
                        fail_attr("font", val.get<std::string>(), st.font_name.value_or(""));
                    }
                } else if (key == "size") {
                    Decimal want = Decimal::parse(val.get<std::string>());
                    if (!st.font_size || !st.font_size->within(want, tol)) {
                        fail_attr("font size", want.to_string(),
                                  st.font_size ? st.font_size->to_string() : "");
                    }
                } else if (key == "bold" || key == "italic" || key == "underline") {
                    bool want = val.get<bool>();
                    std::optional<bool> got = key == "bold"
                                                  ? st.bold
                                                  : (key == "italic" ? st.italic : st.underline);
                    if (got.value_or(false) != want) {
                        fail_attr(key.c_str(), want ? "true" : "false",
                                  got ? (*got ? "true" : "false") : "");
                    }
                } else if (key == "halign" || key == "valign") {
                    std::string want = val.get<std::string>();
                    const auto& got = key == "halign" ? st.halign : st.valign;
                    if (!got || *got != want) fail_attr(key.c_str(), want, got.value_or(""));
                } else {
                    item_fail("style_attrs does not understand '" + key + "'");
                }
            }
        }
    }
}

void check_number_format(const Sheet& s, const Area& area, const Json& props) {
    std::string want = props["format"].get<std::string>();
    const RangeRef& r = area.range;
    for (int row = r.row1; row <= r.row2; ++row) {
        for (int col = r.col1; col <= r.col2; ++col) {
            std::string got = s.format(row, col);
            if (got != want) {
                CellRef ref{"", row, col};
                item_fail("cell " + ref.to_string() + ": number format is '" + got +
                          "', expected '" + want + "'");
            }
        }
    }
}

void check_row_col_dims(const Sheet& s, const Json& props) {
    Decimal tol = tolerance_of(props);
    if (props.contains("rows")) {
        for (const auto& [key, val] : props["rows"].items()) {
            int row = std::stoi(key);
            Decimal want = Decimal::parse(val.get<std::string>());
            auto it = s.row_heights().find(row);
            if (it == s.row_heights().end() || !it->second.within(want, tol)) {
                item_fail("row " + key + " height is " +
                          (it == s.row_heights().end() ? "default" : it->second.to_string()) +
                          ", expected " + want.to_string());
            }
        }
    }
    if (props.contains("cols")) {
        for (const auto& [key, val] : props["cols"].items()) {
            auto col = column_from_letters(key);
            if (!col) item_fail("bad column key '" + key + "'");
            Decimal want = Decimal::parse(val.get<std::string>());
            auto it = s.col_widths().find(*col);
            if (it == s.col_widths().end() || !it->second.within(want, tol)) {
                item_fail("column " + key + " width is " +
                          (it == s.col_widths().end() ? "default" : it->second.to_string()) +
                          ", expected " + want.to_string());
            }
        }
    }
}

void check_merge_state(const Sheet& s, const Area& area, const Json& props) {
    bool want_merged = props["merged"].get<bool>();
    RangeRef r = area.range;
    r.sheet.clear();
    bool exact = std::any_of(s.merges().begin(), s.merges().end(),
                             [&](const RangeRef& m) { return m == r; });
    bool intersecting = std::any_of(s.merges().begin(), s.merges().end(),
                                    [&](const RangeRef& m) { return m.intersects(r); });
    if (want_merged && !exact) {
        item_fail("range " + r.to_string() + " is not a merged span" +
                  (intersecting ? " (a different span intersects it)" : ""));
    }
    if (!want_merged && intersecting) {
        item_fail("range " + r.to_string() + " intersects a merged span");
    }
}

void check_chart_attrs(const Sheet& s, const Area& area, const Json& props) {
    if (area.ordinal < 1 || static_cast<size_t>(area.ordinal) > s.charts().size()) {
        item_fail("area unresolvable: chart " + std::to_string(area.ordinal) +
                  " does not exist (" + std::to_string(s.charts().size()) + " chart(s))");
    }
    const ChartSpec& c = s.charts()[static_cast<size_t>(area.ordinal - 1)];
    for (const auto& [key, val] : props.items()) {
        if (key == "type") {
            if (std::string(to_string(c.type)) != val.get<std::string>()) {
                item_fail("chart type is " + std::string(to_string(c.type)) + ", expected " +
                          val.get<std::string>());
            }
        } else if (key == "data") {
            auto want = parse_range_ref(val.get<std::string>());
            if (!want) item_fail("bad 'data' range in properties");
            if (!c.data_range || !(*c.data_range == *want)) {
                item_fail("chart data range is " +
                          (c.data_range ? c.data_range->to_string() : "unset") + ", expected " +
                          want->to_string());
            }
        } else if (key == "title") {
            if (!c.title || strip_trailing(*c.title) != strip_trailing(val.get<std::string>())) {
                item_fail("chart title is " + (c.title ? "'" + *c.title + "'" : "unset") +
                          ", expected '" + val.get<std::string>() + "'");
            }
        } else if (key == "legend") {
            std::string want = val.get<std::string>();
            std::string got = c.legend.value_or("none");
            if (got != want) item_fail("chart legend is " + got + ", expected " + want);
        } else if (key == "anchor") {
            auto want = parse_cell_ref(val.get<std::string>());
            if (!want) item_fail("bad 'anchor' in properties");
            if (!(c.anchor == *want)) {
                item_fail("chart anchor is " + c.anchor.to_string() + ", expected " +
                          want->to_string());
            }
        } else if (key == "x_axis" || key == "y_axis") {
            const auto& got = key == "x_axis" ? c.x_axis_title : c.y_axis_title;
            if (!got || *got != val.get<std::string>()) {
                item_fail(key + " title is " + (got ? "'" + *got + "'" : "unset") +
                          ", expected '" + val.get<std::string>() + "'");
            }
        } else if (key == "data_labels") {
            if (c.data_labels != val.get<bool>()) {
                item_fail(std::string("data labels are ") + (c.data_labels ? "on" : "off") +
                          ", expected " + (val.get<bool>() ? "on" : "off"));
            }
        } else if (key == "trendline") {
            std::string want = val.get<std::string>();
            std::string got = c.trendline.value_or("none");
            if (got != want) item_fail("trendline is " + got + ", expected " + want);
        } else {
            item_fail("chart_attrs does not understand '" + key + "'");
        }
    }
}

void check_pivot_attrs(const Sheet& s, const Area& area, const Json& props) {
    if (area.ordinal < 1 || static_cast<size_t>(area.ordinal) > s.pivots().size()) {
        item_fail("area unresolvable: pivot " + std::to_string(area.ordinal) +
                  " does not exist (" + std::to_string(s.pivots().size()) + " pivot(s))");
    }
    const PivotSpec& p = s.pivots()[static_cast<size_t>(area.ordinal - 1)];
    for (const auto& [key, val] : props.items()) {
        if (key == "source") {
            auto want = parse_range_ref(val.get<std::string>());
            if (!want || !(p.source == *want)) {
                item_fail("pivot source is " + p.source.to_string() + ", expected " +
                          val.get<std::string>());
            }
        } else if (key == "rows") {
            auto want = column_from_letters(val.get<std::string>());
            if (!want || p.rows_col != *want) {
                item_fail("pivot rows column is " + column_letters(p.rows_col) + ", expected " +
                          val.get<std::string>());
            }
        } else if (key == "cols") {
            auto want = column_from_letters(val.get<std::string>());
            if (!want || !p.cols_col || *p.cols_col != *want) {
                item_fail("pivot cols column is " +
                          (p.cols_col ? column_letters(*p.cols_col) : "unset") + ", expected " +
                          val.get<std::string>());
            }
        } else if (key == "values") {
            auto want = column_from_letters(val.get<std::string>());
            if (!want || p.values_col != *want) {
                item_fail("pivot values column is " + column_letters(p.values_col) +
                          ", expected " + val.get<std::string>());
            }
        } else if (key == "func") {
            if (p.func != val.get<std::string>()) {
                item_fail("pivot function is " + p.func + ", expected " +
                          val.get<std::string>());
            }
        } else {
            item_fail("pivot_attrs does not understand '" + key + "'");
        }
    }
}

void check_sorted_by(const Sheet& s, const Area& area, const Json& props) {
    const RangeRef& r = area.range;
    int key_col = props["key_col"].get<int>();
    if (key_col < 1 || key_col > r.width()) {
        item_fail("key_col " + std::to_string(key_col) + " outside area width " +
                  std::to_string(r.width()));
    }
    std::string order = props["order"].get<std::string>();
    if (order != "asc" && order != "desc") item_fail("order must be 'asc' or 'desc'");
    bool asc = order == "asc";
    int col = r.col1 + key_col - 1;

    // Blank keys must trail the data; non-blank keys must be monotone.
    bool seen_blank = false;
    std::optional<Scalar> prev;
    for (int row = r.row1; row <= r.row2; ++row) {
        Scalar v = s.cell(row, col).scalar();
        if (std::holds_alternative<EmptyCell>(v)) {
            seen_blank = true;
            continue;
        }
        if (seen_blank) {
            item_fail("row " + std::to_string(row) + " has a value below blank keys");
        }
        if (prev) {
            int c = compare_scalars(*prev, v);
            if (asc ? c > 0 : c < 0) {
                item_fail("rows " + std::to_string(row - 1) + " and " + std::to_string(row) +
                          " are out of " + order + " order on column " + column_letters(col));
            }
        }
        prev = v;
    }
}

void check_distinct_rows(const Sheet& s, const Area& area) {
    const RangeRef& r = area.range;
    std::vector<std::vector<Scalar>> seen;
    for (int row = r.row1; row <= r.row2; ++row) {
        std::vector<Scalar> slice;
        for (int col = r.col1; col <= r.col2; ++col) slice.push_back(s.cell(row, col).scalar());
        for (size_t k = 0; k < seen.size(); ++k) {
            bool same = true;
            for (size_t i = 0; i < slice.size(); ++i) {
                if (compare_scalars(seen[k][i], slice[i]) != 0) {
                    same = false;
                    break;
                }
            }
            if (same) {
                item_fail("row " + std::to_string(row) + " duplicates row " +
                          std::to_string(r.row1 + static_cast<int>(k)));
            }
        }
        seen.push_back(std::move(slice));
    }
}

void check_hyperlink(const Sheet& s, const Area& area, const Json& props) {
    std::string want = props["url"].get<std::string>();
    const RangeRef& r = area.range;
    for (int row = r.row1; row <= r.row2; ++row) {
        for (int col = r.col1; col <= r.col2; ++col) {
            std::string got = s.hyperlink(row, col);
            if (got != want) {
                CellRef ref{"", row, col};
                item_fail("cell " + ref.to_string() + ": hyperlink is " +
                          (got.empty() ? "unset" : "'" + got + "'") + ", expected '" + want +
                          "'");
            }
        }
    }
}

void check_item(const Workbook& wb, const ChecklistItem& item) {
    // Sheet-existence checks by name resolve without the sheet index.
    if (item.criterion == CriterionKind::SheetExists) {
        bool want = item.properties["exists"].get<bool>();
        bool got;
        if (item.properties.contains("name")) {
            got = wb.find_sheet(item.properties["name"].get<std::string>()) != nullptr;
        } else {
            got = item.sheet_index >= 1 &&
                  static_cast<size_t>(item.sheet_index) <= wb.sheets().size();
        }
        if (got != want) {
            item_fail(std::string("sheet ") + (got ? "exists" : "does not exist") +
                      ", expected " + (want ? "present" : "absent"));
        }
        return;
    }

    const Sheet& s = resolve_sheet(wb, item.sheet_index);
    switch (item.criterion) {
        case CriterionKind::CellValues: check_cell_values(s, item.area, item.properties); break;
        case CriterionKind::FormulaText: check_formula_text(s, item.area, item.properties); break;
        case CriterionKind::StyleAttrs: check_style_attrs(s, item.area, item.properties); break;
        case CriterionKind::NumberFormat:
            check_number_format(s, item.area, item.properties);
            break;
        case CriterionKind::SheetName: {
            std::string want = item.properties["name"].get<std::string>();
            if (s.name() != want) {
                item_fail("sheet " + std::to_string(item.sheet_index) + " is named '" +
                          s.name() + "', expected '" + want + "'");
            }
            break;
        }
        case CriterionKind::SheetTabColor: {
            std::string want = canon_color_or_fail(item.properties["color"].get<std::string>());
            if (!s.tab_color() || *s.tab_color() != want) {
                item_fail("tab color is " + s.tab_color().value_or("unset") + ", expected " +
                          want);
            }
            break;
        }
        case CriterionKind::PageSetup: {
            if (item.properties.contains("orientation") &&
                s.page().orientation != item.properties["orientation"].get<std::string>()) {
                item_fail("orientation is " + s.page().orientation + ", expected " +
                          item.properties["orientation"].get<std::string>());
            }
            if (item.properties.contains("size") &&
                s.page().size != item.properties["size"].get<std::string>()) {
                item_fail("page size is " + s.page().size + ", expected " +
                          item.properties["size"].get<std::string>());
            }
            break;
        }
        case CriterionKind::RowColDims: check_row_col_dims(s, item.properties); break;
        case CriterionKind::MergeState: check_merge_state(s, item.area, item.properties); break;
        case CriterionKind::ChartAttrs: check_chart_attrs(s, item.area, item.properties); break;
        case CriterionKind::PivotAttrs: check_pivot_attrs(s, item.area, item.properties); break;
        case CriterionKind::SortedBy: check_sorted_by(s, item.area, item.properties); break;
        case CriterionKind::DistinctRows: check_distinct_rows(s, item.area); break;
        case CriterionKind::HyperlinkTarget: check_hyperlink(s, item.area, item.properties); break;
        case CriterionKind::SheetExists: break;  // handled above
    }
}

}  // namespace

std::vector<Verdict> evaluate_checklist(const Workbook& result, const TaskSpec& task) {
    std::vector<Verdict> verdicts;
    verdicts.reserve(task.checklist.size());
    for (size_t i = 0; i < task.checklist.size(); ++i) {
        Verdict v;
        v.item_index = static_cast<int>(i);
        try {
            check_item(result, task.checklist[i]);
            v.pass = true;
            v.detail = "ok";
        } catch (const ItemFail& f) {
            v.pass = false;
            v.detail = f.detail;
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("evaluation error: ") + e.what();
        }
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

}  // namespace sheetloop::evalkit
