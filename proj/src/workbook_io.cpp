#include "sheetloop/workbook_io.hpp"

#include "sheetloop/color.hpp"
#include "sheetloop/formula.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace sheetloop {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kHeader = "workbook-fixture v1";

std::string coord_key(int row, int col) { return column_letters(col) + std::to_string(row); }

Json encode_scalar(const Scalar& s) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, EmptyCell>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, Decimal>) {
                return Json{{"n", x.to_string()}};
            } else if constexpr (std::is_same_v<T, std::string>) {
                return Json(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                return Json(x);
            } else if constexpr (std::is_same_v<T, Date>) {
                return Json{{"d", x.to_string()}};
            } else {
                return Json{{"dt", x.to_string()}};
            }
        },
        s);
}

Json encode_cell(const CellValue& v) {
    if (const Formula* f = v.as_formula()) {
        Json j;
        j["f"] = f->source;
        if (!std::holds_alternative<EmptyCell>(f->cached)) j["v"] = encode_scalar(f->cached);
        if (!f->evaluated) j["ok"] = false;
        return j;
    }
    return encode_scalar(v.scalar());
}

Json encode_style(const CellStyle& s) {
    Json j = Json::object();
    if (s.font_name) j["font"] = *s.font_name;
    if (s.font_size) j["size"] = s.font_size->to_string();
    if (s.font_color) j["color"] = *s.font_color;
    if (s.bold) j["bold"] = *s.bold;
    if (s.italic) j["italic"] = *s.italic;
    if (s.underline) j["underline"] = *s.underline;
    if (s.fill_color) j["fill"] = *s.fill_color;
    if (s.halign) j["halign"] = *s.halign;
    if (s.valign) j["valign"] = *s.valign;
    return j;
}

Json encode_chart(const ChartSpec& c) {
    Json j;
    j["type"] = to_string(c.type);
    if (c.data_range) j["data"] = c.data_range->to_string();
    if (c.title) j["title"] = *c.title;
    if (c.legend) j["legend"] = *c.legend;
    j["anchor"] = c.anchor.to_string();
    if (c.x_axis_title) j["x_axis"] = *c.x_axis_title;
    if (c.y_axis_title) j["y_axis"] = *c.y_axis_title;
    if (c.data_labels) j["data_labels"] = true;
    if (c.trendline) j["trendline"] = *c.trendline;
    return j;
}

Json encode_pivot(const PivotSpec& p) {
    Json j;
    j["source"] = p.source.to_string();
    j["rows"] = column_letters(p.rows_col);
    if (p.cols_col) j["cols"] = column_letters(*p.cols_col);
    j["values"] = column_letters(p.values_col);
    j["func"] = p.func;
    return j;
}

Json encode_sheet(const Sheet& s) {
    Json j;
    j["name"] = s.name();
    if (!s.grid().empty()) {
        Json cells = Json::object();
        for (const auto& [coord, value] : s.grid()) {
            cells[coord_key(coord.first, coord.second)] = encode_cell(value);
        }
        j["cells"] = std::move(cells);
    }
    if (!s.formats().empty()) {
        Json fm = Json::object();
        for (const auto& [coord, fmt] : s.formats()) {
            fm[coord_key(coord.first, coord.second)] = fmt;
        }
        j["formats"] = std::move(fm);
    }
    if (!s.styles().empty()) {
        Json st = Json::object();
        for (const auto& [coord, style] : s.styles()) {
            if (style.empty()) continue;
            st[coord_key(coord.first, coord.second)] = encode_style(style);
        }
        if (!st.empty()) j["styles"] = std::move(st);
    }
    if (!s.hyperlinks().empty()) {
        Json hl = Json::object();
        for (const auto& [coord, url] : s.hyperlinks()) {
            hl[coord_key(coord.first, coord.second)] = url;
        }
        j["hyperlinks"] = std::move(hl);
    }
    if (!s.merges().empty()) {
        Json m = Json::array();
        for (const auto& r : s.merges()) m.push_back(r.to_string());
        j["merges"] = std::move(m);
    }
    if (!s.row_heights().empty()) {
        Json rh = Json::object();
        for (const auto& [row, h] : s.row_heights()) rh[std::to_string(row)] = h.to_string();
        j["row_heights"] = std::move(rh);
    }
    if (!s.col_widths().empty()) {
        Json cw = Json::object();
        for (const auto& [col, w] : s.col_widths()) cw[column_letters(col)] = w.to_string();
        j["col_widths"] = std::move(cw);
    }
    if (!s.charts().empty()) {
        Json ch = Json::array();
        for (const auto& c : s.charts()) ch.push_back(encode_chart(c));
        j["charts"] = std::move(ch);
    }
    if (!s.pivots().empty()) {
        Json pv = Json::array();
        for (const auto& p : s.pivots()) pv.push_back(encode_pivot(p));
        j["pivots"] = std::move(pv);
    }
    if (s.tab_color()) j["tab_color"] = *s.tab_color();
    if (!(s.page() == PageSetup{})) {
        j["page"] = Json{{"orientation", s.page().orientation}, {"size", s.page().size}};
    }
    return j;
}

// ---- decoding ----

struct Decoder {
    std::vector<std::string>* warnings;

    void warn(const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    }

    [[noreturn]] static void fail(const std::string& msg) { throw FixtureParseError(msg); }

    Scalar decode_scalar(const Json& j, const std::string& where) {
        if (j.is_null()) return EmptyCell{};
        if (j.is_string()) return j.get<std::string>();
        if (j.is_boolean()) return j.get<bool>();
        if (j.is_object()) {
            if (j.contains("n")) {
                Decimal d;
                if (!j["n"].is_string() || !Decimal::try_parse(j["n"].get<std::string>(), d)) {
                    fail(where + ": bad number literal");
                }
                return d;
            }
            if (j.contains("d")) {
                auto d = Date::parse(j["d"].get<std::string>());
                if (!d) fail(where + ": bad date");
                return *d;
            }
            if (j.contains("dt")) {
                auto dt = DateTime::parse(j["dt"].get<std::string>());
                if (!dt) fail(where + ": bad datetime");
                return *dt;
            }
        }
        if (j.is_number()) fail(where + ": raw JSON numbers are not allowed; use {\"n\": \"...\"}");
        fail(where + ": unrecognized cell value");
    }

    CellValue decode_cell(const Json& j, const std::string& where, const Workbook& wb,
                          const std::string& sheet) {
        if (j.is_object() && j.contains("f")) {
            Formula f;
            f.source = j["f"].get<std::string>();
            if (j.contains("v")) {
                f.cached = decode_scalar(j["v"], where);
                f.evaluated = !j.value("ok", true) ? false : true;
            } else if (j.value("ok", true)) {
                // No cached value supplied: evaluate now.
                try {
                    FormulaOutcome out = evaluate_formula(wb, sheet, f.source);
                    f.cached = out.value;
                    f.evaluated = out.evaluated;
                } catch (const FormulaError& e) {
                    fail(where + ": formula error: " + e.what());
                }
            } else {
                f.evaluated = false;
            }
            return CellValue(std::move(f));
        }
        return CellValue(decode_scalar(j, where));
    }

    CellStyle decode_style(const Json& j, const std::string& where) {
        CellStyle s;
        for (const auto& [key, val] : j.items()) {
            if (key == "font") s.font_name = val.get<std::string>();
            else if (key == "size") s.font_size = Decimal::parse(val.get<std::string>());
            else if (key == "color") s.font_color = canon_color(val, where);
            else if (key == "bold") s.bold = val.get<bool>();
            else if (key == "italic") s.italic = val.get<bool>();
            else if (key == "underline") s.underline = val.get<bool>();
            else if (key == "fill") s.fill_color = canon_color(val, where);
            else if (key == "halign") s.halign = val.get<std::string>();
            else if (key == "valign") s.valign = val.get<std::string>();
            else warn(where + ": dropped unknown style attribute '" + key + "'");
        }
        return s;
    }

    std::string canon_color(const Json& j, const std::string& where) {
        auto c = parse_color(j.get<std::string>());
        if (!c) fail(where + ": bad color '" + j.get<std::string>() + "'");
        return *c;
    }

    static CellCoord decode_coord(const std::string& key, const std::string& where) {
        auto ref = parse_cell_ref(key);
        if (!ref || !ref->sheet.empty()) fail(where + ": bad cell key '" + key + "'");
        return {ref->row, ref->col};
    }

    ChartSpec decode_chart(const Json& j, const std::string& where) {
        ChartSpec c;
        auto t = chart_type_from(j.value("type", ""));
        if (!t) fail(where + ": bad chart type");
        c.type = *t;
        if (j.contains("data")) {
            auto r = parse_range_ref(j["data"].get<std::string>());
            if (!r) fail(where + ": bad chart data range");
            c.data_range = *r;
        }
        if (j.contains("title")) c.title = j["title"].get<std::string>();
        if (j.contains("legend")) c.legend = j["legend"].get<std::string>();
        if (j.contains("anchor")) {
            auto a = parse_cell_ref(j["anchor"].get<std::string>());
            if (!a) fail(where + ": bad chart anchor");
            c.anchor = *a;
        }
        if (j.contains("x_axis")) c.x_axis_title = j["x_axis"].get<std::string>();
        if (j.contains("y_axis")) c.y_axis_title = j["y_axis"].get<std::string>();
        c.data_labels = j.value("data_labels", false);
        if (j.contains("trendline")) c.trendline = j["trendline"].get<std::string>();
        return c;
    }

    PivotSpec decode_pivot(const Json& j, const std::string& where) {
        PivotSpec p;
        auto src = parse_range_ref(j.value("source", ""));
        if (!src) fail(where + ": bad pivot source");
        p.source = *src;
        auto rows = column_from_letters(j.value("rows", ""));
        auto values = column_from_letters(j.value("values", ""));
        if (!rows || !values) fail(where + ": bad pivot rows/values column");
        p.rows_col = *rows;
        p.values_col = *values;
        if (j.contains("cols")) {
            auto cols = column_from_letters(j["cols"].get<std::string>());
            if (!cols) fail(where + ": bad pivot cols column");
            p.cols_col = *cols;
        }
        p.func = j.value("func", "sum");
        return p;
    }

    void decode_sheet(const Json& j, Workbook& wb) {
        if (!j.contains("name") || !j["name"].is_string()) fail("sheet missing name");
        std::string name = j["name"].get<std::string>();
        const std::string where = "sheet '" + name + "'";
        Sheet& s = wb.add_sheet(name);
        static const char* known[] = {"name",       "cells",      "formats", "styles",
                                      "hyperlinks", "merges",     "row_heights", "col_widths",
                                      "charts",     "pivots",     "tab_color",   "page"};
        for (const auto& [key, val] : j.items()) {
            (void)val;
            if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                    return key == k;
                }) == std::end(known)) {
                warn(where + ": dropped unknown section '" + key + "'");
            }
        }
        if (j.contains("cells")) {
            for (const auto& [key, val] : j["cells"].items()) {
                auto [row, col] = decode_coord(key, where);
                s.set_cell(row, col, decode_cell(val, where + "!" + key, wb, name));
            }
        }
        if (j.contains("formats")) {
            for (const auto& [key, val] : j["formats"].items()) {
                auto [row, col] = decode_coord(key, where);
                s.set_format(row, col, val.get<std::string>());
            }
        }
        if (j.contains("styles")) {
            for (const auto& [key, val] : j["styles"].items()) {
                auto [row, col] = decode_coord(key, where);
                s.set_style(row, col, decode_style(val, where + "!" + key));
            }
        }
        if (j.contains("hyperlinks")) {
            for (const auto& [key, val] : j["hyperlinks"].items()) {
                auto [row, col] = decode_coord(key, where);
                s.set_hyperlink(row, col, val.get<std::string>());
            }
        }
        if (j.contains("merges")) {
            for (const auto& m : j["merges"]) {
                auto r = parse_range_ref(m.get<std::string>());
                if (!r) fail(where + ": bad merge range");
                if (!s.add_merge(*r)) fail(where + ": overlapping merge ranges");
            }
        }
        if (j.contains("row_heights")) {
            for (const auto& [key, val] : j["row_heights"].items()) {
                s.set_row_height(std::stoi(key), Decimal::parse(val.get<std::string>()));
            }
        }
        if (j.contains("col_widths")) {
            for (const auto& [key, val] : j["col_widths"].items()) {
                auto col = column_from_letters(key);
                if (!col) fail(where + ": bad column key '" + key + "'");
                s.set_col_width(*col, Decimal::parse(val.get<std::string>()));
            }
        }
        if (j.contains("charts")) {
            for (const auto& c : j["charts"]) s.charts().push_back(decode_chart(c, where));
        }
        if (j.contains("pivots")) {
            for (const auto& p : j["pivots"]) s.pivots().push_back(decode_pivot(p, where));
        }
        if (j.contains("tab_color") && !j["tab_color"].is_null()) {
            s.set_tab_color(canon_color(j["tab_color"], where));
        }
        if (j.contains("page")) {
            s.page().orientation = j["page"].value("orientation", "portrait");
            s.page().size = j["page"].value("size", "A4");
        }
    }
};

class FixtureAdapter : public FormatAdapter {
public:
    Workbook load(const std::string& path, std::vector<std::string>& warnings) override {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FixtureParseError("cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        Workbook wb = parse_fixture(buf.str(), &warnings);
        wb.set_source_path(path);
        return wb;
    }

    void save(const Workbook& wb, const std::string& path) override {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw WorkbookError("cannot write '" + path + "'");
        out << canonical_bytes(wb);
    }
};

std::map<WorkbookFormat, std::shared_ptr<FormatAdapter>>& adapter_registry() {
    static std::map<WorkbookFormat, std::shared_ptr<FormatAdapter>> reg = [] {
        std::map<WorkbookFormat, std::shared_ptr<FormatAdapter>> m;
        m[WorkbookFormat::FixtureJson] = std::make_shared<FixtureAdapter>();
        return m;
    }();
    return reg;
}

}  // namespace

std::optional<WorkbookFormat> workbook_format_from(std::string_view name) {
    if (name == "fixture-json" || name == "fixture") return WorkbookFormat::FixtureJson;
    if (name == "xlsx") return WorkbookFormat::Xlsx;
    return std::nullopt;
}

void register_format_adapter(WorkbookFormat fmt, std::shared_ptr<FormatAdapter> adapter) {
    adapter_registry()[fmt] = std::move(adapter);
}

Workbook load_workbook(const std::string& path, WorkbookFormat fmt,
                       std::vector<std::string>* warnings) {
    auto it = adapter_registry().find(fmt);
    if (it == adapter_registry().end() || !it->second) {
        throw UnsupportedFeatureError("no adapter registered for this workbook format");
    }
    std::vector<std::string> local;
    Workbook wb = it->second->load(path, warnings ? *warnings : local);
    return wb;
}

void save_workbook(const Workbook& wb, const std::string& path, WorkbookFormat fmt) {
    auto it = adapter_registry().find(fmt);
    if (it == adapter_registry().end() || !it->second) {
        throw UnsupportedFeatureError("no adapter registered for this workbook format");
    }
    it->second->save(wb, path);
}

std::string canonical_bytes(const Workbook& wb) {
    Json doc;
    doc["description"] = wb.description();
    Json sheets = Json::array();
    for (const auto& s : wb.sheets()) sheets.push_back(encode_sheet(s));
    doc["sheets"] = std::move(sheets);
    return std::string(kHeader) + "\n" + doc.dump(2) + "\n";
}

Workbook parse_fixture(const std::string& text, std::vector<std::string>* warnings) {
    size_t nl = text.find('\n');
    if (nl == std::string::npos || text.substr(0, nl) != kHeader) {
        throw FixtureParseError(std::string("missing '") + kHeader + "' header line");
    }
    Json doc;
    try {
        doc = Json::parse(text.substr(nl + 1));
    } catch (const std::exception& e) {
        throw FixtureParseError(std::string("bad fixture JSON: ") + e.what());
    }
    Workbook wb;
    wb.set_description(doc.value("description", ""));
    Decoder dec{warnings};
    if (!doc.contains("sheets") || !doc["sheets"].is_array()) {
        throw FixtureParseError("fixture missing 'sheets' array");
    }
    try {
        for (const auto& sj : doc["sheets"]) dec.decode_sheet(sj, wb);
    } catch (const Json::exception& e) {
        throw FixtureParseError(std::string("bad fixture structure: ") + e.what());
    } catch (const FixtureParseError&) {
        throw;
    } catch (const WorkbookError& e) {
        throw FixtureParseError(e.what());
    }
    return wb;
}

}  // namespace sheetloop
