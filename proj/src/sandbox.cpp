#include "sheetloop/sandbox.hpp"

#include "sheetloop/formula.hpp"

#include <algorithm>
#include <set>

namespace sheetloop::actions {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnknownSheet: return "UnknownSheet";
        case ErrorKind::RangeOutOfBounds: return "RangeOutOfBounds";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::UnsupportedVerb: return "UnsupportedVerb";
        case ErrorKind::RuntimeFault: return "RuntimeFault";
    }
    return "?";
}

Observation Observation::from_parse_error(const ActionParseError& e) {
    Observation o;
    o.status = Status::Error;
    o.error_kind =
        e.error_kind == "UnsupportedVerb" ? ErrorKind::UnsupportedVerb : ErrorKind::ParseError;
    o.message = e.render();
    return o;
}

namespace {

struct Fault {
    ErrorKind kind;
    std::string message;
    std::string hint;
};

[[noreturn]] void fault(ErrorKind kind, std::string message, std::string hint = {}) {
    throw Fault{kind, std::move(message), std::move(hint)};
}

using Touched = std::vector<std::pair<std::string, RangeRef>>;

struct CellPayload {
    CellValue value;
    std::string format;
    CellStyle style;
    std::string hyperlink;
};

CellPayload read_cell(const Sheet& s, int row, int col) {
    return CellPayload{s.cell(row, col), s.format(row, col), s.style(row, col),
                       s.hyperlink(row, col)};
}

void write_cell(Sheet& s, int row, int col, const CellPayload& p) {
    s.set_cell(row, col, p.value);
    s.set_format(row, col, p.format);
    s.set_style(row, col, p.style);
    s.set_hyperlink(row, col, p.hyperlink);
}

class Executor {
public:
    Executor(Workbook& wb, const std::map<std::string, Sandbox::RawExecutor>& raw)
        : wb_(wb), raw_(raw) {}

    Touched run(const ActionStmt& stmt) {
        touched_.clear();
        switch (stmt.verb) {
            case Verb::SetCell: exec_set_cell(stmt); break;
            case Verb::Insert: exec_insert(stmt); break;
            case Verb::Delete: exec_delete(stmt); break;
            case Verb::AutoFill: exec_autofill(stmt); break;
            case Verb::Sort: exec_sort(stmt); break;
            case Verb::Copy: exec_copy(stmt); break;
            case Verb::Replace: exec_replace(stmt); break;
            case Verb::Hyperlink: exec_hyperlink(stmt); break;
            case Verb::Dedupe: exec_dedupe(stmt); break;
            case Verb::Filter: exec_filter(stmt); break;
            case Verb::CreateSheet: exec_create_sheet(stmt); break;
            case Verb::DeleteSheet: exec_delete_sheet(stmt); break;
            case Verb::RenameSheet: exec_rename_sheet(stmt); break;
            case Verb::TabColor: exec_tab_color(stmt); break;
            case Verb::PageSize: exec_page(stmt, true); break;
            case Verb::Orientation: exec_page(stmt, false); break;
            case Verb::FontName:
            case Verb::FontColor:
            case Verb::FontSize:
            case Verb::FontStyle:
            case Verb::Underline:
            case Verb::Align:
            case Verb::Highlight: exec_style(stmt); break;
            case Verb::Merge: exec_merge(stmt); break;
            case Verb::Resize: exec_resize(stmt); break;
            case Verb::NumberFormat: exec_number_format(stmt); break;
            case Verb::ChartType:
            case Verb::ChartData:
            case Verb::ChartTitle:
            case Verb::ChartLegend:
            case Verb::ChartPosition:
            case Verb::ChartAxis:
            case Verb::DataLabels:
            case Verb::Trendline: exec_chart(stmt); break;
            case Verb::Pivot: exec_pivot(stmt); break;
            case Verb::PivotFunction: exec_pivot_function(stmt); break;
            case Verb::Raw: exec_raw(stmt); break;
        }
        return touched_;
    }

private:
    Workbook& wb_;
    const std::map<std::string, Sandbox::RawExecutor>& raw_;
    Touched touched_;

    Sheet& resolve_sheet(const std::string& name) {
        if (name.empty()) {
            if (wb_.sheets().empty()) {
                fault(ErrorKind::UnknownSheet, "workbook has no sheets");
            }
            return wb_.sheets().front();
        }
        Sheet* s = wb_.find_sheet(name);
        if (!s) {
            fault(ErrorKind::UnknownSheet, "no sheet named '" + name + "'",
                  "available: " + sheet_list());
        }
        return *s;
    }

    std::string sheet_list() const {
        std::string out;
        for (const auto& s : wb_.sheets()) {
            if (!out.empty()) out += ", ";
            out += s.name();
        }
        return out.empty() ? "(none)" : out;
    }

    void touch(const Sheet& s, RangeRef r) {
        r.sheet = s.name();
        touched_.push_back({s.name(), r});
    }

    // ---- Value Processing ----

    void exec_set_cell(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.cell->sheet);
        int row = st.args.cell->row, col = st.args.cell->col;
        CellValue v = st.args.literal;
        if (const Formula* f = v.as_formula()) {
            try {
                FormulaOutcome out = evaluate_formula(wb_, s.name(), f->source);
                v = CellValue(Formula{f->source, out.value, out.evaluated});
            } catch (const FormulaError& e) {
                ErrorKind kind = e.kind == FormulaError::Kind::Type ? ErrorKind::TypeMismatch
                                                                    : ErrorKind::RuntimeFault;
                fault(kind, std::string("formula error: ") + e.what(),
                      "formula was " + f->source);
            }
        }
        s.set_cell(row, col, std::move(v));
        touch(s, RangeRef{"", row, col, row, col});
    }

    void exec_insert(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.range->sheet);
        const RangeRef& span = *st.args.range;
        if (st.args.mode == "ROWS") {
            s.insert_rows(span.row1, span.height());
            touch(s, RangeRef{"", span.row1, 1, span.row2, std::max(1, s.used_cols())});
        } else {
            s.insert_cols(span.col1, span.width());
            touch(s, RangeRef{"", 1, span.col1, std::max(1, s.used_rows()), span.col2});
        }
    }

    void exec_delete(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.range->sheet);
        const RangeRef& span = *st.args.range;
        if (st.args.mode == "CELLS") {
            s.clear_range(span);
            touch(s, span);
        } else if (st.args.mode == "ROWS") {
            if (span.row1 > s.used_rows()) {
                fault(ErrorKind::RangeOutOfBounds,
                      "row " + std::to_string(span.row1) + " is beyond the used region (" +
                          std::to_string(s.used_rows()) + " rows)");
            }
            s.delete_rows(span.row1, span.height());
            touch(s, RangeRef{"", span.row1, 1, span.row1, std::max(1, s.used_cols())});
        } else {
            if (span.col1 > s.used_cols()) {
                fault(ErrorKind::RangeOutOfBounds,
                      "column " + column_letters(span.col1) + " is beyond the used region");
            }
            s.delete_cols(span.col1, span.width());
            touch(s, RangeRef{"", 1, span.col1, std::max(1, s.used_rows()), span.col1});
        }
    }

    void exec_autofill(const ActionStmt& st) {
        const RangeRef& src = *st.args.range;
        const RangeRef& dst = *st.args.range2;
        Sheet& s = resolve_sheet(src.sheet);
        if (!dst.sheet.empty() && dst.sheet != s.name()) {
            fault(ErrorKind::RangeOutOfBounds, "AUTOFILL source and destination must share a sheet");
        }
        bool down = dst.col1 == src.col1 && dst.col2 == src.col2 && dst.row1 == src.row2 + 1;
        bool right = dst.row1 == src.row1 && dst.row2 == src.row2 && dst.col1 == src.col2 + 1;
        if (!down && !right) {
            fault(ErrorKind::RangeOutOfBounds,
                  "destination must extend the source block downward or to the right",
                  "source " + src.to_string() + ", destination " + dst.to_string());
        }
        if (down) {
            for (int col = src.col1; col <= src.col2; ++col) {
                fill_lane(s, src.row1, src.row2, col, dst.row1, dst.row2, true);
            }
        } else {
            for (int row = src.row1; row <= src.row2; ++row) {
                fill_lane(s, src.col1, src.col2, row, dst.col1, dst.col2, false);
            }
        }
        touch(s, dst);
    }

    // Fills one row/column lane: arithmetic progression when the source is
    // all numbers, verbatim cyclic copy otherwise.
    void fill_lane(Sheet& s, int src_lo, int src_hi, int lane, int dst_lo, int dst_hi,
                   bool vertical) {
        std::vector<CellValue> src;
        for (int i = src_lo; i <= src_hi; ++i) {
            src.push_back(vertical ? s.cell(i, lane) : s.cell(lane, i));
        }
        bool numeric = !src.empty() &&
                       std::all_of(src.begin(), src.end(), [](const CellValue& v) {
                           return v.value_kind() == ValueKind::Number;
                       });
        Decimal step(0);
        bool progression = false;
        if (numeric && src.size() >= 2) {
            progression = true;
            step = std::get<Decimal>(src[1].scalar()) - std::get<Decimal>(src[0].scalar());
            for (size_t i = 2; i < src.size(); ++i) {
                Decimal d = std::get<Decimal>(src[i].scalar()) -
                            std::get<Decimal>(src[i - 1].scalar());
                if (d != step) {
                    progression = false;
                    break;
                }
            }
        }
        int n = static_cast<int>(src.size());
        for (int i = dst_lo; i <= dst_hi; ++i) {
            int offset = i - dst_lo;
            CellValue v;
            if (progression) {
                Decimal last = std::get<Decimal>(src.back().scalar());
                v = CellValue(last + step * Decimal(offset + 1));
            } else {
                v = src[offset % n];
            }
            if (vertical) s.set_cell(i, lane, std::move(v));
            else s.set_cell(lane, i, std::move(v));
        }
    }

    void exec_sort(const ActionStmt& st) {
        const RangeRef& r = *st.args.range;
        Sheet& s = resolve_sheet(r.sheet);
        if (st.args.index > r.width()) {
            fault(ErrorKind::RangeOutOfBounds,
                  "key column " + std::to_string(st.args.index) + " exceeds range width " +
                      std::to_string(r.width()));
        }
        int key_col = r.col1 + st.args.index - 1;
        bool asc = st.args.flag;

        std::vector<int> order(r.height());
        for (int i = 0; i < r.height(); ++i) order[i] = r.row1 + i;
        std::stable_sort(order.begin(), order.end(), [&](int ra, int rb) {
            int c = compare_scalars(s.cell(ra, key_col).scalar(), s.cell(rb, key_col).scalar());
            return asc ? c < 0 : c > 0;
        });

        // Buffer the whole rectangle, then write back in sorted row order.
        std::vector<std::vector<CellPayload>> buffer;
        buffer.reserve(order.size());
        for (int row : order) {
            std::vector<CellPayload> slice;
            for (int col = r.col1; col <= r.col2; ++col) slice.push_back(read_cell(s, row, col));
            buffer.push_back(std::move(slice));
        }
        for (int i = 0; i < r.height(); ++i) {
            for (int col = r.col1; col <= r.col2; ++col) {
                write_cell(s, r.row1 + i, col, buffer[i][col - r.col1]);
            }
        }
        touch(s, r);
    }

    void exec_copy(const ActionStmt& st) {
        const RangeRef& src = *st.args.range;
        Sheet& from = resolve_sheet(src.sheet);
        RangeRef dst = *st.args.range2;
        Sheet& to = dst.sheet.empty() ? from : resolve_sheet(dst.sheet);
        bool single = dst.height() == 1 && dst.width() == 1;
        if (!single && (dst.height() != src.height() || dst.width() != src.width())) {
            fault(ErrorKind::RangeOutOfBounds,
                  "destination must be a single cell or match the source shape");
        }
        std::vector<std::vector<CellPayload>> buffer;
        for (int row = src.row1; row <= src.row2; ++row) {
            std::vector<CellPayload> slice;
            for (int col = src.col1; col <= src.col2; ++col) {
                slice.push_back(read_cell(from, row, col));
            }
            buffer.push_back(std::move(slice));
        }
        for (int i = 0; i < src.height(); ++i) {
            for (int j = 0; j < src.width(); ++j) {
                write_cell(to, dst.row1 + i, dst.col1 + j, buffer[i][j]);
            }
        }
        touch(to, RangeRef{"", dst.row1, dst.col1, dst.row1 + src.height() - 1,
                           dst.col1 + src.width() - 1});
    }

    void exec_replace(const ActionStmt& st) {
        const RangeRef& r = *st.args.range;
        Sheet& s = resolve_sheet(r.sheet);
        const CellValue& oldv = st.args.literal;
        const CellValue& newv = st.args.literal2;
        const std::string* old_text = oldv.as_text();
        int hits = 0;
        for (int row = r.row1; row <= r.row2; ++row) {
            for (int col = r.col1; col <= r.col2; ++col) {
                const CellValue& cur = s.cell(row, col);
                if (cur.is_empty()) continue;
                if (old_text && cur.as_text()) {
                    const std::string& text = *cur.as_text();
                    if (text.find(*old_text) == std::string::npos) continue;
                    std::string replaced;
                    size_t pos = 0;
                    const std::string new_text = newv.display();
                    while (true) {
                        size_t at = text.find(*old_text, pos);
                        if (at == std::string::npos) {
                            replaced.append(text, pos, std::string::npos);
                            break;
                        }
                        replaced.append(text, pos, at - pos);
                        replaced += new_text;
                        pos = at + old_text->size();
                    }
                    s.set_cell(row, col, replaced == text ? cur : parse_cell_literal(replaced));
                    ++hits;
                } else if (cur == oldv) {
                    s.set_cell(row, col, newv);
                    ++hits;
                }
            }
        }
        touch(s, r);
    }

    void exec_hyperlink(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.cell->sheet);
        int row = st.args.cell->row, col = st.args.cell->col;
        s.set_hyperlink(row, col, st.args.text);
        if (!st.args.text2.empty()) s.set_cell(row, col, CellValue(st.args.text2));
        touch(s, RangeRef{"", row, col, row, col});
    }

    void exec_dedupe(const ActionStmt& st) {
        const RangeRef& r = *st.args.range;
        Sheet& s = resolve_sheet(r.sheet);
        std::vector<int> dup_rows;
        std::vector<std::vector<Scalar>> seen;
        for (int row = r.row1; row <= r.row2; ++row) {
            std::vector<Scalar> slice;
            for (int col = r.col1; col <= r.col2; ++col) slice.push_back(s.cell(row, col).scalar());
            bool dup = std::any_of(seen.begin(), seen.end(), [&](const auto& other) {
                if (other.size() != slice.size()) return false;
                for (size_t i = 0; i < slice.size(); ++i) {
                    if (compare_scalars(other[i], slice[i]) != 0) return false;
                }
                return true;
            });
            if (dup) dup_rows.push_back(row);
            else seen.push_back(std::move(slice));
        }
        for (auto it = dup_rows.rbegin(); it != dup_rows.rend(); ++it) {
            s.delete_rows(*it, 1);
        }
        touch(s, r);
    }

    void exec_filter(const ActionStmt& st) {
        const RangeRef& r = *st.args.range;
        Sheet& s = resolve_sheet(r.sheet);
        if (st.args.index > r.width()) {
            fault(ErrorKind::RangeOutOfBounds,
                  "filter column " + std::to_string(st.args.index) + " exceeds range width " +
                      std::to_string(r.width()));
        }
        int col = r.col1 + st.args.index - 1;
        std::vector<int> doomed;
        for (int row = r.row1; row <= r.row2; ++row) {
            if (!filter_match(s.cell(row, col), st.args.mode, st.args.literal)) {
                doomed.push_back(row);
            }
        }
        for (auto it = doomed.rbegin(); it != doomed.rend(); ++it) {
            s.delete_rows(*it, 1);
        }
        touch(s, r);
    }

    static bool filter_match(const CellValue& cell, const std::string& op,
                             const CellValue& literal) {
        Scalar a = cell.scalar();
        Scalar b = literal.scalar();
        if (op == "CONTAINS") {
            std::string hay = scalar_display(a), needle = scalar_display(b);
            std::transform(hay.begin(), hay.end(), hay.begin(), ::tolower);
            std::transform(needle.begin(), needle.end(), needle.begin(), ::tolower);
            return hay.find(needle) != std::string::npos;
        }
        if (std::holds_alternative<EmptyCell>(a)) return false;
        ValueKind ka = scalar_kind(a), kb = scalar_kind(b);
        if (ka != kb) {
            // Dates written as text in the sheet still compare against date
            // literals; everything else is a type error.
            if (ka == ValueKind::Text && (kb == ValueKind::Date || kb == ValueKind::DateTime)) {
                if (auto d = Date::parse(*std::get_if<std::string>(&a))) {
                    a = *d;
                    ka = ValueKind::Date;
                }
            }
            if (ka != kb) {
                fault(ErrorKind::TypeMismatch,
                      std::string("cannot compare ") + sheetloop::to_string(ka) + " with " +
                          sheetloop::to_string(kb) + " in FILTER");
            }
        }
        int c = compare_scalars(a, b);
        if (op == "=") return c == 0;
        if (op == "!=") return c != 0;
        if (op == "<") return c < 0;
        if (op == "<=") return c <= 0;
        if (op == ">") return c > 0;
        return c >= 0;
    }

    // ---- Worksheet Management ----

    void exec_create_sheet(const ActionStmt& st) {
        if (wb_.find_sheet(st.args.text)) {
            fault(ErrorKind::RuntimeFault, "sheet '" + st.args.text + "' already exists");
        }
        try {
            Sheet& s = wb_.add_sheet(st.args.text);
            touch(s, RangeRef{"", 1, 1, 1, 1});
        } catch (const WorkbookError& e) {
            fault(ErrorKind::RuntimeFault, e.what());
        }
    }

    void exec_delete_sheet(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.text);
        if (wb_.sheets().size() == 1) {
            fault(ErrorKind::RuntimeFault, "cannot delete the only sheet");
        }
        std::string name = s.name();
        wb_.remove_sheet(name);
        touched_.push_back({name, RangeRef{name, 1, 1, 1, 1}});
    }

    void exec_rename_sheet(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.text);
        if (wb_.find_sheet(st.args.text2)) {
            fault(ErrorKind::RuntimeFault, "sheet '" + st.args.text2 + "' already exists");
        }
        try {
            wb_.rename_sheet(s.name(), st.args.text2);
        } catch (const WorkbookError& e) {
            fault(ErrorKind::RuntimeFault, e.what());
        }
        touch(wb_.sheet(st.args.text2), RangeRef{"", 1, 1, 1, 1});
    }

    void exec_tab_color(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.text);
        s.set_tab_color(st.args.text2);
        touch(s, RangeRef{"", 1, 1, 1, 1});
    }

    void exec_page(const ActionStmt& st, bool size) {
        Sheet& s = resolve_sheet(st.args.text);
        if (size) s.page().size = st.args.text2;
        else s.page().orientation = st.args.text2;
        touch(s, RangeRef{"", 1, 1, 1, 1});
    }

    // ---- Format Adjustment ----

    void exec_style(const ActionStmt& st) {
        const RangeRef& r = *st.args.range;
        Sheet& s = resolve_sheet(r.sheet);
        for (int row = r.row1; row <= r.row2; ++row) {
            for (int col = r.col1; col <= r.col2; ++col) {
                CellStyle style = s.style(row, col);
                switch (st.verb) {
                    case Verb::FontName: style.font_name = st.args.text; break;
                    case Verb::FontColor: style.font_color = st.args.text; break;
                    case Verb::FontSize: style.font_size = *st.args.number; break;
                    case Verb::FontStyle:
                        if (st.args.mode == "BOLD") style.bold = st.args.flag;
                        else style.italic = st.args.flag;
                        break;
                    case Verb::Underline: style.underline = st.args.flag; break;
                    case Verb::Align:
                        if (!st.args.text.empty()) style.halign = st.args.text;
                        if (!st.args.text2.empty()) style.valign = st.args.text2;
                        break;
                    case Verb::Highlight: style.fill_color = st.args.text; break;
                    default: break;
                }
                s.set_style(row, col, style);
            }
        }
        touch(s, r);
    }

    void exec_merge(const ActionStmt& st) {
        const RangeRef& r = *st.args.range;
        Sheet& s = resolve_sheet(r.sheet);
        if (st.args.flag) {
            if (r.height() == 1 && r.width() == 1) {
                fault(ErrorKind::RangeOutOfBounds, "cannot merge a single cell");
            }
            if (!s.add_merge(r)) {
                fault(ErrorKind::RuntimeFault,
                      "merge overlaps an existing merged range", "use MERGE <range> OFF first");
            }
        } else {
            s.remove_merges_intersecting(r);
        }
        touch(s, r);
    }

    void exec_resize(const ActionStmt& st) {
        const RangeRef& span = *st.args.range;
        Sheet& s = resolve_sheet(span.sheet);
        if (st.args.mode == "ROWS") {
            for (int row = span.row1; row <= span.row2; ++row) {
                s.set_row_height(row, *st.args.number);
            }
            touch(s, RangeRef{"", span.row1, 1, span.row2, 1});
        } else {
            for (int col = span.col1; col <= span.col2; ++col) {
                s.set_col_width(col, *st.args.number);
            }
            touch(s, RangeRef{"", 1, span.col1, 1, span.col2});
        }
    }

    void exec_number_format(const ActionStmt& st) {
        const RangeRef& r = *st.args.range;
        Sheet& s = resolve_sheet(r.sheet);
        for (int row = r.row1; row <= r.row2; ++row) {
            for (int col = r.col1; col <= r.col2; ++col) {
                s.set_format(row, col, st.args.text);
            }
        }
        touch(s, r);
    }

    // ---- Chart Design ----

    ChartSpec& resolve_chart(Sheet& s, int ordinal) {
        if (ordinal < 1 || static_cast<size_t>(ordinal) > s.charts().size()) {
            fault(ErrorKind::RangeOutOfBounds,
                  "chart " + std::to_string(ordinal) + " does not exist (" +
                      std::to_string(s.charts().size()) + " chart(s) on '" + s.name() + "')",
                  "create charts with CHART_TYPE <sheet> <n> <type>");
        }
        return s.charts()[ordinal - 1];
    }

    void exec_chart(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.text);
        int ordinal = st.args.index;
        if (st.verb == Verb::ChartType) {
            if (ordinal == static_cast<int>(s.charts().size()) + 1) {
                ChartSpec c;
                c.type = *chart_type_from(st.args.mode);
                s.charts().push_back(c);
            } else {
                resolve_chart(s, ordinal).type = *chart_type_from(st.args.mode);
            }
            touch(s, RangeRef{"", 1, 1, 1, 1});
            return;
        }
        ChartSpec& chart = resolve_chart(s, ordinal);
        switch (st.verb) {
            case Verb::ChartData: {
                RangeRef data = *st.args.range;
                if (!data.sheet.empty() && data.sheet != s.name()) {
                    fault(ErrorKind::RangeOutOfBounds,
                          "chart data must come from the chart's own sheet");
                }
                data.sheet.clear();
                if (data.row2 > s.used_rows() || data.col2 > s.used_cols()) {
                    fault(ErrorKind::RangeOutOfBounds,
                          "chart data range " + data.to_string() + " exceeds the used region (" +
                              std::to_string(s.used_rows()) + "x" +
                              std::to_string(s.used_cols()) + ")");
                }
                chart.data_range = data;
                break;
            }
            case Verb::ChartTitle: chart.title = st.args.text2; break;
            case Verb::ChartLegend:
                if (st.args.mode == "none") chart.legend = std::nullopt;
                else chart.legend = st.args.mode;
                break;
            case Verb::ChartPosition: {
                CellRef anchor = *st.args.cell;
                anchor.sheet.clear();
                chart.anchor = anchor;
                break;
            }
            case Verb::ChartAxis:
                if (st.args.mode == "X") chart.x_axis_title = st.args.text2;
                else chart.y_axis_title = st.args.text2;
                break;
            case Verb::DataLabels: chart.data_labels = st.args.flag; break;
            case Verb::Trendline:
                if (st.args.mode == "none") chart.trendline = std::nullopt;
                else chart.trendline = st.args.mode;
                break;
            default: break;
        }
        touch(s, RangeRef{"", 1, 1, 1, 1});
    }

    // ---- Content Summary ----

    void exec_pivot(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.text);
        PivotSpec p;
        RangeRef source = *st.args.range;
        if (!source.sheet.empty() && source.sheet != s.name()) {
            fault(ErrorKind::RangeOutOfBounds, "pivot source must be on the pivot's sheet");
        }
        source.sheet.clear();
        if (source.row2 > s.used_rows() || source.col2 > s.used_cols()) {
            fault(ErrorKind::RangeOutOfBounds,
                  "pivot source " + source.to_string() + " exceeds the used region");
        }
        p.source = source;
        p.rows_col = st.args.index;
        if (st.args.number) {
            p.cols_col = static_cast<int>(st.args.number->mantissa());
        }
        p.values_col = *column_from_letters(st.args.text2);
        p.func = st.args.mode;
        auto check_col = [&](int col, const char* what) {
            if (col < source.col1 || col > source.col2) {
                fault(ErrorKind::RangeOutOfBounds,
                      std::string(what) + " column " + column_letters(col) +
                          " is outside the pivot source " + source.to_string());
            }
        };
        check_col(p.rows_col, "rows");
        if (p.cols_col) check_col(*p.cols_col, "cols");
        check_col(p.values_col, "values");
        s.pivots().push_back(p);
        touch(s, source);
    }

    void exec_pivot_function(const ActionStmt& st) {
        Sheet& s = resolve_sheet(st.args.text);
        int ordinal = st.args.index;
        if (ordinal < 1 || static_cast<size_t>(ordinal) > s.pivots().size()) {
            fault(ErrorKind::RangeOutOfBounds,
                  "pivot " + std::to_string(ordinal) + " does not exist (" +
                      std::to_string(s.pivots().size()) + " pivot(s) on '" + s.name() + "')");
        }
        s.pivots()[ordinal - 1].func = st.args.mode;
        touch(s, RangeRef{"", 1, 1, 1, 1});
    }

    // ---- escape hatch ----

    void exec_raw(const ActionStmt& st) {
        auto it = raw_.find(st.args.text);
        if (it == raw_.end()) {
            fault(ErrorKind::UnsupportedVerb,
                  "no executor registered for RAW '" + st.args.text + "'",
                  "RAW requires an external executor plugin");
        }
        std::string err = it->second(wb_, st.args.text2, touched_);
        if (!err.empty()) fault(ErrorKind::RuntimeFault, "RAW executor failed: " + err);
    }
};

}  // namespace

void Sandbox::register_raw_executor(const std::string& lang, RawExecutor fn) {
    raw_executors_[lang] = std::move(fn);
}

Observation Sandbox::execute(Workbook& wb, const ActionProgram& program) const {
    Observation obs;
    Snapshot snap = wb.take_snapshot();
    Executor exec(wb, raw_executors_);
    try {
        for (size_t i = 0; i < program.statements.size(); ++i) {
            const ActionStmt& stmt = program.statements[i];
            try {
                Touched t = exec.run(stmt);
                obs.touched_ranges.insert(obs.touched_ranges.end(), t.begin(), t.end());
            } catch (Fault& f) {
                f.message = std::string(to_string(f.kind)) + " at statement " +
                            std::to_string(i + 1) + " (line " + std::to_string(stmt.line) +
                            "): " + f.message + (f.hint.empty() ? "" : "; " + f.hint);
                throw;
            }
        }
    } catch (const Fault& f) {
        wb.restore_snapshot(snap);
        wb.release_snapshot(snap);
        obs.status = Observation::Status::Error;
        obs.error_kind = f.kind;
        obs.message = f.message;
        obs.touched_ranges.clear();
        return obs;
    } catch (const std::exception& e) {
        wb.restore_snapshot(snap);
        wb.release_snapshot(snap);
        obs.status = Observation::Status::Error;
        obs.error_kind = ErrorKind::RuntimeFault;
        obs.message = std::string("RuntimeFault: ") + e.what();
        obs.touched_ranges.clear();
        return obs;
    }
    wb.release_snapshot(snap);
    obs.status = Observation::Status::Ok;
    size_t stmts = program.statements.size();
    obs.message = "ok: " + std::to_string(stmts) + " statement(s) committed" +
                  (program.declared_done ? "; task declared done" : "");
    obs.new_state = extract_all_states(wb);
    return obs;
}

Observation execute_in_sandbox(Workbook& wb, const ActionProgram& program) {
    static const Sandbox plain;
    return plain.execute(wb, program);
}

}  // namespace sheetloop::actions
