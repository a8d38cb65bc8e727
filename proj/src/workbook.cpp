#include "sheetloop/workbook.hpp"

#include <algorithm>

namespace sheetloop {

bool CellStyle::empty() const {
    return !font_name && !font_size && !font_color && !bold && !italic && !underline &&
           !fill_color && !halign && !valign;
}

const char* to_string(ChartType t) {
    switch (t) {
        case ChartType::Bar: return "bar";
        case ChartType::Line: return "line";
        case ChartType::Pie: return "pie";
        case ChartType::Scatter: return "scatter";
    }
    return "?";
}

std::optional<ChartType> chart_type_from(std::string_view s) {
    if (s == "bar") return ChartType::Bar;
    if (s == "line") return ChartType::Line;
    if (s == "pie") return ChartType::Pie;
    if (s == "scatter") return ChartType::Scatter;
    return std::nullopt;
}

const CellValue& Sheet::cell(int row, int col) const {
    static const CellValue kEmpty;
    auto it = grid_.find({row, col});
    return it == grid_.end() ? kEmpty : it->second;
}

void Sheet::set_cell(int row, int col, CellValue v) {
    if (v.is_empty()) {
        grid_.erase({row, col});
    } else {
        grid_[{row, col}] = std::move(v);
    }
}

bool Sheet::has_cell(int row, int col) const { return grid_.count({row, col}) > 0; }

std::string Sheet::format(int row, int col) const {
    auto it = formats_.find({row, col});
    return it == formats_.end() ? std::string{} : it->second;
}

void Sheet::set_format(int row, int col, std::string fmt) {
    if (fmt.empty()) {
        formats_.erase({row, col});
    } else {
        formats_[{row, col}] = std::move(fmt);
    }
}

CellStyle Sheet::style(int row, int col) const {
    auto it = styles_.find({row, col});
    return it == styles_.end() ? CellStyle{} : it->second;
}

CellStyle& Sheet::style_ref(int row, int col) { return styles_[{row, col}]; }

void Sheet::set_style(int row, int col, CellStyle s) {
    if (s.empty()) {
        styles_.erase({row, col});
    } else {
        styles_[{row, col}] = std::move(s);
    }
}

std::string Sheet::hyperlink(int row, int col) const {
    auto it = hyperlinks_.find({row, col});
    return it == hyperlinks_.end() ? std::string{} : it->second;
}

void Sheet::set_hyperlink(int row, int col, std::string url) {
    if (url.empty()) {
        hyperlinks_.erase({row, col});
    } else {
        hyperlinks_[{row, col}] = std::move(url);
    }
}

bool Sheet::add_merge(const RangeRef& r) {
    for (const auto& m : merges_) {
        if (m.intersects(r)) return false;
    }
    RangeRef local = r;
    local.sheet.clear();
    merges_.push_back(local);
    std::sort(merges_.begin(), merges_.end(), [](const RangeRef& a, const RangeRef& b) {
        return std::tie(a.row1, a.col1, a.row2, a.col2) < std::tie(b.row1, b.col1, b.row2, b.col2);
    });
    return true;
}

int Sheet::remove_merges_intersecting(const RangeRef& r) {
    auto before = merges_.size();
    merges_.erase(std::remove_if(merges_.begin(), merges_.end(),
                                 [&](const RangeRef& m) { return m.intersects(r); }),
                  merges_.end());
    return static_cast<int>(before - merges_.size());
}

int Sheet::used_rows() const {
    int maxr = 0;
    for (const auto& [coord, _] : grid_) maxr = std::max(maxr, coord.first);
    return maxr;
}

int Sheet::used_cols() const {
    int maxc = 0;
    for (const auto& [coord, _] : grid_) maxc = std::max(maxc, coord.second);
    return maxc;
}

namespace {

template <typename V>
std::map<CellCoord, V> shift_cells(const std::map<CellCoord, V>& in, bool rows, int at,
                                   int count) {
    // count > 0 inserts, count < 0 deletes [at, at-count).
    std::map<CellCoord, V> out;
    for (const auto& [coord, value] : in) {
        int idx = rows ? coord.first : coord.second;
        if (count > 0) {
            if (idx >= at) idx += count;
        } else {
            int n = -count;
            if (idx >= at && idx < at + n) continue;  // dropped
            if (idx >= at + n) idx -= n;
        }
        CellCoord c = coord;
        (rows ? c.first : c.second) = idx;
        out.emplace(c, value);
    }
    return out;
}

std::map<int, Decimal> shift_dims(const std::map<int, Decimal>& in, int at, int count) {
    std::map<int, Decimal> out;
    for (const auto& [idx0, v] : in) {
        int idx = idx0;
        if (count > 0) {
            if (idx >= at) idx += count;
        } else {
            int n = -count;
            if (idx >= at && idx < at + n) continue;
            if (idx >= at + n) idx -= n;
        }
        out.emplace(idx, v);
    }
    return out;
}

// Shifts a merge span; returns false when the span is entirely removed.
bool shift_span(int& lo, int& hi, int at, int count) {
    if (count > 0) {
        if (lo >= at) lo += count;
        if (hi >= at) hi += count;
        return true;
    }
    int n = -count;
    int del_lo = at, del_hi = at + n - 1;
    if (lo >= del_lo && hi <= del_hi) return false;
    // Endpoints inside the deleted band collapse toward its edges.
    if (lo > del_hi) lo -= n;
    else if (lo >= del_lo) lo = del_lo;
    if (hi > del_hi) hi -= n;
    else if (hi >= del_lo) hi = del_lo - 1;
    return lo <= hi && lo >= 1;
}

}  // namespace

void Sheet::insert_rows(int at, int count) {
    grid_ = shift_cells(grid_, true, at, count);
    formats_ = shift_cells(formats_, true, at, count);
    styles_ = shift_cells(styles_, true, at, count);
    hyperlinks_ = shift_cells(hyperlinks_, true, at, count);
    row_heights_ = shift_dims(row_heights_, at, count);
    for (auto& m : merges_) {
        if (m.row1 >= at) m.row1 += count;
        if (m.row2 >= at) m.row2 += count;
    }
}

void Sheet::delete_rows(int at, int count) {
    grid_ = shift_cells(grid_, true, at, -count);
    formats_ = shift_cells(formats_, true, at, -count);
    styles_ = shift_cells(styles_, true, at, -count);
    hyperlinks_ = shift_cells(hyperlinks_, true, at, -count);
    row_heights_ = shift_dims(row_heights_, at, -count);
    std::vector<RangeRef> kept;
    for (auto m : merges_) {
        if (shift_span(m.row1, m.row2, at, -count)) kept.push_back(m);
    }
    merges_ = std::move(kept);
}

void Sheet::insert_cols(int at, int count) {
    grid_ = shift_cells(grid_, false, at, count);
    formats_ = shift_cells(formats_, false, at, count);
    styles_ = shift_cells(styles_, false, at, count);
    hyperlinks_ = shift_cells(hyperlinks_, false, at, count);
    col_widths_ = shift_dims(col_widths_, at, count);
    for (auto& m : merges_) {
        if (m.col1 >= at) m.col1 += count;
        if (m.col2 >= at) m.col2 += count;
    }
}

void Sheet::delete_cols(int at, int count) {
    grid_ = shift_cells(grid_, false, at, -count);
    formats_ = shift_cells(formats_, false, at, -count);
    styles_ = shift_cells(styles_, false, at, -count);
    hyperlinks_ = shift_cells(hyperlinks_, false, at, -count);
    col_widths_ = shift_dims(col_widths_, at, -count);
    std::vector<RangeRef> kept;
    for (auto m : merges_) {
        if (shift_span(m.col1, m.col2, at, -count)) kept.push_back(m);
    }
    merges_ = std::move(kept);
}

void Sheet::clear_range(const RangeRef& r) {
    for (int row = r.row1; row <= r.row2; ++row) {
        for (int col = r.col1; col <= r.col2; ++col) {
            grid_.erase({row, col});
            formats_.erase({row, col});
            styles_.erase({row, col});
            hyperlinks_.erase({row, col});
        }
    }
}

Sheet& Workbook::add_sheet(const std::string& name) {
    if (name.empty()) throw WorkbookError("sheet name must be non-empty");
    if (find_sheet(name)) throw WorkbookError("duplicate sheet name '" + name + "'");
    sheets_.emplace_back(name);
    return sheets_.back();
}

void Workbook::remove_sheet(const std::string& name) {
    auto it = std::find_if(sheets_.begin(), sheets_.end(),
                           [&](const Sheet& s) { return s.name() == name; });
    if (it == sheets_.end()) throw UnknownSheetError(name);
    sheets_.erase(it);
}

void Workbook::rename_sheet(const std::string& old_name, const std::string& new_name) {
    if (new_name.empty()) throw WorkbookError("sheet name must be non-empty");
    Sheet* target = find_sheet(old_name);
    if (!target) throw UnknownSheetError(old_name);
    const Sheet* clash = find_sheet(new_name);
    if (clash && clash != target) {
        throw WorkbookError("duplicate sheet name '" + new_name + "'");
    }
    target->set_name(new_name);
}

Sheet* Workbook::find_sheet(const std::string& name) {
    for (auto& s : sheets_) {
        if (s.name() == name) return &s;
    }
    return nullptr;
}

const Sheet* Workbook::find_sheet(const std::string& name) const {
    for (const auto& s : sheets_) {
        if (s.name() == name) return &s;
    }
    return nullptr;
}

Sheet& Workbook::sheet(const std::string& name) {
    Sheet* s = find_sheet(name);
    if (!s) throw UnknownSheetError(name);
    return *s;
}

const Sheet& Workbook::sheet(const std::string& name) const {
    const Sheet* s = find_sheet(name);
    if (!s) throw UnknownSheetError(name);
    return *s;
}

int Workbook::sheet_index(const std::string& name) const {
    for (size_t i = 0; i < sheets_.size(); ++i) {
        if (sheets_[i].name() == name) return static_cast<int>(i);
    }
    return -1;
}

Snapshot Workbook::take_snapshot() const {
    std::uint64_t id = next_snapshot_id_++;
    snapshots_[id] = Captured{description_, sheets_};
    return Snapshot{id};
}

void Workbook::restore_snapshot(const Snapshot& snap) {
    auto it = snapshots_.find(snap.id);
    if (it == snapshots_.end()) throw StaleSnapshotError{};
    description_ = it->second.description;
    sheets_ = it->second.sheets;
}

void Workbook::release_snapshot(const Snapshot& snap) { snapshots_.erase(snap.id); }

void Workbook::prune_snapshots() { snapshots_.clear(); }

SheetState extract_sheet_state(const Workbook& wb, const std::string& sheet_name) {
    const Sheet& s = wb.sheet(sheet_name);
    SheetState st;
    st.sheet_name = s.name();
    st.n_rows = s.used_rows();
    st.n_cols = s.used_cols();
    st.headers.reserve(st.n_cols);
    for (int c = 1; c <= st.n_cols; ++c) {
        st.headers.push_back(s.cell(1, c).display());
    }
    for (int c = 1; c <= st.n_cols; ++c) {
        bool any = false;
        bool mixed = false;
        ValueKind seen = ValueKind::Empty;
        for (int r = 2; r <= st.n_rows; ++r) {
            const CellValue& v = s.cell(r, c);
            ValueKind k = v.value_kind();
            if (k == ValueKind::Empty) continue;
            if (k == ValueKind::DateTime) k = ValueKind::Date;
            if (!any) {
                seen = k;
                any = true;
            } else if (k != seen) {
                mixed = true;
            }
        }
        ColumnDType t = ColumnDType::Empty;
        if (mixed) {
            t = ColumnDType::Mixed;
        } else if (any) {
            switch (seen) {
                case ValueKind::Number: t = ColumnDType::Number; break;
                case ValueKind::Text: t = ColumnDType::Text; break;
                case ValueKind::Bool: t = ColumnDType::Bool; break;
                case ValueKind::Date: t = ColumnDType::Date; break;
                default: t = ColumnDType::Mixed; break;
            }
        }
        st.col_dtypes.push_back(t);
    }
    return st;
}

std::vector<SheetState> extract_all_states(const Workbook& wb) {
    std::vector<SheetState> out;
    out.reserve(wb.sheets().size());
    for (const auto& s : wb.sheets()) {
        out.push_back(extract_sheet_state(wb, s.name()));
    }
    return out;
}

std::string SheetState::summary() const {
    std::string out = "sheet \"" + sheet_name + "\": " + std::to_string(n_rows) + " rows x " +
                      std::to_string(n_cols) + " cols";
    if (!headers.empty()) {
        out += "; headers: ";
        for (size_t i = 0; i < headers.size(); ++i) {
            if (i) out += ", ";
            out += headers[i];
        }
        out += "; dtypes: ";
        for (size_t i = 0; i < col_dtypes.size(); ++i) {
            if (i) out += ", ";
            out += to_string(col_dtypes[i]);
        }
    }
    return out;
}

}  // namespace sheetloop
