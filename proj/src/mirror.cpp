#include "sheetloop/mirror.hpp"

#include <algorithm>
#include <cctype>

namespace sheetloop::informer {

namespace {

std::string sanitize_one(const std::string& header, size_t index) {
    std::string out;
    for (unsigned char c : header) {
        if (std::isalnum(c) || c == '_') out.push_back(static_cast<char>(c));
        else if (c == ' ' || c == '-' || c == '.' || c == '/' || c == ':') out.push_back('_');
        // other punctuation and multi-byte sequences are dropped
    }
    // collapse runs of '_'
    std::string collapsed;
    for (char c : out) {
        if (c == '_' && !collapsed.empty() && collapsed.back() == '_') continue;
        collapsed.push_back(c);
    }
    while (!collapsed.empty() && collapsed.back() == '_') collapsed.pop_back();
    while (!collapsed.empty() && collapsed.front() == '_') collapsed.erase(collapsed.begin());
    if (collapsed.empty()) return "col" + std::to_string(index + 1);
    if (std::isdigit(static_cast<unsigned char>(collapsed.front()))) {
        collapsed.insert(collapsed.begin(), 'c');
    }
    return collapsed;
}

bool iequals(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<std::string> sanitize_headers(const std::vector<std::string>& headers) {
    std::vector<std::string> out;
    out.reserve(headers.size());
    for (size_t i = 0; i < headers.size(); ++i) {
        std::string base = sanitize_one(headers[i], i);
        std::string name = base;
        int suffix = 2;
        auto taken = [&](const std::string& candidate) {
            return std::any_of(out.begin(), out.end(),
                               [&](const std::string& n) { return iequals(n, candidate); });
        };
        while (taken(name)) {
            if (suffix > 100) {
                throw HeaderCollisionUnresolvable("more than 99 duplicates of header '" + base +
                                                  "'");
            }
            name = base + "_" + std::to_string(suffix++);
        }
        out.push_back(std::move(name));
    }
    return out;
}

RelationalMirror RelationalMirror::build(const Workbook& wb) {
    RelationalMirror m;
    size_t index = 0;
    for (const auto& sheet : wb.sheets()) {
        MirrorTable mt;
        mt.sheet_name = sheet.name();
        mt.aliases.push_back(index == 0 ? "w" : "w" + std::to_string(index + 1));
        ++index;

        int n_rows = sheet.used_rows();
        int n_cols = sheet.used_cols();
        std::vector<std::string> headers;
        for (int c = 1; c <= n_cols; ++c) headers.push_back(sheet.cell(1, c).display());
        mt.table.columns = sanitize_headers(headers);
        mt.table.name = sanitize_one(sheet.name(), index - 1);
        mt.table.rows.reserve(n_rows > 1 ? n_rows - 1 : 0);
        for (int r = 2; r <= n_rows; ++r) {
            std::vector<Scalar> row;
            row.reserve(n_cols);
            for (int c = 1; c <= n_cols; ++c) row.push_back(sheet.cell(r, c).scalar());
            mt.table.rows.push_back(std::move(row));
        }
        m.tables_.push_back(std::move(mt));
    }
    return m;
}

void RelationalMirror::synchronize(const Workbook& wb, long committed_steps) {
    // Full rebuild keeps the SELECT*-equality invariant trivially true.
    tables_ = build(wb).tables_;
    sync_version_ = committed_steps;
}

const sql::Table* RelationalMirror::resolve(const std::string& name) const {
    for (const auto& t : tables_) {
        if (iequals(t.table.name, name) || iequals(t.sheet_name, name)) return &t.table;
        for (const auto& alias : t.aliases) {
            if (iequals(alias, name)) return &t.table;
        }
    }
    return nullptr;
}

}  // namespace sheetloop::informer
