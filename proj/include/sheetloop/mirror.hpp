#pragma once

#include "sheetloop/sql.hpp"
#include "sheetloop/workbook.hpp"

#include <string>
#include <vector>

namespace sheetloop::informer {

struct HeaderCollisionUnresolvable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MirrorTable {
    std::string sheet_name;
    std::vector<std::string> aliases;  // positional alias (w, w2, ...) plus the sanitized name
    sql::Table table;
};

/// Relational view of the workbook: one table per sheet, headers sanitized
/// into identifiers, data rows (row >= 2) in sheet order. `w` aliases the
/// primary (first) sheet. Synchronize rebuilds from the live workbook after
/// every committed action.
class RelationalMirror {
public:
    static RelationalMirror build(const Workbook& wb);

    void synchronize(const Workbook& wb, long committed_steps);

    const sql::Table* resolve(const std::string& name) const;  // nullptr when unknown
    const std::vector<MirrorTable>& tables() const { return tables_; }
    long sync_version() const { return sync_version_; }

private:
    std::vector<MirrorTable> tables_;
    long sync_version_ = 0;
};

/// Header -> identifier: non [A-Za-z0-9_] becomes '_', leading digit gets a
/// prefix, blanks become col<N>. Duplicates get _2, _3 ... suffixes.
std::vector<std::string> sanitize_headers(const std::vector<std::string>& headers);

}  // namespace sheetloop::informer
