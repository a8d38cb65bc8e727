#pragma once

#include "sheetloop/workbook.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sheetloop {

struct FixtureParseError : WorkbookError {
    using WorkbookError::WorkbookError;
};
struct UnsupportedFeatureError : WorkbookError {
    using WorkbookError::WorkbookError;
};

enum class WorkbookFormat { FixtureJson, Xlsx };

std::optional<WorkbookFormat> workbook_format_from(std::string_view name);

/// Pluggable reader/writer for a workbook file format. The fixture format
/// is built in; an xlsx adapter can be registered by an embedder.
class FormatAdapter {
public:
    virtual ~FormatAdapter() = default;
    virtual Workbook load(const std::string& path, std::vector<std::string>& warnings) = 0;
    virtual void save(const Workbook& wb, const std::string& path) = 0;
};

void register_format_adapter(WorkbookFormat fmt, std::shared_ptr<FormatAdapter> adapter);

Workbook load_workbook(const std::string& path, WorkbookFormat fmt = WorkbookFormat::FixtureJson,
                       std::vector<std::string>* warnings = nullptr);
void save_workbook(const Workbook& wb, const std::string& path,
                   WorkbookFormat fmt = WorkbookFormat::FixtureJson);

/// Canonical serialization (the byte form used for every equality check):
/// versioned header line, then a JSON document with fixed key order,
/// cells row-major, sheets in workbook order, empty sections omitted.
std::string canonical_bytes(const Workbook& wb);

Workbook parse_fixture(const std::string& text, std::vector<std::string>* warnings = nullptr);

}  // namespace sheetloop
