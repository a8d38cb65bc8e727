#pragma once

#include "sheetloop/action.hpp"
#include "sheetloop/workbook.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sheetloop::actions {

enum class ErrorKind {
    ParseError,
    UnknownSheet,
    RangeOutOfBounds,
    TypeMismatch,
    UnsupportedVerb,
    RuntimeFault,
};

const char* to_string(ErrorKind k);

/// Structured sandbox feedback (o_t). On error the workbook is untouched
/// and new_state is empty; on success new_state carries the refreshed
/// sheet states.
struct Observation {
    enum class Status { Ok, Error };

    Status status = Status::Ok;
    std::optional<ErrorKind> error_kind;
    std::string message;
    std::vector<std::pair<std::string, RangeRef>> touched_ranges;
    std::vector<SheetState> new_state;

    bool ok() const { return status == Status::Ok; }

    static Observation from_parse_error(const ActionParseError& e);
};

/// Executes parsed programs against a workbook: snapshot, run every
/// statement, commit on success or roll back on the first fault. Multiple
/// statements in one program commit atomically.
class Sandbox {
public:
    /// Handler invoked for RAW <lang> statements. Returns an error message
    /// (empty = success) and may mutate the workbook; it runs inside the
    /// same snapshot scope as everything else.
    using RawExecutor =
        std::function<std::string(Workbook&, const std::string& payload,
                                  std::vector<std::pair<std::string, RangeRef>>& touched)>;

    void register_raw_executor(const std::string& lang, RawExecutor fn);

    Observation execute(Workbook& wb, const ActionProgram& program) const;

private:
    std::map<std::string, RawExecutor> raw_executors_;
};

/// Convenience wrapper matching the one-shot contract.
Observation execute_in_sandbox(Workbook& wb, const ActionProgram& program);

}  // namespace sheetloop::actions
