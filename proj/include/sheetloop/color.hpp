#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sheetloop {

/// Canonicalizes a color to "#RRGGBB" (uppercase). Accepts #hex (3 or 6
/// digits) and a table of common names (yellow, red, ...).
std::optional<std::string> parse_color(std::string_view text);

}  // namespace sheetloop
