#include "sheetloop/color.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace sheetloop {

namespace {

struct NamedColor {
    std::string_view name;
    std::string_view hex;
};

constexpr std::array<NamedColor, 18> kNames = {{
    {"black", "#000000"},
    {"white", "#FFFFFF"},
    {"red", "#FF0000"},
    {"green", "#008000"},
    {"lime", "#00FF00"},
    {"blue", "#0000FF"},
    {"yellow", "#FFFF00"},
    {"orange", "#FFA500"},
    {"purple", "#800080"},
    {"cyan", "#00FFFF"},
    {"magenta", "#FF00FF"},
    {"pink", "#FFC0CB"},
    {"brown", "#A52A2A"},
    {"gray", "#808080"},
    {"grey", "#808080"},
    {"lightgray", "#D3D3D3"},
    {"lightgrey", "#D3D3D3"},
    {"navy", "#000080"},
}};

bool is_hex(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || (c >= 'a' && c <= 'f') ||
           (c >= 'A' && c <= 'F');
}

}  // namespace

std::optional<std::string> parse_color(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '#') {
        std::string_view hex = text.substr(1);
        if (hex.size() != 3 && hex.size() != 6) return std::nullopt;
        if (!std::all_of(hex.begin(), hex.end(), is_hex)) return std::nullopt;
        std::string out = "#";
        if (hex.size() == 3) {
            for (char c : hex) {
                char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                out.push_back(u);
                out.push_back(u);
            }
        } else {
            for (char c : hex) {
                out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
            }
        }
        return out;
    }
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& n : kNames) {
        if (lower == n.name) return std::string(n.hex);
    }
    return std::nullopt;
}

}  // namespace sheetloop
