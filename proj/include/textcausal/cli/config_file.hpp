#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

namespace textcausal {

// Parses the TOML subset used by run configs into a JSON object:
//   # comments, [table] and [dotted.table] headers, bare or dotted keys,
//   key = "string" | 'literal' | integer | float | true | false | [array]
// Errors are ConfigErrors carrying the line number.
nlohmann::json parse_toml(std::string_view content);

// JSON when the file ends in .json or its first non-blank character is '{',
// TOML otherwise.
nlohmann::json load_config_file(const std::filesystem::path& path);

}  // namespace textcausal
