#pragma once

// JSON spec files:
//
//   {"n": 1, "k": 1,
//    "t": {"t[1][1][1]": "y1^2/2"},
//    "metric": "identity" | "adapted" | [["1","0"],["0","1"]],
//    "base_point": [0, 1],
//    "region": {"min": [-1, -1], "max": [1, 1]}}
//
// Missing t entries are zero. Unknown keys are rejected.

#include <filesystem>
#include <string>
#include <string_view>

#include "ksym/chart.hpp"

namespace ksym {

ManifoldSpec parse_spec(std::string_view text);
ManifoldSpec load_spec(const std::filesystem::path& path);

/// Whole file as bytes; IoError if unreadable.
std::string read_file(const std::filesystem::path& path);

}  // namespace ksym
