#pragma once

// Report documents and their deterministic JSON serialization (doubles with
// 17 significant digits, keys in insertion order).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ksym/structures.hpp"

namespace ksym {

inline constexpr const char* kToolVersion = "0.1.0";

struct ReportFile {
  std::string spec_digest;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();

  bool all_passed() const;
};

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

nlohmann::ordered_json to_json(const CheckRecord& c);
nlohmann::ordered_json to_json(const ReportFile& r);
nlohmann::ordered_json vec_json(const Vec& v);

/// Serializes with "%.17g" doubles; non-finite numbers become null.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

}  // namespace ksym
