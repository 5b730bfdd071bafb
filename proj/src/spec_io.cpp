#include "ksym/spec_io.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ksym/errors.hpp"

namespace ksym {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw SpecError("unknown key \"" + key + "\" in " + where);
  }
}

int positive_int(const json& doc, const char* key) {
  if (!doc.contains(key)) throw SpecError(std::string(key) + " required");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 64) {
    throw SpecError(std::string(key) + " must be a positive integer");
  }
  return v.get<int>();
}

ScalarField field_from(const json& v, const ChartSpec& c, const std::string& where) {
  if (v.is_string()) return parse_scalar_field(v.get<std::string>(), c.n, c.k);
  if (v.is_number()) return ScalarField::constant(c, v.get<double>());
  throw SpecError(where + " must be an expression string or a number");
}

Vec vector_from(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) {
    throw SpecError(where + " must be an array of " + std::to_string(dim) + " numbers");
  }
  Vec out(dim);
  for (int i = 0; i < dim; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) throw SpecError(where + " entries must be numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

}  // namespace

ManifoldSpec parse_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw JsonError(e.what(), e.byte);
  }
  if (!doc.is_object()) throw SpecError("spec must be a JSON object");
  reject_unknown(doc, {"n", "k", "t", "metric", "base_point", "region"}, "spec");

  const int n = positive_int(doc, "n");
  const int k = positive_int(doc, "k");
  ManifoldSpec spec(n, k);
  const ChartSpec& c = spec.chart();
  const int dim = c.dim();

  if (doc.contains("t")) {
    const json& t = doc.at("t");
    if (!t.is_object()) throw SpecError("t must be an object");
    static const std::regex key_re(R"(t\[(\d+)\]\[(\d+)\]\[(\d+)\])");
    for (const auto& [key, value] : t.items()) {
      std::smatch m;
      if (!std::regex_match(key, m, key_re)) throw SpecError("bad t key \"" + key + "\"");
      const int i = std::stoi(m[1]), alpha = std::stoi(m[2]), j = std::stoi(m[3]);
      if (i < 1 || i > n || j < 1 || j > n || alpha < 1 || alpha > k) {
        throw SpecError("index out of range: " + key);
      }
      spec.set_t(i, alpha, j, field_from(value, c, key));
    }
  }

  if (doc.contains("metric")) {
    const json& m = doc.at("metric");
    if (m.is_string()) {
      const std::string s = m.get<std::string>();
      if (s == "identity") {
        spec.set_metric({MetricKind::CoordinateIdentity, {}});
      } else if (s == "adapted") {
        spec.set_metric({MetricKind::AdaptedIdentity, {}});
      } else {
        throw SpecError("metric must be \"identity\", \"adapted\" or a matrix");
      }
    } else if (m.is_array() && static_cast<int>(m.size()) == dim) {
      MetricSpec ms{MetricKind::Field, {}};
      for (const json& row : m) {
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
          throw SpecError("metric matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
        }
        for (const json& e : row) ms.entries.push_back(field_from(e, c, "metric entry"));
      }
      spec.set_metric(std::move(ms));
    } else {
      throw SpecError("metric must be \"identity\", \"adapted\" or a " + std::to_string(dim) + "x" +
                      std::to_string(dim) + " matrix");
    }
  }

  if (doc.contains("base_point")) spec.set_base_point(vector_from(doc.at("base_point"), dim, "base_point"));

  if (doc.contains("region")) {
    const json& r = doc.at("region");
    if (!r.is_object()) throw SpecError("region must be an object");
    reject_unknown(r, {"min", "max"}, "region");
    if (!r.contains("min") || !r.contains("max")) throw SpecError("region needs min and max");
    Box box{vector_from(r.at("min"), dim, "region.min"), vector_from(r.at("max"), dim, "region.max")};
    for (int i = 0; i < dim; ++i) {
      if (!(box.lo[i] < box.hi[i])) throw SpecError("region.min must be below region.max");
    }
    spec.set_region(std::move(box));
  }
  return spec;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return ss.str();
}

ManifoldSpec load_spec(const std::filesystem::path& path) { return parse_spec(read_file(path)); }

}  // namespace ksym
