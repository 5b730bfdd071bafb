#include "ksym/report.hpp"

#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "ksym/errors.hpp"

namespace ksym {

using ojson = nlohmann::ordered_json;

bool ReportFile::all_passed() const {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Fail) return false;
  }
  return true;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

ojson vec_json(const Vec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ojson to_json(const CheckRecord& c) {
  ojson j;
  j["id"] = c.id;
  j["description"] = c.description;
  j["status"] = to_string(c.status);
  j["max_residual"] = c.max_residual;
  if (c.witness) {
    ojson w;
    w["point"] = vec_json(c.witness->point);
    ojson vs = ojson::array();
    for (const Vec& v : c.witness->vectors) vs.push_back(vec_json(v));
    w["vectors"] = vs;
    w["note"] = c.witness->note;
    j["witness"] = w;
  }
  return j;
}

ojson to_json(const ReportFile& r) {
  ojson j;
  j["spec_digest"] = r.spec_digest;
  j["tool_version"] = r.tool_version;
  j["seed"] = r.seed;
  ojson checks = ojson::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  j["artifacts"] = r.artifacts;
  return j;
}

namespace {

void write(const ojson& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += ojson(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        write(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += scalars ? ", " : ",";
        if (!scalars) {
          out += nl;
          out += pad;
        }
        first = false;
        write(e, indent, depth + 1, out);
      }
      if (!scalars) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case ojson::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const ojson& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  out += "\n";
  return out;
}

}  // namespace ksym
