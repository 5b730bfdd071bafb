#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "ksym/cli.hpp"
#include "ksym/errors.hpp"
#include "ksym/spec_io.hpp"
#include "test_support.hpp"

using namespace ksym;
using testing::fixture;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ksym_test_" + name);
}

}  // namespace

TEST_CASE("spec loading") {
  const ManifoldSpec s = load_spec(fixture("curved.json"));
  CHECK(s.chart().n == 1);
  CHECK(format_field(s.t(1, 1, 1)) == "y1^2/2");
  CHECK(s.base_point() == testing::vec({0, 1}));

  CHECK_THROWS_WITH_AS(load_spec(fixture("missing_k.json")), "k required", SpecError);
  CHECK_THROWS_WITH_AS(load_spec(fixture("bad_index.json")), "index out of range: t[2][1][1]", SpecError);
  CHECK_THROWS_AS(load_spec(fixture("does_not_exist.json")), IoError);

  CHECK_THROWS_WITH_AS(parse_spec(R"({"k": 1})"), "n required", SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "k": 1, "colour": 3})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "k": 1, "base_point": [0]})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "k": 1, "t": {"t[1][1]": "x1"}})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "k": 1, "t": {"t[1][1][1]": "z"}})"), UnknownIdentifier);
  try {
    parse_spec(R"({"n": 1, "k": )");
    FAIL("expected JsonError");
  } catch (const JsonError& e) {
    CHECK(e.position() == 15);
  }

  const ManifoldSpec m = parse_spec(R"({"n": 1, "k": 1, "metric": [["2", 0], [0, "1 + x1^2"]],
                                        "region": {"min": [-2, -1], "max": [2, 1]}})");
  CHECK(m.metric().kind == MetricKind::Field);
  CHECK(m.region().lo[0] == -2);
}

TEST_CASE("exit codes on the fixture matrix") {
  CHECK(cli({"all", fixture("flat.json")}).code == 0);
  CHECK(cli({"all", fixture("curved.json")}).code == 0);
  CHECK(cli({"all", fixture("constant.json")}).code == 0);
  CHECK(cli({"validate", fixture("broken_k2.json")}).code == 1);
  const Result missing = cli({"validate", fixture("missing_k.json")});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("k required") != std::string::npos);
  CHECK(cli({"validate", fixture("bad_index.json")}).code == 2);
}

TEST_CASE("usage errors") {
  const Result unknown = cli({"frobnicate", fixture("flat.json")});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"validate", fixture("flat.json"), "--samples", "0"}).code == 2);
  CHECK(cli({"validate", fixture("flat.json"), "--box", "1"}).code == 2);
  CHECK(cli({"validate", fixture("flat.json"), "--box", "1,-1"}).code == 2);
  CHECK(cli({"validate", fixture("flat.json"), "--bogus"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("report contents") {
  const auto path = temp_file("report.json");
  const Result r = cli({"validate", fixture("flat.json"), "--samples", "100", "--seed", "0", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("C1") != std::string::npos);
  const std::string text = read_file(path);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["spec_digest"] == sha256_hex(read_file(fixture("flat.json"))));
  CHECK(j["tool_version"] == "0.1.0");
  CHECK(j["seed"] == 0);
  CHECK(j["checks"].size() == 7);
  for (const auto& c : j["checks"]) CHECK(c["status"] == "pass");
  std::filesystem::remove(path);

  const Result broken = cli({"validate", fixture("broken_k2.json")});
  const auto b = nlohmann::json::parse(broken.out);
  bool found = false;
  for (const auto& c : b["checks"]) {
    if (c["id"] == "C5") {
      found = true;
      CHECK(c["status"] == "fail");
      CHECK(c["witness"]["point"].size() == 3);
    }
  }
  CHECK(found);
}

TEST_CASE("curved suite passes the invariant checks") {
  const Result r = cli({"all", fixture("curved.json"), "--samples", "30"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  std::map<std::string, std::string> status;
  for (const auto& c : j["checks"]) status[c["id"]] = c["status"];
  for (const char* id : {"parallel_omega", "torsion_mixed", "torsion_leafwise", "curvature_leafwise",
                         "curvature_oracle", "uniqueness", "transport_leaf_loop", "wedge_power"}) {
    CHECK_MESSAGE(status[id] == "pass", id);
  }
  CHECK(status["normal_form_residual"] == "skipped");
  CHECK(j["artifacts"].contains("rectangle"));
}

TEST_CASE("flags") {
  const Result a = cli({"validate", fixture("curved.json"), "--box", "-1,1", "--samples", "10"});
  const Result b = cli({"validate", fixture("curved.json"), "--box", "-1,1", "--samples", "10", "--seed", "3"});
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  CHECK(a.out != b.out);
  // a tolerance nobody can meet fails the checks with nonzero residual
  CHECK(cli({"connection", fixture("curved.json"), "--tol", "-1"}).code == 1);
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
  const Result a = cli({"all", fixture("constant.json"), "--samples", "20", "--seed", "4"});
  const Result b = cli({"all", fixture("constant.json"), "--samples", "20", "--seed", "4"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  setenv("KSYM_THREADS", "1", 1);
  const Result c = cli({"all", fixture("constant.json"), "--samples", "20", "--seed", "4"});
  unsetenv("KSYM_THREADS");
  CHECK(a.out == c.out);
}

TEST_CASE("the installed binary follows the exit-code contract") {
  const std::string bin = KSYM_CLI_PATH;
  const auto devnull = " > /dev/null 2>&1";
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + devnull).c_str());
    return WEXITSTATUS(s);
  };
  CHECK(status("validate " + fixture("flat.json")) == 0);
  CHECK(status("validate " + fixture("broken_k2.json")) == 1);
  CHECK(status("frobnicate") == 2);
}
