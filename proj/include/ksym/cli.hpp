#pragma once

// Command-line driver:
//
//   ksym <command> spec.json [--samples N] [--seed S] [--box lo,hi] [--tol T] [--out report.json]
//
// Commands: validate, connection, curvature, transport, geodesic, rectangle,
// normal-form, kaehler, charclass, all. Exit status 0 when every executed
// check passes, 1 on a failed check, 2 on usage or spec errors.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ksym/chart.hpp"
#include "ksym/report.hpp"
#include "ksym/structures.hpp"

namespace ksym {

const std::vector<std::string>& cli_commands();

/// All checks of `command` on a loaded spec. A given `tol` replaces every
/// per-check default tolerance.
ReportFile run_checks(const ManifoldSpec& spec, const std::string& command, const SamplingPlan& plan,
                      std::optional<double> tol = std::nullopt);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace ksym
