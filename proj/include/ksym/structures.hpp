#pragma once

// The k-symplectic forms and sampled validation of the hypotheses under
// which the canonical connection exists.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksym/chart.hpp"
#include "ksym/two_form.hpp"
#include "ksym/types.hpp"

namespace ksym {

/// omega_alpha = sum_i dx_i ^ dy_{(alpha-1)n+i}, stored with c = 1/2.
TwoFormField standard_omega(const ChartSpec& chart, int alpha);

double eval_two_form(const TwoFormField& omega, const Vec& p, const Vec& u, const Vec& v);

/// omega on pairs of adapted-frame fields and its derivatives along the frame.
struct FormOnFrame {
  Mat values;               // values(b, c) = omega(e_b, e_c)
  std::vector<Mat> derivs;  // derivs[a](b, c) = e_a(omega(e_b, e_c))
};

FormOnFrame form_on_frame(const TwoFormField& omega, const FrameJet& fj);

enum class CheckStatus { Pass, Fail, Skipped };

const char* to_string(CheckStatus s);

struct Witness {
  Vec point;
  std::vector<Vec> vectors;
  std::string note;
};

struct CheckRecord {
  std::string id;
  std::string description;
  CheckStatus status = CheckStatus::Pass;
  double max_residual = 0.0;
  std::optional<Witness> witness;
};

struct ValidationReport {
  std::vector<CheckRecord> checks;

  bool all_passed() const;
  const CheckRecord& find(const std::string& id) const;
};

/// Deterministic sampling: `sample_count` points drawn uniformly from `box`
/// (the cube [-1,1]^dim when empty) by a 64-bit Mersenne twister seeded with
/// `seed`.
struct SamplingPlan {
  int sample_count = 100;
  std::uint64_t seed = 0;
  std::optional<Box> box;
  double tolerance = 1e-9;
  int threads = 0;  // 0: hardware concurrency, capped by KSYM_THREADS

  std::vector<Vec> points(const ChartSpec& chart) const;
};

/// Runs checks C1..C7 at every sampled point. A falsified check is reported,
/// never thrown; evaluation failures of the defining fields propagate.
ValidationReport validate_spec(const ManifoldSpec& spec, const SamplingPlan& plan = {});

struct GroupMembership {
  bool member = false;
  std::string diagnostic;

  explicit operator bool() const { return member; }
};

/// Membership in the k-symplectic group: block matrices
///
///   [ T          S_1      ]
///   [    ...     ...      ]
///   [        T   S_k      ]
///   [ 0          T^{-T}   ]
///
/// with T invertible and T S_a^T symmetric, to tolerance 1e-10.
GroupMembership is_group_element(const Mat& m, int n, int k);

}  // namespace ksym
