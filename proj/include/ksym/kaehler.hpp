#pragma once

// Almost k-Kaehler tensors on L_alpha + Q: the operator A relating omega_alpha
// to a metric, its polar part J, and the derived compatible metric.

#include "ksym/chart.hpp"
#include "ksym/types.hpp"

namespace ksym {

/// Metric in the coordinate basis at p.
Mat metric_at(const ManifoldSpec& spec, const Vec& p);

/// Matrices on L_alpha + Q in the local frame (Y_{alpha,1..n}, X_1..X_n).
struct StructureOperator {
  int alpha = 1;
  Mat basis;  // coordinate columns of the local frame
  Mat G;      // metric Gram matrix
  Mat W;      // omega_alpha Gram matrix
  Mat A;      // G A = W
};

/// Solves omega_alpha(u, v) = g(u, A v) on L_alpha + Q. Requires the frame
/// blocks to be mutually g-orthogonal at p (1e-9).
StructureOperator structure_operator(const ManifoldSpec& spec, int alpha, const Vec& p);

/// Unique SPD square root by symmetric eigendecomposition.
Mat sqrt_spd(const Mat& m);

struct AlmostComplex {
  int alpha = 1;
  Mat basis;
  Mat J;
  Mat ghat;  // ghat(u, v) = omega_alpha(J u, v)
  Mat W;
  // residuals of the verified identities
  double j_squared = 0.0;
  double block_swap = 0.0;
  double compatibility = 0.0;  // omega(u,v) - ghat(u, J v)
  double invariance = 0.0;     // ghat(Ju, Jv) - ghat(u, v)
  double ghat_min_eigenvalue = 0.0;
};

/// Polar decomposition J = sqrt(A A*)^{-1} A, with A* the g-adjoint.
/// Throws PropertyViolation when an identity fails beyond 1e-10.
AlmostComplex almost_complex(const ManifoldSpec& spec, int alpha, const Vec& p);

/// J_alpha as an endomorphism of the full tangent space in coordinates, zero
/// on L_beta for beta != alpha.
Mat j_field_at(const ManifoldSpec& spec, int alpha, const Vec& p);

enum class BracketMode {
  FrameExact,       // frame fields differentiated exactly, J-images by central differences
  FiniteDifference  // everything by central differences
};

/// N(u,v) = J^2[u,v] + [Ju,Jv] - J[Ju,v] - J[u,Jv] for frame fields u = e_a,
/// v = e_b. Coordinate basis; difference step 1e-5.
Vec nijenhuis_at(const ManifoldSpec& spec, int alpha, const Vec& p, int a, int b,
                 BracketMode mode = BracketMode::FrameExact);

/// Global metric assembled from ghat_alpha on each L_alpha and ghat_1 on Q,
/// coordinate basis.
Mat assembled_metric_at(const ManifoldSpec& spec, const Vec& p);

/// max |Gamma_LC - Gamma| over frame indices, Levi-Civita coefficients of the
/// assembled metric by the Koszul formula with differenced metric derivatives.
double levi_civita_comparison(const ManifoldSpec& spec, const Vec& p);

}  // namespace ksym
