#pragma once

#include <Eigen/Dense>

namespace ksym {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dimensions of a Darboux chart on R^(n(k+1)).
///
/// Coordinates are ordered (x1..xn, y1..y{kn}); flat index of x_i is i-1 and
/// of y_{(a-1)n+i} is n + (a-1)n + i - 1.
struct ChartSpec {
  int n = 1;
  int k = 1;

  int dim() const { return n * (k + 1); }
  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

}  // namespace ksym
