#include "ksym/charclass.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ksym/connection.hpp"
#include "ksym/errors.hpp"

namespace ksym {

namespace {

constexpr int kMaxDim = 31;

double factorial(int d) {
  double f = 1.0;
  for (int i = 2; i <= d; ++i) f *= i;
  return f;
}

std::vector<int> bits_of(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1) {
    if (mask & 1u) out.push_back(i);
  }
  return out;
}

}  // namespace

FormValue::FormValue(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0) throw DimensionMismatch("form needs positive dimension and degree >= 0");
  if (dim > kMaxDim) {
    throw DegreeOverflow("exterior algebra limited to " + std::to_string(kMaxDim) +
                         " dimensions, chart has " + std::to_string(dim));
  }
}

double FormValue::coefficient(const std::vector<int>& indices) const {
  std::uint32_t mask = 0;
  for (int i : indices) mask |= 1u << i;
  const auto it = c_.find(mask);
  return it == c_.end() ? 0.0 : it->second;
}

void FormValue::add(const std::vector<int>& indices, double value) {
  if (static_cast<int>(indices.size()) != degree_) {
    throw DimensionMismatch("monomial has " + std::to_string(indices.size()) +
                            " factors, form degree is " + std::to_string(degree_));
  }
  std::vector<int> idx = indices;
  int swaps = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= dim_) throw IndexOutOfRange("coframe index out of range");
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[j] == idx[i]) return;
      if (idx[j] < idx[i]) ++swaps;
    }
  }
  std::uint32_t mask = 0;
  for (int i : idx) mask |= 1u << i;
  c_[mask] += swaps % 2 ? -value : value;
}

FormValue& FormValue::operator+=(const FormValue& o) {
  if (o.dim_ != dim_ || o.degree_ != degree_) throw DimensionMismatch("adding forms of different type");
  for (const auto& [m, v] : o.c_) c_[m] += v;
  return *this;
}

FormValue FormValue::operator*(double s) const {
  FormValue out = *this;
  for (auto& [m, v] : out.c_) v *= s;
  return out;
}

double FormValue::max_abs() const {
  double m = 0.0;
  for (const auto& [mask, v] : c_) m = std::max(m, std::abs(v));
  return m;
}

double FormValue::evaluate(const std::vector<Vec>& vectors) const {
  if (static_cast<int>(vectors.size()) != degree_) {
    throw DimensionMismatch("form of degree " + std::to_string(degree_) + " needs that many vectors");
  }
  double s = 0.0;
  for (const auto& [mask, v] : c_) {
    const std::vector<int> idx = bits_of(mask);
    Mat m(degree_, degree_);
    for (int r = 0; r < degree_; ++r) {
      for (int c = 0; c < degree_; ++c) m(r, c) = vectors[static_cast<std::size_t>(c)][idx[static_cast<std::size_t>(r)]];
    }
    s += v * (degree_ ? m.determinant() : 1.0);
  }
  return s / factorial(degree_);
}

FormValue wedge(const FormValue& a, const FormValue& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("wedge of forms on different charts");
  FormValue out(a.dim(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.coefficients()) {
    for (const auto& [mb, cb] : b.coefficients()) {
      if (ma & mb) continue;
      int inversions = 0;
      for (int j : bits_of(mb)) inversions += std::popcount(ma >> (j + 1));
      out.add_monomial(ma | mb, (inversions % 2 ? -1.0 : 1.0) * ca * cb);
    }
  }
  return out;
}

double MatrixOfForms::max_abs() const {
  double m = 0.0;
  for (const auto& f : entries) m = std::max(m, f.max_abs());
  return m;
}

MatrixOfForms wedge(const MatrixOfForms& a, const MatrixOfForms& b) {
  if (a.size != b.size) throw DimensionMismatch("matrix sizes differ");
  const int n = a.size;
  const int dim = a.entries.front().dim();
  MatrixOfForms out{n, a.degree + b.degree,
                    std::vector<FormValue>(static_cast<std::size_t>(n * n),
                                           FormValue(dim, a.degree + b.degree))};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (int m = 0; m < n; ++m) {
        if (a(r, m).coefficients().empty() || b(m, c).coefficients().empty()) continue;
        out(r, c) += wedge(a(r, m), b(m, c));
      }
    }
  }
  return out;
}

namespace {

struct Assembled {
  MatrixOfForms omega;
  double forbidden = 0.0;
  std::string where;
};

Assembled assemble(const ManifoldSpec& spec, const Vec& p) {
  const ChartSpec& ch = spec.chart();
  const int dim = ch.dim();
  const Tensor4 r = curvature_at(spec, p);
  Assembled out{MatrixOfForms{dim, 2, std::vector<FormValue>(static_cast<std::size_t>(dim * dim),
                                                             FormValue(dim, 2))},
                0.0, {}};
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int c = 0; c < dim; ++c) {
        for (int d = c + 1; d < dim; ++d) {
          const double v = r(a, c, d, b);
          if (v == 0.0) continue;
          out.omega(a, b).add({c, d}, v);
          const bool mixed = (frame_block(ch, c) == 0) != (frame_block(ch, d) == 0);
          if (!mixed && std::abs(v) > out.forbidden) {
            out.forbidden = std::abs(v);
            out.where = "Omega^" + std::to_string(a) + "_" + std::to_string(b) + " has coefficient " +
                        std::to_string(v) + " on slot (" + std::to_string(c) + "," +
                        std::to_string(d) + ")";
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

MatrixOfForms curvature_two_form_at(const ManifoldSpec& spec, const Vec& p) {
  Assembled a = assemble(spec, p);
  if (a.forbidden > 1e-10) throw StructureViolation(a.where);
  return std::move(a.omega);
}

double curvature_form_slot_residual(const ManifoldSpec& spec, const Vec& p) {
  return assemble(spec, p).forbidden;
}

MatrixOfForms matrix_power(const MatrixOfForms& omega, int h) {
  if (h < 1) throw Error("power must be positive");
  MatrixOfForms acc = omega;
  for (int i = 1; i < h; ++i) acc = wedge(omega, acc);
  return acc;
}

double wedge_power_residual(const ManifoldSpec& spec, const Vec& p, int h) {
  return matrix_power(curvature_two_form_at(spec, p), h).max_abs();
}

FormValue trace_power(const ManifoldSpec& spec, const Vec& p, int m) {
  const MatrixOfForms pw = matrix_power(curvature_two_form_at(spec, p), m);
  FormValue tr(pw.entries.front().dim(), pw.degree);
  for (int a = 0; a < pw.size; ++a) tr += pw(a, a);
  return tr;
}

double invariant_polynomial_residual(const ManifoldSpec& spec, const Vec& p, int m) {
  return trace_power(spec, p, m).max_abs();
}

}  // namespace ksym
