#pragma once

// Exterior algebra over the adapted coframe at a point, the curvature 2-form
// matrix and its wedge and trace powers.
//
// Basis forms theta^0..theta^{N-1} are dual to the adapted frame, so
// theta^{x_i} = dx_i and theta^{y} = dy + t dx. A degree-d form is stored as
// coefficients over increasing index tuples (bitmasks); the basis monomial
// theta^I evaluates to det/d! on frame vectors, so dx^dy(dx, dy) = 1/2.

#include <cstdint>
#include <map>
#include <vector>

#include "ksym/chart.hpp"
#include "ksym/types.hpp"

namespace ksym {

class FormValue {
 public:
  FormValue() = default;
  FormValue(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<std::uint32_t, double>& coefficients() const { return c_; }

  /// Coefficient of the monomial with the given increasing indices.
  double coefficient(const std::vector<int>& indices) const;
  /// Adds `value` times theta^{i_1} ^ ... ^ theta^{i_d} for indices in any
  /// order (sign from sorting; repeated indices contribute nothing).
  void add(const std::vector<int>& indices, double value);
  /// Adds to the coefficient of the increasing monomial given as a bitmask.
  void add_monomial(std::uint32_t mask, double value) { c_[mask] += value; }

  FormValue& operator+=(const FormValue& o);
  FormValue operator*(double s) const;

  double max_abs() const;
  /// Value on d frame vectors (components in the adapted frame).
  double evaluate(const std::vector<Vec>& vectors) const;

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::map<std::uint32_t, double> c_;
};

FormValue wedge(const FormValue& a, const FormValue& b);

/// Square matrix of forms of a common degree, indexed by frame indices.
struct MatrixOfForms {
  int size = 0;
  int degree = 0;
  std::vector<FormValue> entries;  // row-major

  FormValue& operator()(int r, int c) { return entries[static_cast<std::size_t>(r * size + c)]; }
  const FormValue& operator()(int r, int c) const {
    return entries[static_cast<std::size_t>(r * size + c)];
  }
  double max_abs() const;
};

/// (A ^ B)^a_b = sum_c A^a_c ^ B^c_b
MatrixOfForms wedge(const MatrixOfForms& a, const MatrixOfForms& b);

/// Omega^a_b = sum_{c<d} R(e_c, e_d)^a_b theta^c ^ theta^d, so that
/// Omega^a_b(e_c, e_d) = R^a_{b c d} / 2. Throws StructureViolation if a
/// coefficient on a horizontal-horizontal or vertical-vertical slot exceeds 1e-10.
MatrixOfForms curvature_two_form_at(const ManifoldSpec& spec, const Vec& p);

/// Largest forbidden-slot coefficient of Omega without throwing.
double curvature_form_slot_residual(const ManifoldSpec& spec, const Vec& p);

MatrixOfForms matrix_power(const MatrixOfForms& omega, int h);

/// max |coefficient| of the matrix wedge power Omega^h.
double wedge_power_residual(const ManifoldSpec& spec, const Vec& p, int h);

/// tr(Omega^m).
FormValue trace_power(const ManifoldSpec& spec, const Vec& p, int m);

/// max |coefficient| of tr(Omega^m).
double invariant_polynomial_residual(const ManifoldSpec& spec, const Vec& p, int m);

}  // namespace ksym
