#include "ksym/two_form.hpp"

#include "ksym/errors.hpp"

namespace ksym {

void TwoFormField::set(int l, int m, ScalarField f) {
  const int dim = chart_.dim();
  if (l < 0 || m < 0 || l >= dim || m >= dim || l == m) {
    throw IndexOutOfRange("two-form slot (" + std::to_string(l) + "," + std::to_string(m) +
                          ") invalid");
  }
  if (l > m) {
    std::swap(l, m);
    f = ScalarField(f.chart(), ast::neg(f.root_ptr()));
  }
  if (f.is_zero()) {
    entries_.erase({l, m});
  } else {
    entries_.insert_or_assign({l, m}, std::move(f));
  }
}

void TwoFormField::set_constant(int l, int m, double value) {
  set(l, m, ScalarField::constant(chart_, value));
}

Mat TwoFormField::matrix_at(const Vec& p) const {
  const int dim = chart_.dim();
  Mat w = Mat::Zero(dim, dim);
  for (const auto& [slot, f] : entries_) {
    const double c = eval_value(f, p);
    w(slot.first, slot.second) = c;
    w(slot.second, slot.first) = -c;
  }
  return w;
}

TwoFormField::Jet TwoFormField::jet_at(const Vec& p) const {
  const int dim = chart_.dim();
  Jet out{Mat::Zero(dim, dim), std::vector<Mat>(static_cast<std::size_t>(dim), Mat::Zero(dim, dim))};
  for (const auto& [slot, f] : entries_) {
    const Jet2 c = eval_jet2(f, p);
    out.value(slot.first, slot.second) = c.value;
    out.value(slot.second, slot.first) = -c.value;
    for (int m = 0; m < dim; ++m) {
      out.partials[static_cast<std::size_t>(m)](slot.first, slot.second) = c.grad[m];
      out.partials[static_cast<std::size_t>(m)](slot.second, slot.first) = -c.grad[m];
    }
  }
  return out;
}

}  // namespace ksym
