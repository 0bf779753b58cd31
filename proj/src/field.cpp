#include "torusmf/field.hpp"

#include <cmath>
#include <string>

#include "torusmf/errors.hpp"
#include "torusmf/kernels.hpp"

namespace torusmf {

ScalarField::ScalarField(std::size_t n, double fill) : n_(n), values_(n * n, fill) {
  if (!std::isfinite(fill)) throw InvalidArgument("ScalarField: non-finite fill value");
}

ScalarField::ScalarField(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (values_.size() != n * n) {
    throw InvalidArgument("ScalarField: expected " + std::to_string(n * n) + " values, got " +
                          std::to_string(values_.size()));
  }
  if (!all_finite()) throw InvalidArgument("ScalarField: non-finite entry");
}

double ScalarField::at(long i, long j) const {
  const long n = static_cast<long>(n_);
  i %= n;
  j %= n;
  if (i < 0) i += n;
  if (j < 0) j += n;
  return values_[static_cast<std::size_t>(j * n + i)];
}

bool ScalarField::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) { return add_scaled(1.0, other); }

ScalarField& ScalarField::operator-=(const ScalarField& other) { return add_scaled(-1.0, other); }

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::add_scaled(double alpha, const ScalarField& x) {
  if (x.n_ != n_) throw InvalidArgument("ScalarField: shape mismatch");
  kernels::active().axpy(alpha, x.data(), data(), values_.size());
  return *this;
}

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  if (a.n() != b.n()) throw InvalidArgument("hadamard: shape mismatch");
  ScalarField out(a.n());
  kernels::active().mul(a.data(), b.data(), out.data(), a.size());
  return out;
}

ScalarField shift(const ScalarField& f, long di, long dj) {
  const std::size_t n = f.n();
  ScalarField out(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      out(i, j) = f.at(static_cast<long>(i) - di, static_cast<long>(j) - dj);
    }
  }
  return out;
}

OneForm::OneForm(ScalarField a, ScalarField b) : c1(std::move(a)), c2(std::move(b)) {
  if (c1.n() != c2.n()) throw InvalidArgument("OneForm: component shape mismatch");
}

}  // namespace torusmf
