#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace torusmf {

// Node-sampled periodic grid function on an n x n grid. Storage is row-major
// with the x index fastest: value(i, j) = data[j * n + i], x = i/n, y = j/n.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::size_t n, double fill = 0.0);
  // Throws InvalidArgument on size mismatch or non-finite entries.
  ScalarField(std::size_t n, std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[j * n_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[j * n_ + i]; }
  // Periodic access with wrap-around in both axes.
  double at(long i, long j) const;

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  // this += alpha * x
  ScalarField& add_scaled(double alpha, const ScalarField& x);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

// Periodic shift by (di, dj) nodes: out(i, j) = in(i - di, j - dj).
ScalarField shift(const ScalarField& f, long di, long dj);

// Coefficients of c1 dx + c2 dy.
struct OneForm {
  ScalarField c1;
  ScalarField c2;

  OneForm() = default;
  explicit OneForm(std::size_t n) : c1(n), c2(n) {}
  OneForm(ScalarField a, ScalarField b);

  std::size_t n() const { return c1.n(); }
};

}  // namespace torusmf
