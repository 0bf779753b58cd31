#pragma once

// Uniform periodic grid on the torus [0,1)^2 with conformal metric
// g = e^{2v}(dx^2 + dy^2), and the discrete calculus on it.
//
// Sign convention: the Laplacian is the geometer's one, Delta_g = d* d,
// which is positive semi-definite (Delta_g sin(2 pi x) = 4 pi^2 sin(2 pi x)).

#include <cstddef>
#include <string>

#include "torusmf/field.hpp"

namespace torusmf {

enum class Backend { Spectral, FiniteDifference };

class TorusGrid {
 public:
  std::size_t n() const { return n_; }
  double h() const { return h_; }
  const ScalarField& v() const { return v_; }
  // e^{2v} h^2 at every node.
  const ScalarField& area_element() const { return area_; }
  // e^{-2v}
  const ScalarField& inverse_conformal() const { return inv_conf_; }
  // e^{2v}
  const ScalarField& conformal() const { return conf_; }
  double total_area() const { return total_area_; }
  const std::string& v_preset() const { return v_preset_; }
  bool flat() const { return flat_; }

  double coordinate(std::size_t i) const { return static_cast<double>(i) * h_; }

  friend TorusGrid build_grid(std::size_t n, ScalarField v, std::string v_preset);

 private:
  std::size_t n_ = 0;
  double h_ = 0.0;
  ScalarField v_, area_, inv_conf_, conf_;
  double total_area_ = 0.0;
  std::string v_preset_;
  bool flat_ = true;
};

// n must be a power of two >= 16; v must be finite.
TorusGrid build_grid(std::size_t n, ScalarField v, std::string v_preset = "custom-file");
// Built-in presets: "zero", "cos-x" (v = 0.1 cos 2 pi x), "cos-x:<amp>".
TorusGrid build_grid(std::size_t n, const std::string& v_preset);
ScalarField v_preset_field(std::size_t n, const std::string& v_preset);

// Periodic trapezoid rule: sum f e^{2v} h^2.
double integrate(const ScalarField& f, const TorusGrid& grid);
double l2_inner(const ScalarField& f, const ScalarField& g, const TorusGrid& grid);
double l2_norm(const ScalarField& f, const TorusGrid& grid);
// int <s, x>_g dv_g; the conformal factors cancel in two dimensions.
double oneform_inner(const OneForm& s, const OneForm& x, const TorusGrid& grid);
// Pointwise |s|_g^2 = e^{-2v}(c1^2 + c2^2).
ScalarField pointwise_norm2(const OneForm& s, const TorusGrid& grid);

OneForm exterior_derivative(const ScalarField& u);
// d* s = -e^{-2v} (d1 s1 + d2 s2)
ScalarField codifferential(const OneForm& s, const TorusGrid& grid);
// Delta_g u = -e^{-2v} Delta_flat u; the finite-difference backend uses the
// 5-point stencil for Delta_flat.
ScalarField laplacian(const ScalarField& u, const TorusGrid& grid, Backend backend = Backend::Spectral);
// -Delta_flat u (positive convention, no conformal factor).
ScalarField flat_laplacian(const ScalarField& u, Backend backend = Backend::Spectral);
// Scalar curl d1 s2 - d2 s1 (coefficient of dx ^ dy).
ScalarField curl(const OneForm& s);

struct Node {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const Node&, const Node&) = default;
};

// Minimum-image offset of x from a in one periodic coordinate, in [-1/2, 1/2).
double periodic_offset(double x, double a);
// Flat minimum-image distance from every node to `p`.
ScalarField distance_to(const TorusGrid& grid, Node p);

}  // namespace torusmf
