#pragma once

#include <Eigen/Core>

#include <cmath>

namespace vortexlab {

/// Largest admissible h * (dominant wavenumber) for any operator built on a grid.
inline constexpr double kResolutionLimit = 0.35;

/// Uniform mesh of the half-line (0, r_max) with interior nodes r_i = i h,
/// i = 1..n, h = r_max / (n + 1). Dirichlet values are implied at both ends.
class RadialGrid {
 public:
  RadialGrid() = default;
  RadialGrid(double r_max, Eigen::Index n);

  /// Smallest n whose spacing does not exceed h_target.
  static RadialGrid with_spacing(double r_max, double h_target);

  double r_max() const { return r_max_; }
  Eigen::Index size() const { return n_; }
  double spacing() const { return h_; }
  double node(Eigen::Index i) const { return static_cast<double>(i + 1) * h_; }
  Eigen::ArrayXd nodes() const;

  bool operator==(const RadialGrid&) const = default;

 private:
  double r_max_ = 0.0;
  Eigen::Index n_ = 0;
  double h_ = 0.0;
};

/// Uniform mesh of (x_min, x_max) with interior nodes x_min + i h, i = 1..n.
class LineGrid {
 public:
  LineGrid() = default;
  LineGrid(double x_min, double x_max, Eigen::Index n);

  static LineGrid with_spacing(double half_width, double h_target);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  Eigen::Index size() const { return n_; }
  double spacing() const { return h_; }
  double node(Eigen::Index i) const { return x_min_ + static_cast<double>(i + 1) * h_; }
  Eigen::ArrayXd nodes() const;

  bool operator==(const LineGrid&) const = default;

 private:
  double x_min_ = 0.0;
  double x_max_ = 0.0;
  Eigen::Index n_ = 0;
  double h_ = 0.0;
};

/// Throws ResolutionGuard when h * max(nu, wavenumber) exceeds kResolutionLimit.
void check_resolution(double h, double nu, double wavenumber, const char* what);

/// Discrete L^2_r norm (sum h r_i f_i^2)^{1/2}.
template <typename Derived>
double l2r_norm(const RadialGrid& grid, const Eigen::DenseBase<Derived>& f) {
  return std::sqrt(grid.spacing() * (grid.nodes() * f.derived().array().abs2()).sum());
}

/// Default mesh for a vortex of spin m: r_max = rbar + 40/sqrt(omega), spacing
/// min(0.025, 0.3 / max(nu_max, sqrt(c))) so that the guard holds for every
/// index up to nu_max.
RadialGrid default_radial_grid(double p, double omega, int m, int nu_max = 0);

}  // namespace vortexlab
