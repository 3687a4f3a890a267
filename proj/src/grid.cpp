#include "vortexlab/grid.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/soliton1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vortexlab {

RadialGrid::RadialGrid(double r_max, Eigen::Index n) : r_max_(r_max), n_(n) {
  require(std::isfinite(r_max) && r_max > 0.0, ErrorKind::InvalidParameter,
          "radial grid needs r_max > 0");
  require(n >= 3, ErrorKind::InvalidParameter, "radial grid needs at least 3 interior nodes");
  h_ = r_max / static_cast<double>(n + 1);
}

RadialGrid RadialGrid::with_spacing(double r_max, double h_target) {
  require(h_target > 0.0, ErrorKind::InvalidParameter, "grid spacing must be positive");
  const auto n = static_cast<Eigen::Index>(std::ceil(r_max / h_target)) - 1;
  return RadialGrid(r_max, std::max<Eigen::Index>(n, 3));
}

Eigen::ArrayXd RadialGrid::nodes() const {
  return Eigen::ArrayXd::LinSpaced(n_, h_, static_cast<double>(n_) * h_);
}

LineGrid::LineGrid(double x_min, double x_max, Eigen::Index n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
          ErrorKind::InvalidParameter, "line grid needs x_min < x_max");
  require(n >= 3, ErrorKind::InvalidParameter, "line grid needs at least 3 interior nodes");
  h_ = (x_max - x_min) / static_cast<double>(n + 1);
}

LineGrid LineGrid::with_spacing(double half_width, double h_target) {
  require(h_target > 0.0 && half_width > 0.0, ErrorKind::InvalidParameter,
          "line grid needs positive half width and spacing");
  const auto n = static_cast<Eigen::Index>(std::ceil(2.0 * half_width / h_target)) - 1;
  return LineGrid(-half_width, half_width, std::max<Eigen::Index>(n, 3));
}

Eigen::ArrayXd LineGrid::nodes() const {
  return Eigen::ArrayXd::LinSpaced(n_, node(0), node(n_ - 1));
}

void check_resolution(double h, double nu, double wavenumber, const char* what) {
  const double g = h * std::max(nu, wavenumber);
  if (g > kResolutionLimit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << what << ": h*max(nu, k) = " << g << " exceeds " << kResolutionLimit << " (h = " << h
       << ", nu = " << nu << ", k = " << wavenumber << ")";
    fail(ErrorKind::ResolutionGuard, os.str());
  }
}

RadialGrid default_radial_grid(double p, double omega, int m, int nu_max) {
  const SolitonParams sp = balance_constants(p, omega);
  const double rbar = sp.alpha0 * m;
  const double r_max = rbar + 40.0 / std::sqrt(omega);
  const double nu = std::max(m, nu_max);
  const double h = std::min(0.025, 0.3 / std::max(nu, std::sqrt(sp.c)));
  return RadialGrid::with_spacing(r_max, h);
}

}  // namespace vortexlab
