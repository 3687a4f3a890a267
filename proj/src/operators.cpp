#include "vortexlab/operators.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/profile.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace vortexlab {

BandedOperator::BandedOperator(Grid grid, Eigen::VectorXd lower, Eigen::VectorXd diag,
                               Eigen::VectorXd upper, Weight weight)
    : grid_(std::move(grid)),
      lower_(std::move(lower)),
      diag_(std::move(diag)),
      upper_(std::move(upper)),
      weight_(weight) {
  require(diag_.size() >= 2 && lower_.size() == diag_.size() - 1 &&
              upper_.size() == diag_.size() - 1,
          ErrorKind::InvalidParameter, "inconsistent band sizes");
  symmetric_ = lower_ == upper_;
}

BandedOperator BandedOperator::plus_diagonal(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  require(v.size() == size(), ErrorKind::InvalidParameter, "diagonal shift has wrong length");
  return BandedOperator(grid_, lower_, diag_ + v, upper_, weight_);
}

Eigen::SparseMatrix<double> BandedOperator::to_sparse() const {
  const Eigen::Index n = size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(3 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, diag_(i));
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, upper_(i));
      t.emplace_back(i + 1, i, lower_(i));
    }
  }
  Eigen::SparseMatrix<double> s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

Eigen::MatrixXd BandedOperator::to_dense() const { return Eigen::MatrixXd(to_sparse()); }

BandedOperator radial_operator(const RadialGrid& grid, double nu_sq, double omega,
                               const Eigen::Ref<const Eigen::VectorXd>& potential,
                               RadialForm form) {
  const Eigen::Index n = grid.size();
  require(potential.size() == n, ErrorKind::InvalidParameter,
          "potential length " + std::to_string(potential.size()) + " does not match grid size " +
              std::to_string(n));
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const Eigen::ArrayXd r = grid.nodes();

  Eigen::VectorXd diag =
      (-2.0 * inv_h2 - omega - (nu_sq - 0.25) / r.square() + potential.array()).matrix();

  if (form == RadialForm::Symmetrized) {
    Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, inv_h2);
    return BandedOperator(grid, off, std::move(diag), off, Weight::Plain);
  }
  // r_{i+-1}/r_i = (i+1 +- 1)/(i+1) on a uniform mesh starting at h
  Eigen::VectorXd lower(n - 1);
  Eigen::VectorXd upper(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    upper(i) = std::sqrt(r(i + 1) / r(i)) * inv_h2;
    lower(i) = std::sqrt(r(i) / r(i + 1)) * inv_h2;
  }
  return BandedOperator(grid, std::move(lower), std::move(diag), std::move(upper),
                        Weight::RWeighted);
}

BandedOperator build_radial_schroedinger(const RadialGrid& grid, int nu, double omega,
                                         const Eigen::Ref<const Eigen::VectorXd>& potential,
                                         RadialForm form) {
  require(nu >= 0, ErrorKind::InvalidParameter, "angular index nu must be nonnegative");
  require(omega > 0.0, ErrorKind::InvalidParameter, "omega must be positive");
  check_resolution(grid.spacing(), nu, std::sqrt(omega), "radial operator");
  return radial_operator(grid, static_cast<double>(nu) * nu, omega, potential, form);
}

Eigen::VectorXd radial_laplacian(const RadialGrid& grid,
                                 const Eigen::Ref<const Eigen::VectorXd>& f) {
  // omega = 0, nu = 0, no potential: the plain stencil is exactly Delta_r
  const BandedOperator lap =
      radial_operator(grid, 0.0, 0.0, Eigen::VectorXd::Zero(grid.size()), RadialForm::Plain);
  return lap.apply(f);
}

namespace {

void check_line_grid(const LineGrid& grid, double c) {
  check_resolution(grid.spacing(), 0.0, std::sqrt(c), "line operator");
  const double reach = 30.0 / std::sqrt(c);
  if (-grid.x_min() < reach || grid.x_max() < reach) {
    fail(ErrorKind::ResolutionGuard,
         "line grid must extend to |x| >= 30/sqrt(c) = " + std::to_string(reach));
  }
}

BandedOperator line_operator(const LineGrid& grid, double c, const Eigen::VectorXd& potential) {
  const Eigen::Index n = grid.size();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, inv_h2);
  Eigen::VectorXd diag = (Eigen::VectorXd::Constant(n, -2.0 * inv_h2 - c) + potential);
  return BandedOperator(grid, off, std::move(diag), off, Weight::Plain);
}

}  // namespace

BandedOperator build_Lc(const LineGrid& grid, const SolitonParams& params) {
  return build_Lplus_Lminus(grid, params).first;
}

std::pair<BandedOperator, BandedOperator> build_Lplus_Lminus(const LineGrid& grid,
                                                             const SolitonParams& params) {
  check_line_grid(grid, params.c);
  const Soliton s = Soliton::from(params);
  const Eigen::VectorXd qp = q_pow_pm1_values(s, grid.nodes()).matrix();
  return {line_operator(grid, params.c, params.p * qp), line_operator(grid, params.c, qp)};
}

// Sector operator ------------------------------------------------------------

namespace {

BandedOperator diagonal_operator(const RadialGrid& grid, Eigen::VectorXd d) {
  const Eigen::Index n = grid.size();
  return BandedOperator(grid, Eigen::VectorXd::Zero(n - 1), std::move(d),
                        Eigen::VectorXd::Zero(n - 1), Weight::Plain);
}

const Profile& validated(const Profile& profile, int m, int j) {
  require(m >= 1, ErrorKind::InvalidParameter, "spin index m must be >= 1");
  require(profile.m == m, ErrorKind::InvalidParameter,
          "profile was computed for m = " + std::to_string(profile.m) + ", not " +
              std::to_string(m));
  require(std::abs(j) < m, ErrorKind::InvalidParameter,
          "perturbation index must satisfy |j| < m (j = " + std::to_string(j) + ")");
  require(profile.converged, ErrorKind::NotConverged, "sector operator needs a converged profile");
  const double g = profile.grid.spacing() * std::max<double>(m + std::abs(j), std::sqrt(profile.omega));
  if (g > kResolutionLimit * (1.0 + 1e-12)) {
    fail(ErrorKind::GridMismatch, "profile grid fails the resolution guard for index m+|j| = " +
                                      std::to_string(m + std::abs(j)) + " (h*nu = " +
                                      std::to_string(g) + ")");
  }
  return profile;
}

}  // namespace

SectorOperator::SectorOperator(const Profile& profile, int m, int j)
    : m_(m),
      j_(j),
      grid_(validated(profile, m, j).grid),
      h11_(diagonal_operator(grid_, (-2.0 * m * j / grid_.nodes().square()).matrix())),
      h12_(radial_operator(
          grid_, static_cast<double>(m) * m + static_cast<double>(j) * j, profile.omega,
          profile.values.unaryExpr([&](double v) { return abs_power(v, profile.p - 1.0); }),
          RadialForm::Symmetrized)),
      h21_(h12_.plus_diagonal(
          (profile.p - 1.0) *
          profile.values.unaryExpr([&](double v) { return abs_power(v, profile.p - 1.0); }))),
      h22_(h11_) {
  const Eigen::Index n = grid_.size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(8 * n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index r1 = 2 * k;
    const Eigen::Index r2 = 2 * k + 1;
    t.emplace_back(r1, r1, h11_.diag()(k));
    t.emplace_back(r1, r2, h12_.diag()(k));
    t.emplace_back(r2, r1, h21_.diag()(k));
    t.emplace_back(r2, r2, h22_.diag()(k));
    if (k + 1 < n) {
      t.emplace_back(r1, 2 * (k + 1) + 1, h12_.upper()(k));
      t.emplace_back(2 * (k + 1), 2 * k + 1, h12_.lower()(k));
      t.emplace_back(r2, 2 * (k + 1), h21_.upper()(k));
      t.emplace_back(2 * (k + 1) + 1, 2 * k, h21_.lower()(k));
    }
  }
  generator_.resize(2 * n, 2 * n);
  generator_.setFromTriplets(t.begin(), t.end());
  generator_.makeCompressed();
}

Eigen::SparseMatrix<std::complex<double>> SectorOperator::complex_matrix() const {
  return generator_.cast<std::complex<double>>() * std::complex<double>(0.0, 1.0);
}

Eigen::VectorXcd SectorOperator::apply(const Eigen::Ref<const Eigen::VectorXcd>& w) const {
  return std::complex<double>(0.0, 1.0) * (generator_.cast<std::complex<double>>() * w);
}

double SectorOperator::norm(const Eigen::Ref<const Eigen::VectorXcd>& w) const {
  return std::sqrt(grid_.spacing()) * w.norm();
}

SectorOperator build_sector_operator(const Profile& profile, int m, int j) {
  return SectorOperator(profile, m, j);
}

}  // namespace vortexlab
