#pragma once

#include "vortexlab/grid.hpp"
#include "vortexlab/soliton1d.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <utility>
#include <variant>

namespace vortexlab {

struct Profile;

/// Which inner product the operator is self-adjoint in.
enum class Weight { Plain, RWeighted };

/// Radial discretization: Plain acts on phi, Symmetrized on u = r^{1/2} phi.
enum class RadialForm { Plain, Symmetrized };

/// Tridiagonal (bandwidth 1) finite-difference operator. Row i reads
/// lower(i-1) * f(i-1) + diag(i) * f(i) + upper(i) * f(i+1).
class BandedOperator {
 public:
  using Grid = std::variant<RadialGrid, LineGrid>;

  BandedOperator(Grid grid, Eigen::VectorXd lower, Eigen::VectorXd diag, Eigen::VectorXd upper,
                 Weight weight);

  Eigen::Index size() const { return diag_.size(); }
  static constexpr int bandwidth() { return 1; }
  bool symmetric() const { return symmetric_; }
  Weight weight() const { return weight_; }
  const Grid& grid() const { return grid_; }

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& diag() const { return diag_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply(
      const Eigen::MatrixBase<Derived>& f) const {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = diag_.cast<Scalar>().cwiseProduct(f);
    out.head(n - 1) += upper_.cast<Scalar>().cwiseProduct(f.tail(n - 1));
    out.tail(n - 1) += lower_.cast<Scalar>().cwiseProduct(f.head(n - 1));
    return out;
  }

  /// Copy with `v` added to the diagonal.
  BandedOperator plus_diagonal(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  Eigen::SparseMatrix<double> to_sparse() const;
  Eigen::MatrixXd to_dense() const;

 private:
  Grid grid_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd upper_;
  Weight weight_;
  bool symmetric_ = false;
};

/// Delta_r - omega - nu^2/r^2 + potential with Dirichlet ends. The symmetrized
/// form discretizes U(.)U^{-1} = d^2/dr^2 - omega - (nu^2 - 1/4)/r^2 + V with
/// central differences; the plain form uses the conjugate stencil, so both
/// share one spectrum.
BandedOperator build_radial_schroedinger(const RadialGrid& grid, int nu, double omega,
                                         const Eigen::Ref<const Eigen::VectorXd>& potential,
                                         RadialForm form = RadialForm::Symmetrized);

/// Same, with the centrifugal coefficient nu^2 given directly (used for the
/// sector blocks where it is m^2 + j^2). No resolution check.
BandedOperator radial_operator(const RadialGrid& grid, double nu_sq, double omega,
                               const Eigen::Ref<const Eigen::VectorXd>& potential,
                               RadialForm form);

/// Plain-form discrete Delta_r (the r-weighted conjugate of d^2 + 1/(4 r^2)).
Eigen::VectorXd radial_laplacian(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& f);

/// L_c = d^2/dx^2 - c + p Q_c^{p-1}; identical to L_+ for the power nonlinearity.
BandedOperator build_Lc(const LineGrid& grid, const SolitonParams& params);

/// (L_+, L_-) with potentials p Q_c^{p-1} and Q_c^{p-1}.
std::pair<BandedOperator, BandedOperator> build_Lplus_Lminus(const LineGrid& grid,
                                                             const SolitonParams& params);

/// Discretized sector operator H(eps, delta) = i [[h11, h12], [h21, h22]] in the
/// symmetrized form. The assembled real generator M (H = i M) interleaves the
/// components: row 2k is w1 at node k, row 2k+1 is w2 at node k.
class SectorOperator {
 public:
  SectorOperator(const Profile& profile, int m, int j);

  int m() const { return m_; }
  int j() const { return j_; }
  const RadialGrid& grid() const { return grid_; }
  Eigen::Index dimension() const { return 2 * grid_.size(); }

  const BandedOperator& h11() const { return h11_; }
  const BandedOperator& h12() const { return h12_; }
  const BandedOperator& h21() const { return h21_; }
  const BandedOperator& h22() const { return h22_; }

  /// Real generator M with H = i M.
  const Eigen::SparseMatrix<double>& generator() const { return generator_; }
  /// H = i M as a complex sparse matrix.
  Eigen::SparseMatrix<std::complex<double>> complex_matrix() const;

  Eigen::VectorXcd apply(const Eigen::Ref<const Eigen::VectorXcd>& w) const;

  /// Discrete L^2 norm of an interleaved pair in symmetrized variables, which
  /// equals the L^2_r norm of the original pair.
  double norm(const Eigen::Ref<const Eigen::VectorXcd>& w) const;

 private:
  int m_;
  int j_;
  RadialGrid grid_;
  BandedOperator h11_;
  BandedOperator h12_;
  BandedOperator h21_;
  BandedOperator h22_;
  Eigen::SparseMatrix<double> generator_;
};

SectorOperator build_sector_operator(const Profile& profile, int m, int j);

/// Sign-preserving power |x|^{p-1} x and its companion |x|^{p-1}.
inline double signed_power(double x, double p) { return std::pow(std::abs(x), p - 1.0) * x; }
inline double abs_power(double x, double q) { return std::pow(std::abs(x), q); }

}  // namespace vortexlab
