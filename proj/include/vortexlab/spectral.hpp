#pragma once

#include "vortexlab/grid.hpp"
#include "vortexlab/operators.hpp"
#include "vortexlab/profile.hpp"
#include "vortexlab/soliton1d.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace vortexlab {

using cdouble = std::complex<double>;

// Reduced model -----------------------------------------------------------------

/// Projection of the long-wave operator onto the generalized kernel at delta = 0.
struct ReducedModel {
  double p;
  double omega;
  double alpha0;
  double delta;
  double b1, b2, b3, b4;
  double theta1;  ///< 2 / (d/dc ||Q_c||^2)
  double theta2;  ///< 4 / ||Q_c||^2
  Eigen::Matrix4cd matrix;
};

ReducedModel reduced_matrix(const SolitonParams& params, double delta);

/// Closed-form roots of the reduced quartic, sorted by descending real part.
std::array<cdouble, 4> reduced_eigenvalues(const ReducedModel& model);

struct GrowthPrediction {
  double rate;  ///< gamma delta / alpha0
  double lo;    ///< 3/4 of rate
  double hi;    ///< 5/4 of rate
};

/// Leading growth rate and its bracket; requires 1 < p < 5 and 0 <= delta <= 0.5.
GrowthPrediction predicted_growth(const SolitonParams& params, double delta);

// Generalized kernel at delta = 0 ---------------------------------------------

/// Real generator M0 = [[0, L_-], [L_+, 0]] of H(0) = i M0 on the line grid,
/// in block layout (first n rows are the first component).
Eigen::SparseMatrix<double> line_generator(const LineGrid& grid, const SolitonParams& params);

/// Sampled chain vectors Phi_1..Phi_4 and dual vectors Phi*_1..Phi*_4 as the
/// columns of 2n x 4 matrices (block layout).
struct KernelVectors {
  Eigen::MatrixXcd phi;
  Eigen::MatrixXcd dual;
};

KernelVectors kernel_vectors(const LineGrid& grid, const SolitonParams& params);

struct KernelReport {
  /// ||H(0) Phi_k - target_k|| relative to ||target_k|| (or ||Phi_k|| when the
  /// target is zero); targets are 0, Phi_1, 0, Phi_3.
  std::array<double, 4> chain_residuals;
  /// gram(i, k) = <Phi_i, Phi*_k>, conjugate-linear in the second slot.
  Eigen::Matrix4cd gram;
  double biorthogonality_error;  ///< max |gram - I|
};

KernelReport kernel_check(const SolitonParams& params, const LineGrid& grid);

// Sector spectra ----------------------------------------------------------------

struct SpectrumOptions {
  int k_wanted = 6;                    ///< <= 0 returns every eigenvalue (dense path only)
  Eigen::Index dense_limit = 1200;     ///< dense eigensolve when 2n <= dense_limit
  bool want_vectors = false;
  double residual_tol = 1e-8;
  int krylov_dim = 40;
  std::optional<cdouble> shift;        ///< overrides the predicted shift
  unsigned seed = 12345;               ///< Arnoldi start vector
};

struct SpectrumReport {
  double p = 0.0;
  double omega = 0.0;
  int m = 0;
  int j = 0;
  double delta = 0.0;  ///< j / m
  Eigen::Index dimension = 0;
  std::string method;  ///< "dense" or "shift-invert"
  std::vector<cdouble> eigenvalues;  ///< descending real part
  std::vector<double> residuals;     ///< ||H v - lambda v|| / ||v||
  std::vector<Eigen::VectorXcd> eigenvectors;  ///< interleaved, symmetrized variables
  double max_re = 0.0;
  std::optional<GrowthPrediction> prediction;  ///< absent outside 1 < p < 5, |delta| <= 0.5
  bool in_bracket = false;
  double max_residual() const;
};

/// Eigenvalues of the sector operator with the largest real parts. Above
/// dense_limit the search is shift-invert Arnoldi around the predicted
/// unstable eigenvalue, polished by Rayleigh quotient iteration.
SpectrumReport sector_spectrum(const Profile& profile, int j, const SpectrumOptions& options = {});
SpectrumReport sector_spectrum(const SectorOperator& op, const Profile& profile,
                               const SpectrumOptions& options = {});

/// Shift sigma = gamma delta / alpha0 - 2 i delta / alpha0^2 near the unstable
/// eigenvalue (falls back to a small positive real shift outside 1 < p < 5).
cdouble default_shift(double p, double omega, int m, int j);

/// Index j* = floor(m^beta) with beta = min(p - 1, 1) / 6.
int canonical_index(double p, int m);

struct ScanRow {
  int j;
  double delta;
  double max_re;
  double residual;
  std::optional<GrowthPrediction> prediction;
  bool in_bracket;
  bool canonical;
};

struct ScanResult {
  int m;
  int j_star;
  std::vector<ScanRow> rows;
};

/// Sector spectra for every j in j_list (each within [1, m-1]), run concurrently.
ScanResult unstable_scan(const Profile& profile, const std::vector<int>& j_list,
                         const SpectrumOptions& options = {});

// Output ------------------------------------------------------------------------

std::string spectrum_to_json(const SpectrumReport& report, int indent = 2);
/// Columns m,j,delta,max_re,predicted,bracket_lo,bracket_hi,in_bracket,canonical.
std::string scan_to_csv(const ScanResult& scan);
std::string reduced_to_json(const ReducedModel& model, int indent = 2);

}  // namespace vortexlab
