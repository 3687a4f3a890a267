#pragma once

#include "vortexlab/grid.hpp"
#include "vortexlab/soliton1d.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vortexlab {

enum class Provenance { Ansatz, NewtonConverged, Loaded };

std::string_view to_string(Provenance p) noexcept;

/// Samples of a radial function phi(r_i) on a RadialGrid.
struct Profile {
  RadialGrid grid;
  Eigen::VectorXd values;
  double p = 3.0;
  double omega = 1.0;
  int m = 1;
  bool converged = false;
  double residual_norm = 0.0;
  Provenance provenance = Provenance::Ansatz;

  double max_value() const { return values.maxCoeff(); }
  double min_value() const { return values.minCoeff(); }
  /// Node of the largest sample, refined by a three-point parabola.
  double peak_location() const;
};

/// Smooth even bump: 1 on |s| <= 2, 0 on |s| >= 3, C^infinity in between.
double cutoff(double s);
double cutoff_d1(double s);
double cutoff_d2(double s);

/// Cutoff length l = -(2/sqrt(c)) max(1, 1/(p-1)) log(eps).
double cutoff_length(double p, double c, double eps);

/// Cutoff soliton chi_l(r - rho) Q_c(r - rho) with rho = rbar, eps = 1/m. For
/// m < 8 the bump is additionally switched off smoothly on r <= rbar/4.
Profile ansatz(double p, double omega, int m, const RadialGrid& grid);

/// Value of the ansatz at an arbitrary radius (continuous, not sampled).
double ansatz_value(double p, double omega, int m, double r);

/// Pointwise discrete residual of phi'' + phi'/r - (omega + m^2/r^2) phi + f(phi).
Eigen::VectorXd bvp_residual(const Profile& profile);

/// L^2_r norm of bvp_residual; also written back into profile.residual_norm.
double update_residual_norm(Profile& profile);

struct SolveOptions {
  double tol = 1e-10;   ///< residual L^2_r norm relative to ||phi||_{L^2_r}
  int max_iterations = 50;
  int m_min = 4;
};

/// Per-iteration record of the Newton solve.
struct NewtonTrace {
  std::vector<double> step_norms;      ///< ||s_k||_inf of the full Newton step
  std::vector<double> residual_norms;  ///< relative residual before step k
  std::vector<double> damping;         ///< accepted line-search factor
};

/// Damped Newton (Armijo backtracking) for the discretized vortex equation,
/// started from the cutoff-soliton ansatz.
Profile solve(double p, double omega, int m, const RadialGrid& grid, const SolveOptions& options = {},
              NewtonTrace* trace = nullptr);

struct ResidualNorms {
  double R21_norm;
  double R22_norm;
  double R23_norm;
};

/// The three residual pieces of the ansatz centered at rho (with
/// c = omega + (m/rho)^2): cutoff/nonlinearity mismatch, centrifugal and
/// first-derivative mismatch, and cutoff-derivative terms.
struct ResidualPieces {
  Eigen::VectorXd R21;
  Eigen::VectorXd R22;
  Eigen::VectorXd R23;
};

ResidualPieces residual_pieces(double p, double omega, int m, double rho, const RadialGrid& grid);
ResidualNorms residual_decomposition(double p, double omega, int m, double rho,
                                     const RadialGrid& grid);

// Profile files ------------------------------------------------------------

/// JSON text of a profile (schema vortexlab-profile-v1, 17 significant digits).
std::string profile_to_json(const Profile& profile);
Profile profile_from_json(std::string_view text);

void write_profile(const std::filesystem::path& path, const Profile& profile);
Profile read_profile(const std::filesystem::path& path);

/// Directory from VORTEXLAB_CACHE, else ./vortexlab-cache.
std::filesystem::path default_cache_dir();

/// Cache file name derived from a stable hash of (p, omega, m, n, r_max).
std::string profile_cache_key(double p, double omega, int m, const RadialGrid& grid);

/// Loads a cached profile or solves and stores it (atomic write-rename).
/// `hit` reports whether the cache was used.
Profile load_or_solve(double p, double omega, int m, const RadialGrid& grid,
                      const std::filesystem::path& cache_dir, const SolveOptions& options = {},
                      bool* hit = nullptr);

}  // namespace vortexlab
