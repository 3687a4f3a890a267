#pragma once

#include "vortexlab/grid.hpp"
#include "vortexlab/profile.hpp"

#include <string>
#include <vector>

namespace vortexlab {

/// Distances between a profile and the uncut shifted soliton Q_c(r - rbar).
struct ErrorNorms {
  double h2_err;       ///< ||(1 - Delta_r)(phi - Q_c(. - rbar))||_{L^2_r}
  double linf_err;     ///< max_i |phi(r_i) - Q_c(r_i - rbar)|
  double peak_offset;  ///< argmax phi - rbar (parabolic refinement)
};

/// Works for any profile, including the ansatz. `require_converged` rejects
/// unconverged profiles with NotConverged.
ErrorNorms error_norms(const Profile& profile, bool require_converged = true);

struct RateFit {
  double rate_h2;
  double rate_linf;
  double r2_h2;
  double r2_linf;
};

struct LineFit {
  double slope;
  double intercept;
  double r2;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

struct AsymptoticsRow {
  int m;
  ErrorNorms norms;
};

/// Solves (or loads) one profile per m on its default grid, concurrently.
std::vector<AsymptoticsRow> error_table(double p, double omega, const std::vector<int>& m_list,
                                        const std::filesystem::path& cache_dir,
                                        const SolveOptions& options = {});

/// Log-log slopes of the error norms against m.
RateFit rate_fit(const std::vector<AsymptoticsRow>& rows);
RateFit rate_fit(double p, double omega, const std::vector<int>& m_list,
                 const std::filesystem::path& cache_dir, const SolveOptions& options = {});

/// CSV with header m,h2_err,linf_err,peak_offset.
std::string error_table_csv(const std::vector<AsymptoticsRow>& rows);

}  // namespace vortexlab
