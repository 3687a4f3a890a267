#include "vortexlab/asymptotics.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/json_util.hpp"
#include "vortexlab/operators.hpp"

#include <cmath>
#include <future>

namespace vortexlab {

ErrorNorms error_norms(const Profile& profile, bool require_converged) {
  if (require_converged) {
    require(profile.converged, ErrorKind::NotConverged, "error norms need a converged profile");
  }
  const SolitonParams sp = balance_constants(profile.p, profile.omega);
  const double rbar = sp.alpha0 * profile.m;
  const Eigen::ArrayXd r = profile.grid.nodes();
  const Eigen::VectorXd diff =
      profile.values - q_values(Soliton::from(sp), r - rbar).matrix();
  const Eigen::VectorXd h2 = diff - radial_laplacian(profile.grid, diff);
  return {l2r_norm(profile.grid, h2), diff.cwiseAbs().maxCoeff(), profile.peak_location() - rbar};
}

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InsufficientData,
          "line fit needs at least two points");
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Eigen::ArrayXd> xa(x.data(), n);
  const Eigen::Map<const Eigen::ArrayXd> ya(y.data(), n);
  const Eigen::ArrayXd dx = xa - xa.mean();
  const Eigen::ArrayXd dy = ya - ya.mean();
  const double sxx = dx.square().sum();
  require(sxx > 0.0, ErrorKind::InsufficientData, "line fit needs distinct abscissae");
  const double slope = (dx * dy).sum() / sxx;
  const double intercept = ya.mean() - slope * xa.mean();
  const double ss_tot = dy.square().sum();
  const double ss_res = (ya - (slope * xa + intercept)).square().sum();
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {slope, intercept, r2};
}

std::vector<AsymptoticsRow> error_table(double p, double omega, const std::vector<int>& m_list,
                                        const std::filesystem::path& cache_dir,
                                        const SolveOptions& options) {
  require(!m_list.empty(), ErrorKind::InvalidParameter, "m list is empty");
  std::vector<std::future<AsymptoticsRow>> jobs;
  jobs.reserve(m_list.size());
  for (int m : m_list) {
    jobs.push_back(std::async(std::launch::async, [=, &cache_dir, &options] {
      const RadialGrid grid = default_radial_grid(p, omega, m);
      const Profile prof = cache_dir.empty() ? solve(p, omega, m, grid, options)
                                             : load_or_solve(p, omega, m, grid, cache_dir, options);
      return AsymptoticsRow{m, error_norms(prof)};
    }));
  }
  std::vector<AsymptoticsRow> rows;
  rows.reserve(jobs.size());
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

RateFit rate_fit(const std::vector<AsymptoticsRow>& rows) {
  require(rows.size() >= 3, ErrorKind::InsufficientData, "rate fit needs at least 3 values of m");
  std::vector<double> lm, lh2, linf;
  for (const auto& row : rows) {
    lm.push_back(std::log(static_cast<double>(row.m)));
    lh2.push_back(std::log(row.norms.h2_err));
    linf.push_back(std::log(row.norms.linf_err));
  }
  const LineFit a = least_squares_line(lm, lh2);
  const LineFit b = least_squares_line(lm, linf);
  return {a.slope, b.slope, a.r2, b.r2};
}

RateFit rate_fit(double p, double omega, const std::vector<int>& m_list,
                 const std::filesystem::path& cache_dir, const SolveOptions& options) {
  require(m_list.size() >= 3, ErrorKind::InvalidParameter, "rate fit needs at least 3 values of m");
  return rate_fit(error_table(p, omega, m_list, cache_dir, options));
}

std::string error_table_csv(const std::vector<AsymptoticsRow>& rows) {
  std::string out = "m,h2_err,linf_err,peak_offset\n";
  for (const auto& row : rows) {
    out += std::to_string(row.m) + "," + format_double(row.norms.h2_err) + "," +
           format_double(row.norms.linf_err) + "," + format_double(row.norms.peak_offset) + "\n";
  }
  return out;
}

}  // namespace vortexlab
