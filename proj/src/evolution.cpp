#include "vortexlab/evolution.hpp"

#include "vortexlab/asymptotics.hpp"
#include "vortexlab/error.hpp"
#include "vortexlab/json_util.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace vortexlab {

Trajectory evolve_linearized(const SectorOperator& op, const Eigen::VectorXcd& w0, double T,
                             double dt) {
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::InvalidParameter, "dt must be positive");
  require(T > 0.0 && std::isfinite(T), ErrorKind::InvalidParameter, "T must be positive");
  require(w0.size() == op.dimension(), ErrorKind::InvalidParameter,
          "initial pair has the wrong length");
  const Eigen::Index N = op.dimension();
  const Eigen::SparseMatrix<std::complex<double>> H = op.complex_matrix();
  Eigen::SparseMatrix<std::complex<double>> I(N, N);
  I.setIdentity();
  Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu;
  lu.compute(I - (0.5 * dt) * H);
  if (lu.info() != Eigen::Success) {
    fail(ErrorKind::LinearSolveFailure, "Crank-Nicolson factorization failed");
  }

  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  Trajectory tr;
  tr.t.reserve(static_cast<std::size_t>(steps + 1));
  tr.norm.reserve(static_cast<std::size_t>(steps + 1));
  Eigen::VectorXcd w = w0;
  tr.t.push_back(0.0);
  tr.norm.push_back(op.norm(w));
  for (long k = 1; k <= steps; ++k) {
    const Eigen::VectorXcd rhs = w + (0.5 * dt) * (H * w);
    w = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !w.allFinite()) {
      fail(ErrorKind::LinearSolveFailure, "Crank-Nicolson step " + std::to_string(k) + " failed");
    }
    tr.t.push_back(static_cast<double>(k) * dt);
    tr.norm.push_back(op.norm(w));
  }
  return tr;
}

Trajectory evolve_linearized(const Profile& profile, int j, const Eigen::VectorXcd& w0, double T,
                             double dt) {
  return evolve_linearized(SectorOperator(profile, profile.m, j), w0, T, dt);
}

Eigen::VectorXcd random_perturbation(const SectorOperator& op, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd w(op.dimension());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = {gauss(rng), gauss(rng)};
  return w / op.norm(w);
}

Eigen::VectorXcd read_perturbation(const std::filesystem::path& path, const SectorOperator& op) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorKind::Io, "cannot open " + path.string());
  try {
    const auto j = nlohmann::json::parse(is);
    const Eigen::Index n = op.grid().size();
    Eigen::VectorXcd w(2 * n);
    for (int comp = 0; comp < 2; ++comp) {
      const auto& arr = j.at(comp == 0 ? "w1" : "w2");
      require(static_cast<Eigen::Index>(arr.size()) == n, ErrorKind::Io,
              "perturbation file does not match the grid size");
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = std::sqrt(op.grid().node(i));
        w(2 * i + comp) = s * std::complex<double>(arr[i].at(0).get<double>(), arr[i].at(1).get<double>());
      }
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, std::string("malformed perturbation file: ") + e.what());
  }
}

GrowthFit fit_growth(const Trajectory& tr, double burn_in_fraction) {
  require(tr.t.size() == tr.norm.size(), ErrorKind::InvalidParameter, "ragged trajectory");
  require(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0, ErrorKind::InvalidParameter,
          "burn-in fraction must lie in [0, 1)");
  if (tr.t.empty()) fail(ErrorKind::InsufficientData, "empty trajectory");
  const double t0 = tr.t.front() + burn_in_fraction * (tr.t.back() - tr.t.front());
  std::vector<double> x, y;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < t0 || !(tr.norm[i] > 0.0)) continue;
    x.push_back(tr.t[i]);
    y.push_back(std::log(tr.norm[i]));
  }
  if (x.size() < 50) {
    fail(ErrorKind::InsufficientData,
         "growth fit needs >= 50 samples after burn-in (have " + std::to_string(x.size()) + ")");
  }
  const LineFit f = least_squares_line(x, y);
  return {f.slope, f.r2};
}

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t,norm\n";
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    out += format_double(tr.t[i]) + "," + format_double(tr.norm[i]) + "\n";
  }
  return out;
}

}  // namespace vortexlab
