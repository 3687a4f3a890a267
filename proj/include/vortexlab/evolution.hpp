#pragma once

#include "vortexlab/operators.hpp"
#include "vortexlab/profile.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace vortexlab {

struct Trajectory {
  std::vector<double> t;
  std::vector<double> norm;  ///< ||w(t)||_{L^2_r}
};

/// Crank-Nicolson integration of dw/dt = H w from w0 (interleaved pair in
/// symmetrized variables) up to time T, recording the norm after every step.
Trajectory evolve_linearized(const SectorOperator& op, const Eigen::VectorXcd& w0, double T, double dt);
Trajectory evolve_linearized(const Profile& profile, int j, const Eigen::VectorXcd& w0, double T,
                             double dt);

/// Gaussian random pair of unit norm (deterministic for a given seed).
Eigen::VectorXcd random_perturbation(const SectorOperator& op, unsigned long long seed);

/// Pair read from JSON {"w1": [[re, im], ...], "w2": [[re, im], ...]} holding
/// samples of v(r_i) (unweighted), converted to symmetrized variables.
Eigen::VectorXcd read_perturbation(const std::filesystem::path& path, const SectorOperator& op);

struct GrowthFit {
  double rate;
  double r2;
};

/// Least-squares slope of log(norm) against t after discarding the first
/// burn_in_fraction of the time window; needs at least 50 samples.
GrowthFit fit_growth(const Trajectory& trajectory, double burn_in_fraction);

/// CSV with header t,norm.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace vortexlab
