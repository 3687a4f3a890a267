#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vortexlab/error.hpp"
#include "vortexlab/evolution.hpp"
#include "vortexlab/spectral.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace vortexlab;
using doctest::Approx;

namespace {

Trajectory synthetic(double T, double dt, const std::function<double(double)>& f) {
  Trajectory tr;
  for (double t = 0.0; t <= T + 1e-12; t += dt) {
    tr.t.push_back(t);
    tr.norm.push_back(f(t));
  }
  return tr;
}

}  // namespace

TEST_CASE("fit_growth on synthetic signals") {
  CHECK(fit_growth(synthetic(20, 0.05, [](double t) { return std::exp(0.4330 * t); }), 0.0).rate ==
        Approx(0.4330).epsilon(1e-6));
  const GrowthFit wobble =
      fit_growth(synthetic(40, 0.05, [](double t) { return std::exp(0.4 * t) * (2 + std::sin(5 * t)); }), 0.3);
  CHECK(wobble.rate == Approx(0.4).epsilon(0.02));
  CHECK(fit_growth(synthetic(10, 0.1, [](double) { return 3.0; }), 0.5).rate == Approx(0.0));
  try {
    fit_growth(synthetic(4, 0.1, [](double) { return 1.0; }), 0.5);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  CHECK_THROWS_AS(fit_growth(Trajectory{}, 0.1), Error);
}

TEST_CASE("Crank-Nicolson conserves the norm of the skew core") {
  // zero profile: both potentials vanish and H = i M with M real symmetric
  Profile zero;
  zero.grid = RadialGrid::with_spacing(30.0, 0.02);
  zero.values = Eigen::VectorXd::Zero(zero.grid.size());
  zero.p = 3.0;
  zero.omega = 1.0;
  zero.m = 6;
  zero.converged = true;
  const SectorOperator op(zero, 6, 2);
  const Trajectory tr = evolve_linearized(op, random_perturbation(op, 7), 20.0, 0.05);
  for (double n : tr.norm) CHECK(std::abs(n - 1.0) < 1e-10);
  CHECK(tr.t.size() == 401);
}

TEST_CASE("growth from the unstable eigenvector and from random data") {
  const Profile prof = solve(3.0, 1.0, 32, default_radial_grid(3.0, 1.0, 32, 40));
  const SectorOperator op(prof, 32, 8);
  SpectrumOptions so;
  so.k_wanted = 1;
  so.want_vectors = true;
  const SpectrumReport rep = sector_spectrum(op, prof, so);
  const double re = rep.max_re;

  const Eigen::VectorXcd v = rep.eigenvectors.front() / op.norm(rep.eigenvectors.front());
  const Trajectory te = evolve_linearized(op, v, 5.0 / re, 0.02);
  CHECK(std::abs(te.norm.front() - 1.0) < 1e-12);
  CHECK(fit_growth(te, 0.0).rate == Approx(re).epsilon(0.02));
  CHECK(fit_growth(te, 0.0).r2 > 0.9999);

  const Trajectory tr = evolve_linearized(op, random_perturbation(op, 1), 16.0 / re, 0.1);
  CHECK(tr.t.back() * re >= 8.0);
  CHECK(fit_growth(tr, 0.5).rate == Approx(re).epsilon(0.10));

  // seeded random data is reproducible
  CHECK(random_perturbation(op, 5) == random_perturbation(op, 5));
  CHECK(random_perturbation(op, 5) != random_perturbation(op, 6));
}

TEST_CASE("no exponential growth in a neutral sector") {
  const SolitonParams sp = balance_constants(2.5, 4.0);
  const Profile prof = solve(2.5, 4.0, 8, RadialGrid::with_spacing(sp.alpha0 * 8 + 9.0, 0.0325));
  const SectorOperator op(prof, 8, 0);
  // generalized-kernel Jordan blocks give linear growth, so the exponential
  // fit decays like 1/T instead of vanishing outright
  const double short_run = fit_growth(evolve_linearized(op, random_perturbation(op, 3), 200.0, 0.1), 0.5).rate;
  const double long_run = fit_growth(evolve_linearized(op, random_perturbation(op, 3), 2000.0, 0.1), 0.5).rate;
  CHECK(long_run <= 1e-3);
  CHECK(long_run < 0.2 * short_run);
}

TEST_CASE("evolution preconditions and perturbation files") {
  const SolitonParams sp = balance_constants(3.0, 4.0);
  const Profile prof = solve(3.0, 4.0, 8, RadialGrid::with_spacing(sp.alpha0 * 8 + 9.0, 0.0325));
  const SectorOperator op(prof, 8, 1);
  const Eigen::VectorXcd w = random_perturbation(op, 1);
  CHECK_THROWS_AS(evolve_linearized(op, w, 1.0, 0.0), Error);
  CHECK_THROWS_AS(evolve_linearized(op, w, 1.0, -0.1), Error);
  CHECK_THROWS_AS(evolve_linearized(op, w.head(10), 1.0, 0.1), Error);

  // write v = w / sqrt(r) in the unweighted variables and read it back
  const auto path = std::filesystem::temp_directory_path() / "vortexlab-test-pert.json";
  {
    std::ofstream os(path);
    os.precision(17);
    os << "{";
    for (int c = 0; c < 2; ++c) {
      os << (c ? ",\"w2\":[" : "\"w1\":[");
      for (Eigen::Index i = 0; i < op.grid().size(); ++i) {
        const std::complex<double> v = w(2 * i + c) / std::sqrt(op.grid().node(i));
        os << (i ? "," : "") << "[" << v.real() << "," << v.imag() << "]";
      }
      os << "]";
    }
    os << "}";
  }
  const Eigen::VectorXcd back = read_perturbation(path, op);
  CHECK((back - w).norm() < 1e-13 * w.norm());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_perturbation("/nonexistent.json", op), Error);

  const Trajectory tr = synthetic(0.2, 0.1, [](double) { return 1.0; });
  CHECK(trajectory_csv(tr).rfind("t,norm\n0,1\n0.10000000000000001,1\n", 0) == 0);
}
