#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "vortexlab/error.hpp"
#include "vortexlab/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace vortexlab;
using doctest::Approx;

namespace {

// Small dense test problem: p = 3, omega = 4 keeps the ring narrow and close in.
struct SmallSector {
  Profile prof;
  explicit SmallSector(int m = 8, double p = 3.0) {
    const SolitonParams sp = balance_constants(p, 4.0);
    prof = solve(p, 4.0, m, RadialGrid::with_spacing(sp.alpha0 * m + 9.0, 0.0325));
  }
};

SpectrumOptions all_dense() {
  SpectrumOptions o;
  o.k_wanted = 0;
  o.dense_limit = 4000;
  return o;
}

double distance_to_set(cdouble z, const std::vector<cdouble>& set) {
  double best = INFINITY;
  for (const auto& s : set) best = std::min(best, std::abs(z - s));
  return best;
}

}  // namespace

TEST_CASE("reduced model coefficients at p = 3") {
  const SolitonParams sp = balance_constants(3.0, 1.0);
  const ReducedModel rm = reduced_matrix(sp, 0.25);
  CHECK(rm.b1 == Approx(3.0).epsilon(1e-10));
  CHECK(rm.b3 == Approx(-1.0).epsilon(1e-14));
  const double pi = std::acos(-1.0);
  const double b4 = 0.5 * (pi * pi / (2.0 * std::pow(1.5, 1.5))) / (2.0 * std::sqrt(6.0));
  CHECK(rm.b4 == Approx(b4).epsilon(1e-10));
  CHECK(rm.b4 == Approx(0.27416).epsilon(1e-4));
  CHECK(rm.theta2 == Approx(4.0 / (2.0 * std::sqrt(6.0))));
  CHECK(rm.b2 < 0.0);

  const ReducedModel z = reduced_matrix(sp, 0.0);
  Eigen::Matrix4cd nil = Eigen::Matrix4cd::Zero();
  nil(0, 1) = 1.0;
  nil(2, 3) = 1.0;
  CHECK((z.matrix - nil).norm() == 0.0);
  for (const auto& l : reduced_eigenvalues(z)) CHECK(std::abs(l) == 0.0);

  CHECK_THROWS_AS(reduced_matrix(balance_constants(5.0, 1.0), 0.1), Error);
  CHECK_THROWS_AS(reduced_matrix(sp, -0.1), Error);
}

TEST_CASE("b1 equals (gamma/alpha0)^2 and sign structure") {
  for (double p : {1.2, 2.0, 3.0, 4.0, 4.9}) {
    for (double w : {0.5, 1.0, 2.0}) {
      const SolitonParams sp = balance_constants(p, w);
      const ReducedModel rm = reduced_matrix(sp, 0.1);
      CHECK(rm.b1 == Approx(std::pow(*sp.gamma / sp.alpha0, 2)).epsilon(1e-10));
      CHECK(rm.b1 > 0.0);
      CHECK(rm.b3 < 0.0);
    }
  }
}

TEST_CASE("closed-form quartic roots against a dense 4x4 eigensolve") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> up(1.2, 4.8), uw(0.2, 5.0), ud(1e-3, 0.4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ReducedModel rm = reduced_matrix(balance_constants(up(rng), uw(rng)), ud(rng));
    const auto closed = reduced_eigenvalues(rm);
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rm.matrix);
    std::vector<cdouble> dense(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    for (const auto& l : closed) worst = std::max(worst, distance_to_set(l, dense));
    CHECK(closed[0].real() >= closed[1].real());
    CHECK(closed[0].real() == Approx(-closed[3].real()).epsilon(1e-12));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("reduced eigenvalues at delta = 0.1") {
  const ReducedModel rm = reduced_matrix(balance_constants(3.0, 1.0), 0.1);
  const auto l = reduced_eigenvalues(rm);
  CHECK(l[0].real() == Approx(0.1 * std::sqrt(rm.b1 * (1 + rm.b2 * 0.01))).epsilon(1e-14));
  CHECK(l[0].real() == Approx(0.1732).epsilon(0.01));
  CHECK(l[0].imag() == Approx(-0.1).epsilon(1e-12));
  // the neutral pair: b3 (1 + b4 d^2) < 0
  int neutral = 0;
  for (const auto& z : l) neutral += std::abs(z.real()) < 1e-12;
  CHECK(neutral == 2);
  // the lower neutral branch is -4 i delta / alpha0^2 at leading order
  double lowest = 0.0;
  for (const auto& z : l) lowest = std::min(lowest, z.imag());
  CHECK(lowest == Approx(-4.0 * 0.1 / 2.0).epsilon(0.01));
}

TEST_CASE("Re lambda1 / delta tends to gamma / alpha0 at O(delta^2)") {
  const SolitonParams sp = balance_constants(3.0, 1.0);
  const double limit = *sp.gamma / sp.alpha0;
  std::vector<double> err;
  for (double d : {0.1, 0.05, 0.025}) {
    err.push_back(std::abs(reduced_eigenvalues(reduced_matrix(sp, d))[0].real() / d - limit));
  }
  CHECK(err[0] / err[1] == Approx(4.0).epsilon(0.02));
  CHECK(err[1] / err[2] == Approx(4.0).epsilon(0.02));
}

TEST_CASE("predicted growth") {
  const GrowthPrediction g = predicted_growth(balance_constants(3.0, 1.0), 0.25);
  CHECK(g.rate == Approx(0.4330127).epsilon(1e-7));
  CHECK(g.lo == Approx(0.3247595).epsilon(1e-6));
  CHECK(g.hi == Approx(0.5412659).epsilon(1e-6));
  CHECK(predicted_growth(balance_constants(2.0, 1.0), 0.1).rate == Approx(0.0645497).epsilon(1e-6));
  CHECK(predicted_growth(balance_constants(3.0, 1.0), 0.0).rate == 0.0);
  try {
    predicted_growth(balance_constants(3.0, 1.0), 0.6);
    FAIL("expected OutOfValidityRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfValidityRange);
  }
  CHECK_THROWS_AS(predicted_growth(balance_constants(5.5, 1.0), 0.1), Error);
}

TEST_CASE("generalized kernel chain and biorthogonality") {
  const SolitonParams sp = balance_constants(3.0, 1.0);
  const KernelReport rep = kernel_check(sp, LineGrid::with_spacing(40.0, 0.01));
  for (double r : rep.chain_residuals) CHECK(r <= 1e-3);
  CHECK(rep.biorthogonality_error <= 1e-3);
  CHECK(std::abs(rep.gram(0, 0) - 1.0) <= 1e-3);
  CHECK(std::abs(rep.gram(0, 2)) <= 1e-3);

  // second-order convergence of the chain residuals
  const KernelReport coarse = kernel_check(sp, LineGrid::with_spacing(40.0, 0.02));
  for (int k = 0; k < 4; ++k) CHECK(coarse.chain_residuals[k] / rep.chain_residuals[k] == Approx(4.0).epsilon(0.1));

  const KernelReport p2 = kernel_check(balance_constants(2.0, 1.0), LineGrid::with_spacing(50.0, 0.01));
  for (double r : p2.chain_residuals) CHECK(r <= 1e-3);
  CHECK(p2.biorthogonality_error <= 1e-3);
  CHECK_THROWS_AS(kernel_check(balance_constants(5.0, 1.0), LineGrid::with_spacing(40.0, 0.01)), Error);
}

TEST_CASE("delta = 0 spectrum: a cluster of four at the origin, nothing unstable") {
  // M0^2 = diag(L- L+, L+ L-), so the spectrum of H(0) = i M0 is {+-i sqrt(mu)} over mu in spec(L- L+)
  const SolitonParams sp = balance_constants(3.0, 1.0);
  std::vector<double> radius;
  for (double h : {0.1, 0.05}) {
    const LineGrid g = LineGrid::with_spacing(25.0, h);
    const auto [lp, lm] = build_Lplus_Lminus(g, sp);
    const Eigen::MatrixXd P = lm.to_dense() * lp.to_dense();
    Eigen::EigenSolver<Eigen::MatrixXd> es(P, false);
    std::vector<cdouble> lam;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      const cdouble kappa = std::sqrt(cdouble(es.eigenvalues()(i)));
      lam.push_back(cdouble(0.0, 1.0) * kappa);
      lam.push_back(-cdouble(0.0, 1.0) * kappa);
    }
    std::vector<double> mags;
    double max_re = -INFINITY;
    for (const auto& l : lam) {
      mags.push_back(std::abs(l));
      max_re = std::max(max_re, l.real());
    }
    std::sort(mags.begin(), mags.end());
    const double cluster = mags[3];
    CHECK(mags[4] > 5.0 * cluster);
    CHECK(max_re <= cluster);
    radius.push_back(cluster);
  }
  // Jordan blocks split the fourfold zero at O(h), not O(h^2)
  CHECK(radius[0] / radius[1] == Approx(2.0).epsilon(0.15));
  CHECK(radius[1] < 2.0 * 0.05);
}

TEST_CASE("dense sector spectrum: symmetry and residuals") {
  const SmallSector s;
  const SpectrumReport rep = sector_spectrum(s.prof, 2, all_dense());
  CHECK(rep.method == "dense");
  CHECK(static_cast<Eigen::Index>(rep.eigenvalues.size()) == rep.dimension);
  CHECK(rep.max_residual() <= 1e-8);
  // the generator is real, so H = iM has spectrum closed under lambda -> -conj(lambda)
  double worst = 0.0;
  for (const auto& l : rep.eigenvalues) worst = std::max(worst, distance_to_set(-std::conj(l), rep.eigenvalues));
  CHECK(worst <= 1e-8 * 1e3);  // scaled by ||H|| ~ 4/h^2
  // j -> -j mirrors the spectrum, so the growth rates coincide
  const SpectrumReport neg = sector_spectrum(s.prof, -2, all_dense());
  CHECK(std::abs(neg.max_re - rep.max_re) <= 1e-8);
  for (const auto& l : rep.eigenvalues) CHECK(distance_to_set(-l, neg.eigenvalues) <= 1e-5);
  // one unstable pair in this sector
  int unstable = 0;
  for (const auto& l : rep.eigenvalues) unstable += l.real() > 1e-4;
  CHECK(unstable == 1);
}

TEST_CASE("j = 0 is spectrally neutral for p below 3") {
  const SmallSector s(8, 2.5);
  const SpectrumReport rep = sector_spectrum(s.prof, 0, all_dense());
  CHECK(rep.max_re <= 1e-4);
  double worst = 0.0;
  for (const auto& l : rep.eigenvalues) worst = std::max(worst, distance_to_set(std::conj(l), rep.eigenvalues));
  CHECK(worst <= 1e-6);
}

TEST_CASE("shift-invert agrees with the dense path") {
  const SmallSector s;
  SpectrumOptions d = all_dense();
  d.k_wanted = 3;
  SpectrumOptions a;
  a.k_wanted = 3;
  a.dense_limit = 0;
  a.want_vectors = true;
  const SpectrumReport rd = sector_spectrum(s.prof, 2, d);
  const SpectrumReport ra = sector_spectrum(s.prof, 2, a);
  CHECK(ra.method == "shift-invert");
  CHECK(ra.max_re == Approx(rd.max_re).epsilon(1e-9));
  CHECK(std::abs(ra.eigenvalues[0] - rd.eigenvalues[0]) < 1e-8);
  CHECK(ra.max_residual() <= 1e-8);
  REQUIRE(ra.eigenvectors.size() == ra.eigenvalues.size());
  const SectorOperator op(s.prof, s.prof.m, 2);
  const Eigen::VectorXcd& v = ra.eigenvectors[0];
  CHECK((op.apply(v) - ra.eigenvalues[0] * v).norm() / v.norm() <= 1e-8);
}

TEST_CASE("Lemma bracket at m = 32 for j = 4 and 8, and j -> -j") {
  const Profile prof = solve(3.0, 1.0, 32, default_radial_grid(3.0, 1.0, 32, 40));
  for (int j : {4, 8}) {
    const SpectrumReport rep = sector_spectrum(prof, j);
    REQUIRE(rep.prediction.has_value());
    CHECK(rep.in_bracket);
    CHECK(rep.max_re >= 0.75 * std::sqrt(3.0) * j / 32.0);
    CHECK(rep.max_re <= 1.25 * std::sqrt(3.0) * j / 32.0);
    CHECK(rep.max_residual() <= 1e-8);
    const double reduced = reduced_eigenvalues(reduced_matrix(balance_constants(3.0, 1.0), j / 32.0))[0].real();
    CHECK(std::abs(rep.max_re - reduced) <= 0.25 * reduced);
  }
  const SpectrumReport p8 = sector_spectrum(prof, 8);
  const SpectrumReport m8 = sector_spectrum(prof, -8);
  CHECK(std::abs(p8.max_re - m8.max_re) <= 1e-6);
}

TEST_CASE("unstable scan") {
  CHECK(canonical_index(3.0, 64) == 2);
  CHECK(canonical_index(3.0, 32) == 1);
  CHECK(canonical_index(1.6, 64) == 1);
  const Profile prof = solve(3.0, 1.0, 32, default_radial_grid(3.0, 1.0, 32, 44));
  std::vector<int> js;
  for (int j = 1; j <= 12; ++j) js.push_back(j);
  const ScanResult scan = unstable_scan(prof, js);
  REQUIRE(scan.rows.size() == 12);
  CHECK(scan.j_star == 1);
  CHECK(scan.rows[0].canonical);
  std::vector<double> x, y;
  for (const auto& row : scan.rows) {
    CHECK(row.residual <= 1e-8);
    CHECK(row.in_bracket);
    if (row.delta <= 0.3) {
      x.push_back(row.j);
      y.push_back(row.max_re);
    }
  }
  for (std::size_t k = 1; k < y.size(); ++k) CHECK(y[k] > y[k - 1]);
  // slope of the linear law within [3/4, 5/4] gamma / (alpha0 m)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k]; sy += y[k]; sxx += x[k] * x[k]; sxy += x[k] * y[k];
  }
  const double n = static_cast<double>(x.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double nominal = std::sqrt(3.0) / 32.0;
  CHECK(slope >= 0.75 * nominal);
  CHECK(slope <= 1.25 * nominal);

  const std::string csv = scan_to_csv(scan);
  CHECK(csv.rfind("m,j,delta,max_re,predicted,bracket_lo,bracket_hi,in_bracket,canonical\n", 0) == 0);
  CHECK_THROWS_AS(unstable_scan(prof, {32}), Error);
  CHECK_THROWS_AS(unstable_scan(prof, {0}), Error);
}
