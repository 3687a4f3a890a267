#include "vortexlab/spectral.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/json_util.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>

namespace vortexlab {

namespace {

constexpr cdouble kI{0.0, 1.0};

bool in_validity_range(double p) { return p > 1.0 && p < 5.0; }

}  // namespace

// Reduced model -----------------------------------------------------------------

ReducedModel reduced_matrix(const SolitonParams& params, double delta) {
  if (!in_validity_range(params.p)) {
    fail(ErrorKind::OutOfValidityRange, "reduced model needs 1 < p < 5");
  }
  require(delta >= 0.0, ErrorKind::InvalidParameter, "delta must be nonnegative");
  const QNorms nq = q_norms(params);
  const double a2 = 1.0 / (params.alpha0 * params.alpha0);

  ReducedModel rm;
  rm.p = params.p;
  rm.omega = params.omega;
  rm.alpha0 = params.alpha0;
  rm.delta = delta;
  rm.theta1 = 2.0 / nq.dNdc;
  rm.theta2 = 4.0 / nq.L2_sq;
  rm.b1 = a2 * rm.theta1 * nq.L2_sq;
  rm.b2 = -a2 * rm.theta1 * nq.dcq_L2_sq;
  rm.b3 = -4.0 * a2 * a2;
  rm.b4 = a2 * nq.xq_L2_sq / nq.L2_sq;

  const double d2 = delta * delta;
  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  M(0, 1) = 1.0 + rm.b2 * d2;
  M(1, 0) = rm.b1 * d2;
  M(2, 3) = 1.0 + rm.b4 * d2;
  M(3, 2) = rm.b3 * d2;
  M.diagonal().setConstant(-2.0 * kI * a2 * delta);
  rm.matrix = M;
  return rm;
}

std::array<cdouble, 4> reduced_eigenvalues(const ReducedModel& model) {
  const double d = model.delta;
  const cdouble center = -2.0 * kI * d / (model.alpha0 * model.alpha0);
  const cdouble s1 = d * std::sqrt(cdouble(model.b1 * (1.0 + model.b2 * d * d)));
  const cdouble s2 = d * std::sqrt(cdouble(model.b3 * (1.0 + model.b4 * d * d)));
  std::array<cdouble, 4> out{center + s1, center - s1, center + s2, center - s2};
  std::stable_sort(out.begin(), out.end(),
                   [](cdouble a, cdouble b) { return a.real() > b.real(); });
  return out;
}

GrowthPrediction predicted_growth(const SolitonParams& params, double delta) {
  if (!in_validity_range(params.p) || !params.gamma) {
    fail(ErrorKind::OutOfValidityRange, "growth prediction needs 1 < p < 5");
  }
  require(delta >= 0.0, ErrorKind::InvalidParameter, "delta must be nonnegative");
  if (delta > 0.5) fail(ErrorKind::OutOfValidityRange, "growth prediction needs delta <= 0.5");
  const double rate = *params.gamma * delta / params.alpha0;
  return {rate, 0.75 * rate, 1.25 * rate};
}

// Generalized kernel ------------------------------------------------------------

Eigen::SparseMatrix<double> line_generator(const LineGrid& grid, const SolitonParams& params) {
  const auto [lp, lm] = build_Lplus_Lminus(grid, params);
  const Eigen::Index n = grid.size();
  const Eigen::SparseMatrix<double> sp = lp.to_sparse();
  const Eigen::SparseMatrix<double> sm = lm.to_sparse();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(6 * n));
  for (int k = 0; k < sm.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sm, k); it; ++it)
      t.emplace_back(it.row(), n + it.col(), it.value());
  }
  for (int k = 0; k < sp.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sp, k); it; ++it)
      t.emplace_back(n + it.row(), it.col(), it.value());
  }
  Eigen::SparseMatrix<double> M(2 * n, 2 * n);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

KernelVectors kernel_vectors(const LineGrid& grid, const SolitonParams& params) {
  const Soliton s = Soliton::from(params);
  const QNorms nq = q_norms(params);
  const double theta1 = 2.0 / nq.dNdc;
  const double theta2 = 4.0 / nq.L2_sq;
  const Eigen::ArrayXd x = grid.nodes();
  const Eigen::ArrayXd q = q_values(s, x);
  const Eigen::ArrayXd dq = dq_values(s, x);
  const Eigen::ArrayXd dcq = dcq_values(s, x);
  const Eigen::ArrayXd xq = x * q;
  const Eigen::Index n = grid.size();

  KernelVectors kv{Eigen::MatrixXcd::Zero(2 * n, 4), Eigen::MatrixXcd::Zero(2 * n, 4)};
  kv.phi.col(0).tail(n) = q.cast<cdouble>();
  kv.phi.col(1).head(n) = -kI * dcq.cast<cdouble>();
  kv.phi.col(2).head(n) = dq.cast<cdouble>();
  kv.phi.col(3).tail(n) = -0.5 * kI * xq.cast<cdouble>();

  kv.dual.col(0).tail(n) = theta1 * dcq.cast<cdouble>();
  kv.dual.col(1).head(n) = -kI * theta1 * q.cast<cdouble>();
  kv.dual.col(2).head(n) = -0.5 * theta2 * xq.cast<cdouble>();
  kv.dual.col(3).tail(n) = kI * theta2 * dq.cast<cdouble>();
  return kv;
}

KernelReport kernel_check(const SolitonParams& params, const LineGrid& grid) {
  require(params.p != 5.0, ErrorKind::OutOfValidityRange,
          "the kernel has a different structure at p = 5");
  const Eigen::SparseMatrix<cdouble> H = line_generator(grid, params).cast<cdouble>() * kI;
  const KernelVectors kv = kernel_vectors(grid, params);
  const double h = grid.spacing();

  KernelReport rep{};
  for (int k = 0; k < 4; ++k) {
    const Eigen::VectorXcd hv = H * kv.phi.col(k);
    const bool chained = (k % 2) == 1;
    const Eigen::VectorXcd target =
        chained ? Eigen::VectorXcd(kv.phi.col(k - 1)) : Eigen::VectorXcd::Zero(hv.size());
    const double denom = chained ? target.norm() : kv.phi.col(k).norm();
    rep.chain_residuals[k] = (hv - target).norm() / denom;
  }
  // <f, g> = h sum f conj(g): conjugate-linear in the second argument
  rep.gram = h * (kv.dual.adjoint() * kv.phi).transpose();
  rep.biorthogonality_error = (rep.gram - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
  return rep;
}

// Sector spectra ----------------------------------------------------------------

double SpectrumReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

int canonical_index(double p, int m) {
  require(p > 1.0, ErrorKind::InvalidParameter, "p must exceed 1");
  const double beta = std::min(p - 1.0, 1.0) / 6.0;
  // guard against pow rounding just below an exact integer
  return static_cast<int>(std::floor(std::pow(static_cast<double>(m), beta) + 1e-12));
}

cdouble default_shift(double p, double omega, int m, int j) {
  const SolitonParams sp = balance_constants(p, omega);
  const double delta = static_cast<double>(j) / m;
  const double a2 = 1.0 / (sp.alpha0 * sp.alpha0);
  const double re = sp.gamma ? *sp.gamma * std::abs(delta) / sp.alpha0 : 0.1;
  return {std::max(re, 1e-3), -2.0 * a2 * delta};
}

namespace {

struct Pair {
  cdouble lambda;
  double residual;
  Eigen::VectorXcd vector;
};

double pair_residual(const Eigen::SparseMatrix<cdouble>& H, const Eigen::VectorXcd& v, cdouble lambda) {
  return (H * v - lambda * v).norm() / v.norm();
}

std::vector<Pair> dense_pairs(const SectorOperator& op) {
  const Eigen::MatrixXd M(op.generator());
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigensolveFailure, "dense eigensolve failed");
  const Eigen::SparseMatrix<cdouble> H = op.complex_matrix();
  std::vector<Pair> out;
  out.reserve(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index k = 0; k < M.rows(); ++k) {
    const cdouble lambda = kI * es.eigenvalues()(k);
    Eigen::VectorXcd v = es.eigenvectors().col(k);
    v /= v.norm();
    out.push_back({lambda, pair_residual(H, v, lambda), std::move(v)});
  }
  return out;
}

// Rayleigh quotient iteration with a fresh factorization per step.
Pair polish(const Eigen::SparseMatrix<cdouble>& H, Eigen::VectorXcd v, cdouble lambda, double tol) {
  const Eigen::Index N = H.rows();
  Eigen::SparseMatrix<cdouble> I(N, N);
  I.setIdentity();
  Eigen::SparseLU<Eigen::SparseMatrix<cdouble>> lu;
  v /= v.norm();
  double res = pair_residual(H, v, lambda);
  Pair best{lambda, res, v};
  for (int it = 0; it < 8 && best.residual > 0.1 * tol; ++it) {
    lu.compute(H - lambda * I);
    if (lu.info() != Eigen::Success) break;  // lambda is an eigenvalue to working precision
    Eigen::VectorXcd w = lu.solve(v);
    if (!w.allFinite() || w.norm() == 0.0) break;
    v = w / w.norm();
    lambda = v.dot(H * v);  // v is unit, dot conjugates the first argument
    res = pair_residual(H, v, lambda);
    if (res < best.residual) {
      best = {lambda, res, v};
    } else if (it > 2) {
      break;
    }
  }
  return best;
}

std::vector<Pair> arnoldi_pairs(const SectorOperator& op, cdouble sigma, const SpectrumOptions& opt) {
  const Eigen::SparseMatrix<cdouble> H = op.complex_matrix();
  const Eigen::Index N = H.rows();
  Eigen::SparseMatrix<cdouble> I(N, N);
  I.setIdentity();
  Eigen::SparseLU<Eigen::SparseMatrix<cdouble>> lu;
  lu.compute(H - sigma * I);
  if (lu.info() != Eigen::Success) {
    fail(ErrorKind::EigensolveFailure, "factorization of H - sigma failed");
  }

  const int k = static_cast<int>(std::min<Eigen::Index>(opt.krylov_dim, N - 1));
  Eigen::MatrixXcd V(N, k + 1);
  Eigen::MatrixXcd Hh = Eigen::MatrixXcd::Zero(k + 1, k);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  for (Eigen::Index i = 0; i < N; ++i) V(i, 0) = cdouble(gauss(rng), gauss(rng));
  V.col(0) /= V.col(0).norm();

  int kk = k;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXcd w = lu.solve(V.col(c));
    for (int pass = 0; pass < 2; ++pass) {  // classical Gram-Schmidt, reorthogonalized
      const Eigen::VectorXcd coef = V.leftCols(c + 1).adjoint() * w;
      w -= V.leftCols(c + 1) * coef;
      Hh.col(c).head(c + 1) += coef;
    }
    const double beta = w.norm();
    Hh(c + 1, c) = beta;
    if (beta < 1e-13 * Hh.col(c).head(c + 1).norm()) {
      kk = c + 1;
      break;
    }
    V.col(c + 1) = w / beta;
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(Hh.topLeftCorner(kk, kk), true);
  if (ces.info() != Eigen::Success) fail(ErrorKind::EigensolveFailure, "Ritz eigensolve failed");
  std::vector<int> order(static_cast<std::size_t>(kk));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(ces.eigenvalues()(a)) > std::abs(ces.eigenvalues()(b));
  });

  const int want = std::max(opt.k_wanted, 1);
  const int candidates = std::min(kk, 2 * want + 4);
  std::vector<Pair> out;
  for (int c = 0; c < candidates; ++c) {
    const cdouble theta = ces.eigenvalues()(order[c]);
    if (std::abs(theta) == 0.0) continue;
    const Eigen::VectorXcd y = V.leftCols(kk) * ces.eigenvectors().col(order[c]);
    Pair pr = polish(H, y, sigma + 1.0 / theta, opt.residual_tol);
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Pair& q) {
      return std::abs(q.lambda - pr.lambda) <= 1e-7 * (1.0 + std::abs(pr.lambda));
    });
    if (!duplicate) out.push_back(std::move(pr));
  }
  return out;
}

}  // namespace

SpectrumReport sector_spectrum(const Profile& profile, int j, const SpectrumOptions& options) {
  const SectorOperator op(profile, profile.m, j);
  return sector_spectrum(op, profile, options);
}

SpectrumReport sector_spectrum(const SectorOperator& op, const Profile& profile,
                               const SpectrumOptions& options) {
  SpectrumReport rep;
  rep.p = profile.p;
  rep.omega = profile.omega;
  rep.m = op.m();
  rep.j = op.j();
  rep.delta = static_cast<double>(op.j()) / op.m();
  rep.dimension = op.dimension();

  std::vector<Pair> pairs;
  if (op.dimension() <= options.dense_limit) {
    rep.method = "dense";
    pairs = dense_pairs(op);
  } else {
    rep.method = "shift-invert";
    const cdouble sigma =
        options.shift ? *options.shift : default_shift(profile.p, profile.omega, op.m(), op.j());
    pairs = arnoldi_pairs(op, sigma, options);
  }
  if (pairs.empty()) fail(ErrorKind::EigensolveFailure, "no eigenvalues found");
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.lambda.real() > b.lambda.real();
  });
  const std::size_t keep =
      options.k_wanted <= 0 ? pairs.size()
                            : std::min(pairs.size(), static_cast<std::size_t>(options.k_wanted));
  for (std::size_t i = 0; i < keep; ++i) {
    rep.eigenvalues.push_back(pairs[i].lambda);
    rep.residuals.push_back(pairs[i].residual);
    if (options.want_vectors) rep.eigenvectors.push_back(std::move(pairs[i].vector));
  }
  rep.max_re = rep.eigenvalues.front().real();

  const double ad = std::abs(rep.delta);
  if (in_validity_range(profile.p) && ad <= 0.5) {
    rep.prediction = predicted_growth(balance_constants(profile.p, profile.omega), ad);
    rep.in_bracket = rep.max_re >= rep.prediction->lo && rep.max_re <= rep.prediction->hi;
  }
  return rep;
}

ScanResult unstable_scan(const Profile& profile, const std::vector<int>& j_list,
                         const SpectrumOptions& options) {
  const int m = profile.m;
  require(!j_list.empty(), ErrorKind::InvalidParameter, "j range is empty");
  for (int j : j_list) {
    require(j >= 1 && j <= m - 1, ErrorKind::InvalidParameter,
            "scan index j = " + std::to_string(j) + " outside [1, m-1]");
  }
  ScanResult out{m, canonical_index(profile.p, m), {}};
  std::vector<std::future<SpectrumReport>> jobs;
  for (int j : j_list) {
    jobs.push_back(std::async(std::launch::async, [&profile, &options, j] {
      SpectrumOptions o = options;
      o.want_vectors = false;
      return sector_spectrum(profile, j, o);
    }));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const SpectrumReport r = jobs[i].get();
    out.rows.push_back({r.j, r.delta, r.max_re, r.residuals.front(), r.prediction, r.in_bracket,
                        r.j == out.j_star});
  }
  return out;
}

// Output ------------------------------------------------------------------------

std::string spectrum_to_json(const SpectrumReport& r, int indent) {
  nlohmann::ordered_json j;
  j["schema"] = "vortexlab-spectrum-v1";
  j["p"] = r.p;
  j["omega"] = r.omega;
  j["m"] = r.m;
  j["j"] = r.j;
  j["delta"] = r.delta;
  j["method"] = r.method;
  j["dimension"] = r.dimension;
  j["max_re"] = r.max_re;
  if (r.prediction) {
    j["predicted"] = r.prediction->rate;
    j["bracket"] = {r.prediction->lo, r.prediction->hi};
  } else {
    j["predicted"] = nullptr;
    j["bracket"] = nullptr;
  }
  j["in_bracket"] = r.in_bracket;
  j["max_residual"] = r.max_residual();
  auto ev = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    nlohmann::ordered_json e;
    e["re"] = r.eigenvalues[i].real();
    e["im"] = r.eigenvalues[i].imag();
    e["residual"] = r.residuals[i];
    ev.push_back(std::move(e));
  }
  j["eigenvalues"] = std::move(ev);
  return dump_json(j, indent);
}

std::string scan_to_csv(const ScanResult& scan) {
  std::string out = "m,j,delta,max_re,predicted,bracket_lo,bracket_hi,in_bracket,canonical\n";
  for (const auto& row : scan.rows) {
    const auto num = [](std::optional<double> v) { return v ? format_double(*v) : std::string("nan"); };
    out += std::to_string(scan.m) + "," + std::to_string(row.j) + "," + format_double(row.delta) +
           "," + format_double(row.max_re) + "," +
           num(row.prediction ? std::optional(row.prediction->rate) : std::nullopt) + "," +
           num(row.prediction ? std::optional(row.prediction->lo) : std::nullopt) + "," +
           num(row.prediction ? std::optional(row.prediction->hi) : std::nullopt) + "," +
           (row.in_bracket ? "1" : "0") + "," + (row.canonical ? "1" : "0") + "\n";
  }
  return out;
}

std::string reduced_to_json(const ReducedModel& model, int indent) {
  nlohmann::ordered_json j;
  j["schema"] = "vortexlab-reduced-v1";
  j["p"] = model.p;
  j["omega"] = model.omega;
  j["delta"] = model.delta;
  j["alpha0"] = model.alpha0;
  j["b1"] = model.b1;
  j["b2"] = model.b2;
  j["b3"] = model.b3;
  j["b4"] = model.b4;
  j["theta1"] = model.theta1;
  j["theta2"] = model.theta2;
  auto ev = nlohmann::ordered_json::array();
  for (const cdouble& l : reduced_eigenvalues(model)) ev.push_back({{"re", l.real()}, {"im", l.imag()}});
  j["eigenvalues"] = std::move(ev);
  auto mat = nlohmann::ordered_json::array();
  for (int r = 0; r < 4; ++r) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < 4; ++c) row.push_back({model.matrix(r, c).real(), model.matrix(r, c).imag()});
    mat.push_back(std::move(row));
  }
  j["matrix"] = std::move(mat);
  return dump_json(j, indent);
}

}  // namespace vortexlab
