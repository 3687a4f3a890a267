#include "vortexlab/profile.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/json_util.hpp"
#include "vortexlab/operators.hpp"

#include <Eigen/SparseLU>

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace vortexlab {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Ansatz: return "ansatz";
    case Provenance::NewtonConverged: return "newton-converged";
    case Provenance::Loaded: return "loaded";
  }
  return "unknown";
}

double Profile::peak_location() const {
  Eigen::Index k = 0;
  values.maxCoeff(&k);
  const double h = grid.spacing();
  if (k == 0 || k + 1 >= values.size()) return grid.node(k);
  const double ym = values(k - 1), y0 = values(k), yp = values(k + 1);
  const double denom = ym - 2.0 * y0 + yp;
  if (denom >= 0.0) return grid.node(k);
  return grid.node(k) + 0.5 * h * (ym - yp) / denom;
}

// Cutoff ---------------------------------------------------------------------

namespace {

// exp(-1/t) glue and its first two derivatives
double glue(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double glue_d1(double t) { return t > 0.0 ? glue(t) / (t * t) : 0.0; }
double glue_d2(double t) { return t > 0.0 ? glue(t) * (1.0 - 2.0 * t) / (t * t * t * t) : 0.0; }

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = glue(t), b = glue(1.0 - t);
  return a / (a + b);
}

double step_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = glue(t), b = glue(1.0 - t);
  const double da = glue_d1(t), db = -glue_d1(1.0 - t);
  const double sum = a + b;
  return (da * b - a * db) / (sum * sum);
}

double step_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = glue(t), b = glue(1.0 - t);
  const double da = glue_d1(t), db = -glue_d1(1.0 - t);
  const double dda = glue_d2(t), ddb = glue_d2(1.0 - t);
  const double num = da * b - a * db;
  const double dnum = dda * b - a * ddb;
  const double sum = a + b;
  const double den = sum * sum;
  const double dden = 2.0 * sum * (da + db);
  return (dnum * den - num * dden) / (den * den);
}

double sign(double s) { return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0); }

}  // namespace

double cutoff(double s) { return 1.0 - step(std::abs(s) - 2.0); }
double cutoff_d1(double s) { return -step_d1(std::abs(s) - 2.0) * sign(s); }
double cutoff_d2(double s) { return -step_d2(std::abs(s) - 2.0); }

double cutoff_length(double p, double c, double eps) {
  return -(2.0 / std::sqrt(c)) * std::max(1.0, 1.0 / (p - 1.0)) * std::log(eps);
}

// Ansatz -----------------------------------------------------------------------

double ansatz_value(double p, double omega, int m, double r) {
  require(m >= 2, ErrorKind::InvalidParameter,
          "ansatz needs m >= 2 (the cutoff length exceeds the ring radius otherwise)");
  const SolitonParams sp = balance_constants(p, omega);
  const double rbar = sp.alpha0 * m;
  const double l = cutoff_length(p, sp.c, 1.0 / m);
  const double s = r - rbar;
  double v = cutoff(s / l) * eval_q(Soliton::from(sp), s);
  if (m < 8) v *= step((r - rbar / 4.0) / (rbar / 4.0));
  return v;
}

Profile ansatz(double p, double omega, int m, const RadialGrid& grid) {
  require(m >= 2, ErrorKind::InvalidParameter,
          "ansatz needs m >= 2 (the cutoff length exceeds the ring radius otherwise)");
  check_resolution(grid.spacing(), m, std::sqrt(omega), "ansatz");
  Profile out;
  out.grid = grid;
  out.p = p;
  out.omega = omega;
  out.m = m;
  out.values = grid.nodes().unaryExpr([&](double r) { return ansatz_value(p, omega, m, r); }).matrix();
  out.provenance = Provenance::Ansatz;
  out.converged = false;
  update_residual_norm(out);
  return out;
}

// Residual -----------------------------------------------------------------

Eigen::VectorXd bvp_residual(const Profile& profile) {
  const Eigen::ArrayXd r = profile.grid.nodes();
  const double m2 = static_cast<double>(profile.m) * profile.m;
  const Eigen::VectorXd& phi = profile.values;
  Eigen::VectorXd out = radial_laplacian(profile.grid, phi);
  out.array() -= (profile.omega + m2 / r.square()) * phi.array();
  out += phi.unaryExpr([&](double v) { return signed_power(v, profile.p); });
  return out;
}

double update_residual_norm(Profile& profile) {
  profile.residual_norm = l2r_norm(profile.grid, bvp_residual(profile));
  return profile.residual_norm;
}

// Newton -----------------------------------------------------------------------

Profile solve(double p, double omega, int m, const RadialGrid& grid, const SolveOptions& options,
              NewtonTrace* trace) {
  require(m >= options.m_min, ErrorKind::InvalidParameter,
          "solve needs m >= " + std::to_string(options.m_min) + " (got " + std::to_string(m) + ")");
  check_resolution(grid.spacing(), m, std::sqrt(omega), "profile solve");
  Profile prof = ansatz(p, omega, m, grid);

  // Work in u = r^{1/2} phi, where the Jacobian is symmetric and the discrete
  // L^2 norm of the residual equals the L^2_r norm of the plain residual.
  const Eigen::ArrayXd sqrt_r = grid.nodes().sqrt();
  const double sqrt_h = std::sqrt(grid.spacing());
  const Eigen::SparseMatrix<double> base =
      radial_operator(grid, static_cast<double>(m) * m, omega, Eigen::VectorXd::Zero(grid.size()),
                      RadialForm::Symmetrized)
          .to_sparse();

  auto residual = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    const Eigen::ArrayXd phi = u.array() / sqrt_r;
    Eigen::VectorXd F = base * u;
    F.array() += sqrt_r * phi.unaryExpr([p](double v) { return signed_power(v, p); });
    return F;
  };

  Eigen::VectorXd u = (prof.values.array() * sqrt_r).matrix();
  Eigen::VectorXd F = residual(u);
  double res = sqrt_h * F.norm();
  bool converged = false;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

  for (int it = 0; it <= options.max_iterations; ++it) {
    const double scale = std::max(sqrt_h * u.norm(), 1e-300);
    if (trace) trace->residual_norms.push_back(res / scale);
    if (res <= options.tol * scale) {
      converged = true;
      break;
    }
    if (it == options.max_iterations) break;

    const Eigen::ArrayXd phi = u.array() / sqrt_r;
    Eigen::SparseMatrix<double> J = base;
    for (Eigen::Index i = 0; i < J.rows(); ++i) J.coeffRef(i, i) += p * abs_power(phi(i), p - 1.0);
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      fail(ErrorKind::NewtonDiverged, "singular Jacobian at Newton iteration " + std::to_string(it));
    }
    const Eigen::VectorXd s = -lu.solve(F);

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd u_trial;
    Eigen::VectorXd F_trial;
    double res_trial = 0.0;
    while (t >= 1.0 / 1024.0) {
      u_trial = u + t * s;
      F_trial = residual(u_trial);
      res_trial = sqrt_h * F_trial.norm();
      if (res_trial <= (1.0 - 1e-4 * t) * res) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      fail(ErrorKind::NewtonDiverged,
           "no Armijo step accepted at Newton iteration " + std::to_string(it));
    }
    if (trace) {
      trace->step_norms.push_back((s.array() / sqrt_r).abs().maxCoeff());
      trace->damping.push_back(t);
    }
    u = std::move(u_trial);
    F = std::move(F_trial);
    res = res_trial;
  }
  if (!converged) {
    fail(ErrorKind::NewtonDiverged,
         "no convergence in " + std::to_string(options.max_iterations) + " Newton iterations");
  }

  prof.values = (u.array() / sqrt_r).matrix();
  prof.provenance = Provenance::NewtonConverged;
  update_residual_norm(prof);
  if (prof.min_value() < -1e-8 * prof.max_value()) {
    fail(ErrorKind::NotPositive, "Newton converged to a sign-changing profile (min = " +
                                     std::to_string(prof.min_value()) + ")");
  }
  prof.converged = true;
  return prof;
}

// Residual decomposition -------------------------------------------------------

ResidualPieces residual_pieces(double p, double omega, int m, double rho, const RadialGrid& grid) {
  const SolitonParams sp = balance_constants(p, omega);
  require(m >= 2, ErrorKind::InvalidParameter, "residual decomposition needs m >= 2");
  const double rbar = sp.alpha0 * m;
  require(rho > rbar / 2.0 && rho < 2.0 * rbar, ErrorKind::InvalidParameter,
          "rho must lie in (alpha0 m / 2, 2 alpha0 m)");
  const double eps = 1.0 / m;
  const double c = omega + 1.0 / (eps * rho * eps * rho);
  const Soliton s{p, c};
  const double l = cutoff_length(p, c, eps);
  const double m2 = static_cast<double>(m) * m;

  const Eigen::Index n = grid.size();
  ResidualPieces out{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid.node(i);
    const double x = r - rho;
    const double q = eval_q(s, x);
    const double dq = eval_dq(s, x);
    const double chi = cutoff(x / l);
    const double dchi = cutoff_d1(x / l) / l;
    const double ddchi = cutoff_d2(x / l) / (l * l);
    out.R21(i) = (std::pow(chi, p) - chi) * std::pow(q, p);
    out.R22(i) = (c - omega - m2 / (r * r)) * chi * q + chi * dq / r;
    out.R23(i) = ddchi * q + 2.0 * dchi * dq + dchi * q / r;
  }
  return out;
}

ResidualNorms residual_decomposition(double p, double omega, int m, double rho,
                                     const RadialGrid& grid) {
  const ResidualPieces pieces = residual_pieces(p, omega, m, rho, grid);
  return {l2r_norm(grid, pieces.R21), l2r_norm(grid, pieces.R22), l2r_norm(grid, pieces.R23)};
}

// Files ------------------------------------------------------------------------

std::string profile_to_json(const Profile& profile) {
  nlohmann::ordered_json j;
  j["schema"] = "vortexlab-profile-v1";
  j["p"] = profile.p;
  j["omega"] = profile.omega;
  j["m"] = profile.m;
  j["grid"] = {{"r_max", profile.grid.r_max()}, {"n", profile.grid.size()}};
  j["values"] = std::vector<double>(profile.values.data(), profile.values.data() + profile.values.size());
  j["residual_norm"] = profile.residual_norm;
  j["converged"] = profile.converged;
  return dump_json(j, 2) + "\n";
}

Profile profile_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    require(j.at("schema").get<std::string>() == "vortexlab-profile-v1", ErrorKind::Io,
            "unknown profile schema");
    Profile prof;
    prof.p = j.at("p").get<double>();
    prof.omega = j.at("omega").get<double>();
    prof.m = j.at("m").get<int>();
    prof.grid = RadialGrid(j.at("grid").at("r_max").get<double>(),
                           j.at("grid").at("n").get<Eigen::Index>());
    const auto values = j.at("values").get<std::vector<double>>();
    require(static_cast<Eigen::Index>(values.size()) == prof.grid.size(), ErrorKind::Io,
            "profile has " + std::to_string(values.size()) + " values for a grid of " +
                std::to_string(prof.grid.size()));
    prof.values = Eigen::Map<const Eigen::VectorXd>(values.data(), prof.grid.size());
    prof.residual_norm = j.at("residual_norm").get<double>();
    prof.converged = j.value("converged", false);
    prof.provenance = Provenance::Loaded;
    return prof;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, std::string("malformed profile JSON: ") + e.what());
  }
}

void write_profile(const std::filesystem::path& path, const Profile& profile) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os << profile_to_json(profile);
  require(static_cast<bool>(os), ErrorKind::Io, "failed writing " + path.string());
}

Profile read_profile(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return profile_from_json(ss.str());
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("VORTEXLAB_CACHE"); env != nullptr && *env != '\0') return env;
  return std::filesystem::path("vortexlab-cache");
}

std::string profile_cache_key(double p, double omega, int m, const RadialGrid& grid) {
  const std::string canonical = "p=" + format_double(p) + ";omega=" + format_double(omega) +
                                ";m=" + std::to_string(m) + ";n=" + std::to_string(grid.size()) +
                                ";r_max=" + format_double(grid.r_max());
  std::uint64_t hash = 14695981039346656037ULL;  // FNV-1a
  for (unsigned char ch : canonical) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "profile-%016llx.json", static_cast<unsigned long long>(hash));
  return buf;
}

Profile load_or_solve(double p, double omega, int m, const RadialGrid& grid,
                      const std::filesystem::path& cache_dir, const SolveOptions& options, bool* hit) {
  const auto path = cache_dir / profile_cache_key(p, omega, m, grid);
  if (hit) *hit = false;
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      Profile cached = read_profile(path);
      if (cached.p == p && cached.omega == omega && cached.m == m && cached.grid == grid &&
          cached.converged) {
        if (hit) *hit = true;
        return cached;
      }
    } catch (const Error&) {
      // unreadable entry: fall through and overwrite it
    }
  }
  Profile prof = solve(p, omega, m, grid, options);

  static std::atomic<unsigned> counter{0};
  std::filesystem::create_directories(cache_dir, ec);
  const auto tmp = path.string() + ".tmp." + std::to_string(::getpid()) + "." +
                   std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                   std::to_string(counter++);
  write_profile(tmp, prof);
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::Io, "cannot move profile into cache: " + ec.message());
  return prof;
}

}  // namespace vortexlab
