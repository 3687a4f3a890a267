// vortexlab command-line interface.

#include "vortexlab/asymptotics.hpp"
#include "vortexlab/error.hpp"
#include "vortexlab/evolution.hpp"
#include "vortexlab/json_util.hpp"
#include "vortexlab/profile.hpp"
#include "vortexlab/soliton1d.hpp"
#include "vortexlab/spectral.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace vl = vortexlab;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kNumerical = 3, kValidity = 4 };

int exit_code(vl::ErrorKind kind) {
  switch (kind) {
    case vl::ErrorKind::OutOfValidityRange:
      return kValidity;
    case vl::ErrorKind::QuadratureFailure:
    case vl::ErrorKind::NewtonDiverged:
    case vl::ErrorKind::NotPositive:
    case vl::ErrorKind::NotConverged:
    case vl::ErrorKind::EigensolveFailure:
    case vl::ErrorKind::LinearSolveFailure:
      return kNumerical;
    default:
      return kUsage;
  }
}

// "key = value" lines, '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream is(path);
  vl::require(static_cast<bool>(is), vl::ErrorKind::Io, "cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    vl::require(eq != std::string::npos, vl::ErrorKind::InvalidParameter,
                path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::optional<std::string> find_config_flag(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

std::string long_name(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() ? std::string() : names.front();
}

// Effective configuration of the selected subcommand: every named option with
// its command-line value, else its (possibly config-file) default.
json effective_config(const CLI::App& app, const CLI::App* sub) {
  json out;
  for (const CLI::App* a : {&app, sub}) {
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = long_name(opt);
      if (name.empty() || name == "help" || name == "config") continue;
      std::string value;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
      } else {
        value = opt->get_default_str();
      }
      out[name] = value;
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  vl::require(static_cast<bool>(os), vl::ErrorKind::Io, "cannot write " + path);
  os << text;
}

std::vector<int> parse_int_list(const std::string& spec) {
  // "1,2,5" or "1:12" or a mix "1:4,8"
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      if (const auto colon = tok.find(':'); colon != std::string::npos) {
        const int a = std::stoi(tok.substr(0, colon));
        const int b = std::stoi(tok.substr(colon + 1));
        vl::require(a <= b, vl::ErrorKind::InvalidParameter, "empty range " + tok);
        for (int v = a; v <= b; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoi(tok));
      }
    } catch (const std::logic_error&) {
      vl::fail(vl::ErrorKind::InvalidParameter, "cannot parse integer list '" + spec + "'");
    }
  }
  return out;
}

struct Common {
  double p = 3.0;
  double omega = 1.0;
  std::string cache;
  bool no_cache = false;
  unsigned long long seed = 1;
  double tol = 1e-10;
  long n = 0;
  double r_max = 0.0;
  double h = 0.0;
};

std::filesystem::path cache_dir(const Common& c) {
  if (c.no_cache) return {};
  return c.cache.empty() ? vl::default_cache_dir() : std::filesystem::path(c.cache);
}

vl::RadialGrid make_grid(const Common& c, int m, int nu_max) {
  const vl::RadialGrid def = vl::default_radial_grid(c.p, c.omega, m, nu_max);
  const double r_max = c.r_max > 0.0 ? c.r_max : def.r_max();
  if (c.n > 0) return vl::RadialGrid(r_max, c.n);
  if (c.h > 0.0) return vl::RadialGrid::with_spacing(r_max, c.h);
  return c.r_max > 0.0 ? vl::RadialGrid::with_spacing(r_max, def.spacing()) : def;
}

vl::Profile get_profile(const Common& c, int m, int nu_max, bool* hit = nullptr) {
  const vl::RadialGrid grid = make_grid(c, m, nu_max);
  vl::SolveOptions opt;
  opt.tol = c.tol;
  const auto dir = cache_dir(c);
  if (hit) *hit = false;
  if (dir.empty()) return vl::solve(c.p, c.omega, m, grid, opt);
  return vl::load_or_solve(c.p, c.omega, m, grid, dir, opt, hit);
}

json params_json(const vl::SolitonParams& sp) {
  json j;
  j["p"] = sp.p;
  j["omega"] = sp.omega;
  j["c"] = sp.c;
  j["alpha0"] = sp.alpha0;
  j["A"] = sp.A;
  j["lambda0"] = sp.lambda0;
  j["gamma"] = sp.gamma ? json(*sp.gamma) : json(nullptr);
  j["beta_exp"] = sp.beta_exp;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortexlab: vortex solitons of the focusing NLS, their soliton limits and spectra"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file (flags override it)");
  app.add_option("--p", c.p, "nonlinearity exponent p > 1")->capture_default_str();
  app.add_option("--omega", c.omega, "frequency omega > 0")->capture_default_str();
  app.add_option("--cache", c.cache, "profile cache directory (default $VORTEXLAB_CACHE or ./vortexlab-cache)");
  app.add_flag("--no-cache", c.no_cache, "always solve, never read or write the cache");
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--tol", c.tol, "Newton tolerance (relative residual)")->capture_default_str();
  app.add_option("--n", c.n, "interior radial nodes (default from the resolution guard)");
  app.add_option("--r-max", c.r_max, "radial truncation (default rbar + 40/sqrt(omega))");
  app.add_option("--spacing", c.h, "radial spacing (ignored when --n is given)");

  // constants
  auto* constants = app.add_subcommand("constants", "balance constants of the 1D limit");

  // profile
  int m = 32;
  std::string out_path;
  auto* profile = app.add_subcommand("profile", "solve for the vortex profile");
  profile->add_option("--m", m, "spin")->capture_default_str();
  profile->add_option("--out", out_path, "write the profile JSON here");

  // asymptotics
  std::string m_list = "8,16,32,64";
  std::string out_csv = "-";
  std::string out_json;
  auto* asym = app.add_subcommand("asymptotics", "distance to the shifted soliton and fitted rates");
  asym->add_option("--m-list", m_list, "spins, e.g. 8,16,32,64")->capture_default_str();
  asym->add_option("--out-csv", out_csv, "CSV destination ('-' for stdout)")->capture_default_str();
  asym->add_option("--out-json", out_json, "rate-fit summary JSON destination");

  // spectrum
  int j = 8;
  int k = 6;
  long dense_limit = 1200;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of one azimuthal sector");
  spectrum->add_option("--m", m, "spin")->capture_default_str();
  spectrum->add_option("--j", j, "perturbation index, |j| < m")->capture_default_str();
  spectrum->add_option("--k", k, "number of eigenvalues (<= 0: all, dense only)")->capture_default_str();
  spectrum->add_option("--dense-limit", dense_limit, "largest dimension solved densely")->capture_default_str();

  // scan
  std::string j_range = "1:12";
  auto* scan = app.add_subcommand("scan", "largest growth rate over a range of j");
  scan->add_option("--m", m, "spin")->capture_default_str();
  scan->add_option("--j-range", j_range, "indices, e.g. 1:12 or 2,4,8")->capture_default_str();
  scan->add_option("--dense-limit", dense_limit, "largest dimension solved densely")->capture_default_str();
  scan->add_option("--out-csv", out_csv, "CSV destination ('-' for stdout)")->capture_default_str();
  scan->add_option("--out-json", out_json, "summary JSON destination");

  // reduced
  double delta = 0.25;
  auto* reduced = app.add_subcommand("reduced", "reduced 4x4 long-wave model");
  reduced->add_option("--delta", delta, "delta = j/m")->capture_default_str();

  // evolve
  std::optional<double> T;
  std::optional<double> dt;
  double burn_in = 0.5;
  std::string init = "random";
  std::string init_file;
  auto* evolve = app.add_subcommand("evolve", "linearized time evolution and growth-rate fit");
  evolve->add_option("--m", m, "spin")->capture_default_str();
  evolve->add_option("--j", j, "perturbation index")->capture_default_str();
  evolve->add_option("--T", T, "final time (default 16 / predicted rate, at least 30)");
  evolve->add_option("--dt", dt, "time step (default 0.1 / max(1, predicted rate))");
  evolve->add_option("--burn-in", burn_in, "fraction of the window discarded by the fit")->capture_default_str();
  evolve->add_option("--init", init, "random | eigenvector | file")
      ->check(CLI::IsMember({"random", "eigenvector", "file"}))
      ->capture_default_str();
  evolve->add_option("--init-file", init_file, "JSON pair for --init file");
  evolve->add_option("--out-csv", out_csv, "trajectory CSV destination ('-' for stdout)")->capture_default_str();
  evolve->add_option("--out-json", out_json, "fit summary JSON destination");

  try {
    if (const auto cfg = find_config_flag(argc, argv)) {
      const auto values = read_config(*cfg);
      std::vector<CLI::App*> scopes{&app};
      for (CLI::App* s : app.get_subcommands({})) scopes.push_back(s);
      for (const auto& [key, value] : values) {
        bool used = false;
        for (CLI::App* s : scopes) {
          for (CLI::Option* opt : s->get_options()) {
            if (long_name(opt) == key && key != "config") {
              opt->default_str(value);
              if (opt->get_type_size() != 0) opt->default_val(value);
              used = true;
            }
          }
        }
        vl::require(used, vl::ErrorKind::InvalidParameter, "unknown config key '" + key + "'");
      }
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kUsage;
  } catch (const vl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const json config = effective_config(app, sub);
    const vl::SolitonParams sp = vl::balance_constants(c.p, c.omega);

    if (sub == constants) {
      json j_out;
      j_out["schema"] = "vortexlab-constants-v1";
      j_out["params"] = params_json(sp);
      j_out["config"] = config;
      std::cout << vl::dump_json(j_out) << "\n";
    } else if (sub == profile) {
      bool hit = false;
      const vl::Profile prof = get_profile(c, m, 0, &hit);
      if (!out_path.empty()) vl::write_profile(out_path, prof);
      json j_out;
      j_out["schema"] = "vortexlab-profile-summary-v1";
      j_out["m"] = m;
      j_out["n"] = prof.grid.size();
      j_out["r_max"] = prof.grid.r_max();
      j_out["converged"] = prof.converged;
      j_out["residual_norm"] = prof.residual_norm;
      j_out["peak_location"] = prof.peak_location();
      j_out["peak_value"] = prof.max_value();
      j_out["rbar"] = sp.alpha0 * m;
      j_out["cache_hit"] = hit;
      j_out["config"] = config;
      std::cout << vl::dump_json(j_out) << "\n";
    } else if (sub == asym) {
      const std::vector<int> ms = parse_int_list(m_list);
      vl::require(!ms.empty(), vl::ErrorKind::InvalidParameter, "m list is empty");
      vl::SolveOptions opt;
      opt.tol = c.tol;
      const auto rows = vl::error_table(c.p, c.omega, ms, cache_dir(c), opt);
      write_text(out_csv, vl::error_table_csv(rows));
      json j_out;
      j_out["schema"] = "vortexlab-asymptotics-v1";
      if (rows.size() >= 3) {
        const vl::RateFit f = vl::rate_fit(rows);
        j_out["rate_h2"] = f.rate_h2;
        j_out["rate_linf"] = f.rate_linf;
        j_out["r2_h2"] = f.r2_h2;
        j_out["r2_linf"] = f.r2_linf;
      } else {
        j_out["rate_h2"] = nullptr;
        j_out["rate_linf"] = nullptr;
        j_out["r2_h2"] = nullptr;
        j_out["r2_linf"] = nullptr;
      }
      j_out["config"] = config;
      if (!out_json.empty()) write_text(out_json, vl::dump_json(j_out) + "\n");
      if (out_csv != "-" || !out_json.empty()) {
        if (out_json.empty()) std::cout << vl::dump_json(j_out) << "\n";
      } else {
        std::cerr << vl::dump_json(j_out, -1) << "\n";
      }
    } else if (sub == spectrum) {
      vl::require(m >= 1 && std::abs(j) < m, vl::ErrorKind::InvalidParameter,
                  "need |j| < m (got m = " + std::to_string(m) + ", j = " + std::to_string(j) + ")");
      const vl::Profile prof = get_profile(c, m, m + std::abs(j));
      vl::SpectrumOptions so;
      so.k_wanted = k;
      so.dense_limit = dense_limit;
      so.seed = static_cast<unsigned>(c.seed);
      const vl::SpectrumReport rep = vl::sector_spectrum(prof, j, so);
      json j_out = json::parse(vl::spectrum_to_json(rep));
      j_out["config"] = config;
      std::cout << vl::dump_json(j_out) << "\n";
    } else if (sub == scan) {
      const std::vector<int> js = parse_int_list(j_range);
      vl::require(!js.empty(), vl::ErrorKind::InvalidParameter, "j range is empty");
      for (int jj : js) {
        vl::require(jj >= 1 && jj < m, vl::ErrorKind::InvalidParameter,
                    "scan index j = " + std::to_string(jj) + " outside [1, m-1]");
      }
      const int j_max = *std::max_element(js.begin(), js.end());
      const vl::Profile prof = get_profile(c, m, m + j_max);
      vl::SpectrumOptions so;
      so.k_wanted = 1;
      so.dense_limit = dense_limit;
      so.seed = static_cast<unsigned>(c.seed);
      const vl::ScanResult res = vl::unstable_scan(prof, js, so);
      write_text(out_csv, vl::scan_to_csv(res));
      json j_out;
      j_out["schema"] = "vortexlab-scan-v1";
      j_out["m"] = res.m;
      j_out["j_star"] = res.j_star;
      double worst = 0.0;
      for (const auto& row : res.rows) worst = std::max(worst, row.residual);
      j_out["max_residual"] = worst;
      j_out["config"] = config;
      if (!out_json.empty()) write_text(out_json, vl::dump_json(j_out) + "\n");
      else if (out_csv != "-") std::cout << vl::dump_json(j_out) << "\n";
      else std::cerr << vl::dump_json(j_out, -1) << "\n";
    } else if (sub == reduced) {
      const vl::ReducedModel rm = vl::reduced_matrix(sp, delta);
      json j_out = json::parse(vl::reduced_to_json(rm));
      j_out["predicted"] = vl::predicted_growth(sp, delta).rate;
      j_out["config"] = config;
      std::cout << vl::dump_json(j_out) << "\n";
    } else if (sub == evolve) {
      vl::require(m >= 1 && std::abs(j) < m, vl::ErrorKind::InvalidParameter,
                  "need |j| < m (got m = " + std::to_string(m) + ", j = " + std::to_string(j) + ")");
      const vl::Profile prof = get_profile(c, m, m + std::abs(j));
      const vl::SectorOperator op(prof, m, j);
      const double d = std::abs(static_cast<double>(j)) / m;
      double rate_guess = 0.0;
      if (sp.gamma && d <= 0.5) rate_guess = vl::predicted_growth(sp, d).rate;
      vl::require(!dt || *dt > 0.0, vl::ErrorKind::InvalidParameter, "dt must be positive");
      vl::require(!T || *T > 0.0, vl::ErrorKind::InvalidParameter, "T must be positive");
      const double T_run = T ? *T : std::max(30.0, rate_guess > 0.0 ? 16.0 / rate_guess : 30.0);
      const double dt_run = dt ? *dt : 0.1 / std::max(1.0, rate_guess);

      Eigen::VectorXcd w0;
      std::optional<std::complex<double>> lambda;
      if (init == "random") {
        w0 = vl::random_perturbation(op, c.seed);
      } else if (init == "eigenvector") {
        vl::SpectrumOptions so;
        so.k_wanted = 1;
        so.want_vectors = true;
        so.seed = static_cast<unsigned>(c.seed);
        const vl::SpectrumReport rep = vl::sector_spectrum(op, prof, so);
        w0 = rep.eigenvectors.front() / op.norm(rep.eigenvectors.front());
        lambda = rep.eigenvalues.front();
      } else {
        vl::require(!init_file.empty(), vl::ErrorKind::InvalidParameter, "--init file needs --init-file");
        w0 = vl::read_perturbation(init_file, op);
      }
      const vl::Trajectory tr = vl::evolve_linearized(op, w0, T_run, dt_run);
      const vl::GrowthFit fit = vl::fit_growth(tr, burn_in);
      write_text(out_csv, vl::trajectory_csv(tr));
      json j_out;
      j_out["schema"] = "vortexlab-evolve-v1";
      j_out["m"] = m;
      j_out["j"] = j;
      j_out["T"] = T_run;
      j_out["dt"] = dt_run;
      j_out["rate"] = fit.rate;
      j_out["r2"] = fit.r2;
      j_out["predicted"] = rate_guess > 0.0 ? json(rate_guess) : json(nullptr);
      if (lambda) j_out["eigenvalue"] = {{"re", lambda->real()}, {"im", lambda->imag()}};
      j_out["config"] = config;
      if (!out_json.empty()) write_text(out_json, vl::dump_json(j_out) + "\n");
      else if (out_csv != "-") std::cout << vl::dump_json(j_out) << "\n";
      else std::cerr << vl::dump_json(j_out, -1) << "\n";
    }
    return kOk;
  } catch (const vl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
