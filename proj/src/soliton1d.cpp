#include "vortexlab/soliton1d.hpp"

#include "vortexlab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cstdint>
#include <string>

namespace vortexlab {

namespace {

void validate(double p, double omega) {
  require(std::isfinite(p) && p > 1.0, ErrorKind::InvalidParameter,
          "nonlinearity exponent must satisfy p > 1 (got " + std::to_string(p) + ")");
  require(std::isfinite(omega) && omega > 0.0, ErrorKind::InvalidParameter,
          "frequency must satisfy omega > 0 (got " + std::to_string(omega) + ")");
}

constexpr double kQuadratureTol = 1e-13;

// int_{-X}^{X} g, for even integrands g, as 2 * int_0^X g.
template <typename F>
double even_integral(F&& g, double half_width) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      gauss_kronrod<double, 61>::integrate(g, 0.0, half_width, 20, kQuadratureTol, &error, &l1);
  if (!(error <= 1e-11 * std::max(l1, 1e-300))) {
    fail(ErrorKind::QuadratureFailure,
         "adaptive quadrature reached error " + std::to_string(error) + " on |integral| " +
             std::to_string(l1));
  }
  return 2.0 * value;
}

}  // namespace

SolitonParams balance_constants(double p, double omega) {
  validate(p, omega);
  SolitonParams out;
  out.p = p;
  out.omega = omega;
  out.c = (p + 3.0) * omega / 4.0;
  out.alpha0 = 2.0 / std::sqrt((p - 1.0) * omega);
  out.A = std::pow((p + 1.0) * out.c / 2.0, 1.0 / (p - 1.0));
  out.lambda0 = (p - 1.0) * (p + 3.0) / 4.0;
  if (p < 5.0) out.gamma = gamma_closed_form(p, out.c);
  out.beta_exp = std::min(p - 1.0, 1.0) / 6.0;
  return out;
}

double beta_function(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double q_l2_sq(const Soliton& s) {
  const double A = s.amplitude();
  return 2.0 * A * A / ((s.p - 1.0) * std::sqrt(s.c)) * beta_function(s.exponent(), 0.5);
}

double dq_l2_sq(const Soliton& s) {
  const double A = s.amplitude();
  return 2.0 / (s.p - 1.0) * std::sqrt(s.c) * A * A * beta_function(s.exponent(), 1.5);
}

double q_dndc(const Soliton& s) {
  return (5.0 - s.p) / (2.0 * (s.p - 1.0)) * q_l2_sq(s) / s.c;
}

double quadrature_half_width(const Soliton& s) {
  return 2.0 / ((s.p - 1.0) * std::sqrt(s.c)) * 60.0;
}

QNorms q_norms(const Soliton& s) {
  require(s.p > 1.0 && s.c > 0.0, ErrorKind::InvalidParameter, "q_norms needs p > 1 and c > 0");
  const double X = quadrature_half_width(s);
  QNorms n{};
  n.L2_sq = q_l2_sq(s);
  n.dL2_sq = dq_l2_sq(s);
  n.dNdc = q_dndc(s);
  n.dcq_L2_sq = even_integral(
      [&s](double x) {
        const double v = eval_dcq(s, x);
        return v * v;
      },
      X);
  n.xq_L2_sq = even_integral(
      [&s](double x) {
        const double v = x * eval_q(s, x);
        return v * v;
      },
      X);
  return n;
}

QNorms q_norms(const SolitonParams& params) { return q_norms(Soliton::from(params)); }

double balance_residual(double p, double omega, double alpha) {
  validate(p, omega);
  require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::InvalidParameter,
          "ring radius alpha must be positive");
  const Soliton s{p, omega + 1.0 / (alpha * alpha)};
  return dq_l2_sq(s) - q_l2_sq(s) / (alpha * alpha);
}

double solve_balance_radius(double p, double omega) {
  validate(p, omega);
  auto f = [p, omega](double alpha) { return balance_residual(p, omega, alpha); };
  // residual < 0 for small alpha (centrifugal term wins) and > 0 for large alpha
  double lo = 1.0;
  double hi = 1.0;
  while (f(lo) >= 0.0) {
    lo /= 2.0;
    require(lo > 1e-12, ErrorKind::InvalidParameter, "no sign change in balance residual");
  }
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    require(hi < 1e12, ErrorKind::InvalidParameter, "no sign change in balance residual");
  }
  std::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iterations);
  return 0.5 * (bracket.first + bracket.second);
}

double gamma_closed_form(double p, double c) {
  require(p > 1.0 && p < 5.0, ErrorKind::OutOfValidityRange,
          "growth coefficient gamma requires 1 < p < 5");
  return 2.0 * std::sqrt((p - 1.0) * c / (5.0 - p));
}

double gamma_growth(const SolitonParams& params) {
  require(params.p > 1.0 && params.p < 5.0, ErrorKind::OutOfValidityRange,
          "growth coefficient gamma requires 1 < p < 5 (d||Q_c||^2/dc > 0)");
  const Soliton s = Soliton::from(params);
  return std::sqrt(2.0 * q_l2_sq(s) / q_dndc(s));
}

}  // namespace vortexlab
