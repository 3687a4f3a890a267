#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>

namespace vortexlab {

/// Constants of the one-dimensional limiting problem for the power
/// nonlinearity f(u) = |u|^{p-1} u at frequency omega.
struct SolitonParams {
  double p = 3.0;
  double omega = 1.0;
  double c = 0.0;        ///< effective 1D frequency, c = omega + alpha0^-2
  double alpha0 = 0.0;   ///< ring radius per unit spin, rbar = alpha0 * m
  double A = 0.0;        ///< peak amplitude, A^{p-1} = (p+1) c / 2
  double lambda0 = 0.0;  ///< L_c eigenvalue factor (p-1)(p+3)/4
  std::optional<double> gamma;  ///< transversal growth coefficient, only for 1 < p < 5
  double beta_exp = 0.0;        ///< unstable index exponent min(p-1,1)/6
};

/// The soliton Q_c for a given exponent and 1D frequency. Unlike
/// SolitonParams, c here is free (the balance relation is not imposed).
struct Soliton {
  double p;
  double c;

  static Soliton from(const SolitonParams& params) { return {params.p, params.c}; }

  double amplitude() const { return std::pow((p + 1.0) * c / 2.0, 1.0 / (p - 1.0)); }
  double exponent() const { return 2.0 / (p - 1.0); }                 // k in sech^k
  double inverse_width() const { return (p - 1.0) * std::sqrt(c) / 2.0; }  // b in sech(b x)
};

SolitonParams balance_constants(double p, double omega);

namespace detail {

// log(sech y) without overflow for large |y|.
template <typename T>
T log_sech(T y) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::log1p;
  const T a = abs(y);
  return T(std::log(2.0)) - a - log1p(exp(-2 * a));
}

}  // namespace detail

template <typename T>
T eval_q(const Soliton& s, T x) {
  using std::exp;
  const double k = s.exponent();
  const double b = s.inverse_width();
  return s.amplitude() * exp(k * detail::log_sech(T(b * x)));
}

template <typename T>
T eval_dq(const Soliton& s, T x) {
  using std::tanh;
  const double k = s.exponent();
  const double b = s.inverse_width();
  return -k * b * tanh(T(b * x)) * eval_q(s, x);
}

/// Second derivative from the closed form (not from the ODE), so that the ODE
/// residual can be used as an independent check.
template <typename T>
T eval_d2q(const Soliton& s, T x) {
  using std::exp;
  using std::tanh;
  const double k = s.exponent();
  const double b = s.inverse_width();
  const T th = tanh(T(b * x));
  const T sech2 = exp(2.0 * detail::log_sech(T(b * x)));
  return k * b * b * (k * th * th - sech2) * eval_q(s, x);
}

/// c-derivative of Q_c at fixed x: Q/((p-1)c) + x Q'/(2c).
template <typename T>
T eval_dcq(const Soliton& s, T x) {
  return eval_q(s, x) / ((s.p - 1.0) * s.c) + x * eval_dq(s, x) / (2.0 * s.c);
}

/// Q_c^{p-1} = ((p+1)c/2) sech^2(b x), evaluated without fractional powers.
template <typename T>
T eval_q_pow_pm1(const Soliton& s, T x) {
  using std::exp;
  return (s.p + 1.0) * s.c / 2.0 * exp(2.0 * detail::log_sech(T(s.inverse_width() * x)));
}

// Array versions, so callers can sample on a grid in one expression.
template <typename Derived>
Eigen::ArrayXd q_values(const Soliton& s, const Eigen::ArrayBase<Derived>& x) {
  return x.derived().unaryExpr([&s](double v) { return eval_q(s, v); });
}

template <typename Derived>
Eigen::ArrayXd dq_values(const Soliton& s, const Eigen::ArrayBase<Derived>& x) {
  return x.derived().unaryExpr([&s](double v) { return eval_dq(s, v); });
}

template <typename Derived>
Eigen::ArrayXd dcq_values(const Soliton& s, const Eigen::ArrayBase<Derived>& x) {
  return x.derived().unaryExpr([&s](double v) { return eval_dcq(s, v); });
}

template <typename Derived>
Eigen::ArrayXd q_pow_pm1_values(const Soliton& s, const Eigen::ArrayBase<Derived>& x) {
  return x.derived().unaryExpr([&s](double v) { return eval_q_pow_pm1(s, v); });
}

struct QNorms {
  double L2_sq;      ///< int Q^2
  double dL2_sq;     ///< int (Q')^2
  double dNdc;       ///< d/dc int Q^2
  double dcq_L2_sq;  ///< int (dQ/dc)^2
  double xq_L2_sq;   ///< int (x Q)^2
};

/// Euler Beta function through log-Gamma (stable when an argument is large).
double beta_function(double a, double b);

/// Closed-form norms of Q_c at arbitrary c.
double q_l2_sq(const Soliton& s);
double dq_l2_sq(const Soliton& s);
double q_dndc(const Soliton& s);

QNorms q_norms(const SolitonParams& params);
QNorms q_norms(const Soliton& s);

/// Half-width X of the quadrature window [-X, X] used for the numerical norms.
double quadrature_half_width(const Soliton& s);

/// int (Q_c')^2 - alpha^-2 int Q_c^2 with c = omega + alpha^-2.
double balance_residual(double p, double omega, double alpha);

/// Root of balance_residual in alpha, found by bracketing (independent of the
/// closed form for alpha0).
double solve_balance_radius(double p, double omega);

/// gamma = (2 ||Q_c||^2 / (d/dc ||Q_c||^2))^{1/2} from the norms.
double gamma_growth(const SolitonParams& params);

/// gamma = 2 sqrt((p-1) c / (5-p)), from the power law ||Q_c||^2 ~ c^{(5-p)/(2(p-1))}.
double gamma_closed_form(double p, double c);

}  // namespace vortexlab
