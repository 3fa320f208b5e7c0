#pragma once

#include <cmath>

#include "geoeq/model_core.hpp"

namespace geoeq {

/// Coefficients of the closed-form utility-differential derivatives at a
/// short-run wage w.
///
/// zeta, varphi, psi build d(Delta u)/dh; a1, a2, a3 and psi_sign build
/// d(Delta u)/dphi, whose sign is the sign of psi_sign.
struct StabilityCoefficients {
  double zeta;
  double varphi;
  double psi;
  double a1;
  double a2;
  double a3;
  double psi_sign;
};

namespace detail {

inline constexpr double kLogBranchBand = 1e-8;

inline bool log_branch(const ModelParams& p) {
  return std::abs(p.theta - 1.0) < kLogBranchBand;
}

// Prefactor on Delta u; the logarithmic branch carries none.
inline double utility_scale(const ModelParams& p) { return log_branch(p) ? 1.0 : p.eta; }

struct LogConsumption {
  double left;
  double right;
};

// Normalised log consumption, ln C_L and ln C_R, at (h, w).
inline LogConsumption log_consumption(double h, double w, const ModelParams& p) {
  const double s = p.sigma;
  const double w_term = std::pow(w, 1.0 - s);
  const double in_l = h * w_term + (1.0 - h) * p.phi;
  const double in_r = h * p.phi * w_term + (1.0 - h);
  return {std::log(w) + std::log(in_l) / (s - 1.0), std::log(in_r) / (s - 1.0)};
}

// The bracket (1 - phi^2) w / D(w) shared by both closed forms.
inline double access_ratio(double w, double x, double phi) {
  return (1.0 - phi * phi) * w / wage_denominator(w, x, phi);
}

}  // namespace detail

inline StabilityCoefficients stability_coefficients(double w, const ModelParams& p) {
  detail::check_wage(w, p);
  const double s = p.sigma;
  const double f = p.phi;
  const double th = p.theta;
  const double x = std::pow(w, s);
  const double g = g_poly(x, p);
  if (g == 0.0) throw SingularityError("zeta denominator vanishes");
  const double d = detail::wage_denominator(w, x, f);
  const double quad = -g;  // (s-1) f + (s-1) f x^2 + (1 + f^2 - 2s) x

  StabilityCoefficients c{};
  c.zeta = d / ((s - 1.0) * quad);
  c.varphi = std::pow(w, -th - s) * (f * (s + (s - 1.0) * w) * x - 2.0 * s * w + w);
  c.psi = (s - 1.0) * f + (1.0 - 2.0 * s) * x + s * f * w;
  c.a1 = std::pow(w, 1.0 - th) * (f * x - 1.0) *
         (-2.0 * s + 2.0 * (s - 1.0) * f * x + f * f + 1.0);
  c.a2 = std::pow(w, -s) * (x - f) * (2.0 * (s - 1.0) * f + (-2.0 * s + f * f + 1.0) * x);
  c.a3 = (s - 1.0) * (std::pow(w, 1.0 - s) + x - (w + 1.0) * f) * quad;
  if (c.a3 == 0.0) throw SingularityError("a3 vanishes");
  const double k = (th + s - 2.0) / (s - 1.0);
  c.psi_sign = -(c.a1 * std::pow(w, -s * k) + c.a2) / c.a3;
  return c;
}

/// Utility differential u_L - u_R at share h.
///
/// Both branches go through log consumption; the isoelastic branch uses
/// expm1 so it stays continuous as theta approaches 1.
inline double delta_u_at(double h, double w, const ModelParams& p) {
  const auto lc = detail::log_consumption(h, w, p);
  if (detail::log_branch(p)) return lc.left - lc.right;
  const double a = 1.0 - p.theta;
  return p.eta * (std::expm1(a * lc.left) - std::expm1(a * lc.right)) / a;
}

inline double delta_u(double h, const ModelParams& p) {
  return delta_u_at(h, solve_wage(h, p), p);
}

/// Closed-form d(Delta u)/dh at a short-run equilibrium.
inline double ddelta_u_dh(double h, const ModelParams& p) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("ddelta_u_dh needs h in (0,1)");
  const double w = solve_wage(h, p);
  ModelParams q = p;
  if (detail::log_branch(p)) q.theta = 1.0;
  const auto c = stability_coefficients(w, q);
  const double s = q.sigma;
  const double x = std::pow(w, s);
  const double k = (1.0 - q.theta) / (s - 1.0);
  const double access = std::pow(detail::access_ratio(w, x, q.phi), k);
  return detail::utility_scale(p) * c.zeta *
         ((c.varphi * std::pow(w, s * k) + c.psi / w) * access);
}

/// Consumption-side slope at symmetric dispersion in the form compared
/// against t'(1/2); exactly half of ddelta_u_dh(1/2).
inline double dispersion_slope(const ModelParams& p) {
  const double s = p.sigma;
  const double f = p.phi;
  const double k = detail::log_branch(p) ? 0.0 : (1.0 - p.theta) / (s - 1.0);
  return detail::utility_scale(p) * 2.0 * (2.0 * s - 1.0) * (1.0 - f) *
         std::pow((1.0 + f) / 2.0, k) / ((s - 1.0) * (2.0 * s + f - 1.0));
}

/// Total derivative of Delta u in phi at fixed h, with the wage re-solved.
inline double ddelta_u_dphi(double h, const ModelParams& p) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("ddelta_u_dphi needs h in (0,1)");
  const double w = solve_wage(h, p);
  const double s = p.sigma;
  const double f = p.phi;
  if (detail::log_branch(p)) {
    // d/dphi of ln C_L - ln C_R, split into the direct and wage channels.
    const double w_term = std::pow(w, 1.0 - s);
    const double in_l = h * w_term + (1.0 - h) * f;
    const double in_r = h * f * w_term + (1.0 - h);
    const double direct = ((1.0 - h) / in_l - h * w_term / in_r) / (s - 1.0);
    const double via_wage = 1.0 / w - h * std::pow(w, -s) * (1.0 / in_l - f / in_r);
    return direct + via_wage * dw_dphi(w, p);
  }
  const auto c = stability_coefficients(w, p);
  const double x = std::pow(w, s);
  const double k = (p.theta + s - 2.0) / (s - 1.0);
  const double d = detail::wage_denominator(w, x, f);
  const double home = (1.0 - f * f) * std::pow(w, s + 1.0) / d;
  const double access = detail::access_ratio(w, x, f);
  return p.eta * -(w / c.a3) * (c.a1 * std::pow(home, -k) + c.a2 * std::pow(access, -k));
}

}  // namespace geoeq
