#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "geoeq/errors.hpp"
#include "geoeq/model_core.hpp"

namespace geoeq {

namespace detail {

inline void check_sigma_phi(double sigma, double phi) {
  if (!(sigma > 1.0)) throw DomainError("sigma must be > 1");
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("phi must lie in (0,1)");
}

}  // namespace detail

/// Logit heterogeneity above which symmetric dispersion is the only stable
/// equilibrium under logarithmic utility.
inline double mu_d(double sigma, double phi) {
  detail::check_sigma_phi(sigma, phi);
  return (2.0 * sigma - 1.0) * (1.0 - phi) / ((sigma - 1.0) * (2.0 * sigma + phi - 1.0));
}

/// Logit dispersion threshold for any theta: mu_d scaled by C(1/2)^(1 - theta),
/// C(1/2) = ((1 + phi)/2)^(1/(sigma-1)). Coincides with mu_d at theta = 1.
inline double mu_threshold(double sigma, double phi, double theta) {
  const double base = mu_d(sigma, phi);
  if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
  return base * std::pow((1.0 + phi) / 2.0, (1.0 - theta) / (sigma - 1.0));
}

/// Stability threshold of a logit partial agglomeration with wage w
/// (logarithmic utility): the equilibrium is stable iff mu > mu_p(w).
inline double mu_p(double w, double sigma, double phi) {
  detail::check_sigma_phi(sigma, phi);
  const auto p = ModelParams::normalized(sigma, phi);
  detail::check_wage(w, p);
  const double x = std::pow(w, sigma);
  const double num = (2.0 * sigma - 1.0) * (x - phi) * (1.0 - x * phi);
  const double den = (sigma - 1.0) * ((2.0 * sigma - phi * phi - 1.0) * x -
                                      (sigma - 1.0) * phi * x * x - (sigma - 1.0) * phi);
  if (den == 0.0) throw SingularityError("mu_p denominator vanishes");
  return num / den;
}

/// d mu_p / dX with X = w^sigma.
inline double dmu_p_dx(double x, double sigma, double phi) {
  detail::check_sigma_phi(sigma, phi);
  if (!(x > 0.0)) throw DomainError("X = w^sigma must be positive");
  const double q = (sigma - 1.0) * (x * x + 1.0) * phi - 2.0 * sigma * x + x * phi * phi + x;
  if (q == 0.0) throw SingularityError("d mu_p / dX denominator vanishes");
  return sigma * (2.0 * sigma - 1.0) * (x * x - 1.0) * phi * (phi * phi - 1.0) /
         ((sigma - 1.0) * q * q);
}

/// Freeness at which symmetric dispersion changes stability under logit
/// heterogeneity and logarithmic utility; the inverse of mu_d in phi.
/// Absent when no such phi lies in (0,1).
inline std::optional<double> phi_b(double sigma, double mu) {
  if (!(sigma > 1.0)) throw DomainError("sigma must be > 1");
  if (!(mu > 0.0) || mu * (sigma - 1.0) >= 1.0) return std::nullopt;
  const double v = (2.0 * sigma - 1.0) * (mu * (sigma - 1.0) - 1.0) /
                   (-(mu + 2.0) * sigma + mu + 1.0);
  if (!(v > 0.0 && v < 1.0)) return std::nullopt;
  return v;
}

/// Closed-form third h-derivative of the logit Delta V at h = 1/2, mu = mu_d.
inline double closed_form_third_mu(double sigma, double phi) {
  detail::check_sigma_phi(sigma, phi);
  const double s = sigma;
  const double f = phi;
  return -64.0 * (1.0 - f) * f * (s * (f * (f + 2.0) + 5.0) - f * f - 3.0) /
         ((s - 1.0) * std::pow(f + 1.0, 3) * (2.0 * s + f - 1.0));
}

/// Closed-form third h-derivative of Delta V at h = 1/2 for a freeness
/// pitchfork, given t'''(1/2).
inline double closed_form_third_phi(double sigma, double phi, double t3_half) {
  detail::check_sigma_phi(sigma, phi);
  const double s = sigma;
  const double f = phi;
  return 16.0 * (s - 2.0) * (2.0 * s - 3.0) * std::pow(1.0 - f, 3) *
             std::pow((1.0 + f) / 2.0, 1.0 / (s - 1.0)) /
             (std::pow(s - 1.0, 3) * std::pow(f + 1.0, 3)) -
         2.0 * t3_half;
}

/// Which closed-form logit threshold a numerically detected mu-pitchfork matches.
struct ThresholdMatch {
  double detected;
  double mu_d;
  double mu_d_half;
  double general_theta;
  bool matches_mu_d;
  bool matches_mu_d_half;
  bool matches_general_theta;

  /// "mu_d", "mu_d_half", or "none" when the match is not exactly one of the two.
  std::string convention() const {
    if (matches_mu_d && !matches_mu_d_half) return "mu_d";
    if (matches_mu_d_half && !matches_mu_d) return "mu_d_half";
    return "none";
  }
};

inline ThresholdMatch match_mu_threshold(double detected, double sigma, double phi,
                                         double theta, double tol = 1e-6) {
  ThresholdMatch m{};
  m.detected = detected;
  m.mu_d = mu_d(sigma, phi);
  m.mu_d_half = 0.5 * m.mu_d;
  m.general_theta = mu_threshold(sigma, phi, theta);
  m.matches_mu_d = std::abs(detected - m.mu_d) <= tol;
  m.matches_mu_d_half = std::abs(detected - m.mu_d_half) <= tol;
  m.matches_general_theta = std::abs(detected - m.general_theta) <= tol;
  return m;
}

}  // namespace geoeq
