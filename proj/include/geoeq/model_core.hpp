#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "geoeq/errors.hpp"
#include "geoeq/numerics.hpp"

namespace geoeq {

/// Primitives of the two-region economy.
///
/// Freeness of trade `phi` is the canonical trade-cost parameter; the iceberg
/// cost is derived from it on demand. `alpha`, `beta` and `eta` default to the
/// normalisation alpha*sigma = 1, (sigma-1)/(sigma*beta) = 1, eta = 1 under
/// which firm counts equal population shares and mill prices equal wages.
struct ModelParams {
  double sigma = 2.0;
  double phi = 0.5;
  double theta = 0.0;
  double alpha = 0.5;
  double beta = 0.5;
  double eta = 1.0;

  static ModelParams normalized(double sigma, double phi, double theta = 0.0) {
    ModelParams p;
    p.sigma = sigma;
    p.phi = phi;
    p.theta = theta;
    p.alpha = 1.0 / sigma;
    p.beta = (sigma - 1.0) / sigma;
    p.eta = 1.0;
    return p;
  }

  static ModelParams from_tau(double sigma, double tau, double theta = 0.0);

  double tau() const { return std::pow(phi, 1.0 / (1.0 - sigma)); }

  bool is_normalized(double tol = 1e-12) const {
    return std::abs(alpha * sigma - 1.0) <= tol &&
           std::abs((sigma - 1.0) / (sigma * beta) - 1.0) <= tol;
  }

  /// Lowest and highest short-run wage, reached at h = 0 and h = 1.
  double wage_floor() const { return std::pow(phi, 1.0 / sigma); }
  double wage_ceiling() const { return std::pow(phi, -1.0 / sigma); }

  void validate() const {
    if (!(sigma > 1.0) || !std::isfinite(sigma)) {
      throw DomainError("sigma must be > 1, got " + std::to_string(sigma));
    }
    if (!(phi > 0.0 && phi < 1.0)) {
      throw DomainError("phi must lie in (0,1), got " + std::to_string(phi));
    }
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
      throw DomainError("theta must be >= 0, got " + std::to_string(theta));
    }
    if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
    if (!(beta > 0.0)) throw DomainError("beta must be > 0");
    if (!(eta > 0.0)) throw DomainError("eta must be > 0");
    if (is_normalized() && std::abs(eta - 1.0) > 1e-12) {
      throw DomainError("eta must be 1 under the default normalisation");
    }
  }
};

/// phi = tau^(1 - sigma).
inline double freeness_from_tau(double tau, double sigma) {
  if (!(tau > 1.0)) throw DomainError("iceberg cost tau must be > 1");
  if (!(sigma > 1.0)) throw DomainError("sigma must be > 1");
  return std::pow(tau, 1.0 - sigma);
}

inline ModelParams ModelParams::from_tau(double sigma, double tau, double theta) {
  return normalized(sigma, freeness_from_tau(tau, sigma), theta);
}

struct ShortRunState {
  double h;
  double w;
  double price_l;
  double price_r;
  double consumption_l;
  double consumption_r;
  double firms_l;
  double firms_r;
};

struct PriceIndices {
  double left;
  double right;
};

struct Consumption {
  double left;
  double right;
};

struct FirmCounts {
  double left;
  double right;
};

namespace detail {

// Relative slack on the wage bracket for values produced by pow round trips.
inline constexpr double kBracketSlack = 1e-12;

inline void check_share(double h) {
  if (!(h >= 0.0 && h <= 1.0)) {
    throw DomainError("population share must lie in [0,1], got " + std::to_string(h));
  }
}

inline void check_wage(double w, const ModelParams& p) {
  const double lo = p.wage_floor() * (1.0 - kBracketSlack);
  const double hi = p.wage_ceiling() * (1.0 + kBracketSlack);
  if (!(w >= lo && w <= hi)) {
    throw DomainError("wage " + std::to_string(w) + " outside the short-run bracket [" +
                      std::to_string(p.wage_floor()) + ", " +
                      std::to_string(p.wage_ceiling()) + "]");
  }
}

// D(w) = w^{2 sigma} - (w + 1) phi w^sigma + w, positive on the wage bracket.
inline double wage_denominator(double w, double x, double phi) {
  return x * x - (w + 1.0) * phi * x + w;
}

}  // namespace detail

/// G(x) = -[phi(sigma-1) + (sigma-1) phi x^2 - (2 sigma - phi^2 - 1) x], x = w^sigma.
inline double g_poly(double x, const ModelParams& p) {
  if (!(x > 0.0)) throw DomainError("g_poly needs x = w^sigma > 0");
  const double s = p.sigma;
  const double f = p.phi;
  return -(f * (s - 1.0) + (s - 1.0) * f * x * x - (2.0 * s - f * f - 1.0) * x);
}

/// Population share of L consistent with relative wage `w`.
///
/// Evaluated as h = X(X - phi) / D(w) with X = w^sigma, which has no
/// subtraction in the denominator and stays accurate near either end of the
/// bracket.
inline double wage_share(double w, const ModelParams& p) {
  detail::check_wage(w, p);
  const double x = std::pow(w, p.sigma);
  const double h = x * (x - p.phi) / detail::wage_denominator(w, x, p.phi);
  return std::clamp(h, 0.0, 1.0);
}

/// Relative wage solving the short-run wage equation at share `h`.
inline double solve_wage(double h, const ModelParams& p) {
  detail::check_share(h);
  if (h == 0.0) return p.wage_floor();
  if (h == 1.0) return p.wage_ceiling();
  if (h == 0.5) return 1.0;

  const double s = p.sigma;
  const double f = p.phi;
  // D(w) * (wage_share(w) - h); same sign as the residual, no division.
  auto residual = [&](double w) {
    const double x = std::pow(w, s);
    return x * (x - f) - h * detail::wage_denominator(w, x, f);
  };
  // w(h) < 1 iff h < 1/2, so the half bracket is always enough.
  const double lo = h < 0.5 ? p.wage_floor() : 1.0;
  const double hi = h < 0.5 ? 1.0 : p.wage_ceiling();
  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if (r_lo >= 0.0) return lo;
  if (r_hi <= 0.0) return hi;

  const auto root = numerics::bracketed_root(residual, lo, hi, r_lo, r_hi, 200);
  const double miss = std::abs(wage_share(root.x, p) - h);
  if (miss > 1e-12) {
    throw SolverError("wage solve at h=" + std::to_string(h) +
                      " left residual " + std::to_string(miss));
  }
  return root.x;
}

/// Regional manufacturing price indices at share `h` and wage `w`.
inline PriceIndices price_indices(double h, double w, const ModelParams& p) {
  detail::check_share(h);
  if (!(w > 0.0)) throw DomainError("wage must be positive");
  const double s = p.sigma;
  const double expo = 1.0 / (1.0 - s);
  const double w_term = std::pow(w, 1.0 - s);
  if (p.is_normalized()) {
    return {std::pow(h * w_term + (1.0 - h) * p.phi, expo),
            std::pow(h * p.phi * w_term + (1.0 - h), expo)};
  }
  // phi stands in for tau^(1-sigma) in the imported-variety terms.
  const double firms = 1.0 / (s * p.alpha);
  const double markup = std::pow(p.beta * s / (s - 1.0), 1.0 - s);
  const double left = firms * markup * (h * w_term + (1.0 - h) * p.phi);
  const double right = firms * markup * ((1.0 - h) + h * p.phi * w_term);
  return {std::pow(left, expo), std::pow(right, expo)};
}

inline Consumption consumption(double h, const ModelParams& p) {
  const double w = solve_wage(h, p);
  const auto [pl, pr] = price_indices(h, w, p);
  return {w / pl, 1.0 / pr};
}

inline FirmCounts firm_counts(double h, const ModelParams& p) {
  detail::check_share(h);
  const double scale = 1.0 / (p.sigma * p.alpha);
  return {h * scale, (1.0 - h) * scale};
}

/// CES demand for one variety: c = p^-sigma / P^(1-sigma) * income.
inline double demand(double income, double price, double price_index, double sigma) {
  if (!(income > 0.0) || !(price > 0.0) || !(price_index > 0.0)) {
    throw DomainError("demand needs positive income, price and price index");
  }
  if (!(sigma > 1.0)) throw DomainError("sigma must be > 1");
  return std::pow(price, -sigma) / std::pow(price_index, 1.0 - sigma) * income;
}

inline ShortRunState short_run_state(double h, const ModelParams& p) {
  const double w = solve_wage(h, p);
  const auto prices = price_indices(h, w, p);
  const auto firms = firm_counts(h, p);
  return {h, w, prices.left, prices.right, w / prices.left, 1.0 / prices.right,
          firms.left, firms.right};
}

/// Slope of the implicit wage function, dw/dh = D(w)^2 / (w^sigma G(w^sigma)).
inline double dw_dh(double w, const ModelParams& p) {
  detail::check_wage(w, p);
  const double x = std::pow(w, p.sigma);
  const double g = g_poly(x, p);
  if (g == 0.0) throw SingularityError("G(w^sigma) vanishes in dw/dh");
  const double d = detail::wage_denominator(w, x, p.phi);
  return d * d / (x * g);
}

/// Sensitivity of the wage to freeness at fixed h, -w (w^{2 sigma} - 1) / G(w^sigma).
inline double dw_dphi(double w, const ModelParams& p) {
  detail::check_wage(w, p);
  const double x = std::pow(w, p.sigma);
  const double g = g_poly(x, p);
  if (g == 0.0) throw SingularityError("G(w^sigma) vanishes in dw/dphi");
  return -w * (x * x - 1.0) / g;
}

}  // namespace geoeq
