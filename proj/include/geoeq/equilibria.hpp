#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoeq/dispersion.hpp"
#include "geoeq/model_core.hpp"
#include "geoeq/numerics.hpp"
#include "geoeq/thresholds.hpp"
#include "geoeq/welfare.hpp"

namespace geoeq {

enum class EquilibriumKind { symmetric_dispersion, partial_agglomeration, boundary_agglomeration };
enum class Stability { stable, unstable, marginal };
enum class Criticality { supercritical, subcritical, indeterminate };

inline std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::symmetric_dispersion: return "symmetric_dispersion";
    case EquilibriumKind::partial_agglomeration: return "partial_agglomeration";
    case EquilibriumKind::boundary_agglomeration: return "boundary_agglomeration";
  }
  return "unknown";
}

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "unknown";
}

inline std::string_view to_string(Criticality c) {
  switch (c) {
    case Criticality::supercritical: return "supercritical";
    case Criticality::subcritical: return "subcritical";
    case Criticality::indeterminate: return "indeterminate";
  }
  return "unknown";
}

struct Equilibrium {
  double h_star;
  double w;
  EquilibriumKind kind;
  Stability stability;
  /// d(Delta V)/dh at h_star by finite differences (one-sided at h in {0,1}).
  double slope;
  /// |Delta V(h_star)|.
  double residual;
  /// Closed-form d(Delta u)/dh - d(Delta t)/dh, when the closed form applies.
  std::optional<double> closed_form_slope;
  /// Root lies beyond the logit clamp and is reported at 1 - clamp.
  bool saturated = false;
};

struct EquilibriumSet {
  /// Sorted by h_star, closed under h -> 1 - h.
  std::vector<Equilibrium> points;
  /// Penalty is unbounded at h in {0,1}; endpoints were excluded.
  bool divergent_endpoints = false;
  std::vector<std::string> diagnostics;
};

struct ScanOptions {
  int grid = 2048;
  /// Scanned interval is [edge, 1 - edge].
  double edge = 1e-9;
  /// Logit roots beyond the grid are chased out to 1 - clamp.
  double clamp = 1e-12;
  double residual_tolerance = 1e-10;
  double marginal_band = 1e-8;
  double symmetric_band = 1e-9;
};

/// Indirect-utility differential of the indifferent consumer,
/// Delta V(h) = Delta u(h) - (t(h) - t(1 - h)).
inline double delta_V(double h, const ModelParams& p, const PenaltySpec& spec) {
  detail::check_share(h);
  if (spec.diverges_at_endpoints() && (h == 0.0 || h == 1.0)) {
    return h == 0.0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
  }
  return delta_u(h, p) - delta_t(h, spec);
}

/// Finite-difference d(Delta V)/dh; the source of truth for stability.
inline double delta_V_slope(double h, const ModelParams& p, const PenaltySpec& spec) {
  detail::check_share(h);
  auto dv = [&](double x) { return delta_V(x, p, spec); };
  if (h == 0.0) return numerics::one_sided_first(dv, 0.0, 1e-4);
  if (h == 1.0) return numerics::one_sided_first(dv, 1.0, -1e-4);
  const double step = std::min(1e-3, 0.01 * std::min(h, 1.0 - h));
  return numerics::central_first(dv, h, step);
}

inline Stability classify_slope(double slope, double marginal_band = 1e-8) {
  if (std::abs(slope) < marginal_band) return Stability::marginal;
  return slope < 0.0 ? Stability::stable : Stability::unstable;
}

/// Stability of a reported equilibrium. Interior points use the sign of the
/// numerical slope; boundary points use the one-sided sign of Delta V.
inline Stability classify_stability(const Equilibrium& eq, const ModelParams& p,
                                    const PenaltySpec& spec, const ScanOptions& opts = {}) {
  if (eq.kind == EquilibriumKind::boundary_agglomeration) {
    // Staying put must be weakly preferred: Delta V >= 0 at h = 1, <= 0 at h = 0.
    const double v = delta_V(eq.h_star, p, spec);
    const double outward = eq.h_star >= 0.5 ? v : -v;
    if (std::abs(outward) <= opts.marginal_band) return Stability::marginal;
    return outward > 0.0 ? Stability::stable : Stability::unstable;
  }
  return classify_slope(delta_V_slope(eq.h_star, p, spec), opts.marginal_band);
}

namespace detail {

inline std::optional<double> closed_form_slope(double h, const ModelParams& p,
                                               const PenaltySpec& spec) {
  if (!(h > 0.0 && h < 1.0)) return std::nullopt;
  try {
    return ddelta_u_dh(h, p) - delta_t_prime(h, spec);
  } catch (const SingularityError&) {
    return std::nullopt;
  }
}

class UpperHalf {
 public:
  UpperHalf(const ModelParams& p, const PenaltySpec& spec, const ScanOptions& opts,
            double slope_half)
      : p_(p), spec_(spec), opts_(opts), slope_half_(slope_half) {
    const int cells = std::max(opts.grid / 2, 2);
    top_ = 1.0 - opts.edge;
    step_ = (top_ - 0.5) / cells;
    cells_ = cells;
    half_sign_ = std::abs(slope_half) < opts.marginal_band ? 0 : numerics::sign(slope_half);
  }

  double value(double h) const { return delta_V(h, p_, spec_); }

  /// Every sign change of Delta V on the uniform grid over (1/2, 1 - edge].
  std::vector<double> scan() const {
    std::vector<double> roots;
    double prev_h = 0.5;
    double prev_v = 0.0;
    int prev_s = half_sign_;
    for (int k = 1; k <= cells_; ++k) {
      const double h = k == cells_ ? top_ : 0.5 + k * step_;
      const double v = value(h);
      const int s = numerics::sign(v);
      if (s == 0) {
        roots.push_back(h);
      } else if (prev_s != 0 && s != prev_s) {
        roots.push_back(k == 1 ? root_near_half(h, v) : root_in(prev_h, h, prev_v, v));
      }
      prev_h = h;
      prev_v = v;
      prev_s = s;
    }
    return roots;
  }

  /// Re-locates each seed by an expanding local bracket. Empty optional when a
  /// seed cannot be re-bracketed or two seeds collapse onto one root.
  std::optional<std::vector<double>> refine(const std::vector<double>& seeds) const {
    std::vector<double> roots;
    for (double seed : seeds) {
      if (seed > top_) continue;
      auto r = refine_one(seed);
      if (!r) return std::nullopt;
      roots.push_back(*r);
    }
    std::sort(roots.begin(), roots.end());
    const auto last = std::unique(roots.begin(), roots.end(),
                                  [](double a, double b) { return std::abs(a - b) < 1e-12; });
    if (last != roots.end()) return std::nullopt;
    return roots;
  }

  /// Root between the grid top and h = 1, if any. `saturated` is set when a
  /// logit root lies beyond 1 - clamp.
  std::optional<double> tail(bool& saturated) const {
    saturated = false;
    const double v_top = value(top_);
    if (spec_.diverges_at_endpoints()) {
      if (v_top <= 0.0) return std::nullopt;
      const double far = 1.0 - opts_.clamp;
      const double v_far = value(far);
      if (v_far > 0.0) {
        saturated = true;
        return far;
      }
      return root_in(top_, far, v_top, v_far);
    }
    const double v_one = value(1.0);
    if (numerics::sign(v_top) * numerics::sign(v_one) < 0) {
      return root_in(top_, 1.0, v_top, v_one);
    }
    return std::nullopt;
  }

 private:
  double root_in(double lo, double hi, double v_lo, double v_hi) const {
    auto dv = [this](double h) { return value(h); };
    return numerics::bracketed_root(dv, lo, hi, v_lo, v_hi).x;
  }

  // Delta V vanishes at 1/2, so bracket Delta V / (h - 1/2) whose limit is the slope.
  double root_near_half(double hi, double v_hi) const {
    auto g = [this](double h) {
      if (h <= 0.5) return slope_half_;
      return value(h) / (h - 0.5);
    };
    return numerics::bracketed_root(g, 0.5, hi, slope_half_, v_hi / (hi - 0.5)).x;
  }

  std::optional<double> refine_one(double seed) const {
    double width = 4.0 * step_;
    for (int attempt = 0; attempt < 12; ++attempt, width *= 2.0) {
      const double lo = std::max(0.5, seed - width);
      const double hi = std::min(top_, seed + width);
      const double v_hi = value(hi);
      if (lo == 0.5) {
        if (half_sign_ == 0) return std::nullopt;
        if (numerics::sign(v_hi) != half_sign_) return root_near_half(hi, v_hi);
      } else {
        const double v_lo = value(lo);
        if (numerics::sign(v_lo) * numerics::sign(v_hi) <= 0) {
          return root_in(lo, hi, v_lo, v_hi);
        }
      }
      if (lo == 0.5 && hi == top_) break;
    }
    return std::nullopt;
  }

  const ModelParams& p_;
  const PenaltySpec& spec_;
  const ScanOptions& opts_;
  double slope_half_;
  double top_;
  double step_;
  int cells_;
  int half_sign_;
};

inline Equilibrium interior_equilibrium(double h, const ModelParams& p, const PenaltySpec& spec,
                                        const ScanOptions& opts) {
  Equilibrium eq{};
  eq.h_star = h;
  eq.w = solve_wage(h, p);
  eq.kind = EquilibriumKind::partial_agglomeration;
  eq.slope = delta_V_slope(h, p, spec);
  eq.stability = classify_slope(eq.slope, opts.marginal_band);
  eq.residual = std::abs(delta_V(h, p, spec));
  eq.closed_form_slope = closed_form_slope(h, p, spec);
  return eq;
}

inline Equilibrium mirrored(const Equilibrium& eq, const ModelParams& p) {
  Equilibrium m = eq;
  m.h_star = 1.0 - eq.h_star;
  m.w = solve_wage(m.h_star, p);
  return m;
}

inline EquilibriumSet assemble(const ModelParams& p, const PenaltySpec& spec,
                               const ScanOptions& opts, double slope_half,
                               std::vector<double> upper_roots, std::optional<double> tail,
                               bool saturated) {
  EquilibriumSet out;
  out.divergent_endpoints = spec.diverges_at_endpoints();

  Equilibrium sym{};
  sym.h_star = 0.5;
  sym.w = 1.0;
  sym.kind = EquilibriumKind::symmetric_dispersion;
  sym.slope = slope_half;
  sym.stability = classify_slope(slope_half, opts.marginal_band);
  sym.residual = std::abs(delta_V(0.5, p, spec));
  sym.closed_form_slope = closed_form_slope(0.5, p, spec);
  out.points.push_back(sym);

  if (tail) upper_roots.push_back(*tail);
  std::sort(upper_roots.begin(), upper_roots.end());
  for (double h : upper_roots) {
    if (std::abs(h - 0.5) <= opts.symmetric_band) continue;
    Equilibrium eq = interior_equilibrium(h, p, spec, opts);
    if (saturated && tail && h == *tail) {
      eq.saturated = true;
      out.diagnostics.push_back("logit root beyond h = 1 - " + std::to_string(opts.clamp) +
                                "; reported at the clamp");
    } else if (eq.residual > opts.residual_tolerance) {
      out.diagnostics.push_back("root at h=" + std::to_string(h) + " has residual " +
                                std::to_string(eq.residual));
    }
    out.points.push_back(eq);
    out.points.push_back(mirrored(eq, p));
  }

  if (!spec.diverges_at_endpoints()) {
    const double v_one = delta_V(1.0, p, spec);
    if (v_one >= -opts.marginal_band) {
      Equilibrium b{};
      b.h_star = 1.0;
      b.w = p.wage_ceiling();
      b.kind = EquilibriumKind::boundary_agglomeration;
      b.slope = delta_V_slope(1.0, p, spec);
      b.residual = std::abs(v_one);
      b.stability = v_one > opts.marginal_band ? Stability::stable : Stability::marginal;
      out.points.push_back(b);
      Equilibrium b0 = b;
      b0.h_star = 0.0;
      b0.w = p.wage_floor();
      out.points.push_back(b0);
    }
  }

  std::sort(out.points.begin(), out.points.end(),
            [](const Equilibrium& a, const Equilibrium& b) { return a.h_star < b.h_star; });
  return out;
}

}  // namespace detail

/// All long-run equilibria: symmetric dispersion, every sign change of Delta V
/// on the scan grid refined by bracketing, boundary agglomeration when the
/// penalty is bounded, and the mirror image of each.
inline EquilibriumSet find_equilibria(const ModelParams& p, const PenaltySpec& spec,
                                      const ScanOptions& opts = {}) {
  p.validate();
  const double slope_half = delta_V_slope(0.5, p, spec);
  const detail::UpperHalf upper(p, spec, opts, slope_half);
  bool saturated = false;
  auto tail = upper.tail(saturated);
  return detail::assemble(p, spec, opts, slope_half, upper.scan(), tail, saturated);
}

/// Same contract as find_equilibria, seeded from a neighbouring solution.
/// Falls back to a full scan when symmetric stability changed or a seed
/// cannot be re-bracketed.
inline EquilibriumSet find_equilibria_from(const EquilibriumSet& previous, const ModelParams& p,
                                           const PenaltySpec& spec, const ScanOptions& opts = {}) {
  p.validate();
  const double slope_half = delta_V_slope(0.5, p, spec);
  const Stability sym_now = classify_slope(slope_half, opts.marginal_band);
  std::optional<Stability> sym_before;
  std::vector<double> seeds;
  for (const auto& eq : previous.points) {
    if (eq.kind == EquilibriumKind::symmetric_dispersion) sym_before = eq.stability;
    if (eq.kind == EquilibriumKind::partial_agglomeration && eq.h_star > 0.5) {
      seeds.push_back(eq.h_star);
    }
  }
  if (!sym_before || *sym_before != sym_now) return find_equilibria(p, spec, opts);

  const detail::UpperHalf upper(p, spec, opts, slope_half);
  auto roots = upper.refine(seeds);
  if (!roots) return find_equilibria(p, spec, opts);
  bool saturated = false;
  auto tail = upper.tail(saturated);
  // A seed beyond the grid top that moved inside it is lost by both paths.
  if (roots->size() + (tail ? 1 : 0) != seeds.size()) return find_equilibria(p, spec, opts);
  return detail::assemble(p, spec, opts, slope_half, std::move(*roots), tail, saturated);
}

struct CriticalityReport {
  Criticality criticality;
  /// Richardson-extrapolated d^3(Delta V)/dh^3 at h = 1/2.
  double third_derivative;
  /// Closed form for the logit heterogeneity pitchfork (logit penalties only).
  std::optional<double> closed_form_mu;
  /// Closed form for the freeness pitchfork (penalties with known t''').
  std::optional<double> closed_form_phi;
};

/// Direction of the pitchfork at symmetric dispersion from the sign of the
/// third h-derivative of Delta V: negative is supercritical.
inline CriticalityReport pitchfork_criticality(const ModelParams& p, const PenaltySpec& spec,
                                               double step = 1e-2, double noise_floor = 1e-6) {
  p.validate();
  auto dv = [&](double h) { return delta_V(h, p, spec); };
  CriticalityReport r{};
  r.third_derivative = numerics::richardson_third(dv, 0.5, step);
  if (std::abs(r.third_derivative) < noise_floor) {
    r.criticality = Criticality::indeterminate;
  } else {
    r.criticality = r.third_derivative < 0.0 ? Criticality::supercritical : Criticality::subcritical;
  }
  if (std::holds_alternative<LogitPenalty>(spec.kind())) {
    r.closed_form_mu = closed_form_third_mu(p.sigma, p.phi);
  }
  if (auto t3 = penalty_third(0.5, spec)) {
    r.closed_form_phi = closed_form_third_phi(p.sigma, p.phi, *t3);
  }
  return r;
}

/// Logit heterogeneity at which dispersion changes stability, located
/// numerically from the symmetric slope. Absent when dispersion is stable
/// even without heterogeneity.
inline std::optional<double> locate_mu_pitchfork(const ModelParams& p) {
  p.validate();
  auto slope = [&](double mu) { return delta_V_slope(0.5, p, PenaltySpec::logit(mu)); };
  const double s0 = slope(0.0);
  if (!(s0 > 0.0)) return std::nullopt;
  double hi = 1.0;
  double s_hi = slope(hi);
  while (s_hi >= 0.0) {
    hi *= 2.0;
    if (hi > 1e6) return std::nullopt;
    s_hi = slope(hi);
  }
  return numerics::bracketed_root(slope, 0.0, hi, s0, s_hi).x;
}

/// Freeness values in (0,1) at which dispersion changes stability, located
/// by scanning the symmetric slope on `samples` points and bracketing.
inline std::vector<double> locate_phi_pitchforks(double sigma, double theta,
                                                 const PenaltySpec& spec, int samples = 199) {
  auto slope = [&](double phi) {
    return delta_V_slope(0.5, ModelParams::normalized(sigma, phi, theta), spec);
  };
  std::vector<double> out;
  double prev_phi = 1.0 / (samples + 1);
  double prev = slope(prev_phi);
  for (int i = 2; i <= samples; ++i) {
    const double phi = static_cast<double>(i) / (samples + 1);
    const double cur = slope(phi);
    if (prev == 0.0) {
      out.push_back(prev_phi);
    } else if (numerics::sign(prev) * numerics::sign(cur) < 0) {
      out.push_back(numerics::bracketed_root(slope, prev_phi, phi, prev, cur).x);
    }
    prev_phi = phi;
    prev = cur;
  }
  return out;
}

}  // namespace geoeq
