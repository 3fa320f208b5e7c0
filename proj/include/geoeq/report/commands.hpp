#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "geoeq/dispersion.hpp"
#include "geoeq/equilibria.hpp"
#include "geoeq/model_core.hpp"
#include "geoeq/report/config.hpp"
#include "geoeq/report/svg.hpp"
#include "geoeq/report/table.hpp"
#include "geoeq/sweep.hpp"
#include "geoeq/thresholds.hpp"
#include "geoeq/welfare.hpp"

namespace geoeq::report {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kDefaultGrid = 512;
inline constexpr int kDefaultSteps = 181;

/// Everything one command produces. Pure data; nothing is written here.
struct Artifacts {
  std::string stem;
  std::vector<Table> tables;
  nlohmann::ordered_json json;
  std::optional<Plot> plot;
};

namespace detail {

using json = nlohmann::ordered_json;

inline std::string label(double v) { return fmt::format("{:g}", v); }

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

inline json number_or_null(const std::optional<double>& v) {
  return v ? number_or_null(*v) : json();
}

inline json metadata(int grid) {
  return {{"generator", "geoeq"},
          {"version", kVersion},
          {"grid", grid},
          {"scan_grid", ScanOptions{}.grid},
          {"csv_significant_digits", 12}};
}

inline json document(std::string_view command, const std::string& figure, json config,
                     json results, json shadow, json meta) {
  json j;
  j["command"] = std::string(command);
  if (!figure.empty()) j["figure"] = figure;
  j["config"] = std::move(config);
  j["results"] = std::move(results);
  j["shadow_checks"] = std::move(shadow);
  j["metadata"] = std::move(meta);
  return j;
}

inline std::vector<double> phis_or(const RunConfig& c, std::vector<double> fallback) {
  if (c.tau) return {freeness_from_tau(*c.tau, c.sigma.value_or(2.0))};
  if (c.phi) return {*c.phi};
  return fallback;
}

inline json equilibrium_json(const Equilibrium& e) {
  return {{"h_star", e.h_star},
          {"w", e.w},
          {"kind", std::string(to_string(e.kind))},
          {"stability", std::string(to_string(e.stability))},
          {"slope", number_or_null(e.slope)},
          {"residual", number_or_null(e.residual)},
          {"closed_form_slope", number_or_null(e.closed_form_slope)},
          {"saturated", e.saturated}};
}

inline json equilibrium_set_json(const EquilibriumSet& s) {
  json pts = json::array();
  for (const auto& e : s.points) pts.push_back(equilibrium_json(e));
  return {{"points", std::move(pts)},
          {"divergent_endpoints", s.divergent_endpoints},
          {"diagnostics", s.diagnostics}};
}

// Wage curves w(h) on h = i/grid for each phi.
inline Artifacts wage_curves(const std::string& stem, double sigma,
                             const std::vector<double>& phis, int grid) {
  Artifacts a;
  a.stem = stem;
  Table t{stem, {"h"}, {}};
  std::vector<ModelParams> ps;
  for (double f : phis) {
    ps.push_back(ModelParams::normalized(sigma, f));
    ps.back().validate();
    t.columns.push_back("w@phi=" + label(f));
  }
  Plot plot{"Short-run relative wage", "h", "w", {}, {}, {}, {}};
  for (double f : phis) plot.series.push_back({"phi=" + label(f), {}});

  double worst_round_trip = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double h = static_cast<double>(i) / grid;
    std::vector<Cell> row{h};
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const double w = solve_wage(h, ps[k]);
      worst_round_trip = std::max(worst_round_trip, std::abs(wage_share(w, ps[k]) - h));
      row.push_back(w);
      plot.series[k].points.emplace_back(h, w);
    }
    t.rows.push_back(std::move(row));
  }

  json config = {{"sigma", sigma}, {"phis", phis}, {"grid", grid}};
  json endpoints = json::array();
  for (const auto& p : ps) {
    endpoints.push_back({{"phi", p.phi},
                         {"w0_error", std::abs(solve_wage(0.0, p) - p.wage_floor())},
                         {"w_half_error", std::abs(solve_wage(0.5, p) - 1.0)},
                         {"w1_error", std::abs(solve_wage(1.0, p) - p.wage_ceiling())}});
  }
  json shadow = {{"max_round_trip_error", worst_round_trip}, {"endpoints", std::move(endpoints)}};
  a.json = document(stem == "shortrun" ? "shortrun" : "figure", stem == "shortrun" ? "" : stem,
                    std::move(config), to_json(t), std::move(shadow), metadata(grid));
  a.tables.push_back(std::move(t));
  a.plot = std::move(plot);
  return a;
}

inline Artifacts utility_curves(const std::string& stem, const ModelParams& base,
                                const std::vector<double>& thetas, int grid, bool is_figure) {
  Artifacts a;
  a.stem = stem;
  Table t{stem, {"h"}, {}};
  std::vector<ModelParams> ps;
  for (double th : thetas) {
    ModelParams p = base;
    p.theta = th;
    p.validate();
    ps.push_back(p);
    t.columns.push_back("delta_u@theta=" + label(th));
  }
  Plot plot{"Utility differential", "h", "delta u", {}, {}, {}, {}};
  for (double th : thetas) plot.series.push_back({"theta=" + label(th), {}});

  std::vector<std::vector<double>> values(ps.size());
  for (int i = 0; i <= grid; ++i) {
    const double h = static_cast<double>(i) / grid;
    std::vector<Cell> row{h};
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const double du = delta_u(h, ps[k]);
      values[k].push_back(du);
      row.push_back(du);
      plot.series[k].points.emplace_back(h, du);
    }
    t.rows.push_back(std::move(row));
  }

  double antisymmetry = 0.0;
  int order_violations = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    for (int i = 0; i <= grid; ++i) {
      antisymmetry = std::max(antisymmetry, std::abs(values[k][i] + values[k][grid - i]));
    }
  }
  std::vector<std::size_t> order(ps.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return thetas[x] < thetas[y]; });
  for (int i = grid / 2 + 1; i <= grid; ++i) {
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      if (values[order[k + 1]][i] < values[order[k]][i]) ++order_violations;
    }
  }

  json config = {{"sigma", base.sigma}, {"phi", base.phi}, {"thetas", thetas}, {"grid", grid}};
  json shadow = {{"max_antisymmetry_error", antisymmetry},
                 {"theta_order_violations_above_half", order_violations}};
  a.json = document(is_figure ? "figure" : "deltau", is_figure ? stem : "", std::move(config),
                    to_json(t), std::move(shadow), metadata(grid));
  a.tables.push_back(std::move(t));
  a.plot = std::move(plot);
  return a;
}

// Solid where both ends of a segment are stable, dashed otherwise.
inline Plot branch_plot(const Branch& b) {
  const std::string name = std::string(to_string(b.parameter));
  Plot plot{"Bifurcation diagram in " + name + " (solid stable, dashed unstable)", name, "h*",
            {}, {}, {}, std::make_pair(0.0, 1.0)};
  for (std::size_t i = 0; i + 1 < b.samples.size(); ++i) {
    const auto& pa = b.samples[i].equilibria.points;
    const auto& pb = b.samples[i + 1].equilibria.points;
    const double xa = b.samples[i].parameter;
    const double xb = b.samples[i + 1].parameter;
    auto link = [&](const Equilibrium& ea, const Equilibrium& eb) {
      const bool solid = ea.stability == Stability::stable && eb.stability == Stability::stable;
      plot.segments.push_back({xa, ea.h_star, xb, eb.h_star, !solid});
    };
    if (pa.size() == pb.size()) {
      for (std::size_t k = 0; k < pa.size(); ++k) link(pa[k], pb[k]);
      continue;
    }
    auto sym = [](const std::vector<Equilibrium>& v) -> const Equilibrium* {
      for (const auto& e : v)
        if (e.kind == EquilibriumKind::symmetric_dispersion) return &e;
      return nullptr;
    };
    if (const auto* ea = sym(pa)) {
      if (const auto* eb = sym(pb)) link(*ea, *eb);
    }
  }
  for (const auto& f : b.bifurcations) {
    plot.markers.push_back({f.parameter, 0.5,
                            fmt::format("{}={:.6g} ({})", name, f.parameter,
                                        to_string(f.criticality.criticality))});
  }
  return plot;
}

inline json branch_json(const Branch& b, json& shadow) {
  const bool logit = std::holds_alternative<LogitPenalty>(b.spec.kind());
  json bifs = json::array();
  for (const auto& f : b.bifurcations) {
    json j = {{"parameter", f.parameter},
              {"type", "pitchfork"},
              {"dispersion_below", std::string(to_string(f.below))},
              {"dispersion_above", std::string(to_string(f.above))},
              {"criticality", std::string(to_string(f.criticality.criticality))},
              {"third_derivative", f.criticality.third_derivative}};
    if (b.parameter == SweepParameter::mu) {
      j["closed_form_third_derivative"] = number_or_null(f.criticality.closed_form_mu);
      const auto m = match_mu_threshold(f.parameter, b.params.sigma, b.params.phi, b.params.theta);
      j["threshold_match"] = {{"mu_d", m.mu_d},
                              {"mu_d_half", m.mu_d_half},
                              {"general_theta", m.general_theta},
                              {"matches_mu_d", m.matches_mu_d},
                              {"matches_mu_d_half", m.matches_mu_d_half},
                              {"matches_general_theta", m.matches_general_theta},
                              {"convention", m.convention()}};
    } else {
      j["closed_form_third_derivative"] = number_or_null(f.criticality.closed_form_phi);
      if (logit) {
        const auto pb = phi_b(b.params.sigma, *b.spec.mu());
        j["phi_b_closed_form"] = number_or_null(pb);
        j["phi_b_difference"] = pb ? json(f.parameter - *pb) : json();
      }
    }
    bifs.push_back(std::move(j));
  }

  json samples = json::array();
  int failed = 0;
  for (const auto& s : b.samples) {
    json pts = json::array();
    for (const auto& e : s.equilibria.points) {
      pts.push_back({{"h_star", e.h_star},
                     {"stability", std::string(to_string(e.stability))},
                     {"kind", std::string(to_string(e.kind))},
                     {"saturated", e.saturated}});
    }
    json j = {{"parameter", s.parameter},
              {"symmetric_slope", number_or_null(s.symmetric_slope)},
              {"equilibria", std::move(pts)}};
    if (s.diagnostic) {
      j["diagnostic"] = *s.diagnostic;
      ++failed;
    }
    samples.push_back(std::move(j));
  }

  // Stable partial branch above 1/2 should not move away from 1/2 as the
  // parameter rises.
  int monotone_violations = 0;
  std::optional<double> last;
  for (const auto& s : b.samples) {
    std::optional<double> upper;
    for (const auto& e : s.equilibria.points) {
      if (e.kind == EquilibriumKind::partial_agglomeration && e.h_star > 0.5 &&
          e.stability == Stability::stable) {
        upper = upper ? std::max(*upper, e.h_star) : e.h_star;
      }
    }
    if (upper && last && *upper > *last + 1e-12) ++monotone_violations;
    last = upper;
  }
  shadow["failed_steps"] = failed;
  shadow["stable_branch_monotonicity_violations"] = monotone_violations;
  return {{"parameter", std::string(to_string(b.parameter))},
          {"bifurcations", std::move(bifs)},
          {"samples", std::move(samples)}};
}

inline Table branch_table(const std::string& name, const Branch& b) {
  Table t{name, {"parameter", "h_star", "stability", "kind"}, {}};
  for (const auto& s : b.samples) {
    for (const auto& e : s.equilibria.points) {
      t.rows.push_back({s.parameter, e.h_star, std::string(to_string(e.stability)),
                        std::string(to_string(e.kind))});
    }
  }
  return t;
}

inline Artifacts branch_artifacts(const std::string& stem, const RunConfig& c, SweepParameter which,
                                  double lo, double hi, int steps, const ModelParams& p,
                                  const PenaltySpec& spec, bool is_figure) {
  SweepOptions opts;
  opts.threads = c.threads;
  const Branch b = sweep(which, lo, hi, steps, p, spec, opts);
  Artifacts a;
  a.stem = stem;
  a.tables.push_back(branch_table(stem, b));
  json config = echo(p, spec);
  config["sweep"] = {{"parameter", std::string(to_string(which))},
                     {"min", lo},
                     {"max", hi},
                     {"steps", steps}};
  if (which == SweepParameter::phi) config.erase("phi"), config.erase("tau");
  if (which == SweepParameter::mu) config.erase("mu");
  json shadow = json::object();
  json results = branch_json(b, shadow);
  json meta = metadata(ScanOptions{}.grid);
  meta.erase("grid");
  meta["rescan_every"] = opts.rescan_every;
  a.json = document(is_figure ? "figure" : "sweep", is_figure ? stem : "", std::move(config),
                    std::move(results), std::move(shadow), std::move(meta));
  a.plot = branch_plot(b);
  return a;
}

}  // namespace detail

/// Short-run state (h, w, P_L, P_R, C_L, C_R) on h = i/grid.
inline Artifacts run_shortrun(const RunConfig& c) {
  const ModelParams p = resolve_params(c, {2.0, 0.5, 0.0});
  const int grid = c.grid.value_or(kDefaultGrid);
  Artifacts a;
  a.stem = "shortrun";
  Table t{"shortrun", {"h", "w", "P_L", "P_R", "C_L", "C_R"}, {}};
  Plot plot{"Short-run relative wage", "h", "w", {{"w", {}}}, {}, {}, {}};
  double worst = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double h = static_cast<double>(i) / grid;
    const auto s = short_run_state(h, p);
    worst = std::max(worst, std::abs(wage_share(s.w, p) - h));
    t.rows.push_back({h, s.w, s.price_l, s.price_r, s.consumption_l, s.consumption_r});
    plot.series[0].points.emplace_back(h, s.w);
  }
  detail::json config = echo(p, resolve_penalty(c));
  config.erase("penalty");
  config.erase("mu");
  config["grid"] = grid;
  detail::json shadow = {
      {"max_round_trip_error", worst},
      {"w0_error", std::abs(solve_wage(0.0, p) - p.wage_floor())},
      {"w1_error", std::abs(solve_wage(1.0, p) - p.wage_ceiling())}};
  a.json = detail::document("shortrun", "", std::move(config), to_json(t), std::move(shadow),
                            detail::metadata(grid));
  a.tables.push_back(std::move(t));
  a.plot = std::move(plot);
  return a;
}

/// Delta u(h) on h = i/grid for each theta in `thetas` (or the single theta).
inline Artifacts run_deltau(const RunConfig& c) {
  const ModelParams p = resolve_params(c, {2.0, 0.5, 0.0});
  const std::vector<double> thetas = c.thetas.empty() ? std::vector<double>{p.theta} : c.thetas;
  return detail::utility_curves("deltau", p, thetas, c.grid.value_or(kDefaultGrid), false);
}

/// Every long-run equilibrium at one parameter point.
inline Artifacts run_equilibria(const RunConfig& c) {
  const ModelParams p = resolve_params(c, {2.0, 0.5, 0.0});
  const PenaltySpec spec = resolve_penalty(c);
  const auto set = find_equilibria(p, spec);
  Artifacts a;
  a.stem = "equilibria";
  Table t{"equilibria", {"h_star", "w", "kind", "stability", "slope", "residual"}, {}};
  Plot plot{"Indirect-utility differential", "h", "delta V", {{"delta V", {}}}, {}, {}, {}};
  detail::json checks = detail::json::array();
  for (const auto& e : set.points) {
    t.rows.push_back({e.h_star, e.w, std::string(to_string(e.kind)),
                      std::string(to_string(e.stability)), e.slope, e.residual});
    plot.markers.push_back({e.h_star, 0.0, std::string(to_string(e.stability))});
    if (e.closed_form_slope) {
      checks.push_back({{"h_star", e.h_star},
                        {"numeric_slope", e.slope},
                        {"closed_form_slope", *e.closed_form_slope},
                        {"difference", e.slope - *e.closed_form_slope}});
    }
  }
  for (int i = 1; i < 256; ++i) {
    const double h = i / 256.0;
    if (h < 0.02 || h > 0.98) continue;
    plot.series[0].points.emplace_back(h, delta_V(h, p, spec));
  }
  const auto crit = pitchfork_criticality(p, spec);
  detail::json results = detail::equilibrium_set_json(set);
  results["symmetric_third_derivative"] = crit.third_derivative;
  detail::json shadow = {{"closed_form_slope_checks", std::move(checks)}};
  a.json = detail::document("equilibria", "", echo(p, spec), std::move(results), std::move(shadow),
                            detail::metadata(ScanOptions{}.grid));
  a.tables.push_back(std::move(t));
  a.plot = std::move(plot);
  return a;
}

/// Closed-form thresholds next to their numerically located counterparts.
inline Artifacts run_thresholds(const RunConfig& c) {
  const ModelParams p = resolve_params(c, {2.0, 0.4, 0.0});
  const PenaltySpec spec = resolve_penalty(c);
  const bool logit = std::holds_alternative<LogitPenalty>(spec.kind());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ModelParams log_p = p;
  log_p.theta = 1.0;

  const auto mu_num = locate_mu_pitchfork(p);
  const auto mu_num_log = locate_mu_pitchfork(log_p);
  std::optional<double> pb;
  if (logit) pb = phi_b(p.sigma, *spec.mu());
  const auto phi_num = locate_phi_pitchforks(p.sigma, p.theta, spec);
  const auto phi_num_log = locate_phi_pitchforks(p.sigma, 1.0, spec);
  double third_num = nan;
  if (mu_num) third_num = pitchfork_criticality(p, PenaltySpec::logit(*mu_num)).third_derivative;

  Artifacts a;
  a.stem = "thresholds";
  Table t{"thresholds", {"quantity", "value"}, {}};
  auto put = [&](const char* name, double v) { t.rows.push_back({std::string(name), v}); };
  put("mu_d", mu_d(p.sigma, p.phi));
  put("mu_d_half", 0.5 * mu_d(p.sigma, p.phi));
  put("mu_threshold_general_theta", mu_threshold(p.sigma, p.phi, p.theta));
  put("mu_pitchfork_numeric", mu_num.value_or(nan));
  put("mu_pitchfork_numeric_log_utility", mu_num_log.value_or(nan));
  put("phi_b", pb.value_or(nan));
  put("phi_pitchfork_numeric", phi_num.empty() ? nan : phi_num.front());
  put("phi_pitchfork_numeric_log_utility", phi_num_log.empty() ? nan : phi_num_log.front());
  put("third_derivative_mu_numeric", third_num);
  put("third_derivative_mu_closed_form", closed_form_third_mu(p.sigma, p.phi));

  const int grid = c.grid.value_or(kDefaultGrid);
  Table curve{"thresholds_mu_p", {"w", "X", "mu_p"}, {}};
  Plot plot{"Partial-agglomeration threshold", "X = w^sigma", "mu_p", {{"mu_p", {}}}, {}, {}, {}};
  const double top = p.wage_ceiling();
  for (int i = 0; i <= grid; ++i) {
    const double w = i == grid ? top : 1.0 + (top - 1.0) * i / grid;
    const double x = std::pow(w, p.sigma);
    const double m = mu_p(w, p.sigma, p.phi);
    curve.rows.push_back({w, x, m});
    plot.series[0].points.emplace_back(x, m);
  }

  auto match_json = [&](const std::optional<double>& detected, double theta) {
    if (!detected) return detail::json();
    const auto m = match_mu_threshold(*detected, p.sigma, p.phi, theta);
    return detail::json{{"detected", m.detected},
                        {"theta", theta},
                        {"convention", m.convention()},
                        {"matches_general_theta", m.matches_general_theta}};
  };
  detail::json results = {{"table", to_json(t)},
                          {"mu_p_curve", to_json(curve)},
                          {"phi_pitchforks_numeric", phi_num},
                          {"phi_pitchforks_numeric_log_utility", phi_num_log}};
  detail::json shadow = {{"mu_threshold_match", match_json(mu_num, p.theta)},
                         {"mu_threshold_match_log_utility", match_json(mu_num_log, 1.0)},
                         {"mu_p_at_w1_minus_mu_d", mu_p(1.0, p.sigma, p.phi) - mu_d(p.sigma, p.phi)}};
  if (!phi_num_log.empty()) shadow["phi_b_minus_numeric_log_utility"] = pb.value_or(NAN) - phi_num_log.front();
  a.json = detail::document("thresholds", "", echo(p, spec), std::move(results), std::move(shadow),
                            detail::metadata(grid));
  a.tables.push_back(std::move(t));
  a.tables.push_back(std::move(curve));
  a.plot = std::move(plot);
  return a;
}

/// Equilibria traced along phi or mu with bifurcations localised.
inline Artifacts run_sweep(const RunConfig& c) {
  const ModelParams p = resolve_params(c, {2.0, 0.4, 0.0});
  const PenaltySpec spec = resolve_penalty(c);
  const SweepParameter which = c.param.value_or(SweepParameter::phi);
  const double lo = c.min.value_or(which == SweepParameter::phi ? 0.05 : 0.0);
  const double hi = c.max.value_or(which == SweepParameter::phi ? 0.95 : 1.0);
  return detail::branch_artifacts("sweep", c, which, lo, hi, c.steps.value_or(kDefaultSteps), p,
                                  spec, false);
}

/// Delta u for several phi against the logit penalty differential, h in (0,1).
inline Artifacts run_figure5(const RunConfig& c) {
  const double sigma = c.sigma.value_or(2.5);
  const double theta = c.theta.value_or(0.0);
  const PenaltySpec spec = resolve_penalty(c, 0.2);
  const std::vector<double> phis = detail::phis_or(c, {0.3, 0.5, 0.9});
  const int grid = c.grid.value_or(kDefaultGrid);

  Artifacts a;
  a.stem = "fig5";
  Table t{"fig5", {"h"}, {}};
  std::vector<ModelParams> ps;
  Plot plot{"Utility and penalty differentials", "h", "", {}, {}, {}, std::make_pair(-1.0, 1.0)};
  for (double f : phis) {
    ps.push_back(ModelParams::normalized(sigma, f, theta));
    ps.back().validate();
    t.columns.push_back("delta_u@phi=" + detail::label(f));
    plot.series.push_back({"delta u, phi=" + detail::label(f), {}, true, 1.5});
  }
  t.columns.push_back("delta_t");
  plot.series.push_back({"delta t", {}, false, 3.0});

  std::vector<std::vector<double>> dv(ps.size());
  std::vector<double> hs;
  for (int i = 1; i < grid; ++i) {
    const double h = static_cast<double>(i) / grid;
    hs.push_back(h);
    const double dt = delta_t(h, spec);
    std::vector<Cell> row{h};
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const double du = delta_u(h, ps[k]);
      row.push_back(du);
      dv[k].push_back(du - dt);
      plot.series[k].points.emplace_back(h, du);
    }
    row.push_back(dt);
    plot.series.back().points.emplace_back(h, dt);
    t.rows.push_back(std::move(row));
  }

  detail::json per_phi = detail::json::array();
  bool coherent = true;
  const double cell = 1.0 / grid;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
      if (hs[i] <= 0.5) continue;
      if (numerics::sign(dv[k][i]) * numerics::sign(dv[k][i + 1]) < 0) {
        crossings.push_back(0.5 * (hs[i] + hs[i + 1]));
      }
    }
    const auto set = find_equilibria(ps[k], spec);
    std::vector<double> upper;
    for (const auto& e : set.points) {
      if (e.h_star > 0.5 && e.kind != EquilibriumKind::boundary_agglomeration) {
        upper.push_back(e.h_star);
      }
    }
    // Each visible crossing needs a solver root within one cell, and each
    // solver root inside the tabulated range needs a crossing.
    bool ok = true;
    for (double x : crossings) {
      ok = ok && std::any_of(upper.begin(), upper.end(),
                             [&](double h) { return std::abs(h - x) <= cell; });
    }
    for (double h : upper) {
      if (h >= hs.back() || h <= hs.front()) continue;
      ok = ok && std::any_of(crossings.begin(), crossings.end(),
                             [&](double x) { return std::abs(h - x) <= cell; });
    }
    coherent = coherent && ok;
    per_phi.push_back({{"phi", ps[k].phi},
                       {"grid_crossings_above_half", crossings},
                       {"equilibria", detail::equilibrium_set_json(set)},
                       {"coherent", ok}});
  }
  detail::json config = echo(ps.front(), spec);
  config.erase("phi");
  config.erase("tau");
  config["phis"] = phis;
  config["grid"] = grid;
  a.json = detail::document("figure", "fig5", std::move(config),
                            {{"table", to_json(t)}, {"per_phi", std::move(per_phi)}},
                            {{"crossings_match_equilibria", coherent}}, detail::metadata(grid));
  a.tables.push_back(std::move(t));
  a.plot = std::move(plot);
  return a;
}

/// One of fig1, fig2, fig5, fig6-left, fig6-right with its default settings.
inline Artifacts run_figure(const RunConfig& c) {
  const int grid = c.grid.value_or(kDefaultGrid);
  if (c.figure == "fig1") {
    return detail::wage_curves("fig1", c.sigma.value_or(2.0),
                               detail::phis_or(c, {0.1, 0.5, 0.7}), grid);
  }
  if (c.figure == "fig2") {
    const ModelParams p = resolve_params(c, {2.0, 0.5, 0.0});
    const std::vector<double> thetas =
        c.thetas.empty() ? (c.theta ? std::vector<double>{*c.theta} : std::vector<double>{0, 1, 2})
                         : c.thetas;
    return detail::utility_curves("fig2", p, thetas, grid, true);
  }
  if (c.figure == "fig5") return run_figure5(c);
  if (c.figure == "fig6-left") {
    const ModelParams p = resolve_params(c, {2.0, 0.4, 0.0});
    return detail::branch_artifacts("fig6-left", c, SweepParameter::mu, c.min.value_or(0.0),
                                    c.max.value_or(1.0), c.steps.value_or(kDefaultSteps), p,
                                    resolve_penalty(c), true);
  }
  if (c.figure == "fig6-right") {
    const ModelParams p = resolve_params(c, {2.0, 0.4, 0.0});
    return detail::branch_artifacts("fig6-right", c, SweepParameter::phi, c.min.value_or(0.05),
                                    c.max.value_or(0.95), c.steps.value_or(kDefaultSteps), p,
                                    resolve_penalty(c, 0.2), true);
  }
  throw ConfigError("unknown figure '" + c.figure + "'");
}

inline Artifacts run(const RunConfig& c) {
  validate(c);
  switch (c.command) {
    case Command::shortrun: return run_shortrun(c);
    case Command::deltau: return run_deltau(c);
    case Command::equilibria: return run_equilibria(c);
    case Command::thresholds: return run_thresholds(c);
    case Command::sweep: return run_sweep(c);
    case Command::figure: return run_figure(c);
  }
  throw ConfigError("unknown command");
}

}  // namespace geoeq::report
