// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
// INFO lines are diagnostics and never affect the exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "geoeq/geoeq.hpp"
#include "geoeq/report/commands.hpp"
#include "geoeq/report/writer.hpp"

using namespace geoeq;

namespace {

constexpr double kRoundTripTol = 1e-10;
constexpr double kEndpointTol = 1e-10;
constexpr double kRuntimeLimit = 5.0;
constexpr double kDerivativeRelTol = 1e-6;
constexpr double kFig5PinTol = 1e-10;
constexpr double kFig5HighPhi = 0.96342573748403316;  // h* at phi = 0.3
constexpr double kFig5MidPhi = 0.85912124361113659;   // h* at phi = 0.5
constexpr double kPhiPitchfork = 0.75;
constexpr double kPhiPitchforkTol = 1e-4;
constexpr double kMuMatchTol = 1e-6;
constexpr double kMuPAtOneTol = 1e-12;
constexpr double kMuPTailTol = 1e-6;
constexpr double kThirdRelTol = 0.05;

const std::vector<double> kSigmas = {1.5, 2, 2.5, 5, 10};
const std::vector<double> kPhis = {0.1, 0.3, 0.5, 0.7, 0.9};

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

void info(const std::string& text) { std::printf("[INFO] %s\n", text.c_str()); }

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

void wage_fidelity() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0, worst_end = 0.0;
  for (double s : kSigmas) {
    for (double f : kPhis) {
      const auto p = ModelParams::normalized(s, f);
      for (int i = 0; i < 512; ++i) {
        const double h = i / 511.0;
        worst = std::max(worst, std::abs(wage_share(solve_wage(h, p), p) - h));
      }
      worst_end = std::max({worst_end, std::abs(solve_wage(0, p) - std::pow(f, 1 / s)),
                            std::abs(solve_wage(0.5, p) - 1.0),
                            std::abs(solve_wage(1, p) - std::pow(f, -1 / s))});
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  verdict(1, "wage equation round trip and endpoints",
          worst <= kRoundTripTol && worst_end <= kEndpointTol && secs <= kRuntimeLimit,
          fmt::format("max |share(w(h)) - h| = {:.3g}, max endpoint error = {:.3g}, {:.3f} s", worst,
                      worst_end, secs));
}

void wage_monotonicity_and_derivatives() {
  int non_monotone = 0, sign_violations = 0;
  double worst_h = 0.0, worst_phi = 0.0;
  for (double s : kSigmas) {
    for (double f : kPhis) {
      const auto p = ModelParams::normalized(s, f);
      double prev = -1.0;
      for (int i = 0; i < 512; ++i) {
        const double h = i / 511.0;
        const double w = solve_wage(h, p);
        if (!(w > prev)) ++non_monotone;
        prev = w;
        const double b = dw_dphi(w, p);
        if (numerics::sign(b) != -numerics::sign(w - 1.0)) ++sign_violations;
        if (i == 0 || i == 511) continue;
        const double step = 1e-3 * std::min(h, 1 - h);
        auto wh = [&](double x) { return solve_wage(x, p); };
        worst_h = std::max(worst_h, rel_err(dw_dh(w, p), numerics::central_first(wh, h, step)));
        auto wf = [&](double x) {
          auto q = p;
          q.phi = x;
          return solve_wage(h, q);
        };
        const double fstep = 1e-3 * std::min(f, 1 - f);
        worst_phi = std::max(worst_phi, rel_err(b, numerics::central_first(wf, f, fstep)));
      }
    }
  }
  verdict(2, "wage monotone in h, wage falls with freeness above w = 1, derivatives match FD",
          non_monotone == 0 && sign_violations == 0 && worst_h <= kDerivativeRelTol &&
              worst_phi <= kDerivativeRelTol,
          fmt::format("monotonicity breaks = {}, sign violations = {}, max rel err dw/dh = {:.3g}, "
                      "dw/dphi = {:.3g}",
                      non_monotone, sign_violations, worst_h, worst_phi));
}

void utility_falls_with_freeness() {
  int violations = 0, checked = 0;
  double largest = -INFINITY;
  for (double s : kSigmas) {
    for (double f : kPhis) {
      for (double th : {0.0, 0.5, 1.0, 2.0, 10.0}) {
        const auto p = ModelParams::normalized(s, f, th);
        for (int i = 11; i <= 19; ++i) {
          const double v = ddelta_u_dphi(i * 0.05, p);
          largest = std::max(largest, v);
          ++checked;
          if (!(v < 0.0)) ++violations;
        }
      }
    }
  }
  verdict(3, "d(delta u)/d(phi) < 0 above h = 1/2", violations == 0,
          fmt::format("{} points, {} violations, largest value {:.3g}", checked, violations, largest));
}

void figure_five() {
  const auto spec = PenaltySpec::logit(0.2);
  auto analyse = [&](double phi) { return find_equilibria(ModelParams::normalized(2.5, phi, 0), spec); };
  auto sym = [](const EquilibriumSet& s) {
    for (const auto& e : s.points)
      if (e.kind == EquilibriumKind::symmetric_dispersion) return e.stability;
    return Stability::marginal;
  };
  auto upper = [](const EquilibriumSet& s) -> std::optional<double> {
    for (const auto& e : s.points)
      if (e.h_star > 0.5 && e.stability == Stability::stable) return e.h_star;
    return std::nullopt;
  };
  const auto a = analyse(0.3), b = analyse(0.5), c = analyse(0.9);
  const auto ha = upper(a), hb = upper(b);
  bool ok = sym(a) == Stability::unstable && sym(b) == Stability::unstable && ha && hb &&
            *ha > *hb && *hb > 0.5 && c.points.size() == 1 && sym(c) == Stability::stable;
  ok = ok && std::abs(*ha - kFig5HighPhi) <= kFig5PinTol && std::abs(*hb - kFig5MidPhi) <= kFig5PinTol;
  verdict(4, "fig5 regimes at sigma=2.5, theta=0, mu=0.2", ok,
          fmt::format("h*(0.3) = {:.15g}, h*(0.5) = {:.15g}, equilibria at 0.9: {} ({})",
                      ha.value_or(NAN), hb.value_or(NAN), c.points.size(), to_string(sym(c))));
}

struct SweepSummary {
  std::optional<Bifurcation> bif;
  bool branches_ok = true;
};

SweepSummary summarise(const Branch& b) {
  SweepSummary s;
  if (b.bifurcations.size() == 1) s.bif = b.bifurcations[0];
  if (!s.bif) {
    s.branches_ok = false;
    return s;
  }
  std::optional<double> last;
  for (const auto& sample : b.samples) {
    std::optional<double> up;
    for (const auto& e : sample.equilibria.points) {
      if (e.kind == EquilibriumKind::partial_agglomeration && e.h_star > 0.5 &&
          e.stability == Stability::stable)
        up = e.h_star;
    }
    if (up && sample.parameter > s.bif->parameter) s.branches_ok = false;
    if (up && last && *up > *last + 1e-12) s.branches_ok = false;
    if (up) last = up;
  }
  return s;
}

void figure_six() {
  const auto spec = PenaltySpec::logit(0.2);
  const auto phi_sweep = summarise(sweep(SweepParameter::phi, 0.05, 0.95, 181, ModelParams::normalized(2, 0.4, 0), spec));
  const auto mu_sweep = summarise(sweep(SweepParameter::mu, 0.0, 1.0, 181, ModelParams::normalized(2, 0.4, 0), spec));

  bool ok = phi_sweep.bif && mu_sweep.bif && phi_sweep.branches_ok && mu_sweep.branches_ok;
  std::string detail;
  std::string convention = "none";
  if (phi_sweep.bif) {
    const auto& f = *phi_sweep.bif;
    ok = ok && std::abs(f.parameter - kPhiPitchfork) <= kPhiPitchforkTol &&
         f.criticality.criticality == Criticality::supercritical;
    detail += fmt::format("phi pitchfork at {:.10f} ({}), target {} +/- {}", f.parameter,
                          to_string(f.criticality.criticality), kPhiPitchfork, kPhiPitchforkTol);
  }
  if (mu_sweep.bif) {
    const auto& f = *mu_sweep.bif;
    const auto m = match_mu_threshold(f.parameter, 2, 0.4, 0, kMuMatchTol);
    convention = m.convention();
    ok = ok && convention != "none" && f.criticality.criticality == Criticality::supercritical;
    detail += fmt::format("; mu pitchfork at {:.10f} ({}), mu_d = {:.6f}, mu_d/2 = {:.6f}, matched "
                          "convention: {}",
                          f.parameter, to_string(f.criticality.criticality), m.mu_d, m.mu_d_half,
                          convention);
    info(fmt::format("mu pitchfork at theta=0 vs general-theta threshold {:.10f}: {}",
                     m.general_theta, m.matches_general_theta ? "match" : "no match"));
  }
  detail += fmt::format("; branches below thresholds and monotone: {}",
                        phi_sweep.branches_ok && mu_sweep.branches_ok ? "yes" : "no");
  verdict(5, "fig6 pitchforks at sigma=2, theta=0, mu=0.2 / phi=0.4", ok, detail);

  // Same sweeps under logarithmic utility, where the closed forms are derived.
  const auto phi_log = summarise(sweep(SweepParameter::phi, 0.05, 0.95, 181, ModelParams::normalized(2, 0.4, 1), spec));
  const auto mu_log = summarise(sweep(SweepParameter::mu, 0.0, 1.0, 181, ModelParams::normalized(2, 0.4, 1), spec));
  if (phi_log.bif && mu_log.bif) {
    const auto m = match_mu_threshold(mu_log.bif->parameter, 2, 0.4, 1, kMuMatchTol);
    info(fmt::format("theta=1: phi pitchfork at {:.10f} (closed form {}), mu pitchfork at {:.10f}, "
                     "matched convention: {}, branches ok: {}",
                     phi_log.bif->parameter, phi_b(2, 0.2).value_or(NAN), mu_log.bif->parameter,
                     m.convention(), phi_log.branches_ok && mu_log.branches_ok ? "yes" : "no"));
  }
}

void threshold_algebra() {
  double worst_at_one = 0.0, worst_tail = 0.0;
  int non_decreasing = 0;
  for (double s : kSigmas) {
    for (double f : kPhis) {
      worst_at_one = std::max(worst_at_one, std::abs(mu_p(1.0, s, f) - mu_d(s, f)));
      const double top = std::pow(f, -1 / s);
      double prev = INFINITY;
      for (int i = 0; i <= 400; ++i) {
        const double x = 1.0 + (1.0 / f - 1.0) * i / 400.0;
        const double w = i == 400 ? top : std::pow(x, 1 / s);
        const double v = mu_p(w, s, f);
        if (!(v < prev)) ++non_decreasing;
        prev = v;
      }
      const double w_tail = std::pow(1.0 / f * (1 - 1e-8), 1 / s);
      worst_tail = std::max(worst_tail, mu_p(w_tail, s, f));
    }
  }
  verdict(6, "mu_p(1) = mu_d, mu_p decreasing in X, mu_p -> 0 at X = 1/phi",
          worst_at_one <= kMuPAtOneTol && non_decreasing == 0 && worst_tail <= kMuPTailTol,
          fmt::format("max |mu_p(1) - mu_d| = {:.3g}, monotonicity breaks = {}, max tail value = {:.3g}",
                      worst_at_one, non_decreasing, worst_tail));
}

void criticality() {
  const auto p = ModelParams::normalized(2, 0.4, 0);
  const auto at = locate_mu_pitchfork(p);
  if (!at) {
    verdict(7, "third derivative at the mu pitchfork", false, "no pitchfork located");
    return;
  }
  const auto r = pitchfork_criticality(p, PenaltySpec::logit(*at));
  const double cf = *r.closed_form_mu;
  const double rel = std::abs(r.third_derivative - cf) / std::abs(cf);
  const bool ok = r.third_derivative < 0 && numerics::sign(cf) == numerics::sign(r.third_derivative) &&
                  rel <= kThirdRelTol;
  verdict(7, "third derivative at the mu pitchfork (sigma=2, phi=0.4, theta=0)", ok,
          fmt::format("numeric {:.6f} at mu = {:.10f}, closed form {:.6f}, relative gap {:.1f}% "
                      "(limit {:.0f}%)",
                      r.third_derivative, *at, cf, 100 * rel, 100 * kThirdRelTol));
  const auto p1 = ModelParams::normalized(2, 0.4, 1);
  const auto at1 = locate_mu_pitchfork(p1);
  const auto r1 = pitchfork_criticality(p1, PenaltySpec::logit(*at1));
  info(fmt::format("theta=1: numeric third derivative {:.6f} at mu = {:.10f}, closed form {:.6f}, "
                   "relative gap {:.1f}%",
                   r1.third_derivative, *at1, cf, 100 * std::abs(r1.third_derivative - cf) / std::abs(cf)));
}

void logit_endpoints() {
  int endpoint_hits = 0, missing_interior = 0, cases = 0;
  for (double mu : {0.05, 0.2, 1.0}) {
    for (double s : kSigmas) {
      for (double f : kPhis) {
        for (double th : {0.0, 1.0}) {
          const auto set = find_equilibria(ModelParams::normalized(s, f, th), PenaltySpec::logit(mu));
          ++cases;
          bool unstable = false, interior = false;
          for (const auto& e : set.points) {
            if (e.h_star == 0.0 || e.h_star == 1.0) ++endpoint_hits;
            if (e.kind == EquilibriumKind::symmetric_dispersion) unstable = e.stability == Stability::unstable;
            if (e.h_star > 0.5 && e.h_star < 1.0) interior = true;
          }
          if (unstable && !interior) ++missing_interior;
        }
      }
    }
  }
  verdict(8, "logit penalties: no endpoint equilibria, interior root when dispersion is unstable",
          endpoint_hits == 0 && missing_interior == 0,
          fmt::format("{} cases, endpoint equilibria = {}, unstable without interior root = {}", cases,
                      endpoint_hits, missing_interior));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  const auto root = std::filesystem::temp_directory_path() / "geoeq_acceptance";
  std::filesystem::remove_all(root);
  int mismatches = 0, files = 0;
  for (const auto& name : report::figure_names()) {
    report::RunConfig c;
    c.command = report::Command::figure;
    c.figure = name;
    std::vector<std::vector<std::filesystem::path>> runs;
    for (int threads : {1, 1, 0}) {
      c.threads = threads;
      const auto dir = root / fmt::format("{}-{}", name, runs.size());
      runs.push_back(report::write_artifacts(report::run(c), dir, {"csv", "json"}));
    }
    for (std::size_t k = 0; k < runs[0].size(); ++k) {
      ++files;
      const auto ref = slurp(runs[0][k]);
      if (slurp(runs[1][k]) != ref || slurp(runs[2][k]) != ref) ++mismatches;
    }
  }
  std::filesystem::remove_all(root);
  verdict(9, "figure outputs byte-identical across runs and thread counts", mismatches == 0 && files > 0,
          fmt::format("{} files compared over 3 runs each (threads 1, 1, all cores), {} mismatches",
                      files, mismatches));
}

}  // namespace

int main() {
  wage_fidelity();
  wage_monotonicity_and_derivatives();
  utility_falls_with_freeness();
  figure_five();
  figure_six();
  threshold_algebra();
  criticality();
  logit_endpoints();
  determinism();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
