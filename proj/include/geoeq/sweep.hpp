#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "geoeq/dispersion.hpp"
#include "geoeq/equilibria.hpp"
#include "geoeq/errors.hpp"
#include "geoeq/model_core.hpp"
#include "geoeq/numerics.hpp"

namespace geoeq {

enum class SweepParameter { phi, mu };

inline std::string_view to_string(SweepParameter s) {
  return s == SweepParameter::phi ? "phi" : "mu";
}

struct SweepOptions {
  ScanOptions scan;
  /// A full grid scan starts every block of this many steps; steps inside a
  /// block are warm-started from their predecessor.
  int rescan_every = 16;
  /// 0 means one thread per hardware core.
  int threads = 1;
};

struct BranchSample {
  double parameter;
  EquilibriumSet equilibria;
  /// d(Delta V)/dh at h = 1/2; NaN when the step failed.
  double symmetric_slope;
  std::optional<std::string> diagnostic;
};

struct Bifurcation {
  double parameter;
  /// Stability of dispersion just below and above the point.
  Stability below;
  Stability above;
  CriticalityReport criticality;
};

struct Branch {
  SweepParameter parameter;
  ModelParams params;
  PenaltySpec spec;
  std::vector<BranchSample> samples;
  std::vector<Bifurcation> bifurcations;
};

namespace detail {

struct SweepPoint {
  ModelParams params;
  PenaltySpec spec;
};

inline SweepPoint at_parameter(SweepParameter which, double v, const ModelParams& p,
                               const PenaltySpec& spec) {
  if (which == SweepParameter::phi) {
    ModelParams q = p;
    q.phi = v;
    q.validate();
    return {q, spec};
  }
  return {p, spec.with_mu(v)};
}

inline double symmetric_slope_at(SweepParameter which, double v, const ModelParams& p,
                                 const PenaltySpec& spec) {
  const auto pt = at_parameter(which, v, p, spec);
  return delta_V_slope(0.5, pt.params, pt.spec);
}

inline void run_block(SweepParameter which, const std::vector<double>& values, std::size_t first,
                      std::size_t last, const ModelParams& p, const PenaltySpec& spec,
                      const SweepOptions& opts, std::vector<BranchSample>& out) {
  const EquilibriumSet* previous = nullptr;
  for (std::size_t i = first; i < last; ++i) {
    BranchSample& s = out[i];
    s.parameter = values[i];
    s.symmetric_slope = std::nan("");
    try {
      const auto pt = at_parameter(which, values[i], p, spec);
      s.equilibria = previous ? find_equilibria_from(*previous, pt.params, pt.spec, opts.scan)
                              : find_equilibria(pt.params, pt.spec, opts.scan);
      for (const auto& eq : s.equilibria.points) {
        if (eq.kind == EquilibriumKind::symmetric_dispersion) s.symmetric_slope = eq.slope;
      }
      previous = &s.equilibria;
    } catch (const std::exception& e) {
      s.diagnostic = e.what();
      previous = nullptr;
    }
  }
}

}  // namespace detail

/// Traces equilibria over `steps` evenly spaced values of `which` on [lo, hi]
/// and localises each change in the stability of dispersion.
///
/// Blocks of `rescan_every` steps are independent, so the result does not
/// depend on the thread count.
inline Branch sweep(SweepParameter which, double lo, double hi, int steps, const ModelParams& p,
                    const PenaltySpec& spec, const SweepOptions& opts = {}) {
  if (steps < 2) throw ConfigError("a sweep needs at least 2 steps");
  if (!(lo < hi)) throw ConfigError("sweep range must satisfy min < max");
  if (opts.rescan_every < 1) throw ConfigError("rescan interval must be >= 1");
  detail::at_parameter(which, lo, p, spec);
  detail::at_parameter(which, hi, p, spec);

  std::vector<double> values(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    values[i] = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
  }

  Branch branch{which, p, spec, std::vector<BranchSample>(values.size()), {}};
  const std::size_t block = static_cast<std::size_t>(opts.rescan_every);
  const std::size_t n_blocks = (values.size() + block - 1) / block;
  auto do_block = [&](std::size_t b) {
    detail::run_block(which, values, b * block, std::min(values.size(), (b + 1) * block), p, spec,
                      opts, branch.samples);
  };

  unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
  if (threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) do_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < n_blocks; b += threads) do_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  const double band = opts.scan.marginal_band;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const auto& a = branch.samples[i];
    const auto& b = branch.samples[i + 1];
    if (std::isnan(a.symmetric_slope) || std::isnan(b.symmetric_slope)) continue;
    const Stability sa = classify_slope(a.symmetric_slope, band);
    const Stability sb = classify_slope(b.symmetric_slope, band);
    if (sa == sb || sa == Stability::marginal) continue;

    double where = b.parameter;
    if (sb != Stability::marginal) {
      auto f = [&](double v) { return detail::symmetric_slope_at(which, v, p, spec); };
      try {
        where = numerics::bracketed_root(f, a.parameter, b.parameter, a.symmetric_slope,
                                         b.symmetric_slope)
                    .x;
      } catch (const std::exception&) {
        where = 0.5 * (a.parameter + b.parameter);
      }
    }
    Stability after = sb;
    if (after == Stability::marginal && i + 2 < values.size() &&
        !std::isnan(branch.samples[i + 2].symmetric_slope)) {
      after = classify_slope(branch.samples[i + 2].symmetric_slope, band);
    }
    const auto pt = detail::at_parameter(which, where, p, spec);
    branch.bifurcations.push_back({where, sa, after, pitchfork_criticality(pt.params, pt.spec)});
  }
  return branch;
}

}  // namespace geoeq
