// Trace equilibria along logit heterogeneity and report where dispersion
// changes stability, next to the closed-form thresholds.

#include <cstdio>

#include "geoeq/geoeq.hpp"

int main() {
  const double sigma = 2.0;
  const double phi = 0.4;
  for (double theta : {0.0, 1.0}) {
    const auto p = geoeq::ModelParams::normalized(sigma, phi, theta);
    const auto branch = geoeq::sweep(geoeq::SweepParameter::mu, 0.0, 1.0, 101, p,
                                     geoeq::PenaltySpec::logit(0.2));
    std::printf("theta = %g\n", theta);
    for (const auto& b : branch.bifurcations) {
      const auto m = geoeq::match_mu_threshold(b.parameter, sigma, phi, theta);
      std::printf("  pitchfork at mu = %.10f (%s, d3 = %.4f)\n", b.parameter,
                  std::string(geoeq::to_string(b.criticality.criticality)).c_str(),
                  b.criticality.third_derivative);
      std::printf("  mu_d = %.10f, general-theta threshold = %.10f, matches: %s\n", m.mu_d,
                  m.general_theta, m.convention().c_str());
    }
  }
}
