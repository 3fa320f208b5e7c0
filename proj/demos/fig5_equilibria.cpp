// Equilibria of the logit economy at three trade freeness levels.

#include <cstdio>

#include "geoeq/geoeq.hpp"

int main() {
  const auto spec = geoeq::PenaltySpec::logit(0.2);
  for (double phi : {0.3, 0.5, 0.9}) {
    const auto p = geoeq::ModelParams::normalized(2.5, phi, 0.0);
    const auto set = geoeq::find_equilibria(p, spec);
    std::printf("phi = %.1f\n", phi);
    for (const auto& eq : set.points) {
      std::printf("  h* = %.12f  %-22s %-9s slope % .6f\n", eq.h_star,
                  std::string(geoeq::to_string(eq.kind)).c_str(),
                  std::string(geoeq::to_string(eq.stability)).c_str(), eq.slope);
    }
  }
}
