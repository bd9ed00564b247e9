// Simulates a few skew Brownian paths and prints the estimators side by side.

#include <cstdio>

#include "sbm/likelihood.hpp"
#include "sbm/mle.hpp"
#include "sbm/sim.hpp"

int main() {
  for (double theta : {-0.5, 0.0, 0.5}) {
    for (std::uint64_t path_id = 0; path_id < 3; ++path_id) {
      sbm::num::RngStream rng(2024, path_id);
      const auto path = sbm::sim::simulate_path({theta, 0.0, 1.0, 10000}, rng);
      const auto r = sbm::lik::mle(path);
      std::printf("theta=%+.1f  mle=%+.4f  alpha/n^(1/4)=%+.4f  expansion=%+.4f%s\n", theta, r.theta_mle,
                  r.alpha_scaled, r.theta_expansion, r.boundary ? "  (boundary)" : "");
    }
  }
}
