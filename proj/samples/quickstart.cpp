// Minimal end-to-end run: synthesize a noisy rank-5 instance, initialize,
// descend, and report the relative error.

#include <iostream>

#include "robust_mc/robust_mc.hpp"

int main() {
  using namespace robust_mc;

  RngStream rng(/*seed=*/42, /*stream_id=*/0);
  const GroundTruth truth = make_ground_truth(200, 5, rng);
  const double sigma = 1e-3;
  const ObservationSet obs = sample_observations(truth, 0.3, noise::StudentT{3.0, sigma}, rng);

  const double tau = HuberParams::adaptive(3.0, inf_norm(truth.m_star), sigma, 200, 0.3).tau;
  const SpectralInit init = spectral_initialize(obs, tau, 5);

  GdConfig cfg;
  cfg.tau = tau;
  const GdTrace trace = gd_run(init.factors, obs, cfg, truth.m_star);

  std::cout << "kappa " << truth.kappa << ", mu " << truth.mu << '\n'
            << "init rel error  " << *trace.iterates_recorded.front().rel_error << '\n'
            << "final rel error " << *trace.iterates_recorded.back().rel_error << " after " << trace.iters_run
            << " iterations (" << to_string(trace.stop_reason) << ")\n";
}
