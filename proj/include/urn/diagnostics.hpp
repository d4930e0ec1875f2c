#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urn/law.hpp"
#include "urn/trajectory.hpp"

namespace urn {

// Per-step split of the scaled composition update
//   x_{n+1} - x_n = (g(x_n) + U_{n+1} + b_{n+1}) / |z_n|
// with U the martingale part, E[U_{n+1} | z_n] = 0 under the exact kernel,
// and b the kernel-vs-mean bias.
struct NoiseStep {
  std::int64_t n = 0;
  std::int64_t size = 0;   // |z_n|
  double u_norm = 0.0;     // ||U_{n+1}||
  double b_norm = 0.0;     // ||b_{n+1}||
};

struct NoiseDecomposition {
  std::vector<NoiseStep> steps;
  double max_u_norm = 0.0;
  double max_scaled_b = 0.0;  // max |z_n| * ||b_{n+1}||: empirical bias constant
};

// Requires unit record stride and an enumerable kernel; throws otherwise.
// Extinct tails are excluded from the window.
NoiseDecomposition noise_decomposition(const Trajectory& traj, const TransitionLaw& law);

// Single U_{n+1} draw from a fixed state, for replicate averaging.
std::vector<double> noise_sample(const TransitionLaw& law, const CountVector& z, RngStream& rng);

struct AssumptionReport {
  bool jump_bound_ok = true;
  int max_l1_seen = 0;
  double lipschitz_estimate = 0.0;
  bool lipschitz_diverging = false;
  double fitted_a = 0.0;  // max over probe states of |z| * |p_w - Pi(z, z+w)|
  bool a2_checked = false;
  bool a2_ok = true;
  std::vector<std::string> violations;
};

// Samples the jump bound and a Lipschitz constant for the mean maps, and
// compares kernel probabilities against p_w(z/|z|) at the probe states (when
// the kernel is enumerable). Divergence of the Lipschitz estimate across
// shrinking pair separations is flagged.
AssumptionReport validate_assumptions(const TransitionLaw& law, int sample_pairs,
                                      std::uint64_t seed,
                                      const std::vector<CountVector>& probe_states = {});

}  // namespace urn
