#pragma once

#include <cstdint>
#include <vector>

#include "pcfg/vm.hpp"

namespace pcfg {

struct SmcConfig {
  std::size_t particles = 10000;
  std::uint64_t seed = 1;
  double ess_threshold = 1.0;  // resample when tau >= 1 or ESS < tau * N
  std::size_t threads = 1;
  std::size_t stack_cells = 4096;
  bool debug_tags = false;
};

struct SmcResult {
  std::vector<ParticleState> states;
  std::vector<double> log_weights;  // final, unnormalized
  std::vector<double> weights;      // final, normalized
  double log_z = 0.0;
  std::size_t resamples = 0;
  std::size_t checkpoints = 0;
  std::vector<double> ess_trace;  // one entry per checkpoint
  double propagate_ms = 0.0;
  double resample_ms = 0.0;
};

/// SMC over a PCFG: propagate every particle to its next checkpoint,
/// stop once all have terminated, otherwise resample (systematically, when
/// the ESS gate allows) and repeat. Throws InferenceError if every particle
/// has zero weight or a particle fails.
SmcResult run_smc(const BlockProgram& program, const SmcConfig& cfg);

/// Ancestor indices for positions (j + u) / N over the cumulative weights.
/// Weights must be normalized; 0 < u < 1. Output is sorted.
std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, double u);

double log_sum_exp(const std::vector<double>& xs);

/// (sum w)^2 / sum w^2 from log weights. Throws InferenceError if all are -inf.
double ess(const std::vector<double>& log_weights);

/// Runs every particle whose flag is false until sim reports a checkpoint.
/// Particles are split into contiguous ranges, one per worker.
void propagate_parallel(const BlockProgram& program, std::vector<ParticleState>& states, std::vector<bool>& flags,
                        std::size_t threads, std::size_t stack_cells);

}  // namespace pcfg
