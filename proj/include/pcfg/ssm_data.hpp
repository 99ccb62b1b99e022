#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pcfg {

/// Linear-Gaussian state-space model: X0 ~ N(prior_mean, prior_var),
/// X_t ~ N(X_{t-1} + drift, process_var), Y_t ~ N(X_t, obs_var).
/// All second parameters are variances.
struct SsmParams {
  double prior_mean = 0.0;
  double prior_var = 100.0;
  double drift = 2.0;
  double process_var = 1.0;
  double obs_var = 5.0;
};

struct SsmData {
  std::vector<double> x;  // X_0 .. X_T
  std::vector<double> y;  // Y_1 .. Y_T
};

/// Forward simulation. Deterministic in (steps, seed, params).
SsmData gen_ssm_data(std::size_t steps, std::uint64_t seed, const SsmParams& params = {});

/// "t,y" header, one row per observation.
std::string ssm_csv(const SsmData& d);

}  // namespace pcfg
