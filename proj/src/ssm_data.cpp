#include "pcfg/ssm_data.hpp"

#include <cmath>
#include <stdexcept>

#include "pcfg/dists.hpp"
#include "pcfg/term.hpp"

namespace pcfg {

namespace {

double normal(Rng& rng, double mean, double var) {
  if (var == 0.0) return mean;
  return as_float(sample(DistKind::Normal, {mean, std::sqrt(var)}, rng));
}

}  // namespace

SsmData gen_ssm_data(std::size_t steps, std::uint64_t seed, const SsmParams& params) {
  if (steps == 0) throw std::invalid_argument("steps must be at least 1");
  Rng rng(hash_combine(seed, 0x55d, 0));
  SsmData d;
  d.x.push_back(normal(rng, params.prior_mean, params.prior_var));
  for (std::size_t t = 1; t <= steps; ++t) {
    d.x.push_back(normal(rng, d.x.back() + params.drift, params.process_var));
    d.y.push_back(normal(rng, d.x.back(), params.obs_var));
  }
  return d;
}

std::string ssm_csv(const SsmData& d) {
  std::string out = "t,y\n";
  for (std::size_t i = 0; i < d.y.size(); ++i) out += std::to_string(i + 1) + "," + format_float(d.y[i]) + "\n";
  return out;
}

}  // namespace pcfg
