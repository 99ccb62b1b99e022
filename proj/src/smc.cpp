#include "pcfg/smc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "pcfg/error.hpp"

namespace pcfg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Failure {
  std::size_t particle;
  std::string message;
};

}  // namespace

double log_sum_exp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double ess(const std::vector<double>& log_weights) {
  double a = log_sum_exp(log_weights);
  if (a == kNegInf) throw InferenceError("all particles have zero weight");
  std::vector<double> twice(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) twice[i] = 2.0 * log_weights[i];
  return std::exp(2.0 * a - log_sum_exp(twice));
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, double u) {
  std::size_t n = weights.size();
  std::vector<std::size_t> out(n);
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (weights[k] > 0.0) last_positive = k;
  }
  std::size_t k = 0;
  double cum = n ? weights[0] : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double pos = (static_cast<double>(j) + u) / static_cast<double>(n);
    while (pos >= cum && k < last_positive) cum += weights[++k];
    out[j] = k;
  }
  return out;
}

void propagate_parallel(const BlockProgram& program, std::vector<ParticleState>& states, std::vector<bool>& flags,
                        std::size_t threads, std::size_t stack_cells) {
  std::size_t n = states.size();
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::optional<Failure>> failures(threads);
  auto work = [&](std::size_t w) {
    std::size_t begin = n * w / threads, end = n * (w + 1) / threads;
    MachineOptions opts;
    opts.stack_capacity = stack_cells;
    Machine m(program, opts);
    for (std::size_t i = begin; i < end; ++i) {
      if (flags[i]) continue;
      try {
        bool c = false;
        while (!c) c = m.sim(states[i].next, states[i]).checkpoint;
      } catch (const std::exception& e) {
        failures[w] = Failure{i, e.what()};
        return;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) throw InferenceError(f->message, f->particle);
  }
  // Every particle now sits at a checkpoint or at stop; the flags reset
  // for the next round.
  for (std::size_t i = 0; i < n; ++i) flags[i] = true;
}

SmcResult run_smc(const BlockProgram& program, const SmcConfig& cfg) {
  if (cfg.particles == 0) throw InferenceError("particle count must be at least 1");
  if (!(cfg.ess_threshold >= 0.0 && cfg.ess_threshold <= 1.0)) throw InferenceError("ESS threshold must be in [0, 1]");
  std::size_t n = cfg.particles;
  SmcResult r;
  std::vector<ParticleState> states(n), spare(n);
  for (std::size_t i = 0; i < n; ++i) states[i] = initial_state(program, hash_combine(cfg.seed, 0, i), cfg.debug_tags);
  std::vector<bool> flags(n, false);
  Rng engine(hash_combine(cfg.seed, ~std::uint64_t{0}, 0x5eed));
  std::vector<double> lw(n), w(n);
  const double log_n = std::log(static_cast<double>(n));
  std::uint64_t epoch = 0;
  for (;;) {
    auto t0 = std::chrono::steady_clock::now();
    propagate_parallel(program, states, flags, cfg.threads, cfg.stack_cells);
    r.propagate_ms += ms_since(t0);
    if (states[0].next == kStop) {
      bool all = std::all_of(states.begin(), states.end(), [](const ParticleState& s) { return s.next == kStop; });
      if (all) break;
    }
    t0 = std::chrono::steady_clock::now();
    ++r.checkpoints;
    for (std::size_t i = 0; i < n; ++i) lw[i] = states[i].log_weight;
    double e = ess(lw);
    r.ess_trace.push_back(e);
    if (cfg.ess_threshold >= 1.0 || e < cfg.ess_threshold * static_cast<double>(n)) {
      double lse = log_sum_exp(lw);
      r.log_z += lse - log_n;
      for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(lw[i] - lse);
      auto ancestors = systematic_resample(w, engine.uniform());
      for (std::size_t j = 0; j < n; ++j) {
        copy_state(states[ancestors[j]], spare[j]);
        spare[j].log_weight = 0.0;
        spare[j].rng.rekey(hash_combine(cfg.seed, epoch + 1, j));
      }
      states.swap(spare);
      ++r.resamples;
    }
    ++epoch;
    std::fill(flags.begin(), flags.end(), false);
    r.resample_ms += ms_since(t0);
  }
  for (std::size_t i = 0; i < n; ++i) lw[i] = states[i].log_weight;
  double lse = log_sum_exp(lw);
  if (lse == kNegInf) throw InferenceError("all particles have zero weight");
  r.log_z += lse - log_n;
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.weights[i] = std::exp(lw[i] - lse);
  r.log_weights = lw;
  r.states = std::move(states);
  return r;
}

}  // namespace pcfg
