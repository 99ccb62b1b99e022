#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "pcfg/report.hpp"
#include "pcfg/smc.hpp"
#include "resample_oracle.hpp"

using namespace pcfg;

namespace {

SmcResult run(const Compilation& c, std::size_t n, std::uint64_t seed, double tau = 1.0, std::size_t threads = 1) {
  SmcConfig cfg;
  cfg.particles = n;
  cfg.seed = seed;
  cfg.ess_threshold = tau;
  cfg.threads = threads;
  return run_smc(c.program, cfg);
}

double weighted_fraction(const Compilation& c, const SmcResult& r, std::int64_t value) {
  double total = 0.0;
  for (std::size_t i = 0; i < r.states.size(); ++i)
    if (as_int(result_cells(c.program, r.states[i])[0]) == value) total += r.weights[i];
  return total;
}

}  // namespace

TEST_SUITE("smc") {
  TEST_CASE("systematic resampling examples") {
    CHECK(systematic_resample({0.25, 0.25, 0.25, 0.25}, 0.5) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(systematic_resample({1.0, 0.0, 0.0, 0.0}, 0.5) == std::vector<std::size_t>{0, 0, 0, 0});
    CHECK(systematic_resample({0.5, 0.5}, 0.25) == std::vector<std::size_t>{0, 1});
    CHECK(systematic_resample({0.0, 0.0, 1.0}, 0.99) == std::vector<std::size_t>{2, 2, 2});
  }

  TEST_CASE("systematic resampling matches the position formula on a grid") {
    for (std::size_t n = 1; n <= 5; ++n) {
      std::vector<std::vector<double>> grid;
      eighths(n, grid);
      for (const auto& w : grid)
        for (int k = 1; k <= 9; ++k) {
          double u = k / 10.0;
          CAPTURE(u);
          CHECK(systematic_resample(w, u) == brute_force_resample(w, u));
        }
    }
  }

  TEST_CASE("offspring counts and zero weights") {
    Gen g(5);
    for (int round = 0; round < 2000; ++round) {
      std::size_t n = 1 + g.below(40);
      std::vector<double> w(n);
      double total = 0.0;
      for (auto& x : w) {
        x = g.below(4) == 0 ? 0.0 : static_cast<double>(g.below(1000));
        total += x;
      }
      if (total == 0.0) w[g.below(n)] = total = 1.0;
      for (auto& x : w) x /= total;
      double u = (static_cast<double>(g.below(1000)) + 0.5) / 1000.0;
      auto a = systematic_resample(w, u);
      REQUIRE(a.size() == n);
      CHECK(std::is_sorted(a.begin(), a.end()));
      std::vector<std::size_t> count(n, 0);
      for (auto k : a) ++count[k];
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::abs(static_cast<double>(count[k]) - static_cast<double>(n) * w[k]) <= 1.0 + 1e-9);
        if (w[k] == 0.0) CHECK(count[k] == 0);
      }
    }
  }

  TEST_CASE("effective sample size") {
    CHECK(ess({0.0, 0.0, 0.0, 0.0}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(ess({-INFINITY, 2.0, -INFINITY}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ess({std::log(0.75), std::log(0.25)}) == doctest::Approx(1.6).epsilon(1e-14));
    CHECK_THROWS_AS(ess({-INFINITY, -INFINITY}), InferenceError);
    Gen g(9);
    for (int round = 0; round < 500; ++round) {
      std::vector<double> lw(1 + g.below(50));
      for (auto& x : lw) x = static_cast<double>(g.below(2000)) / 100.0 - 10.0;
      CHECK(std::abs(ess(lw) - direct_ess(lw)) <= 1e-12 * direct_ess(lw));
    }
  }

  TEST_CASE("constant weights give the exact normalizing constant") {
    auto c = compile_model("const_weight.cppl");
    for (std::size_t n : {1u, 7u, 1000u})
      for (double tau : {0.0, 0.5, 1.0}) {
        auto r = run(c, n, 3, tau);
        CHECK(r.log_z == doctest::Approx(std::log(3.0)).epsilon(1e-12));
      }
  }

  TEST_CASE("particles that finish early keep taking part") {
    auto c = compile_model("early_stop.cppl");
    auto r = run(c, 100000, 4);
    CHECK(r.resamples == 2);
    CHECK(std::abs(r.log_z - std::log(1.5)) < 0.02);
    CHECK(std::abs(weighted_fraction(c, r, 1) - 1.0 / 3.0) < 0.01);
    double sum = 0.0;
    for (double w : r.weights) sum += w;
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }

  TEST_CASE("weighted geometric normalizing constant") {
    auto c = compile_model("geometric.cppl");
    auto r = run(c, 20000, 5);
    CHECK(std::abs(r.log_z - std::log(2.0)) < 0.05);
    CHECK(r.resamples == 0);
    auto cr = compile_model("geometric_resample.cppl");
    auto rr = run(cr, 20000, 5);
    CHECK(std::abs(rr.log_z - std::log(2.0)) < 0.05);
    CHECK(rr.ess_trace.size() == rr.checkpoints);
  }

  TEST_CASE("ESS gate skips resampling when weights are even") {
    auto c = compile_model("geometric_resample.cppl");
    auto always = run(c, 5000, 6, 1.0);
    auto gated = run(c, 5000, 6, 0.3);
    CHECK(always.resamples == always.checkpoints);
    CHECK(gated.resamples < gated.checkpoints);
    CHECK(std::abs(gated.log_z - std::log(2.0)) < 0.1);
  }

  TEST_CASE("reports do not depend on the thread count") {
    for (const char* name : {"geometric_resample.cppl", "ssm.cppl", "crbd_toy.cppl"}) {
      CAPTURE(name);
      auto c = compile_model(name);
      ReportOptions o;
      o.model = name;
      o.histogram_bins = 10;
      std::string first;
      for (std::size_t t : {1u, 2u, 3u, 8u}) {
        o.config.particles = 2000;
        o.config.seed = 11;
        o.config.threads = t;
        auto r = run_smc(c.program, o.config);
        auto json = report_json(c.program, r, o);
        if (first.empty()) first = json;
        CHECK(json == first);
      }
    }
  }

  TEST_CASE("propagation with every particle at a checkpoint is a no-op") {
    auto c = compile_model("geometric_resample.cppl");
    std::vector<ParticleState> states;
    for (std::uint64_t k = 0; k < 8; ++k) states.push_back(initial_state(c.program, k));
    auto before = states;
    std::vector<bool> flags(8, true);
    propagate_parallel(c.program, states, flags, 4, 4096);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(states[i].stack == before[i].stack);
      CHECK(states[i].next == before[i].next);
      CHECK(states[i].rng == before[i].rng);
    }
  }

  TEST_CASE("all particles rejected") {
    auto c = compile_source("weight (log 0.); resample; 1");
    CHECK_THROWS_AS(run(c, 100, 1), InferenceError);
  }

  TEST_CASE("a failing particle is reported with its index") {
    auto c = compile_source("let n = assume (Poisson 1.) in resample; divi 10 n");
    try {
      run(c, 64, 1, 1.0, 4);
      FAIL("expected an inference error");
    } catch (const InferenceError& e) {
      CHECK(e.particle() != InferenceError::kNoParticle);
      CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
    }
  }

  TEST_CASE("stack capacity is enforced per particle") {
    auto c = compile_model("geometric_resample.cppl");
    SmcConfig cfg;
    cfg.particles = 2000;
    cfg.stack_cells = 8;
    CHECK_THROWS_WITH_AS(run_smc(c.program, cfg), doctest::Contains("stack overflow"), InferenceError);
  }
}
