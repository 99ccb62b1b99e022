#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "interpreter.hpp"
#include "kalman.hpp"
#include "pcfg/report.hpp"
#include "pcfg/smc.hpp"
#include "pcfg/ssm_data.hpp"
#include "resample_oracle.hpp"
#include "stmt_gen.hpp"

using namespace pcfg;

namespace {

constexpr std::uint64_t kSeedGeometric = 1;
constexpr std::uint64_t kSeedStandard = 2;
constexpr std::uint64_t kSeedSsmBase = 1001;
constexpr std::uint64_t kSeedTapes = 6;
constexpr std::uint64_t kSeedThreads = 7;
constexpr std::uint64_t kSeedSlopeBase = 9000;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SmcResult smc(const Compilation& c, std::size_t n, std::uint64_t seed, std::size_t threads = 1) {
  SmcConfig cfg;
  cfg.particles = n;
  cfg.seed = seed;
  cfg.ess_threshold = 1.0;
  cfg.threads = threads;
  return run_smc(c.program, cfg);
}

double mass_at(const Compilation& c, const SmcResult& r, std::int64_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < r.states.size(); ++i)
    if (as_int(result_cells(c.program, r.states[i])[0]) == n) total += r.weights[i];
  return total;
}

double mean_sd(const std::vector<double>& xs, double& sd) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  sd = std::sqrt(v / static_cast<double>(xs.size() - 1));
  return m;
}

/// Histogram over n = 1..8 against `law`, plus log Z.
void geometric_check(int id, const char* name, const char* model, std::uint64_t seed,
                     const std::function<double(int)>& law, double log_z, bool timed) {
  auto c = compile_model(model);
  auto t0 = std::chrono::steady_clock::now();
  auto r = smc(c, 100000, seed);
  double secs = seconds_since(t0);
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) worst = std::max(worst, std::abs(mass_at(c, r, n) - law(n)));
  double dz = std::abs(r.log_z - log_z);
  bool ok = worst <= 0.01 && dz <= 0.02 && (!timed || secs < 10.0);
  report(id, name, ok,
         fmt("max bin error %.4f (<= 0.01), logZ %.4f vs %.4f (|d| %.4f <= 0.02), %.2f s", worst, r.log_z, log_z, dz,
             secs));
}

void criterion3() {
  auto c = compile_model("ssm.cppl");
  auto exact = oracle::kalman_logz({}, gen_ssm_data(10, 42).y);
  std::vector<double> zs, means;
  double slowest = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = smc(c, 50000, kSeedSsmBase + k);
    slowest = std::max(slowest, seconds_since(t0));
    zs.push_back(r.log_z);
    double m = 0.0;
    for (std::size_t i = 0; i < r.states.size(); ++i) m += r.weights[i] * as_float(result_cells(c.program, r.states[i])[0]);
    means.push_back(m);
  }
  double sz, sm;
  double mz = mean_sd(zs, sz), mm = mean_sd(means, sm);
  double sez = sz / std::sqrt(50.0), sem = sm / std::sqrt(50.0);
  bool ok = std::abs(mz - exact.log_z) <= 3.0 * sez && std::abs(mm - exact.mean) <= 3.0 * sem && slowest < 30.0;
  report(3, "SSM vs Kalman", ok,
         fmt("logZ %.4f vs %.4f (3 SE %.4f), E[X_T] %.4f vs %.4f (3 SE %.4f), slowest run %.2f s", mz, exact.log_z,
             3.0 * sez, mm, exact.mean, 3.0 * sem, slowest));
}

using Edge = std::tuple<std::uint32_t, std::string, std::int64_t>;  // from, kind, to (-1 = return)

void edges_of(const std::vector<TStmt>& list, std::uint32_t from, std::set<Edge>& out) {
  for (const auto& s : list) {
    std::int64_t to = s.next.kind == Next::Return ? -1 : static_cast<std::int64_t>(s.next.block) + 1;
    switch (s.kind) {
      case TStmtKind::Checkpoint:
        out.insert({from, "checkpoint", to});
        break;
      case TStmtKind::Call:
        out.insert({from, "call", to});
        break;
      case TStmtKind::Jump:
        out.insert({from, "jump", to});
        break;
      case TStmtKind::If:
        edges_of(s.thn, from, out);
        edges_of(s.els, from, out);
        break;
      case TStmtKind::Other:
        break;
    }
  }
}

void criterion4() {
  auto c = compile_model("fig5.cppl");
  const auto& d = c.stage("f").blocks;
  std::set<Edge> got;
  for (const auto& [b, list] : d.blocks) edges_of(list, b + 1, got);
  const std::set<Edge> want{{1, "checkpoint", 2}, {2, "jump", 3}, {2, "call", 3},
                            {2, "jump", 4},       {3, "jump", 4}, {4, "jump", -1}};
  bool ok = d.blocks.size() == 4 && d.entry == 0 && got == want && check_tail_position(d.blocks);
  report(4, "decomposition golden test", ok, fmt("%zu blocks, %zu transitions match", d.blocks.size(), got.size()));
}

void criterion5() {
  StmtGen g(5);
  std::size_t ok_tail = 0, ok_single = 0;
  for (int i = 0; i < 1000; ++i) {
    auto d = decompose(g.list(8, 3));
    if (check_tail_position(d.blocks) && check_tail_position(renumber(d).blocks)) ++ok_tail;
  }
  g.transfers = false;
  for (int i = 0; i < 1000; ++i)
    if (decompose(g.list(8, 3)).blocks.size() == 1) ++ok_single;
  report(5, "tail-position property", ok_tail == 1000 && ok_single == 1000,
         fmt("%zu/1000 tail position, %zu/1000 transfer-free lists in one block", ok_tail, ok_single));
}

void criterion6() {
  std::size_t agree = 0, total = 0;
  for (const char* name : {"geometric.cppl", "geometric_resample.cppl", "ssm.cppl", "crbd_toy.cppl"}) {
    auto c = compile_model(name);
    for (std::uint64_t k = 0; k < 1000; ++k) {
      ++total;
      auto o = oracle::interpret_direct(c.anf, Rng(hash_combine(kSeedTapes, k, 0)));
      Tape tape{o.tape};
      MachineOptions opts;
      opts.tape = &tape;
      try {
        auto s = run_single(c.program, 0, opts);
        auto cells = result_cells(c.program, s);
        auto v = decode_value(cells.data(), c.program.result_type, c.program.data, c.program.pool);
        if (v == oracle::to_value(o.value) && s.log_weight == o.log_weight && tape.pos == tape.values.size() &&
            s.stack_ptr == c.program.result_cells)
          ++agree;
      } catch (const std::exception&) {
      }
    }
  }
  report(6, "semantic preservation", agree == total, fmt("%zu/%zu forced tapes agree exactly", agree, total));
}

void criterion7() {
  auto c = compile_model("crbd_toy.cppl");
  bool same = true;
  for (const char* name : {"geometric_resample.cppl", "ssm.cppl", "crbd_toy.cppl"}) {
    auto m = compile_model(name);
    ReportOptions o;
    o.model = name;
    o.histogram_bins = 10;
    std::string first;
    for (std::size_t t : {1u, 2u, 8u}) {
      o.config.particles = 10000;
      o.config.seed = kSeedThreads;
      o.config.threads = t;
      auto json = report_json(m.program, run_smc(m.program, o.config), o);
      if (first.empty()) first = json;
      same = same && json == first;
    }
  }
  auto one = smc(c, 100000, kSeedThreads, 1);
  auto four = smc(c, 100000, kSeedThreads, 4);
  double speedup = one.propagate_ms / four.propagate_ms;
  report(7, "determinism and parallel contract", same && speedup >= 1.7,
         fmt("reports %s across threads {1,2,8}; propagation speedup at 4 threads %.2fx (>= 1.7x) on %u hardware "
             "threads",
             same ? "identical" : "differ", speedup, std::thread::hardware_concurrency()));
}

void criterion8() {
  std::size_t grid = 0, grid_ok = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<std::vector<double>> ws;
    eighths(n, ws);
    for (const auto& w : ws)
      for (int k = 1; k <= 9; ++k) {
        ++grid;
        if (systematic_resample(w, k / 10.0) == brute_force_resample(w, k / 10.0)) ++grid_ok;
      }
  }
  Gen g(8);
  double worst = 0.0;
  for (int round = 0; round < 1000; ++round) {
    std::vector<double> lw(1 + g.below(100));
    for (auto& x : lw) x = static_cast<double>(g.below(4000)) / 100.0 - 20.0;
    double d = direct_ess(lw);
    worst = std::max(worst, std::abs(ess(lw) - d) / d);
  }
  report(8, "resampling unit suite", grid_ok == grid && worst <= 1e-12,
         fmt("%zu/%zu grid cases match, worst relative ESS error %.2e (<= 1e-12)", grid_ok, grid, worst));
}

void criterion9() {
  auto c = compile_model("geometric.cppl");
  std::vector<double> xs, ys;
  std::string sds;
  for (std::size_t k = 3; k <= 5; ++k) {
    std::size_t n = static_cast<std::size_t>(std::pow(10.0, static_cast<double>(k)));
    std::vector<double> zs;
    for (std::uint64_t i = 0; i < 50; ++i) zs.push_back(smc(c, n, kSeedSlopeBase + 100 * k + i).log_z);
    double sd;
    mean_sd(zs, sd);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(sd));
    sds += fmt(" %.5f", sd);
  }
  double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0, sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  double slope = sxy / sxx;
  report(9, "1/sqrt(N) consistency", std::abs(slope + 0.5) <= 0.15,
         fmt("slope %.3f (-0.5 +- 0.15), sd at N=1e3,1e4,1e5:%s", slope, sds.c_str()));
}

void guarded(int id, const char* name, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "weighted-geometric posterior", [] {
    geometric_check(
        1, "weighted-geometric posterior", "geometric.cppl", kSeedGeometric,
        [](int n) { return std::pow(0.5, n) * std::pow(1.5, n - 1) / 2.0; }, std::log(2.0), true);
  });
  guarded(2, "standard geometric control", [] {
    geometric_check(
        2, "standard geometric control", "geometric_standard.cppl", kSeedStandard,
        [](int n) { return std::pow(0.5, n); }, 0.0, false);
  });
  guarded(3, "SSM vs Kalman", criterion3);
  guarded(4, "decomposition golden test", criterion4);
  guarded(5, "tail-position property", criterion5);
  guarded(6, "semantic preservation", criterion6);
  guarded(7, "determinism and parallel contract", criterion7);
  guarded(8, "resampling unit suite", criterion8);
  guarded(9, "1/sqrt(N) consistency", criterion9);
  return failures == 0 ? 0 : 1;
}
