#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "pcfg/compiler.hpp"
#include "pcfg/error.hpp"
#include "pcfg/report.hpp"
#include "pcfg/smc.hpp"
#include "pcfg/ssm_data.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInferenceError = 1;
constexpr int kUsageError = 2;

int compile_cmd(const std::string& path, const std::string& emit) {
  auto stage = pcfg::stage_by_name(emit);
  if (!stage) {
    std::cerr << "unknown stage '" << emit << "'\n";
    return kUsageError;
  }
  auto c = pcfg::compile_file(path);
  std::cout << pcfg::emit_stage(c, *stage);
  return kOk;
}

struct RunArgs {
  std::string path;
  std::size_t particles = 10000;
  std::uint64_t seed = 1;
  double ess_threshold = 1.0;
  std::size_t threads = 0;
  std::size_t stack_cells = 4096;
  std::string output = "json";
  std::size_t histogram = 0;
  bool timings = false;
  bool trace = false;
};

int run_cmd(const RunArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  auto c = pcfg::compile_file(a.path);
  double compile_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  pcfg::SmcConfig cfg;
  cfg.particles = a.particles;
  cfg.seed = a.seed;
  cfg.ess_threshold = a.ess_threshold;
  cfg.threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  cfg.stack_cells = a.stack_cells;
  if (a.trace) {
    // One particle, sequentially, printing every block transition.
    pcfg::MachineOptions opts;
    opts.stack_capacity = a.stack_cells;
    opts.trace = [](pcfg::BlockId from, pcfg::BlockId next, bool checkpoint) {
      std::cerr << "sim(" << from << ") -> (" << (next == pcfg::kStop ? std::string("stop") : std::to_string(next))
                << ", " << (checkpoint ? "true" : "false") << ")\n";
    };
    pcfg::Machine m(c.program, opts);
    auto s = pcfg::initial_state(c.program, pcfg::hash_combine(a.seed, 0, 0));
    m.run_to_end(s);
  }
  pcfg::SmcResult r;
  try {
    r = pcfg::run_smc(c.program, cfg);
  } catch (const pcfg::InferenceError& e) {
    std::cerr << "inference error: " << e.what() << "\n";
    return kInferenceError;
  }
  pcfg::ReportOptions o;
  o.model = a.path;
  o.config = cfg;
  if (a.histogram) o.histogram_bins = a.histogram;
  o.timings = a.timings;
  o.compile_ms = compile_ms;
  std::cout << (a.output == "csv" ? pcfg::report_csv(c.program, r, o) : pcfg::report_json(c.program, r, o));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compiler and SMC runtime for PPL control-flow graphs"};
  app.require_subcommand(1);

  std::string path, emit = "pcfg";
  auto* compile = app.add_subcommand("compile", "Print a pipeline stage");
  compile->add_option("file", path, "Model (.cppl)")->required();
  compile->add_option("--emit", emit, "ast, anf, analysis, stmt, blocks, frames or pcfg")
      ->check(CLI::IsMember({"ast", "anf", "analysis", "stmt", "blocks", "frames", "pcfg"}));

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run SMC inference");
  run->add_option("file", ra.path, "Model (.cppl)")->required();
  run->add_option("--particles", ra.particles, "Particle count")->check(CLI::PositiveNumber);
  run->add_option("--seed", ra.seed, "Root seed");
  run->add_option("--ess-threshold", ra.ess_threshold, "Resample when ESS < tau * N")->check(CLI::Range(0.0, 1.0));
  run->add_option("--threads", ra.threads, "Worker threads (default: all cores)");
  run->add_option("--stack-cells", ra.stack_cells, "Stack capacity per particle")->check(CLI::PositiveNumber);
  run->add_option("--output", ra.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--histogram", ra.histogram, "Report a histogram with at most this many bins");
  run->add_flag("--timings", ra.timings, "Include wall-clock timings");
  run->add_flag("--trace", ra.trace, "Print block transitions of one particle to stderr");

  std::size_t steps = 0;
  std::uint64_t data_seed = 1;
  double process_var = 1.0;
  std::string out;
  auto* gen = app.add_subcommand("gen-ssm-data", "Simulate the linear-Gaussian state-space model");
  gen->add_option("--steps", steps, "Number of observations")->required();
  gen->add_option("--seed", data_seed, "Seed");
  gen->add_option("--process-var", process_var, "Process noise variance");
  gen->add_option("--out", out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*compile) return compile_cmd(path, emit);
    if (*run) return run_cmd(ra);
    if (*gen) {
      if (steps == 0) {
        std::cerr << "--steps must be at least 1\n";
        return kUsageError;
      }
      pcfg::SsmParams params;
      params.process_var = process_var;
      std::string csv = pcfg::ssm_csv(pcfg::gen_ssm_data(steps, data_seed, params));
      if (out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream f(out);
        if (!f) {
          std::cerr << "cannot write " << out << "\n";
          return kUsageError;
        }
        f << csv;
      }
      return kOk;
    }
  } catch (const pcfg::CompileError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  } catch (const pcfg::InferenceError& e) {
    std::cerr << "inference error: " << e.what() << "\n";
    return kInferenceError;
  } catch (const pcfg::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kInferenceError;
  }
  return kOk;
}
