#include <charconv>
#include <cmath>
#include <numbers>

#include "common.hpp"
#include "doctest.h"
#include "interpreter.hpp"
#include "kalman.hpp"
#include "pcfg/ssm_data.hpp"
#include "program_gen.hpp"

using namespace pcfg;

namespace {

struct VmRun {
  std::vector<Cell> tape;
  Value value;
  double log_weight;
  std::size_t stack_ptr;
};

VmRun vm_record(const Compilation& c, std::uint64_t key) {
  std::vector<Cell> rec;
  Tape tape;
  tape.record = &rec;
  MachineOptions o;
  o.tape = &tape;
  auto s = run_single(c.program, key, o);
  auto cells = result_cells(c.program, s);
  return {rec, decode_value(cells.data(), c.program.result_type, c.program.data, c.program.pool), s.log_weight,
          s.stack_ptr};
}

void check_agreement(const Compilation& c, std::uint64_t key) {
  auto vm = vm_record(c, key);
  auto o = oracle::interpret_replay(c.anf, vm.tape);
  CHECK(oracle::to_value(o.value) == vm.value);
  CHECK(o.log_weight == vm.log_weight);
  CHECK(o.tape == vm.tape);
  CHECK(vm.stack_ptr == c.program.result_cells);
}

std::string shortest(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("Kalman filter one-step closed form") {
    oracle::KalmanModel m{0.0, 1.0, 0.0, 1.0, 1.0};
    auto r = oracle::kalman_logz(m, {0.0});
    // Y ~ N(0, 3) before the update of X1 ~ N(0, 2)
    CHECK(r.log_z == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * 3.0)).epsilon(1e-14));
    CHECK(r.mean == doctest::Approx(0.0));
    CHECK(r.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    auto none = oracle::kalman_logz({}, {});
    CHECK(none.log_z == 0.0);
    CHECK(none.variance == 100.0);
  }

  TEST_CASE("Kalman filter prior without noise") {
    oracle::KalmanModel m{0.0, 1.0, 0.0, 0.0, 1.0};
    auto r = oracle::kalman_logz(m, {0.0});
    CHECK(r.log_z == doctest::Approx(-0.5 * std::log(4.0 * std::numbers::pi)).epsilon(1e-14));
  }

  TEST_CASE("Kalman filter factorizes over observations") {
    auto ys = gen_ssm_data(10, 42).y;
    auto full = oracle::kalman_logz({}, ys);
    double chained = 0.0;
    oracle::KalmanModel m;
    for (double y : ys) {
      auto step = oracle::kalman_logz(m, {y});
      chained += step.log_z;
      m.m0 = step.mean;
      m.v0 = step.variance;
    }
    CHECK(chained == doctest::Approx(full.log_z).epsilon(1e-10));
    CHECK(std::isfinite(full.log_z));
    CHECK(full.variance > 0.0);
    CHECK(full.variance < 5.0);
  }

  TEST_CASE("ssm model carries the generated observations") {
    auto src = read_file(model_path("ssm.cppl"));
    auto d = gen_ssm_data(10, 42);
    REQUIRE(d.y.size() == 10);
    for (double y : d.y) {
      CAPTURE(y);
      CHECK(src.find(shortest(y)) != std::string::npos);
    }
  }

  TEST_CASE("geometric replay through the interpreter") {
    auto c = compile_model("geometric.cppl");
    auto r = oracle::interpret_replay(c.anf, {from_bool(true), from_bool(true), from_bool(false)});
    CHECK(r.value.kind == oracle::OValue::Int);
    CHECK(r.value.i == 3);
    CHECK(r.log_weight == 2.0 * std::log(1.5));
  }

  TEST_CASE("replay of a recorded run reproduces the run") {
    auto c = compile_model("ssm.cppl");
    for (std::uint64_t key = 0; key < 20; ++key) {
      auto d = oracle::interpret_direct(c.anf, Rng(key));
      auto r = oracle::interpret_replay(c.anf, d.tape);
      CHECK(oracle::to_value(r.value) == oracle::to_value(d.value));
      CHECK(r.log_weight == d.log_weight);
      CHECK(d.tape.size() == 11);
    }
  }

  TEST_CASE("interpreter and compiled program agree on the corpus") {
    for (const char* name : {"geometric.cppl", "geometric_standard.cppl", "geometric_resample.cppl", "ssm.cppl",
                             "crbd_toy.cppl", "const_weight.cppl", "early_stop.cppl"}) {
      CAPTURE(name);
      auto c = compile_model(name);
      for (std::uint64_t key = 0; key < 200; ++key) check_agreement(c, key);
    }
  }

  TEST_CASE("interpreter and compiled program agree on generated programs") {
    for (std::uint64_t seed = 1; seed <= 400; ++seed) {
      auto src = ProgramGen(seed).program();
      CAPTURE(src);
      auto c = compile_source(src);
      for (std::uint64_t key = 0; key < 5; ++key) check_agreement(c, key);
    }
  }
}
