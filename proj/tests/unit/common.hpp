#pragma once

#include <cstdint>
#include <string>

#include "pcfg/compiler.hpp"

inline std::string model_path(const std::string& name) { return std::string(PCFG_MODELS_DIR) + "/" + name; }

inline pcfg::Compilation compile_model(const std::string& name) { return pcfg::compile_file(model_path(name)); }

/// Small deterministic generator for property tests.
struct Gen {
  std::uint64_t state;
  explicit Gen(std::uint64_t seed) : state(seed * 0x9e3779b97f4a7c15ULL + 1) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  bool coin() { return next() & 1; }
};
