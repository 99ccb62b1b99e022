#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcfg {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

/// Raised by every compile-time stage. `stage` names the pipeline pass
/// (parse, typecheck, anf, codegen, ...).
class CompileError : public std::runtime_error {
 public:
  CompileError(std::string stage, SourceLoc loc, const std::string& message);

  const std::string& stage() const { return stage_; }
  SourceLoc loc() const { return loc_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string stage_;
  SourceLoc loc_;
  std::string detail_;
};

/// Raised while executing a model: invalid distribution parameters,
/// stack overflow, NaN weights, out-of-range indexing.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the inference engine. Carries the index of the particle that
/// failed when one is known.
class InferenceError : public std::runtime_error {
 public:
  static constexpr std::size_t kNoParticle = static_cast<std::size_t>(-1);

  InferenceError(const std::string& message, std::size_t particle = kNoParticle);

  std::size_t particle() const { return particle_; }

 private:
  std::size_t particle_;
};

}  // namespace pcfg
