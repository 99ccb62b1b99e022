#include "pcfg/error.hpp"

namespace pcfg {

namespace {

std::string format_compile(const std::string& stage, SourceLoc loc,
                           const std::string& message) {
  std::string out = stage + " error";
  if (loc.line > 0) {
    out += " at " + std::to_string(loc.line) + ":" + std::to_string(loc.column);
  }
  return out + ": " + message;
}

std::string format_inference(const std::string& message, std::size_t particle) {
  if (particle == InferenceError::kNoParticle) return message;
  return "particle " + std::to_string(particle) + ": " + message;
}

}  // namespace

CompileError::CompileError(std::string stage, SourceLoc loc, const std::string& message)
    : std::runtime_error(format_compile(stage, loc, message)),
      stage_(std::move(stage)),
      loc_(loc),
      detail_(message) {}

InferenceError::InferenceError(const std::string& message, std::size_t particle)
    : std::runtime_error(format_inference(message, particle)), particle_(particle) {}

}  // namespace pcfg
