#pragma once

#include <vector>

#include "pcfg/frames.hpp"
#include "pcfg/program.hpp"
#include "pcfg/stmtir.hpp"
#include "pcfg/vm.hpp"

namespace pcfg {

/// Per-function results of the earlier passes. Functions that are not
/// decomposed still go through lowering and decomposition; they come out
/// as one block and run as direct calls.
struct FunctionStages {
  LoweredFunction lowered;
  bool decomposed = false;
  Decomposition blocks;  // renumbered, entry 0
  FrameLayout layout;    // decomposed only
};

/// Lowers every function to block instructions, lays out the constant
/// pool and checks constant distribution parameters. `stages` is parallel
/// to `ir.functions`.
BlockProgram generate(const ProgramIR& ir, const std::vector<FunctionStages>& stages);

}  // namespace pcfg
