#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pcfg/codegen.hpp"
#include "pcfg/program.hpp"
#include "pcfg/typecheck.hpp"
#include "pcfg/vm.hpp"

namespace pcfg {

/// Every intermediate result of the pipeline
/// parse -> typecheck -> anf -> analysis -> stmt -> blocks -> frames -> pcfg.
struct Compilation {
  TermPtr ast;  // desugared, untyped
  CheckedProgram checked;
  TermPtr anf;
  ProgramIR ir;
  std::set<std::string> resample;
  std::vector<FunctionStages> stages;  // parallel to ir.functions
  BlockProgram program;

  const FunctionStages& stage(const std::string& function) const;
};

Compilation compile_source(const std::string& source);
/// Throws CompileError("io", ...) with "no such file" when the file is missing.
Compilation compile_file(const std::string& path);
std::string read_file(const std::string& path);

enum class Stage { Ast, Anf, Analysis, Stmt, Blocks, Frames, Pcfg };

std::optional<Stage> stage_by_name(const std::string& name);
std::string emit_stage(const Compilation& c, Stage stage);

}  // namespace pcfg
