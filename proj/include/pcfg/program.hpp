#pragma once

#include <string>
#include <vector>

#include "pcfg/term.hpp"
#include "pcfg/types.hpp"

namespace pcfg {

struct Function {
  std::string name;
  std::vector<std::string> params;
  std::vector<TypePtr> param_types;
  TypePtr result_type;
  TermPtr body;  // ANF
  SourceLoc loc;
  bool is_main = false;
};

struct GlobalConst {
  std::string name;
  TermPtr value;  // constant expression
  TypePtr type;
};

/// The top-level structure of an ANF program: functions bound along the
/// outermost let spine, constant data bound there, and the synthetic
/// zero-parameter `main` holding everything else.
struct ProgramIR {
  std::vector<Function> functions;  // main is last
  std::vector<GlobalConst> globals;
  DataEnv data;
  TermPtr anf;

  const Function& main() const { return functions.back(); }
  const Function* find(const std::string& name) const;
  bool is_global(const std::string& name) const;
};

inline constexpr const char* kMainName = "main";

ProgramIR extract_program(const TermPtr& anf, DataEnv data);

}  // namespace pcfg
