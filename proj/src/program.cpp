#include "pcfg/program.hpp"

#include "pcfg/typecheck.hpp"

namespace pcfg {

const Function* ProgramIR::find(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool ProgramIR::is_global(const std::string& name) const {
  for (const auto& g : globals) {
    if (g.name == name) return true;
  }
  return false;
}

namespace {

Function make_function(const std::string& name, const TermPtr& lam, SourceLoc loc) {
  Function f;
  f.name = name;
  f.loc = loc;
  TermPtr cur = lam;
  while (cur->kind == TermKind::Lam) {
    f.params.push_back(cur->name);
    f.param_types.push_back(cur->binder_type);
    cur = cur->kids[0];
  }
  f.body = cur;
  f.result_type = cur->type;
  return f;
}

}  // namespace

ProgramIR extract_program(const TermPtr& anf, DataEnv data) {
  ProgramIR ir;
  ir.data = std::move(data);
  ir.anf = anf;
  std::set<std::string> globals;
  std::vector<TermPtr> kept;  // spine lets that stay in main, outermost first
  TermPtr cur = anf;
  for (;;) {
    if (cur->kind == TermKind::TypeDecl || cur->kind == TermKind::ConDecl) {
      cur = cur->kids[0];
    } else if (cur->kind == TermKind::RecLet) {
      for (const auto& b : cur->bindings) ir.functions.push_back(make_function(b.name, b.body, b.loc));
      cur = cur->kids[0];
    } else if (cur->kind == TermKind::Let && cur->kids[0]->kind == TermKind::Lam) {
      ir.functions.push_back(make_function(cur->name, cur->kids[0], cur->loc));
      cur = cur->kids[1];
    } else if (cur->kind == TermKind::Let && is_constant_expr(cur->kids[0], globals)) {
      globals.insert(cur->name);
      ir.globals.push_back({cur->name, cur->kids[0], cur->binder_type});
      cur = cur->kids[1];
    } else if (cur->kind == TermKind::Let) {
      kept.push_back(cur);
      cur = cur->kids[1];
    } else {
      break;
    }
  }
  TermPtr body = cur;
  for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
    auto let = std::make_shared<Term>(**it);
    let->kids = {let->kids[0], body};
    let->type = body->type;
    body = let;
  }
  Function main;
  main.name = kMainName;
  main.body = body;
  main.result_type = body->type;
  main.is_main = true;
  for (const auto& f : ir.functions) {
    if (f.name == kMainName) {
      throw CompileError("program", f.loc, "'main' is reserved for the program entry point");
    }
  }
  ir.functions.push_back(std::move(main));
  return ir;
}

}  // namespace pcfg
