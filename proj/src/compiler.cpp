#include "pcfg/compiler.hpp"

#include <fstream>
#include <sstream>

#include "pcfg/analysis.hpp"
#include "pcfg/anf.hpp"
#include "pcfg/error.hpp"
#include "pcfg/parser.hpp"
#include "pcfg/printer.hpp"

namespace pcfg {

const FunctionStages& Compilation::stage(const std::string& function) const {
  for (std::size_t i = 0; i < ir.functions.size(); ++i) {
    if (ir.functions[i].name == function) return stages[i];
  }
  throw std::out_of_range("no function " + function);
}

Compilation compile_source(const std::string& source) {
  Compilation c;
  c.ast = parse(source);
  c.checked = typecheck_lite(c.ast);
  c.anf = normalize(c.checked.term);
  if (auto v = anf_violation(c.anf); !v.empty()) throw CompileError("anf", {}, "internal: " + v);
  c.ir = extract_program(c.anf, c.checked.data);
  c.resample = resample_set(build_call_graph(c.ir));
  std::set<std::string> decomposed = c.resample;
  decomposed.insert(kMainName);
  for (const auto& f : c.ir.functions) {
    FunctionStages st;
    st.decomposed = decomposed.count(f.name) > 0;
    st.lowered = lower_to_stmts(f, decomposed);
    st.blocks = renumber(decompose(st.lowered.stmts));
    if (!check_tail_position(st.blocks.blocks)) {
      throw CompileError("blocks", f.loc, "internal: checkpoint or call not in tail position");
    }
    if (!st.decomposed && st.blocks.blocks.size() != 1) {
      throw CompileError("blocks", f.loc, "internal: function without checkpoints split into blocks");
    }
    if (st.decomposed) st.layout = compute_layout(f, st.blocks, st.lowered, c.ir.data);
    c.stages.push_back(std::move(st));
  }
  c.program = generate(c.ir, c.stages);
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CompileError("io", {}, "no such file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Compilation compile_file(const std::string& path) { return compile_source(read_file(path)); }

std::optional<Stage> stage_by_name(const std::string& name) {
  if (name == "ast") return Stage::Ast;
  if (name == "anf") return Stage::Anf;
  if (name == "analysis") return Stage::Analysis;
  if (name == "stmt") return Stage::Stmt;
  if (name == "blocks") return Stage::Blocks;
  if (name == "frames") return Stage::Frames;
  if (name == "pcfg") return Stage::Pcfg;
  return std::nullopt;
}

std::string emit_stage(const Compilation& c, Stage stage) {
  std::string out;
  switch (stage) {
    case Stage::Ast:
      return print_term(c.ast);
    case Stage::Anf:
      return print_term(c.anf);
    case Stage::Analysis:
      return dump_analysis(c.resample);
    case Stage::Stmt:
      for (const auto& st : c.stages) out += dump_stmts(st.lowered);
      return out;
    case Stage::Blocks:
      for (const auto& st : c.stages) {
        if (st.decomposed) out += dump_blocks(st.blocks, st.lowered);
      }
      return out;
    case Stage::Frames:
      for (const auto& st : c.stages) {
        if (st.decomposed) out += dump_layout(st.layout);
      }
      return out;
    case Stage::Pcfg:
      return dump_program(c.program);
  }
  return out;
}

}  // namespace pcfg
