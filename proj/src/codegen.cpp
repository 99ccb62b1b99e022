#include "pcfg/codegen.hpp"

#include <map>

#include "pcfg/error.hpp"

namespace pcfg {

namespace {

Cell literal_cell(const Literal& lit) {
  if (auto i = std::get_if<std::int64_t>(&lit)) return from_int(*i);
  if (auto d = std::get_if<double>(&lit)) return from_float(*d);
  return from_bool(std::get<bool>(lit));
}

std::uint32_t u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

Instr move(Operand dst, Operand src, std::size_t count) {
  Instr in;
  in.op = Op::Move;
  in.dst = dst;
  in.src = {src};
  in.count = u32(count);
  return in;
}

Instr jump_to(Op op, NextRef target) {
  Instr in;
  in.op = op;
  in.target = target;
  return in;
}

/// Shared state across functions: constant pool, global offsets, block
/// numbering.
struct Shared {
  const ProgramIR& ir;
  const std::vector<FunctionStages>& stages;
  BlockProgram& out;
  std::map<std::string, std::uint32_t> global_offset;
  std::map<std::string, std::uint32_t> function_id;
  std::vector<BlockId> block_base;
};

class ConstEncoder {
 public:
  ConstEncoder(Shared& sh, const std::map<std::string, TermPtr>* locals) : sh_(sh), locals_(locals) {}

  std::vector<Cell> encode(const TermPtr& t) {
    const DataEnv& data = sh_.ir.data;
    switch (t->kind) {
      case TermKind::Const:
        return {literal_cell(t->lit)};
      case TermKind::Var: {
        if (locals_) {
          auto l = locals_->find(t->name);
          if (l != locals_->end()) return encode(l->second);
        }
        auto g = sh_.global_offset.find(t->name);
        if (g != sh_.global_offset.end()) {
          auto begin = sh_.out.pool.begin() + g->second;
          return {begin, begin + static_cast<std::ptrdiff_t>(data.size_of(t->type))};
        }
        break;
      }
      case TermKind::Record: {
        std::vector<Cell> cells(data.size_of(t->type), 0);
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
          auto sub = encode(t->kids[i]);
          std::copy(sub.begin(), sub.end(), cells.begin() + static_cast<std::ptrdiff_t>(data.field_offset(t->type, t->labels[i])));
        }
        return cells;
      }
      case TermKind::SeqLit: {
        std::vector<Cell> cells;
        for (const auto& k : t->kids) {
          auto sub = encode(k);
          cells.insert(cells.end(), sub.begin(), sub.end());
        }
        return cells;
      }
      case TermKind::Con: {
        const auto& ci = data.constructor(t->name);
        auto payload = encode(t->kids[0]);
        if (data.is_recursive(ci.variant)) {
          auto ptr = sh_.out.pool.size();
          sh_.out.pool.push_back(from_int(ci.tag));
          sh_.out.pool.insert(sh_.out.pool.end(), payload.begin(), payload.end());
          return {from_int(static_cast<std::int64_t>(ptr))};
        }
        std::vector<Cell> cells(data.size_of(t->type), 0);
        cells[0] = from_int(ci.tag);
        std::copy(payload.begin(), payload.end(), cells.begin() + 1);
        return cells;
      }
      default:
        break;
    }
    throw CompileError("codegen", t->loc, "expected a constant expression");
  }

 private:
  Shared& sh_;
  const std::map<std::string, TermPtr>* locals_;
};

bool constant_shape(const TermPtr& t) {
  return t->kind == TermKind::Const || t->kind == TermKind::Record || t->kind == TermKind::SeqLit ||
         t->kind == TermKind::Con;
}

class FunctionGen {
 public:
  FunctionGen(Shared& sh, std::size_t index)
      : sh_(sh),
        index_(index),
        fn_(sh.ir.functions[index]),
        st_(sh.stages[index]),
        data_(sh.ir.data),
        types_(variable_types(fn_)) {
    CompiledFunction& cf = sh_.out.functions[index_];
    if (st_.decomposed) {
      for (const auto& s : st_.layout.params) loc_[s.name] = Operand::frame(u32(s.offset));
      for (const auto& s : st_.layout.locals) loc_[s.name] = Operand::frame(u32(s.offset));
    } else {
      bump_ = cf.result_size;
      for (std::size_t i = 0; i < fn_.params.size(); ++i) {
        std::size_t size = data_.size_of(fn_.param_types[i]);
        cf.param_offsets.push_back(u32(bump_));
        loc_[fn_.params[i]] = Operand::local(u32(bump_));
        bump_ += size;
      }
    }
  }

  void run() {
    CompiledFunction& cf = sh_.out.functions[index_];
    for (const auto& [b, list] : st_.blocks.blocks) {
      auto code = gen_list(list);
      if (st_.decomposed) {
        sh_.out.blocks[static_cast<std::size_t>(sh_.block_base[index_] + static_cast<BlockId>(b))].code = std::move(code);
      } else {
        cf.body = std::move(code);
      }
    }
    cf.local_size = u32(bump_);
  }

 private:
  Shared& sh_;
  std::size_t index_;
  const Function& fn_;
  const FunctionStages& st_;
  const DataEnv& data_;
  std::map<std::string, TypePtr> types_;
  std::map<std::string, Operand> loc_;
  std::map<std::string, TermPtr> local_consts_;
  std::size_t bump_ = 0;

  Operand temp(std::size_t size) {
    Operand o = Operand::local(u32(bump_));
    bump_ += size;
    return o;
  }

  std::size_t size_of(const TypePtr& t) const { return data_.size_of(t); }

  Operand var(const std::string& name, SourceLoc where) {
    auto it = loc_.find(name);
    if (it != loc_.end()) return it->second;
    // Function temporaries may reuse the names of spine temporaries.
    auto t = types_.find(name);
    if (t == types_.end()) {
      auto g = sh_.global_offset.find(name);
      if (g != sh_.global_offset.end()) return Operand::pool(g->second);
      throw CompileError("codegen", where, "internal: unknown variable '" + name + "'");
    }
    Operand o = temp(size_of(t->second));
    loc_[name] = o;
    return o;
  }

  Operand operand(const TermPtr& t) {
    if (t->kind == TermKind::Const) return Operand::imm_cell(literal_cell(t->lit));
    if (t->kind == TermKind::Var) return var(t->name, t->loc);
    throw CompileError("codegen", t->loc, "internal: expected a variable or constant");
  }

  NextRef target(const Next& n, SourceLoc where) {
    if (n.kind == Next::Return) throw CompileError("codegen", where, "internal: transfer to return");
    return {NextRef::Block, sh_.block_base[index_] + static_cast<BlockId>(n.block)};
  }

  std::vector<Instr> gen_list(const std::vector<TStmt>& list) {
    std::vector<Instr> code;
    for (const auto& s : list) gen(s, code);
    return code;
  }

  void gen(const TStmt& s, std::vector<Instr>& code) {
    switch (s.kind) {
      case TStmtKind::Other:
        gen_payload(st_.lowered.payloads[s.payload], code);
        return;
      case TStmtKind::If: {
        const Payload& p = st_.lowered.payloads[s.payload];
        Operand cond = gen_test(p, code);
        Instr br;
        br.op = Op::Branch;
        br.src = {cond};
        br.thn = gen_list(s.thn);
        br.els = gen_list(s.els);
        code.push_back(std::move(br));
        return;
      }
      case TStmtKind::Checkpoint: {
        const Payload& p = st_.lowered.payloads[s.payload];
        code.push_back(jump_to(Op::Checkpoint, target(s.next, p.expr->loc)));
        return;
      }
      case TStmtKind::Call:
        gen_call(st_.lowered.payloads[s.payload], s.next, code);
        return;
      case TStmtKind::Jump:
        if (s.next.kind == Next::Return) {
          if (!st_.decomposed) return;
          Instr pop;
          pop.op = Op::PopFrame;
          pop.aux = u32(st_.layout.frame_size);
          code.push_back(pop);
          code.push_back(jump_to(Op::Jump, {NextRef::Ra, kStop}));
          return;
        }
        code.push_back(jump_to(Op::Jump, target(s.next, fn_.loc)));
        return;
    }
  }

  void gen_call(const Payload& p, const Next& next, std::vector<Instr>& code) {
    const TermPtr& app = p.expr;
    const std::string& callee_name = app->kids[0]->name;
    std::uint32_t id = sh_.function_id.at(callee_name);
    const FunctionStages& callee = sh_.stages[id];
    NextRef ret = target(next, app->loc);
    code.push_back(move(Operand::callee(0), Operand::imm_cell(from_int(ret.block)), 1));
    for (std::size_t i = 0; i + 1 < app->kids.size(); ++i) {
      const auto& slot = callee.layout.params[i];
      if (slot.size) code.push_back(move(Operand::callee(u32(slot.offset)), operand(app->kids[i + 1]), slot.size));
    }
    Instr rel;
    rel.op = Op::StoreRelAddr;
    rel.dst = Operand::callee(1);
    const FrameSlot* dest = p.dest.empty() ? nullptr : st_.layout.find(p.dest);
    if (dest) {
      rel.aux = u32(dest->offset);
    } else if (st_.layout.scratch) {
      rel.aux = u32(st_.layout.scratch->offset);
    } else if (size_of(app->type) != 0) {
      throw CompileError("codegen", app->loc, "internal: no destination for call result");
    }
    code.push_back(rel);
    Instr push;
    push.op = Op::PushFrame;
    push.aux = u32(callee.layout.frame_size);
    code.push_back(push);
    BlockId entry = sh_.block_base[id];
    code.push_back(jump_to(Op::Jump, {NextRef::Block, entry}));
    auto& sites = sh_.out.functions[id].return_sites;
    if (std::find(sites.begin(), sites.end(), ret.block) == sites.end()) sites.push_back(ret.block);
  }

  Operand gen_test(const Payload& p, std::vector<Instr>& code) {
    Operand scrut = operand(p.scrut);
    const PatternPtr& pat = p.pat;
    if (pat->kind == PatKind::Lit) {
      if (auto b = std::get_if<bool>(&pat->lit)) {
        if (*b) return scrut;
        Instr in;
        in.op = Op::Unary;
        in.prim = Prim::Not;
        in.dst = temp(1);
        in.src = {scrut};
        code.push_back(in);
        return in.dst;
      }
      Instr in;
      in.op = Op::Binary;
      in.prim = std::holds_alternative<double>(pat->lit) ? Prim::EqF : Prim::EqI;
      in.dst = temp(1);
      in.src = {scrut, Operand::imm_cell(literal_cell(pat->lit))};
      code.push_back(in);
      return in.dst;
    }
    if (pat->kind != PatKind::Con) throw CompileError("codegen", pat->loc, "internal: pattern needs no test");
    const auto& ci = data_.constructor(pat->name);
    Operand tag = scrut;
    if (data_.is_recursive(ci.variant)) {
      Instr d;
      d.op = Op::Deref;
      d.dst = temp(1);
      d.src = {scrut};
      d.count = 1;
      d.aux = 0;
      code.push_back(d);
      tag = d.dst;
    }
    Instr in;
    in.op = Op::Binary;
    in.prim = Prim::EqI;
    in.dst = temp(1);
    in.src = {tag, Operand::imm_cell(from_int(ci.tag))};
    code.push_back(in);
    return in.dst;
  }

  /// Copies `count` cells at `offset` within a value to `dst`. Recursive
  /// variant payloads are read through the pool.
  void extract(Operand base, bool via_pool, std::size_t offset, Operand dst, std::size_t count,
               std::vector<Instr>& code) {
    if (count == 0) return;
    if (via_pool) {
      Instr d;
      d.op = Op::Deref;
      d.dst = dst;
      d.src = {base};
      d.count = u32(count);
      d.aux = u32(offset);
      code.push_back(d);
    } else {
      code.push_back(move(dst, base.at(u32(offset)), count));
    }
  }

  void bind_pattern(const PatternPtr& pat, const TypePtr& type, Operand base, bool via_pool, std::size_t offset,
                    std::vector<Instr>& code) {
    switch (pat->kind) {
      case PatKind::Var:
        extract(base, via_pool, offset, var(pat->name, pat->loc), size_of(type), code);
        return;
      case PatKind::Record: {
        TypePtr rt = resolve(type);
        for (const auto& [label, sub] : pat->fields) {
          TypePtr ft;
          for (const auto& [l, t] : rt->fields) {
            if (l == label) ft = t;
          }
          bind_pattern(sub, ft, base, via_pool, offset + data_.field_offset(rt, label), code);
        }
        return;
      }
      case PatKind::Con: {
        const auto& ci = data_.constructor(pat->name);
        bool rec = data_.is_recursive(ci.variant);
        if (rec && via_pool) throw CompileError("codegen", pat->loc, "internal: nested recursive pattern");
        bind_pattern(pat->sub, ci.payload, base, rec || via_pool, offset + 1, code);
        return;
      }
      default:
        return;
    }
  }

  void check_constant_params(DistKind dist, const std::vector<Operand>& params, SourceLoc where) {
    const auto& info = dist_info(dist);
    DistParams p{0.0, 0.0};
    bool all = true;
    try {
      for (std::size_t i = 0; i < params.size(); ++i) {
        Cell cell;
        if (params[i].space == Space::Imm) {
          cell = params[i].imm;
        } else if (params[i].space == Space::Pool) {
          cell = sh_.out.pool[params[i].off];
        } else {
          all = false;
          continue;
        }
        p[i] = info.params[i] == TypeKind::Int ? static_cast<double>(as_int(cell)) : as_float(cell);
        validate_param(dist, i, p[i]);
      }
      if (all) validate_params(dist, p);
    } catch (const ModelError& e) {
      throw CompileError("codegen", where, std::string("invalid distribution parameter: ") + e.what());
    }
  }

  std::vector<Operand> dist_params(const TermPtr& d) {
    std::vector<Operand> out;
    for (const auto& k : d->kids) out.push_back(operand(k));
    check_constant_params(d->dist, out, d->loc);
    return out;
  }

  void gen_payload(const Payload& p, std::vector<Instr>& code) {
    switch (p.kind) {
      case PayloadKind::Bind: {
        std::size_t size = size_of(p.expr->type);
        Operand dst = p.dest.empty() ? temp(size) : var(p.dest, p.expr->loc);
        if (!p.dest.empty() && constant_shape(p.expr)) local_consts_[p.dest] = p.expr;
        gen_expr(p.expr, dst, size, code);
        return;
      }
      case PayloadKind::Return: {
        std::size_t size = size_of(p.expr->type);
        if (!st_.decomposed) {
          gen_expr(p.expr, Operand::local(0), size, code);
          return;
        }
        Operand src;
        if (is_trivial(p.expr)) {
          src = operand(p.expr);
        } else {
          src = temp(size);
          gen_expr(p.expr, src, size, code);
        }
        Instr w;
        w.op = Op::WriteRet;
        w.src = {src};
        w.count = u32(size);
        code.push_back(w);
        return;
      }
      case PayloadKind::PatternBind: {
        Operand scrut = operand(p.scrut);
        bind_pattern(p.pat, p.scrut->type, scrut, false, 0, code);
        return;
      }
      default:
        throw CompileError("codegen", p.expr ? p.expr->loc : SourceLoc{}, "internal: unexpected payload");
    }
  }

  void gen_expr(const TermPtr& e, Operand dst, std::size_t size, std::vector<Instr>& code) {
    switch (e->kind) {
      case TermKind::Var:
      case TermKind::Const:
        if (size) code.push_back(move(dst, operand(e), size));
        return;
      case TermKind::Record:
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
          std::size_t fs = size_of(e->kids[i]->type);
          if (fs) code.push_back(move(dst.at(u32(data_.field_offset(e->type, e->labels[i]))), operand(e->kids[i]), fs));
        }
        return;
      case TermKind::SeqLit: {
        std::size_t off = 0;
        for (const auto& k : e->kids) {
          std::size_t es = size_of(k->type);
          if (es) code.push_back(move(dst.at(u32(off)), operand(k), es));
          off += es;
        }
        return;
      }
      case TermKind::Con: {
        const auto& ci = data_.constructor(e->name);
        if (data_.is_recursive(ci.variant)) {
          ConstEncoder enc(sh_, &local_consts_);
          auto cells = enc.encode(e);
          code.push_back(move(dst, Operand::imm_cell(cells[0]), 1));
          return;
        }
        code.push_back(move(dst, Operand::imm_cell(from_int(ci.tag)), 1));
        std::size_t ps = size_of(ci.payload);
        if (ps) code.push_back(move(dst.at(1), operand(e->kids[0]), ps));
        return;
      }
      case TermKind::Assume: {
        Instr in;
        in.op = Op::Sample;
        in.dist = e->kids[0]->dist;
        in.src = dist_params(e->kids[0]);
        in.dst = dst;
        code.push_back(in);
        return;
      }
      case TermKind::Observe: {
        Instr in;
        in.op = Op::Score;
        in.dist = e->kids[1]->dist;
        in.src = dist_params(e->kids[1]);
        in.src.push_back(operand(e->kids[0]));
        code.push_back(in);
        return;
      }
      case TermKind::Weight: {
        Instr in;
        in.op = Op::AddLogWeight;
        in.src = {operand(e->kids[0])};
        code.push_back(in);
        return;
      }
      case TermKind::App:
        gen_app(e, dst, size, code);
        return;
      default:
        throw CompileError("codegen", e->loc, "internal: unexpected expression in a statement");
    }
  }

  void gen_app(const TermPtr& e, Operand dst, std::size_t size, std::vector<Instr>& code) {
    const TermPtr& head = e->kids[0];
    if (head->kind == TermKind::Builtin) {
      if (head->name == "length") {
        std::size_t n = resolve(resolve(e->kids[1]->type)->length)->len;
        code.push_back(move(dst, Operand::imm_cell(from_int(static_cast<std::int64_t>(n))), 1));
        return;
      }
      if (head->name == "get") {
        TypePtr st = resolve(e->kids[1]->type);
        Instr in;
        in.op = Op::Get;
        in.dst = dst;
        in.src = {operand(e->kids[1]), operand(e->kids[2])};
        if (in.src[0].space == Space::Imm) throw CompileError("codegen", e->loc, "internal: get on an immediate");
        in.count = u32(size);
        in.aux = u32(resolve(st->length)->len);
        if (size) code.push_back(in);
        return;
      }
      Instr in;
      in.prim = prim_by_name(head->name);
      in.op = prim_is_unary(in.prim) ? Op::Unary : Op::Binary;
      in.dst = dst;
      for (std::size_t i = 1; i < e->kids.size(); ++i) in.src.push_back(operand(e->kids[i]));
      code.push_back(in);
      return;
    }
    std::uint32_t id = sh_.function_id.at(head->name);
    if (sh_.stages[id].decomposed) throw CompileError("codegen", e->loc, "internal: decomposed function called directly");
    Instr in;
    in.op = Op::CallDirect;
    in.aux = id;
    in.dst = dst;
    in.count = u32(size);
    for (std::size_t i = 1; i < e->kids.size(); ++i) {
      in.src.push_back(operand(e->kids[i]));
      in.sizes.push_back(u32(size_of(e->kids[i]->type)));
    }
    code.push_back(in);
  }
};

}  // namespace

namespace {

void called_functions(const TermPtr& t, const ProgramIR& ir, std::set<std::string>& out) {
  if (t->kind == TermKind::App && t->kids[0]->kind == TermKind::Var && ir.find(t->kids[0]->name))
    out.insert(t->kids[0]->name);
  for (const auto& k : t->kids) called_functions(k, ir, out);
}

void called_functions(const std::vector<Stmt>& list, const LoweredFunction& f, const ProgramIR& ir,
                      std::set<std::string>& out) {
  for (const auto& s : list) {
    const Payload& p = f.payloads[s.payload];
    if (p.expr) called_functions(p.expr, ir, out);
    called_functions(s.thn, f, ir, out);
    called_functions(s.els, f, ir, out);
  }
}

/// Functions reachable from main through the calls that survive lowering.
/// The others never run and get no blocks.
std::set<std::string> live_functions(const ProgramIR& ir, const std::vector<FunctionStages>& stages) {
  std::set<std::string> live{ir.main().name};
  std::vector<std::size_t> work{ir.functions.size() - 1};
  while (!work.empty()) {
    const auto& lowered = stages[work.back()].lowered;
    work.pop_back();
    std::set<std::string> callees;
    called_functions(lowered.stmts, lowered, ir, callees);
    for (const auto& c : callees) {
      if (!live.insert(c).second) continue;
      for (std::size_t i = 0; i < ir.functions.size(); ++i)
        if (ir.functions[i].name == c) work.push_back(i);
    }
  }
  return live;
}

}  // namespace

BlockProgram generate(const ProgramIR& ir, const std::vector<FunctionStages>& stages) {
  BlockProgram out;
  out.data = ir.data;
  Shared sh{ir, stages, out, {}, {}, {}};
  for (const auto& g : ir.globals) {
    ConstEncoder enc(sh, nullptr);
    auto cells = enc.encode(g.value);
    sh.global_offset[g.name] = u32(out.pool.size());
    out.pool.insert(out.pool.end(), cells.begin(), cells.end());
  }
  std::size_t n = ir.functions.size();
  out.functions.resize(n);
  sh.block_base.assign(n, kStop);
  std::size_t main_index = n - 1;
  out.main_function = u32(main_index);
  // Main's blocks first so that the program entry is block 0.
  std::vector<std::size_t> order{main_index};
  for (std::size_t i = 0; i < main_index; ++i) order.push_back(i);
  for (std::size_t i = 0; i < n; ++i) {
    sh.function_id[ir.functions[i].name] = u32(i);
    auto& cf = out.functions[i];
    cf.name = ir.functions[i].name;
    cf.decomposed = stages[i].decomposed;
    cf.result_size = u32(ir.data.size_of(ir.functions[i].result_type));
    if (cf.decomposed) cf.frame_size = u32(stages[i].layout.frame_size);
  }
  auto live = live_functions(ir, stages);
  for (auto i : order) {
    if (!stages[i].decomposed || !live.count(ir.functions[i].name)) continue;
    sh.block_base[i] = static_cast<BlockId>(out.blocks.size());
    out.functions[i].entry = sh.block_base[i] + static_cast<BlockId>(stages[i].blocks.entry);
    for (const auto& [b, _] : stages[i].blocks.blocks) {
      BlockInfo info;
      info.function = u32(i);
      info.local_index = b;
      out.blocks.push_back(std::move(info));
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (live.count(ir.functions[i].name)) FunctionGen(sh, i).run();
  out.entry = out.functions[main_index].entry;
  out.result_type = ir.main().result_type;
  out.result_cells = u32(ir.data.size_of(out.result_type));
  validate_program(out);
  return out;
}

}  // namespace pcfg
