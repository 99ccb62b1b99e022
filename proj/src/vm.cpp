#include "pcfg/vm.hpp"

#include <cmath>
#include <deque>
#include <map>

#include "pcfg/error.hpp"

namespace pcfg {

Operand Operand::at(std::uint32_t k) const {
  if (space == Space::Imm) return *this;
  Operand o = *this;
  o.off += k;
  return o;
}

namespace {

struct PrimEntry {
  Prim prim;
  const char* name;
  bool unary;
};

const PrimEntry kPrims[] = {
    {Prim::AddI, "addi", false}, {Prim::SubI, "subi", false}, {Prim::MulI, "muli", false},
    {Prim::DivI, "divi", false}, {Prim::ModI, "modi", false}, {Prim::NegI, "negi", true},
    {Prim::EqI, "eqi", false},   {Prim::NeqI, "neqi", false}, {Prim::LtI, "lti", false},
    {Prim::LeqI, "leqi", false}, {Prim::GtI, "gti", false},   {Prim::GeqI, "geqi", false},
    {Prim::AddF, "addf", false}, {Prim::SubF, "subf", false}, {Prim::MulF, "mulf", false},
    {Prim::DivF, "divf", false}, {Prim::Pow, "pow", false},   {Prim::NegF, "negf", true},
    {Prim::EqF, "eqf", false},   {Prim::NeqF, "neqf", false}, {Prim::LtF, "ltf", false},
    {Prim::LeqF, "leqf", false}, {Prim::GtF, "gtf", false},   {Prim::GeqF, "geqf", false},
    {Prim::Log, "log", true},    {Prim::Exp, "exp", true},    {Prim::Sqrt, "sqrt", true},
    {Prim::IntToFloat, "int2float", true}, {Prim::And, "and", false}, {Prim::Or, "or", false},
    {Prim::Not, "not", true},
};

Cell unary(Prim p, Cell a) {
  switch (p) {
    case Prim::NegI:
      return from_int(-as_int(a));
    case Prim::NegF:
      return from_float(-as_float(a));
    case Prim::Log:
      return from_float(std::log(as_float(a)));
    case Prim::Exp:
      return from_float(std::exp(as_float(a)));
    case Prim::Sqrt:
      return from_float(std::sqrt(as_float(a)));
    case Prim::IntToFloat:
      return from_float(static_cast<double>(as_int(a)));
    case Prim::Not:
      return from_bool(!as_bool(a));
    default:
      throw ModelError(std::string("bad unary primitive ") + prim_name(p));
  }
}

Cell binary(Prim p, Cell a, Cell b) {
  switch (p) {
    case Prim::AddI:
      return from_int(static_cast<std::int64_t>(static_cast<std::uint64_t>(as_int(a)) + static_cast<std::uint64_t>(as_int(b))));
    case Prim::SubI:
      return from_int(static_cast<std::int64_t>(static_cast<std::uint64_t>(as_int(a)) - static_cast<std::uint64_t>(as_int(b))));
    case Prim::MulI:
      return from_int(static_cast<std::int64_t>(static_cast<std::uint64_t>(as_int(a)) * static_cast<std::uint64_t>(as_int(b))));
    case Prim::DivI:
      if (as_int(b) == 0) throw ModelError("integer division by zero");
      return from_int(as_int(a) / as_int(b));
    case Prim::ModI:
      if (as_int(b) == 0) throw ModelError("integer division by zero");
      return from_int(as_int(a) % as_int(b));
    case Prim::EqI:
      return from_bool(as_int(a) == as_int(b));
    case Prim::NeqI:
      return from_bool(as_int(a) != as_int(b));
    case Prim::LtI:
      return from_bool(as_int(a) < as_int(b));
    case Prim::LeqI:
      return from_bool(as_int(a) <= as_int(b));
    case Prim::GtI:
      return from_bool(as_int(a) > as_int(b));
    case Prim::GeqI:
      return from_bool(as_int(a) >= as_int(b));
    case Prim::AddF:
      return from_float(as_float(a) + as_float(b));
    case Prim::SubF:
      return from_float(as_float(a) - as_float(b));
    case Prim::MulF:
      return from_float(as_float(a) * as_float(b));
    case Prim::DivF:
      return from_float(as_float(a) / as_float(b));
    case Prim::Pow:
      return from_float(std::pow(as_float(a), as_float(b)));
    case Prim::EqF:
      return from_bool(as_float(a) == as_float(b));
    case Prim::NeqF:
      return from_bool(as_float(a) != as_float(b));
    case Prim::LtF:
      return from_bool(as_float(a) < as_float(b));
    case Prim::LeqF:
      return from_bool(as_float(a) <= as_float(b));
    case Prim::GtF:
      return from_bool(as_float(a) > as_float(b));
    case Prim::GeqF:
      return from_bool(as_float(a) >= as_float(b));
    case Prim::And:
      return from_bool(as_bool(a) && as_bool(b));
    case Prim::Or:
      return from_bool(as_bool(a) || as_bool(b));
    default:
      throw ModelError(std::string("bad binary primitive ") + prim_name(p));
  }
}

DistParams read_params(DistKind kind, const Cell* cells) {
  const auto& info = dist_info(kind);
  DistParams p{0.0, 0.0};
  for (std::size_t i = 0; i < info.params.size(); ++i) {
    p[i] = info.params[i] == TypeKind::Int ? static_cast<double>(as_int(cells[i])) : as_float(cells[i]);
  }
  return p;
}

void grow(ParticleState& s, std::size_t n) {
  if (s.stack.size() < n) {
    s.stack.resize(n, 0);
    if (!s.tags.empty()) s.tags.resize(n, CellTag::Data);
  }
}

[[noreturn]] void overflow() { throw ModelError("stack overflow"); }

}  // namespace

Prim prim_by_name(const std::string& builtin) {
  for (const auto& e : kPrims) {
    if (builtin == e.name) return e.prim;
  }
  throw CompileError("codegen", {}, "no primitive for builtin '" + builtin + "'");
}

const char* prim_name(Prim p) {
  for (const auto& e : kPrims) {
    if (e.prim == p) return e.name;
  }
  return "?";
}

bool prim_is_unary(Prim p) {
  for (const auto& e : kPrims) {
    if (e.prim == p) return e.unary;
  }
  return false;
}

struct Machine::Ctx {
  ParticleState& s;
  std::size_t frame_base;
  std::size_t local_base;
  std::size_t local_size;
  std::size_t depth;
  BlockId next = kStop;
  bool checkpoint = false;
};

Machine::Machine(const BlockProgram& program, MachineOptions options)
    : program_(program), options_(std::move(options)) {}

Cell Machine::read(const Operand& o, Ctx& c) {
  switch (o.space) {
    case Space::Imm:
      return o.imm;
    case Space::Local:
      return locals_[c.local_base + o.off];
    case Space::Frame: {
      std::size_t i = c.frame_base + o.off;
      if (i >= c.s.stack.size()) throw ModelError("frame read out of range");
      return c.s.stack[i];
    }
    case Space::Callee: {
      std::size_t i = c.s.stack_ptr + o.off;
      if (i >= c.s.stack.size()) throw ModelError("frame read out of range");
      return c.s.stack[i];
    }
    case Space::Pool:
      return program_.pool[o.off];
  }
  return 0;
}

void Machine::write(const Operand& o, Cell v, Ctx& c) {
  switch (o.space) {
    case Space::Local:
      locals_[c.local_base + o.off] = v;
      return;
    case Space::Frame: {
      std::size_t i = c.frame_base + o.off;
      c.s.stack[i] = v;
      if (!c.s.tags.empty()) c.s.tags[i] = CellTag::Data;
      return;
    }
    case Space::Callee: {
      std::size_t i = c.s.stack_ptr + o.off;
      if (i >= options_.stack_capacity) overflow();
      grow(c.s, i + 1);
      c.s.stack[i] = v;
      if (!c.s.tags.empty()) c.s.tags[i] = CellTag::Data;
      return;
    }
    default:
      throw ModelError("write to a read-only operand");
  }
}

void Machine::call_direct(const Instr& in, Ctx& c) {
  const CompiledFunction& fn = program_.functions[in.aux];
  if (c.depth + 1 > options_.max_call_depth) throw ModelError("call depth limit exceeded in " + fn.name);
  std::size_t base = c.local_base + c.local_size;
  if (locals_.size() < base + fn.local_size) locals_.resize(base + fn.local_size);
  for (std::size_t i = 0; i < in.src.size(); ++i) {
    for (std::uint32_t k = 0; k < in.sizes[i]; ++k) {
      locals_[base + fn.param_offsets[i] + k] = read(in.src[i].at(k), c);
    }
  }
  Ctx inner{c.s, c.frame_base, base, fn.local_size, c.depth + 1};
  if (exec(fn.body, inner) != Flow::Continue) throw ModelError("control transfer inside " + fn.name);
  for (std::uint32_t k = 0; k < in.count; ++k) write(in.dst.at(k), locals_[base + k], c);
}

Machine::Flow Machine::exec(const std::vector<Instr>& code, Ctx& c) {
  ParticleState& s = c.s;
  for (const Instr& in : code) {
    switch (in.op) {
      case Op::Move:
        for (std::uint32_t k = 0; k < in.count; ++k) write(in.dst.at(k), read(in.src[0].at(k), c), c);
        break;
      case Op::Unary:
        write(in.dst, unary(in.prim, read(in.src[0], c)), c);
        break;
      case Op::Binary:
        write(in.dst, binary(in.prim, read(in.src[0], c), read(in.src[1], c)), c);
        break;
      case Op::Get: {
        std::int64_t idx = as_int(read(in.src[1], c));
        if (idx < 0 || idx >= static_cast<std::int64_t>(in.aux)) {
          throw ModelError("index " + std::to_string(idx) + " out of range for sequence of length " +
                           std::to_string(in.aux));
        }
        auto base = static_cast<std::uint32_t>(idx) * in.count;
        for (std::uint32_t k = 0; k < in.count; ++k) write(in.dst.at(k), read(in.src[0].at(base + k), c), c);
        break;
      }
      case Op::Deref: {
        std::int64_t ptr = as_int(read(in.src[0], c)) + in.aux;
        if (ptr < 0 || static_cast<std::size_t>(ptr) + in.count > program_.pool.size()) {
          throw ModelError("constant pool access out of range");
        }
        for (std::uint32_t k = 0; k < in.count; ++k) {
          write(in.dst.at(k), program_.pool[static_cast<std::size_t>(ptr) + k], c);
        }
        break;
      }
      case Op::Sample: {
        Cell cells[2] = {0, 0};
        for (std::size_t i = 0; i < in.src.size(); ++i) cells[i] = read(in.src[i], c);
        DistParams p = read_params(in.dist, cells);
        validate_params(in.dist, p);
        Cell v;
        Tape* tape = options_.tape;
        if (tape && !tape->record) {
          if (tape->pos >= tape->values.size()) throw ModelError("tape exhausted");
          v = tape->values[tape->pos++];
        } else {
          v = sample(in.dist, p, s.rng);
          if (tape) tape->record->push_back(v);
        }
        write(in.dst, v, c);
        break;
      }
      case Op::Score: {
        Cell cells[2] = {0, 0};
        std::size_t n = in.src.size() - 1;
        for (std::size_t i = 0; i < n; ++i) cells[i] = read(in.src[i], c);
        DistParams p = read_params(in.dist, cells);
        validate_params(in.dist, p);
        s.log_weight += log_density(in.dist, p, read(in.src[n], c));
        if (std::isnan(s.log_weight)) throw ModelError("weight became NaN");
        break;
      }
      case Op::AddLogWeight: {
        double w = as_float(read(in.src[0], c));
        if (std::isnan(w)) throw ModelError("weight is NaN");
        s.log_weight += w;
        if (std::isnan(s.log_weight)) throw ModelError("weight became NaN");
        break;
      }
      case Op::Branch:
        if (exec(as_bool(read(in.src[0], c)) ? in.thn : in.els, c) == Flow::Jumped) return Flow::Jumped;
        break;
      case Op::CallDirect:
        call_direct(in, c);
        break;
      case Op::StoreRelAddr: {
        write(in.dst, from_int(static_cast<std::int64_t>(c.frame_base + in.aux)), c);
        if (!s.tags.empty() && in.dst.space == Space::Callee) s.tags[s.stack_ptr + in.dst.off] = CellTag::RelAddr;
        break;
      }
      case Op::PushFrame:
        if (s.stack_ptr + in.aux > options_.stack_capacity) overflow();
        s.stack_ptr += in.aux;
        grow(s, s.stack_ptr);
        break;
      case Op::PopFrame:
        s.stack_ptr -= in.aux;
        break;
      case Op::WriteRet: {
        std::int64_t rel = as_int(s.stack[c.frame_base + 1]);
        if (rel < 0 || static_cast<std::size_t>(rel) + in.count > s.stack.size()) {
          throw ModelError("return address out of range");
        }
        for (std::uint32_t k = 0; k < in.count; ++k) {
          std::size_t i = static_cast<std::size_t>(rel) + k;
          s.stack[i] = read(in.src[0].at(k), c);
          if (!s.tags.empty()) s.tags[i] = CellTag::Data;
        }
        break;
      }
      case Op::Checkpoint:
      case Op::Jump:
        switch (in.target.kind) {
          case NextRef::Block:
            c.next = in.target.block;
            break;
          case NextRef::Stop:
            c.next = kStop;
            break;
          case NextRef::Ra:
            c.next = static_cast<BlockId>(as_int(s.stack[c.frame_base]));
            break;
        }
        c.checkpoint = in.op == Op::Checkpoint;
        return Flow::Jumped;
    }
  }
  return Flow::Continue;
}

SimResult Machine::sim(BlockId b, ParticleState& s) {
  if (b == kStop) return {kStop, true};
  for (;;) {
    if (b < 0 || static_cast<std::size_t>(b) >= program_.blocks.size()) {
      throw ModelError("invalid block index " + std::to_string(b));
    }
    const BlockInfo& blk = program_.blocks[static_cast<std::size_t>(b)];
    const CompiledFunction& fn = program_.functions[blk.function];
    if (s.stack_ptr < fn.frame_size) throw ModelError("stack underflow");
    if (locals_.size() < fn.local_size) locals_.resize(fn.local_size);
    Ctx c{s, s.stack_ptr - fn.frame_size, 0, fn.local_size, 0};
    if (exec(blk.code, c) != Flow::Jumped) throw ModelError("block " + std::to_string(b) + " has no successor");
    if (options_.trace) options_.trace(b, c.next, c.checkpoint);
    s.next = c.next;
    if (c.checkpoint) return {c.next, true};
    if (c.next == kStop || !options_.follow_jumps) return {c.next, false};
    b = c.next;
  }
}

void Machine::run_to_end(ParticleState& s) {
  while (s.next != kStop) sim(s.next, s);
}

ParticleState initial_state(const BlockProgram& p, std::uint64_t rng_key, bool debug_tags) {
  ParticleState s;
  std::size_t frame = p.functions[p.main_function].frame_size;
  s.stack.assign(p.result_cells + frame, 0);
  if (debug_tags) s.tags.assign(s.stack.size(), CellTag::Data);
  s.stack[p.result_cells] = from_int(kStop);
  s.stack[p.result_cells + 1] = from_int(0);
  if (debug_tags) {
    s.tags[p.result_cells] = CellTag::BlockRef;
    s.tags[p.result_cells + 1] = CellTag::RelAddr;
  }
  s.stack_ptr = s.stack.size();
  s.next = p.entry;
  s.rng = Rng(rng_key);
  return s;
}

std::size_t copy_state(const ParticleState& from, ParticleState& to) {
  std::size_t n = from.stack_ptr;
  to.stack.assign(from.stack.begin(), from.stack.begin() + static_cast<std::ptrdiff_t>(n));
  if (from.tags.empty()) {
    to.tags.clear();
  } else {
    to.tags.assign(from.tags.begin(), from.tags.begin() + static_cast<std::ptrdiff_t>(n));
  }
  to.stack_ptr = n;
  to.log_weight = from.log_weight;
  to.next = from.next;
  to.rng = from.rng;
  return n;
}

ParticleState copy_state(const ParticleState& from) {
  ParticleState to;
  copy_state(from, to);
  return to;
}

ParticleState run_single(const BlockProgram& p, std::uint64_t rng_key, MachineOptions options) {
  Machine m(p, std::move(options));
  ParticleState s = initial_state(p, rng_key);
  m.run_to_end(s);
  return s;
}

std::vector<Cell> result_cells(const BlockProgram& p, const ParticleState& s) {
  return {s.stack.begin(), s.stack.begin() + p.result_cells};
}

Value decode_value(const Cell* cells, const TypePtr& type, const DataEnv& data, const std::vector<Cell>& pool) {
  TypePtr t = resolve(type);
  Value v;
  switch (t->kind) {
    case TypeKind::Int:
      v.kind = Value::Int;
      v.scalar = cells[0];
      return v;
    case TypeKind::Float:
      v.kind = Value::Float;
      v.scalar = cells[0];
      return v;
    case TypeKind::Bool:
      v.kind = Value::Bool;
      v.scalar = from_bool(as_bool(cells[0]));
      return v;
    case TypeKind::Record:
      v.kind = Value::Record;
      for (const auto& [label, ft] : t->fields) {
        v.labels.push_back(label);
        v.kids.push_back(decode_value(cells + data.field_offset(t, label), ft, data, pool));
      }
      return v;
    case TypeKind::Seq: {
      v.kind = Value::Seq;
      std::size_t n = resolve(t->length)->len;
      std::size_t es = data.size_of(t->elem);
      for (std::size_t i = 0; i < n; ++i) v.kids.push_back(decode_value(cells + i * es, t->elem, data, pool));
      return v;
    }
    case TypeKind::Variant: {
      v.kind = Value::Con;
      const Cell* node = cells;
      if (data.is_recursive(t->name)) node = pool.data() + as_int(cells[0]);
      auto tag = as_int(node[0]);
      for (const auto& name : data.variant(t->name).constructors) {
        const auto& ci = data.constructor(name);
        if (ci.tag == tag) {
          v.con = name;
          v.kids.push_back(decode_value(node + 1, ci.payload, data, pool));
          return v;
        }
      }
      throw ModelError("bad constructor tag");
    }
    default:
      throw ModelError("cannot decode a value of type " + type_to_string(t));
  }
}

std::string value_to_string(const Value& v) {
  switch (v.kind) {
    case Value::Int:
      return std::to_string(as_int(v.scalar));
    case Value::Float:
      return format_float(as_float(v.scalar));
    case Value::Bool:
      return as_bool(v.scalar) ? "true" : "false";
    case Value::Record: {
      std::string out = "{";
      for (std::size_t i = 0; i < v.kids.size(); ++i) {
        if (i) out += ", ";
        out += v.labels[i] + " = " + value_to_string(v.kids[i]);
      }
      return out + "}";
    }
    case Value::Seq: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.kids.size(); ++i) {
        if (i) out += ", ";
        out += value_to_string(v.kids[i]);
      }
      return out + "]";
    }
    case Value::Con: {
      const Value& payload = v.kids[0];
      if (payload.kind == Value::Record && payload.kids.empty()) return v.con;
      return v.con + " " + value_to_string(payload);
    }
  }
  return "?";
}

bool value_as_number(const Value& v, double& out) {
  switch (v.kind) {
    case Value::Int:
      out = static_cast<double>(as_int(v.scalar));
      return true;
    case Value::Float:
      out = as_float(v.scalar);
      return true;
    case Value::Bool:
      out = as_bool(v.scalar) ? 1.0 : 0.0;
      return true;
    default:
      return false;
  }
}

namespace {

std::string operand_to_string(const Operand& o) {
  switch (o.space) {
    case Space::Local:
      return "L" + std::to_string(o.off);
    case Space::Frame:
      return "sf[" + std::to_string(o.off) + "]";
    case Space::Callee:
      return "callsf[" + std::to_string(o.off) + "]";
    case Space::Pool:
      return "pool[" + std::to_string(o.off) + "]";
    case Space::Imm: {
      std::int64_t i = as_int(o.imm);
      if (i > -(std::int64_t{1} << 40) && i < (std::int64_t{1} << 40)) return "#" + std::to_string(i);
      return "#" + format_float(as_float(o.imm));
    }
  }
  return "?";
}

std::string target_to_string(const NextRef& t) {
  switch (t.kind) {
    case NextRef::Block:
      return std::to_string(t.block);
    case NextRef::Stop:
      return "stop";
    case NextRef::Ra:
      return "sf->ra";
  }
  return "?";
}

std::string sized(const Operand& o, std::uint32_t count) {
  std::string s = operand_to_string(o);
  if (count != 1) s += "x" + std::to_string(count);
  return s;
}

void dump_code(const std::vector<Instr>& code, int ind, std::string& out) {
  for (const auto& in : code) {
    out += std::string(static_cast<std::size_t>(ind), ' ') + instr_to_string(in) + "\n";
    if (in.op == Op::Branch) {
      dump_code(in.thn, ind + 4, out);
      out += std::string(static_cast<std::size_t>(ind), ' ') + "else\n";
      dump_code(in.els, ind + 4, out);
    }
  }
}

}  // namespace

std::string instr_to_string(const Instr& in) {
  auto srcs = [&] {
    std::string s;
    for (std::size_t i = 0; i < in.src.size(); ++i) {
      if (i) s += ", ";
      s += operand_to_string(in.src[i]);
    }
    return s;
  };
  switch (in.op) {
    case Op::Move:
      return sized(in.dst, in.count) + " = " + sized(in.src[0], in.count);
    case Op::Unary:
    case Op::Binary:
      return operand_to_string(in.dst) + " = " + prim_name(in.prim) + " " + srcs();
    case Op::Get:
      return sized(in.dst, in.count) + " = get " + srcs() + " (length " + std::to_string(in.aux) + ")";
    case Op::Deref:
      return sized(in.dst, in.count) + " = deref " + srcs() + " + " + std::to_string(in.aux);
    case Op::Sample:
      return operand_to_string(in.dst) + " = SAMPLE(" + dist_info(in.dist).name + ", " + srcs() + ")";
    case Op::Score:
      return std::string("WEIGHT(") + dist_info(in.dist).name + ", " + srcs() + ")";
    case Op::AddLogWeight:
      return "WEIGHT(" + srcs() + ")";
    case Op::Branch:
      return "if " + srcs();
    case Op::CallDirect:
      return sized(in.dst, in.count) + " = call-direct #" + std::to_string(in.aux) + "(" + srcs() + ")";
    case Op::StoreRelAddr:
      return operand_to_string(in.dst) + " = relative address of sf[" + std::to_string(in.aux) + "]";
    case Op::PushFrame:
      return "PSTATE.stackPtr += " + std::to_string(in.aux);
    case Op::PopFrame:
      return "PSTATE.stackPtr -= " + std::to_string(in.aux);
    case Op::WriteRet:
      return "*(PSTATE.stack + sf->retValLoc) = " + sized(in.src[0], in.count);
    case Op::Checkpoint:
      return "NEXT = " + target_to_string(in.target) + "; checkpoint";
    case Op::Jump:
      return "BBLOCK_JUMP(" + target_to_string(in.target) + ")";
  }
  return "?";
}

std::string dump_program(const BlockProgram& p) {
  std::string out = "entry " + std::to_string(p.entry) + ", result " + std::to_string(p.result_cells) +
                    " cell(s), pool " + std::to_string(p.pool.size()) + " cell(s)\n";
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    const auto& fn = p.functions[f];
    out += "\nfunction #" + std::to_string(f) + " " + fn.name;
    if (fn.decomposed) {
      out += " (frame " + std::to_string(fn.frame_size) + ", locals " + std::to_string(fn.local_size) + ")\n";
      for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        if (p.blocks[b].function != f) continue;
        out += "BBLOCK(" + std::to_string(b) + ")  -- " + fn.name + " block " +
               std::to_string(p.blocks[b].local_index) + "\n";
        dump_code(p.blocks[b].code, 2, out);
      }
    } else {
      out += " (direct, locals " + std::to_string(fn.local_size) + ")\n";
      dump_code(fn.body, 2, out);
    }
  }
  return out;
}

namespace {

void collect_edges(const std::vector<Instr>& code, std::vector<BlockId>& out, bool& to_ra) {
  for (const auto& in : code) {
    if (in.op == Op::Branch) {
      collect_edges(in.thn, out, to_ra);
      collect_edges(in.els, out, to_ra);
    } else if (in.op == Op::Checkpoint || in.op == Op::Jump) {
      if (in.target.kind == NextRef::Block) out.push_back(in.target.block);
      if (in.target.kind == NextRef::Stop) out.push_back(kStop);
      if (in.target.kind == NextRef::Ra) to_ra = true;
    }
  }
}

}  // namespace

void validate_program(const BlockProgram& p) {
  auto n = static_cast<BlockId>(p.blocks.size());
  if (p.entry < 0 || p.entry >= n) throw CompileError("codegen", {}, "entry block out of range");
  // Reverse edges; node n stands for stop.
  std::vector<std::vector<BlockId>> rev(static_cast<std::size_t>(n) + 1);
  auto node = [&](BlockId b) { return b == kStop ? n : b; };
  for (BlockId b = 0; b < n; ++b) {
    const auto& blk = p.blocks[static_cast<std::size_t>(b)];
    std::vector<BlockId> succ;
    bool to_ra = false;
    collect_edges(blk.code, succ, to_ra);
    if (to_ra) {
      const auto& fn = p.functions[blk.function];
      if (blk.function == p.main_function) succ.push_back(kStop);
      for (auto r : fn.return_sites) succ.push_back(r);
    }
    for (auto t : succ) {
      if (t != kStop && (t < 0 || t >= n)) {
        throw CompileError("codegen", {}, "block " + std::to_string(b) + " targets invalid block " + std::to_string(t));
      }
      rev[static_cast<std::size_t>(node(t))].push_back(b);
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  std::deque<BlockId> queue{n};
  seen[static_cast<std::size_t>(n)] = true;
  while (!queue.empty()) {
    BlockId b = queue.front();
    queue.pop_front();
    for (auto pred : rev[static_cast<std::size_t>(b)]) {
      if (!seen[static_cast<std::size_t>(pred)]) {
        seen[static_cast<std::size_t>(pred)] = true;
        queue.push_back(pred);
      }
    }
  }
  for (BlockId b = 0; b < n; ++b) {
    if (!seen[static_cast<std::size_t>(b)]) {
      const auto& blk = p.blocks[static_cast<std::size_t>(b)];
      throw CompileError("codegen", {}, "stop is not reachable from block " + std::to_string(blk.local_index) +
                                            " of " + p.functions[blk.function].name);
    }
  }
}

}  // namespace pcfg
