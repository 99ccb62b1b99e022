#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pcfg/cell.hpp"
#include "pcfg/dists.hpp"
#include "pcfg/frames.hpp"
#include "pcfg/rng.hpp"
#include "pcfg/term.hpp"
#include "pcfg/types.hpp"

namespace pcfg {

using BlockId = std::int32_t;
inline constexpr BlockId kStop = -1;

/// Where an operand lives.
///   Local:  the current block's scratch window (not preserved across blocks).
///   Frame:  the current function's stack frame, at stackPtr - frameSize on
///           block entry.
///   Callee: the frame being built for a call, at the current stackPtr.
///   Pool:   the shared constant pool.
///   Imm:    the cell itself.
enum class Space : std::uint8_t { Local, Frame, Callee, Pool, Imm };

struct Operand {
  Space space = Space::Imm;
  std::uint32_t off = 0;
  Cell imm = 0;

  static Operand local(std::uint32_t o) { return {Space::Local, o, 0}; }
  static Operand frame(std::uint32_t o) { return {Space::Frame, o, 0}; }
  static Operand callee(std::uint32_t o) { return {Space::Callee, o, 0}; }
  static Operand pool(std::uint32_t o) { return {Space::Pool, o, 0}; }
  static Operand imm_cell(Cell c) { return {Space::Imm, 0, c}; }
  Operand at(std::uint32_t k) const;
};

enum class Prim : std::uint8_t {
  AddI, SubI, MulI, DivI, ModI, NegI, EqI, NeqI, LtI, LeqI, GtI, GeqI,
  AddF, SubF, MulF, DivF, Pow, NegF, EqF, NeqF, LtF, LeqF, GtF, GeqF,
  Log, Exp, Sqrt, IntToFloat, And, Or, Not
};

Prim prim_by_name(const std::string& builtin);
const char* prim_name(Prim p);
bool prim_is_unary(Prim p);

struct NextRef {
  enum Kind : std::uint8_t { Block, Stop, Ra } kind = Stop;
  BlockId block = kStop;
};

enum class Op : std::uint8_t {
  Move,          // dst[0..count) = src[0][0..count)
  Unary,         // dst = prim src[0]
  Binary,        // dst = src[0] prim src[1]
  Get,           // dst[0..count) = src[0][idx*count ..], idx = src[1], aux = length
  Deref,         // dst[0..count) = pool[ptr + aux ..], ptr = src[0]
  Sample,        // dst = draw from dist(src...)
  Score,         // logWeight += log density of src.back() under dist(src[0..n-1))
  AddLogWeight,  // logWeight += src[0]
  Branch,        // if src[0] then thn else els
  CallDirect,    // dst[0..count) = function aux applied to src (sizes)
  StoreRelAddr,  // dst = stack-relative address of frame cell aux
  PushFrame,     // stackPtr += aux
  PopFrame,      // stackPtr -= aux
  WriteRet,      // stack[frame[retValLoc]..][0..count) = src[0]
  Checkpoint,    // next = target; stop the particle
  Jump           // next = target; continue without a checkpoint
};

struct Instr {
  Op op = Op::Move;
  Prim prim = Prim::AddI;
  DistKind dist = DistKind::Bernoulli;
  Operand dst;
  std::vector<Operand> src;
  std::vector<std::uint32_t> sizes;
  std::uint32_t count = 1;
  std::uint32_t aux = 0;
  NextRef target;
  std::vector<Instr> thn, els;
};

struct BlockInfo {
  std::uint32_t function = 0;     // index into BlockProgram::functions
  std::uint32_t local_index = 0;  // block number within the function
  std::vector<Instr> code;
};

struct CompiledFunction {
  std::string name;
  bool decomposed = false;
  std::uint32_t frame_size = 0;  // decomposed only
  std::uint32_t local_size = 0;
  BlockId entry = kStop;         // decomposed only
  std::vector<Instr> body;       // non-decomposed only
  std::uint32_t result_size = 0;
  std::vector<std::uint32_t> param_offsets;  // non-decomposed: in the local window
  std::vector<BlockId> return_sites;         // blocks that calls return to
};

/// The compiled PCFG: blocks (B), entry (b0) and the stop sentinel, with
/// the data sim needs to run them.
struct BlockProgram {
  std::vector<BlockInfo> blocks;
  std::vector<CompiledFunction> functions;
  std::vector<Cell> pool;
  BlockId entry = 0;
  std::uint32_t main_function = 0;
  std::uint32_t result_cells = 0;
  TypePtr result_type;
  DataEnv data;
};

/// Throws CompileError if a target is out of range or some block cannot
/// reach stop.
void validate_program(const BlockProgram& p);

std::string dump_program(const BlockProgram& p);
std::string instr_to_string(const Instr& i);

enum class CellTag : std::uint8_t { Data, RelAddr, BlockRef };

struct ParticleState {
  std::vector<Cell> stack;  // grows on demand up to the capacity
  std::size_t stack_ptr = 0;
  double log_weight = 0.0;
  BlockId next = kStop;
  Rng rng;
  std::vector<CellTag> tags;  // only with debug tagging enabled
};

/// Initial state: main's frame holds ra = stop and retValLoc = 0, which
/// points at the result area below it.
ParticleState initial_state(const BlockProgram& p, std::uint64_t rng_key, bool debug_tags = false);

/// Copies only the live prefix [0, stackPtr) of the stack. Returns the
/// number of stack cells copied.
std::size_t copy_state(const ParticleState& from, ParticleState& to);
ParticleState copy_state(const ParticleState& from);

/// Forced draws: each assume takes the next cell instead of sampling.
/// With `record` set, sampled draws are appended there instead.
struct Tape {
  std::vector<Cell> values;
  std::size_t pos = 0;
  std::vector<Cell>* record = nullptr;
};

struct SimResult {
  BlockId next = kStop;
  bool checkpoint = true;
};

struct MachineOptions {
  std::size_t stack_capacity = 4096;
  std::size_t max_call_depth = 2000;
  /// Follow non-checkpoint transitions inside one sim call. With false,
  /// sim returns after every block.
  bool follow_jumps = true;
  Tape* tape = nullptr;
  std::function<void(BlockId from, BlockId next, bool checkpoint)> trace;
};

/// Executes blocks for one particle at a time. Holds only scratch space,
/// so one machine per thread.
class Machine {
 public:
  Machine(const BlockProgram& program, MachineOptions options = {});

  /// sim(b, s): runs block b (and the chain of direct jumps after it) on s.
  /// sim(stop, s) = (stop, s, true).
  SimResult sim(BlockId b, ParticleState& s);

  /// Runs from s.next to termination ignoring checkpoints.
  void run_to_end(ParticleState& s);

  MachineOptions& options() { return options_; }

 private:
  struct Ctx;
  enum class Flow { Continue, Jumped };

  const BlockProgram& program_;
  MachineOptions options_;
  std::vector<Cell> locals_;

  Flow exec(const std::vector<Instr>& code, Ctx& c);
  Cell read(const Operand& o, Ctx& c);
  void write(const Operand& o, Cell v, Ctx& c);
  void call_direct(const Instr& in, Ctx& c);
};

/// Runs a fresh particle to termination (importance sampling, no
/// resampling).
ParticleState run_single(const BlockProgram& p, std::uint64_t rng_key, MachineOptions options = {});

/// Result cells [0, result_cells) of a terminated particle.
std::vector<Cell> result_cells(const BlockProgram& p, const ParticleState& s);

/// Structured view of a result.
struct Value {
  enum Kind { Int, Float, Bool, Record, Seq, Con } kind = Record;
  Cell scalar = 0;
  std::string con;
  std::vector<std::string> labels;
  std::vector<Value> kids;

  bool operator==(const Value&) const = default;
};

Value decode_value(const Cell* cells, const TypePtr& type, const DataEnv& data, const std::vector<Cell>& pool);
std::string value_to_string(const Value& v);
/// Int, Float and Bool values as numbers; false otherwise.
bool value_as_number(const Value& v, double& out);

}  // namespace pcfg
