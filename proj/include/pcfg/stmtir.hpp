#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pcfg/program.hpp"

namespace pcfg {

enum class StmtKind { Checkpoint, Call, If, Other };

/// Abstract statement. `payload` indexes the owning function's payload
/// table; the decomposition algorithm never looks at it.
struct Stmt {
  StmtKind kind = StmtKind::Other;
  std::uint32_t payload = 0;
  std::vector<Stmt> thn, els;
};

struct Next {
  enum Kind { Return, Block } kind = Return;
  std::uint32_t block = 0;

  static Next ret() { return {Return, 0}; }
  static Next to(std::uint32_t b) { return {Block, b}; }
  bool operator==(const Next&) const = default;
};
using NextPlus = std::optional<Next>;

enum class TStmtKind { Checkpoint, Call, If, Jump, Other };

struct TStmt {
  TStmtKind kind = TStmtKind::Other;
  Next next;
  std::uint32_t payload = 0;
  std::vector<TStmt> thn, els;
};

using BlockMap = std::map<std::uint32_t, std::vector<TStmt>>;

struct Decomposition {
  BlockMap blocks;
  std::uint32_t entry = 0;
};

/// Function decomposition into basic blocks (DECOMPOSE / INITNEXT / REC).
/// Indices come from a counter starting at 1; the entry block is allocated
/// last.
Decomposition decompose(const std::vector<Stmt>& srcs);

/// Renumbers blocks in breadth-first discovery order from the entry, which
/// becomes block 0. Unreachable blocks are dropped.
Decomposition renumber(const Decomposition& d);

/// True iff every checkpoint and call ends its statement list.
bool check_tail_position(const BlockMap& blocks);

enum class PayloadKind { Bind, Return, Checkpoint, Call, Test, PatternBind };

/// What an abstract statement stands for in the source function.
///   Bind:        dest = expr (trivial or a single operation).
///   Return:      write expr to the caller's return location.
///   Checkpoint:  dest = resample.
///   Call:        dest = expr, expr an application of a decomposed function.
///   Test:        condition of an `if`: does scrut match pat?
///   PatternBind: bind the variables of pat from scrut.
/// An empty dest discards the value.
struct Payload {
  PayloadKind kind = PayloadKind::Bind;
  std::string dest;
  TermPtr expr;
  TermPtr scrut;
  PatternPtr pat;
};

struct LoweredFunction {
  std::string name;
  std::vector<Payload> payloads;
  std::vector<Stmt> stmts;
};

/// Maps an ANF function body to statements: `resample` to checkpoint, calls
/// of functions in `decomposed` to call, matches needing a run-time test to
/// if, everything else to other.
LoweredFunction lower_to_stmts(const Function& f, const std::set<std::string>& decomposed);

std::string describe_payload(const Payload& p);
std::string dump_stmts(const LoweredFunction& f);
std::string dump_blocks(const Decomposition& d, const LoweredFunction& f);
/// Bare statement lists without payloads, e.g. "[other, checkpoint 1]".
std::string stmts_to_string(const std::vector<Stmt>& s);
std::string tstmts_to_string(const std::vector<TStmt>& s);

}  // namespace pcfg
