#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pcfg/cell.hpp"
#include "pcfg/rng.hpp"
#include "pcfg/term.hpp"
#include "pcfg/vm.hpp"

namespace oracle {

/// Reference semantics: a big-step evaluator over the ANF term. No blocks,
/// no frames; resample is a no-op.
struct OValue {
  enum Kind { Int, Float, Bool, Record, Seq, Con } kind = Record;
  std::int64_t i = 0;
  double f = 0.0;
  bool b = false;
  std::string con;
  std::map<std::string, OValue> fields;
  std::vector<OValue> elems;  // Seq elements, or the Con payload
};

struct OracleRun {
  OValue value;
  double log_weight = 0.0;
  std::vector<pcfg::Cell> tape;  // every assume draw, in order
};

enum class TapeMode { Record, Replay };

/// Evaluates `anf`. In Record mode draws come from `rng` and are appended
/// to the tape; in Replay mode they are taken from `tape` in order.
OracleRun interpret_direct(const pcfg::TermPtr& anf, pcfg::Rng rng);
OracleRun interpret_replay(const pcfg::TermPtr& anf, const std::vector<pcfg::Cell>& tape);

/// Same shape as the VM's decoded result, for exact comparison.
pcfg::Value to_value(const OValue& v);

}  // namespace oracle
