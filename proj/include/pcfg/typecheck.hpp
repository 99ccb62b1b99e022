#pragma once

#include "pcfg/term.hpp"
#include "pcfg/types.hpp"

namespace pcfg {

struct CheckedProgram {
  TermPtr term;  // annotated copy of the input
  DataEnv data;
};

/// Monomorphic type inference over a desugared term. Every node gets a
/// ground `type`, every Let/Lam a `binder_type`, every recursive binding a
/// `type`, every pattern node a `type`.
///
/// Besides type errors this enforces what stack-only compilation needs:
/// functions are bound by top-level lets, capture only functions and
/// top-level constants, are always fully applied and never passed around;
/// values of recursive variants must be built from constants.
CheckedProgram typecheck_lite(const TermPtr& t);

/// Literals, records, sequences and constructor applications built from
/// constants and from variables in `globals`.
bool is_constant_expr(const TermPtr& t, const std::set<std::string>& globals);

}  // namespace pcfg
