#pragma once

#include <string>

#include "pcfg/term.hpp"

namespace pcfg {

/// Renames binders that reuse an earlier binder's name (`x` becomes `x'1`),
/// so every bound name in the program is distinct.
TermPtr uniquify(const TermPtr& t);

/// A-normal form over a typechecked term (types are carried over and given
/// to the new temporaries). Temporaries are named tN, numbered per function
/// from one past the largest tN already in the program.
///
/// User calls and effects (assume, observe, weight, resample) in a function
/// tail are bound to a temporary; inside a branch whose value is let-bound
/// they stay in place, as in `let s4 = if t3 then 6. else f 7. in ...`.
TermPtr normalize(const TermPtr& t);

/// Empty when `t` satisfies the ANF invariants, otherwise a description of
/// the first violation.
std::string anf_violation(const TermPtr& t);
bool validate_anf(const TermPtr& t);

}  // namespace pcfg
