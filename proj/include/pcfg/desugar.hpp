#pragma once

#include "pcfg/term.hpp"

namespace pcfg {

/// Removes surface sugar: `if` becomes a match on `true`, `t1; t2` becomes
/// `let _seqN = t1 in t2`, and nested patterns are split into chains of
/// shallow matches over fresh `_pN` variables. Idempotent.
TermPtr desugar(const TermPtr& t);

/// True for patterns the back end handles directly: a variable, wildcard or
/// literal, or one constructor/record layer whose components are variables
/// or wildcards (a constructor may wrap one such record).
bool is_shallow(const PatternPtr& p);

}  // namespace pcfg
