#pragma once

#include <string>

#include "pcfg/term.hpp"

namespace pcfg {

/// Canonical concrete syntax. parse(print(t)) reproduces t for any
/// desugared term; matches on `true` print as `if`, and unused `_seqN`
/// bindings print as `t1; t2`.
std::string print_term(const TermPtr& t);
std::string print_pattern(const PatternPtr& p);

}  // namespace pcfg
