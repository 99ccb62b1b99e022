#pragma once

#include <string>

#include "pcfg/term.hpp"

namespace pcfg {

/// Parses source text into a Term that may still contain `if`, `;` and
/// nested patterns. Scoping (unbound variables, unknown constructors and
/// types) and distribution arities are checked here.
TermPtr parse_raw(const std::string& source);

/// parse_raw followed by desugar.
TermPtr parse(const std::string& source);

}  // namespace pcfg
