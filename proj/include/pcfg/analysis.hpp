#pragma once

#include <map>
#include <set>
#include <string>

#include "pcfg/program.hpp"

namespace pcfg {

struct CallGraph {
  std::set<std::string> nodes;
  std::map<std::string, std::set<std::string>> edges;  // caller -> callees
  std::map<std::string, bool> direct_resample;
};

/// Nodes are the user-defined functions (not main, not builtins).
CallGraph build_call_graph(const ProgramIR& program);

/// Least fixed point: F is in the set iff it contains `resample` or calls
/// a function in the set.
std::set<std::string> resample_set(const CallGraph& g);

std::string dump_analysis(const std::set<std::string>& set);

}  // namespace pcfg
