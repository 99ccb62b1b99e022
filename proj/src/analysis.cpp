#include "pcfg/analysis.hpp"

#include <deque>

namespace pcfg {

namespace {

void scan(const TermPtr& t, const std::set<std::string>& functions, std::set<std::string>& calls,
          bool& resample) {
  if (!t) return;
  if (t->kind == TermKind::Resample) resample = true;
  if (t->kind == TermKind::App && t->kids[0]->kind == TermKind::Var &&
      functions.count(t->kids[0]->name)) {
    calls.insert(t->kids[0]->name);
  }
  for (const auto& k : t->kids) scan(k, functions, calls, resample);
}

}  // namespace

CallGraph build_call_graph(const ProgramIR& program) {
  CallGraph g;
  for (const auto& f : program.functions) {
    if (!f.is_main) g.nodes.insert(f.name);
  }
  for (const auto& f : program.functions) {
    if (f.is_main) continue;
    bool resample = false;
    std::set<std::string> calls;
    scan(f.body, g.nodes, calls, resample);
    g.edges[f.name] = calls;
    g.direct_resample[f.name] = resample;
  }
  return g;
}

std::set<std::string> resample_set(const CallGraph& g) {
  std::map<std::string, std::set<std::string>> callers;
  for (const auto& [from, tos] : g.edges) {
    for (const auto& to : tos) callers[to].insert(from);
  }
  std::set<std::string> out;
  std::deque<std::string> work;
  for (const auto& [name, direct] : g.direct_resample) {
    if (direct && out.insert(name).second) work.push_back(name);
  }
  while (!work.empty()) {
    std::string f = work.front();
    work.pop_front();
    for (const auto& caller : callers[f]) {
      if (out.insert(caller).second) work.push_back(caller);
    }
  }
  return out;
}

std::string dump_analysis(const std::set<std::string>& set) {
  std::string out;
  for (const auto& name : set) out += name + "\n";
  return out;
}

}  // namespace pcfg
