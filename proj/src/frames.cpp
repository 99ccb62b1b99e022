#include "pcfg/frames.hpp"

namespace pcfg {

namespace {

void pattern_types(const PatternPtr& p, std::map<std::string, TypePtr>& out) {
  if (!p) return;
  switch (p->kind) {
    case PatKind::Var:
      out[p->name] = p->type;
      return;
    case PatKind::Con:
      pattern_types(p->sub, out);
      return;
    case PatKind::Record:
      for (const auto& [_, sub] : p->fields) pattern_types(sub, out);
      return;
    default:
      return;
  }
}

void binder_types(const TermPtr& t, std::map<std::string, TypePtr>& out) {
  if (t->kind == TermKind::Let) out[t->name] = t->binder_type;
  if (t->kind == TermKind::Match) pattern_types(t->pat, out);
  for (const auto& k : t->kids) binder_types(k, out);
}

void binder_order(const TermPtr& t, std::vector<std::string>& out) {
  if (t->kind == TermKind::Let) out.push_back(t->name);
  if (t->kind == TermKind::Match) pattern_vars(t->pat, out);
  for (const auto& k : t->kids) binder_order(k, out);
}

struct Walker {
  const LoweredFunction& f;
  const std::set<std::string>& vars;
  DefUse& du;

  void def(const std::string& v, std::uint32_t block) {
    if (v.empty()) return;
    du.def_block.emplace(v, block);
  }

  void use(const TermPtr& t, std::uint32_t block) {
    if (!t) return;
    for (const auto& v : free_vars(t)) {
      if (vars.count(v)) du.use_blocks[v].insert(block);
    }
  }

  void walk(const std::vector<TStmt>& list, std::uint32_t block) {
    for (const auto& s : list) {
      if (s.kind == TStmtKind::Jump) continue;
      const Payload& p = f.payloads[s.payload];
      switch (p.kind) {
        case PayloadKind::Bind:
        case PayloadKind::Call:
        case PayloadKind::Checkpoint:
          use(p.expr, block);
          def(p.dest, block);
          break;
        case PayloadKind::Return:
          use(p.expr, block);
          break;
        case PayloadKind::Test:
          use(p.scrut, block);
          break;
        case PayloadKind::PatternBind: {
          use(p.scrut, block);
          std::vector<std::string> names;
          pattern_vars(p.pat, names);
          for (const auto& n : names) def(n, block);
          break;
        }
      }
      if (s.kind == TStmtKind::If) {
        walk(s.thn, block);
        walk(s.els, block);
      }
    }
  }
};

}  // namespace

std::map<std::string, TypePtr> variable_types(const Function& f) {
  std::map<std::string, TypePtr> out;
  for (std::size_t i = 0; i < f.params.size(); ++i) out[f.params[i]] = f.param_types[i];
  binder_types(f.body, out);
  return out;
}

DefUse def_use(const Decomposition& d, const LoweredFunction& f, const std::set<std::string>& params) {
  std::set<std::string> vars;
  for (const auto& p : f.payloads) {
    if (!p.dest.empty()) vars.insert(p.dest);
    if (p.kind == PayloadKind::PatternBind) {
      std::vector<std::string> names;
      pattern_vars(p.pat, names);
      vars.insert(names.begin(), names.end());
    }
  }
  vars.insert(params.begin(), params.end());
  DefUse du;
  Walker w{f, vars, du};
  for (const auto& p : params) du.def_block[p] = d.entry;
  for (const auto& [index, list] : d.blocks) w.walk(list, index);
  return du;
}

std::set<std::string> cross_block_locals(const Decomposition& d, const LoweredFunction& f,
                                         const std::set<std::string>& params) {
  DefUse du = def_use(d, f, params);
  std::set<std::string> out;
  for (const auto& [v, uses] : du.use_blocks) {
    if (params.count(v)) continue;
    auto it = du.def_block.find(v);
    if (it == du.def_block.end()) continue;
    for (auto b : uses) {
      if (b != it->second) {
        out.insert(v);
        break;
      }
    }
  }
  return out;
}

std::set<std::uint32_t> discarded_calls(const LoweredFunction& f, const DefUse& du) {
  std::set<std::uint32_t> out;
  for (std::uint32_t i = 0; i < f.payloads.size(); ++i) {
    const auto& p = f.payloads[i];
    if (p.kind == PayloadKind::Call && (p.dest.empty() || !du.use_blocks.count(p.dest))) out.insert(i);
  }
  return out;
}

const FrameSlot* FrameLayout::find(const std::string& name) const {
  for (const auto& s : params) {
    if (s.name == name) return &s;
  }
  for (const auto& s : locals) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

FrameLayout compute_layout(const Function& f, const Decomposition& d, const LoweredFunction& lowered,
                           const DataEnv& data) {
  FrameLayout layout;
  layout.function = f.name;
  std::size_t next = 2;
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    std::size_t size = data.size_of(f.param_types[i]);
    layout.params.push_back({f.params[i], next, size});
    next += size;
  }
  std::set<std::string> params(f.params.begin(), f.params.end());
  DefUse du = def_use(d, lowered, params);
  auto types = variable_types(f);
  auto cross = cross_block_locals(d, lowered, params);
  std::vector<std::string> order;
  binder_order(f.body, order);
  for (const auto& v : order) {
    if (!cross.count(v) || data.size_of(types.at(v)) == 0) continue;
    std::size_t size = data.size_of(types.at(v));
    layout.locals.push_back({v, next, size});
    next += size;
  }
  std::size_t scratch = 0;
  bool any = false;
  for (auto id : discarded_calls(lowered, du)) {
    any = true;
    scratch = std::max(scratch, data.size_of(lowered.payloads[id].expr->type));
  }
  if (any) {
    layout.scratch = FrameSlot{"scratch", next, std::max<std::size_t>(1, scratch)};
    next += layout.scratch->size;
  }
  layout.frame_size = next;
  return layout;
}

std::string dump_layout(const FrameLayout& layout) {
  std::string out = layout.function + ": {ra: 0, retValLoc: 1";
  auto slot = [&](const FrameSlot& s) {
    out += ", " + s.name + ": " + std::to_string(s.offset);
    if (s.size != 1) out += " (" + std::to_string(s.size) + " cells)";
  };
  for (const auto& s : layout.params) slot(s);
  for (const auto& s : layout.locals) slot(s);
  if (layout.scratch) slot(*layout.scratch);
  out += "}  size " + std::to_string(layout.frame_size) + "\n";
  return out;
}

}  // namespace pcfg
