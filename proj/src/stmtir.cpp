#include "pcfg/stmtir.hpp"

#include <deque>

#include "pcfg/printer.hpp"

namespace pcfg {

namespace {

struct Acc {
  std::vector<TStmt> block;
  BlockMap blocks;
  NextPlus next;
};

TStmt jump(Next n) {
  TStmt t;
  t.kind = TStmtKind::Jump;
  t.next = n;
  return t;
}

class Decomposer {
 public:
  Decomposition run(const std::vector<Stmt>& srcs) {
    Acc acc = rec({{}, {}, Next::ret()}, srcs, 0);
    Decomposition d;
    d.blocks = std::move(acc.blocks);
    d.entry = new_index();
    d.blocks[d.entry] = std::move(acc.block);
    return d;
  }

 private:
  std::uint32_t counter_ = 1;

  std::uint32_t new_index() { return counter_++; }

  Next init_next(const NextPlus& next) {
    if (!next) return Next::to(new_index());
    return *next;
  }

  Acc rec(Acc acc, const std::vector<Stmt>& srcs, std::size_t i) {
    if (i == srcs.size()) {
      if (acc.next) acc.block.push_back(jump(*acc.next));
      return acc;
    }
    const Stmt& src = srcs[i];
    bool last = i + 1 == srcs.size();
    switch (src.kind) {
      case StmtKind::Checkpoint:
      case StmtKind::Call: {
        TStmt t;
        t.kind = src.kind == StmtKind::Checkpoint ? TStmtKind::Checkpoint : TStmtKind::Call;
        t.payload = src.payload;
        if (last) {
          Next next = init_next(acc.next);
          t.next = next;
          acc.block.push_back(std::move(t));
          acc.next = next;
          return acc;
        }
        std::uint32_t index = new_index();
        t.next = Next::to(index);
        acc.block.push_back(std::move(t));
        Acc sub = rec({{}, std::move(acc.blocks), init_next(acc.next)}, srcs, i + 1);
        sub.blocks[index] = std::move(sub.block);
        return {std::move(acc.block), std::move(sub.blocks), sub.next};
      }
      case StmtKind::Other: {
        TStmt t;
        t.payload = src.payload;
        acc.block.push_back(std::move(t));
        return rec(std::move(acc), srcs, i + 1);
      }
      case StmtKind::If: {
        TStmt t;
        t.kind = TStmtKind::If;
        t.payload = src.payload;
        if (last) {
          Acc thn = rec({{}, std::move(acc.blocks), acc.next}, src.thn, 0);
          Acc els = rec({{}, std::move(thn.blocks), thn.next}, src.els, 0);
          if (acc.next != els.next && !thn.next) thn.block.push_back(jump(*els.next));
          t.thn = std::move(thn.block);
          t.els = std::move(els.block);
          acc.block.push_back(std::move(t));
          return {std::move(acc.block), std::move(els.blocks), els.next};
        }
        Acc thn = rec({{}, std::move(acc.blocks), std::nullopt}, src.thn, 0);
        Acc els = rec({{}, std::move(thn.blocks), thn.next}, src.els, 0);
        if (!els.next) {
          t.thn = std::move(thn.block);
          t.els = std::move(els.block);
          acc.block.push_back(std::move(t));
          acc.blocks = std::move(els.blocks);
          return rec(std::move(acc), srcs, i + 1);
        }
        if (!thn.next) thn.block.push_back(jump(*els.next));
        Acc sub = rec({{}, std::move(els.blocks), init_next(acc.next)}, srcs, i + 1);
        t.thn = std::move(thn.block);
        t.els = std::move(els.block);
        acc.block.push_back(std::move(t));
        sub.blocks[els.next->block] = std::move(sub.block);
        return {std::move(acc.block), std::move(sub.blocks), sub.next};
      }
    }
    return acc;
  }
};

void successors(const std::vector<TStmt>& list, std::vector<std::uint32_t>& out) {
  for (const auto& s : list) {
    if (s.kind == TStmtKind::If) {
      successors(s.thn, out);
      successors(s.els, out);
    } else if (s.kind != TStmtKind::Other && s.next.kind == Next::Block) {
      out.push_back(s.next.block);
    }
  }
}

void remap(std::vector<TStmt>& list, const std::map<std::uint32_t, std::uint32_t>& ids) {
  for (auto& s : list) {
    if (s.kind == TStmtKind::If) {
      remap(s.thn, ids);
      remap(s.els, ids);
    } else if (s.kind != TStmtKind::Other && s.next.kind == Next::Block) {
      s.next.block = ids.at(s.next.block);
    }
  }
}

bool tail_ok(const std::vector<TStmt>& list) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& s = list[i];
    bool last = i + 1 == list.size();
    if ((s.kind == TStmtKind::Checkpoint || s.kind == TStmtKind::Call) && !last) return false;
    if (s.kind == TStmtKind::If && (!tail_ok(s.thn) || !tail_ok(s.els))) return false;
  }
  return true;
}

struct Target {
  bool is_return = false;
  std::string var;
};

class Lowerer {
 public:
  Lowerer(LoweredFunction& out, const std::set<std::string>& decomposed)
      : out_(out), decomposed_(decomposed) {}

  void lower(const TermPtr& t, const Target& target, std::vector<Stmt>& list) {
    if (t->kind == TermKind::Let) {
      lower_value(t->kids[0], {false, t->name}, list);
      lower(t->kids[1], target, list);
      return;
    }
    lower_value(t, target, list);
  }

 private:
  LoweredFunction& out_;
  const std::set<std::string>& decomposed_;

  std::uint32_t add(Payload p) {
    out_.payloads.push_back(std::move(p));
    return static_cast<std::uint32_t>(out_.payloads.size() - 1);
  }

  Stmt stmt(StmtKind kind, Payload p) {
    Stmt s;
    s.kind = kind;
    s.payload = add(std::move(p));
    return s;
  }

  Payload value_payload(const TermPtr& e, const Target& target) {
    Payload p;
    p.kind = target.is_return ? PayloadKind::Return : PayloadKind::Bind;
    p.dest = target.var;
    p.expr = e;
    return p;
  }

  void lower_value(const TermPtr& e, const Target& target, std::vector<Stmt>& list) {
    switch (e->kind) {
      case TermKind::Match: {
        const TermPtr& scrut = e->kids[0];
        const PatternPtr& pat = e->pat;
        if (pat->kind == PatKind::Wild) {
          lower(e->kids[1], target, list);
          return;
        }
        if (pat->kind == PatKind::Var || pat->kind == PatKind::Record) {
          Payload p;
          p.kind = PayloadKind::PatternBind;
          p.scrut = scrut;
          p.pat = pat;
          list.push_back(stmt(StmtKind::Other, p));
          lower(e->kids[1], target, list);
          return;
        }
        Payload test;
        test.kind = PayloadKind::Test;
        test.scrut = scrut;
        test.pat = pat;
        Stmt s = stmt(StmtKind::If, test);
        std::vector<std::string> vars;
        pattern_vars(pat, vars);
        if (!vars.empty()) {
          Payload bind;
          bind.kind = PayloadKind::PatternBind;
          bind.scrut = scrut;
          bind.pat = pat;
          s.thn.push_back(stmt(StmtKind::Other, bind));
        }
        lower(e->kids[1], target, s.thn);
        lower(e->kids[2], target, s.els);
        list.push_back(std::move(s));
        return;
      }
      case TermKind::Resample: {
        Payload p;
        p.kind = PayloadKind::Checkpoint;
        p.dest = target.var;
        p.expr = e;
        list.push_back(stmt(StmtKind::Checkpoint, p));
        if (target.is_return) {
          auto unit = make_term(TermKind::Record, e->loc);
          unit->type = unit_type();
          list.push_back(stmt(StmtKind::Other, value_payload(unit, target)));
        }
        return;
      }
      case TermKind::App:
        if (e->kids[0]->kind == TermKind::Var && decomposed_.count(e->kids[0]->name)) {
          if (target.is_return) {
            throw CompileError("stmtir", e->loc, "internal: call in return position was not let-bound");
          }
          Payload p;
          p.kind = PayloadKind::Call;
          p.dest = target.var;
          p.expr = e;
          list.push_back(stmt(StmtKind::Call, p));
          return;
        }
        [[fallthrough]];
      default:
        list.push_back(stmt(StmtKind::Other, value_payload(e, target)));
        return;
    }
  }
};

std::string one_line(const TermPtr& t) {
  std::string s = print_term(t);
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == '\n' || c == ' ') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string next_to_string(const Next& n) {
  return n.kind == Next::Return ? "return" : std::to_string(n.block);
}

std::string kind_word(StmtKind k) {
  switch (k) {
    case StmtKind::Checkpoint:
      return "checkpoint";
    case StmtKind::Call:
      return "call";
    case StmtKind::If:
      return "if";
    case StmtKind::Other:
      return "other";
  }
  return "?";
}

std::string tkind_word(const TStmt& s) {
  switch (s.kind) {
    case TStmtKind::Checkpoint:
      return "checkpoint " + next_to_string(s.next);
    case TStmtKind::Call:
      return "call " + next_to_string(s.next);
    case TStmtKind::Jump:
      return "jump " + next_to_string(s.next);
    case TStmtKind::If:
      return "if";
    case TStmtKind::Other:
      return "other";
  }
  return "?";
}

void dump_list(const std::vector<Stmt>& list, const LoweredFunction* f, int ind, std::string& out) {
  for (const auto& s : list) {
    out += std::string(static_cast<std::size_t>(ind), ' ') + kind_word(s.kind);
    if (f) out += "  -- " + describe_payload(f->payloads[s.payload]);
    out += "\n";
    if (s.kind == StmtKind::If) {
      dump_list(s.thn, f, ind + 4, out);
      out += std::string(static_cast<std::size_t>(ind + 2), ' ') + "else\n";
      dump_list(s.els, f, ind + 4, out);
    }
  }
}

void dump_tlist(const std::vector<TStmt>& list, const LoweredFunction* f, int ind, std::string& out) {
  for (const auto& s : list) {
    out += std::string(static_cast<std::size_t>(ind), ' ') + tkind_word(s);
    if (f && s.kind != TStmtKind::Jump) out += "  -- " + describe_payload(f->payloads[s.payload]);
    out += "\n";
    if (s.kind == TStmtKind::If) {
      dump_tlist(s.thn, f, ind + 4, out);
      out += std::string(static_cast<std::size_t>(ind + 2), ' ') + "else\n";
      dump_tlist(s.els, f, ind + 4, out);
    }
  }
}

}  // namespace

Decomposition decompose(const std::vector<Stmt>& srcs) {
  Decomposer d;
  return d.run(srcs);
}

Decomposition renumber(const Decomposition& d) {
  std::map<std::uint32_t, std::uint32_t> ids;
  std::deque<std::uint32_t> queue{d.entry};
  ids[d.entry] = 0;
  while (!queue.empty()) {
    std::uint32_t b = queue.front();
    queue.pop_front();
    std::vector<std::uint32_t> succ;
    successors(d.blocks.at(b), succ);
    for (auto s : succ) {
      if (!ids.count(s)) {
        auto fresh = static_cast<std::uint32_t>(ids.size());
        ids[s] = fresh;
        queue.push_back(s);
      }
    }
  }
  Decomposition out;
  out.entry = 0;
  for (const auto& [old, fresh] : ids) {
    auto list = d.blocks.at(old);
    remap(list, ids);
    out.blocks[fresh] = std::move(list);
  }
  return out;
}

bool check_tail_position(const BlockMap& blocks) {
  for (const auto& [_, list] : blocks) {
    if (!tail_ok(list)) return false;
  }
  return true;
}

LoweredFunction lower_to_stmts(const Function& f, const std::set<std::string>& decomposed) {
  LoweredFunction out;
  out.name = f.name;
  Lowerer l(out, decomposed);
  l.lower(f.body, {true, ""}, out.stmts);
  return out;
}

std::string describe_payload(const Payload& p) {
  std::string dest = p.dest.empty() ? "_" : p.dest;
  switch (p.kind) {
    case PayloadKind::Bind:
      return dest + " = " + one_line(p.expr);
    case PayloadKind::Return:
      return "return " + one_line(p.expr);
    case PayloadKind::Checkpoint:
      return "resample";
    case PayloadKind::Call:
      return dest + " = " + one_line(p.expr);
    case PayloadKind::Test:
      return one_line(p.scrut) + " matches " + print_pattern(p.pat);
    case PayloadKind::PatternBind:
      return print_pattern(p.pat) + " = " + one_line(p.scrut);
  }
  return "?";
}

std::string dump_stmts(const LoweredFunction& f) {
  std::string out = f.name + ":\n";
  dump_list(f.stmts, &f, 2, out);
  return out;
}

std::string dump_blocks(const Decomposition& d, const LoweredFunction& f) {
  std::string out = f.name + ":\n";
  for (const auto& [index, list] : d.blocks) {
    out += "  block " + std::to_string(index) + (index == d.entry ? " (entry)" : "") + ":\n";
    dump_tlist(list, &f, 4, out);
  }
  return out;
}

std::string stmts_to_string(const std::vector<Stmt>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += kind_word(s[i].kind);
    if (s[i].kind == StmtKind::If) out += " " + stmts_to_string(s[i].thn) + " " + stmts_to_string(s[i].els);
  }
  return out + "]";
}

std::string tstmts_to_string(const std::vector<TStmt>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += tkind_word(s[i]);
    if (s[i].kind == TStmtKind::If) out += " " + tstmts_to_string(s[i].thn) + " " + tstmts_to_string(s[i].els);
  }
  return out + "]";
}

}  // namespace pcfg
