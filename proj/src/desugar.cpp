#include "pcfg/desugar.hpp"

#include <cstdlib>

namespace pcfg {

namespace {

bool is_leaf(const PatternPtr& p) { return p->kind == PatKind::Wild || p->kind == PatKind::Var; }

bool flat_record(const PatternPtr& p) {
  if (p->kind != PatKind::Record) return false;
  for (const auto& f : p->fields) {
    if (!is_leaf(f.second)) return false;
  }
  return true;
}

int max_suffix(const TermPtr& t, const std::string& prefix) {
  std::set<std::string> names;
  collect_names(t, names);
  int best = 0;
  for (const auto& n : names) {
    if (n.size() <= prefix.size() || n.compare(0, prefix.size(), prefix) != 0) continue;
    std::string rest = n.substr(prefix.size());
    if (rest.find_first_not_of("0123456789") != std::string::npos) continue;
    best = std::max(best, std::atoi(rest.c_str()));
  }
  return best;
}

class Desugarer {
 public:
  explicit Desugarer(const TermPtr& root)
      : next_pat_(max_suffix(root, "_p") + 1), next_seq_(max_suffix(root, "_seq") + 1) {}

  TermPtr expand(const TermPtr& t) {
    if (!t) return t;
    auto out = std::make_shared<Term>(*t);
    for (auto& k : out->kids) k = expand(k);
    for (auto& b : out->bindings) b.body = expand(b.body);
    if (out->kind == TermKind::If) {
      return mk_match(out->kids[0], mk_true_pat(out->loc), out->kids[1], out->kids[2], out->loc);
    }
    if (out->kind == TermKind::Match) return split(out);
    return out;
  }

  TermPtr number_seqs(const TermPtr& t) {
    if (!t) return t;
    auto out = std::make_shared<Term>(*t);
    if (out->kind == TermKind::Seq) {
      std::string name = "_seq" + std::to_string(next_seq_++);
      TermPtr first = number_seqs(out->kids[0]);
      TermPtr second = number_seqs(out->kids[1]);
      return mk_let(name, first, second, out->loc);
    }
    for (auto& k : out->kids) k = number_seqs(k);
    for (auto& b : out->bindings) b.body = number_seqs(b.body);
    return out;
  }

 private:
  int next_pat_;
  int next_seq_;

  // Finds the first component of `p` that is too deep, replaces it by a
  // fresh variable and returns the displaced sub-pattern.
  PatternPtr extract(const PatternPtr& p, std::string& fresh) {
    auto take = [&](PatternPtr& slot) {
      PatternPtr inner = slot;
      fresh = "_p" + std::to_string(next_pat_++);
      slot = mk_pat(PatKind::Var, inner->loc);
      slot->name = fresh;
      return inner;
    };
    if (p->kind == PatKind::Con) {
      if (is_leaf(p->sub) || flat_record(p->sub)) return nullptr;
      if (p->sub->kind == PatKind::Record) {
        for (auto& f : p->sub->fields) {
          if (!is_leaf(f.second)) return take(f.second);
        }
      }
      return take(p->sub);
    }
    if (p->kind == PatKind::Record) {
      for (auto& f : p->fields) {
        if (!is_leaf(f.second)) return take(f.second);
      }
    }
    return nullptr;
  }

  TermPtr split(const TermPtr& m) {
    PatternPtr pat = clone(m->pat);
    std::string fresh;
    PatternPtr inner = extract(pat, fresh);
    if (!inner) return m;
    TermPtr els = m->kids[2];
    TermPtr nested = mk_match(mk_var(fresh, m->loc), inner, m->kids[1], clone(els), m->loc);
    TermPtr outer = mk_match(m->kids[0], pat, split(nested), els, m->loc);
    return split(outer);
  }
};

}  // namespace

bool is_shallow(const PatternPtr& p) {
  switch (p->kind) {
    case PatKind::Wild:
    case PatKind::Var:
    case PatKind::Lit:
      return true;
    case PatKind::Con:
      return is_leaf(p->sub) || flat_record(p->sub);
    case PatKind::Record:
      return flat_record(p);
  }
  return false;
}

TermPtr desugar(const TermPtr& t) {
  Desugarer d(t);
  return d.number_seqs(d.expand(t));
}

}  // namespace pcfg
