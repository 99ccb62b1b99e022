#include "pcfg/term.hpp"

#include <charconv>
#include <stdexcept>

namespace pcfg {

const std::vector<DistInfo>& dist_table() {
  using K = TypeKind;
  static const std::vector<DistInfo> table = {
      {DistKind::Bernoulli, "Bernoulli", {K::Float}, K::Bool},
      {DistKind::Normal, "Normal", {K::Float, K::Float}, K::Float},
      {DistKind::Gamma, "Gamma", {K::Float, K::Float}, K::Float},
      {DistKind::Exponential, "Exponential", {K::Float}, K::Float},
      {DistKind::Poisson, "Poisson", {K::Float}, K::Int},
      {DistKind::Binomial, "Binomial", {K::Int, K::Float}, K::Int},
      {DistKind::Uniform, "Uniform", {K::Float, K::Float}, K::Float},
      {DistKind::Beta, "Beta", {K::Float, K::Float}, K::Float},
  };
  return table;
}

const DistInfo& dist_info(DistKind kind) {
  return dist_table()[static_cast<std::size_t>(kind)];
}

std::optional<DistKind> dist_by_name(const std::string& name) {
  for (const auto& d : dist_table()) {
    if (name == d.name) return d.kind;
  }
  return std::nullopt;
}

const std::vector<BuiltinInfo>& builtin_table() {
  using S = BuiltinSig;
  static const std::vector<BuiltinInfo> table = {
      {"addi", S::IntIntInt, 2},       {"subi", S::IntIntInt, 2},
      {"muli", S::IntIntInt, 2},       {"divi", S::IntIntInt, 2},
      {"modi", S::IntIntInt, 2},       {"negi", S::IntInt, 1},
      {"eqi", S::IntIntBool, 2},       {"neqi", S::IntIntBool, 2},
      {"lti", S::IntIntBool, 2},       {"leqi", S::IntIntBool, 2},
      {"gti", S::IntIntBool, 2},       {"geqi", S::IntIntBool, 2},
      {"addf", S::FloatFloatFloat, 2}, {"subf", S::FloatFloatFloat, 2},
      {"mulf", S::FloatFloatFloat, 2}, {"divf", S::FloatFloatFloat, 2},
      {"pow", S::FloatFloatFloat, 2},  {"negf", S::FloatFloat, 1},
      {"eqf", S::FloatFloatBool, 2},   {"neqf", S::FloatFloatBool, 2},
      {"ltf", S::FloatFloatBool, 2},   {"leqf", S::FloatFloatBool, 2},
      {"gtf", S::FloatFloatBool, 2},   {"geqf", S::FloatFloatBool, 2},
      {"log", S::FloatFloat, 1},       {"exp", S::FloatFloat, 1},
      {"sqrt", S::FloatFloat, 1},      {"int2float", S::IntFloat, 1},
      {"and", S::BoolBoolBool, 2},     {"or", S::BoolBoolBool, 2},
      {"not", S::BoolBool, 1},         {"get", S::Get, 2},
      {"length", S::Length, 1},
  };
  return table;
}

const BuiltinInfo* builtin_by_name(const std::string& name) {
  for (const auto& b : builtin_table()) {
    if (name == b.name) return &b;
  }
  return nullptr;
}

TermPtr make_term(TermKind kind, SourceLoc loc) {
  auto t = std::make_shared<Term>();
  t->kind = kind;
  t->loc = loc;
  return t;
}

TermPtr mk_var(const std::string& name, SourceLoc loc) {
  auto t = make_term(TermKind::Var, loc);
  t->name = name;
  return t;
}

TermPtr mk_const(Literal lit, SourceLoc loc) {
  auto t = make_term(TermKind::Const, loc);
  t->lit = lit;
  return t;
}

TermPtr mk_let(const std::string& name, TermPtr rhs, TermPtr body, SourceLoc loc) {
  auto t = make_term(TermKind::Let, loc);
  t->name = name;
  t->kids = {std::move(rhs), std::move(body)};
  return t;
}

TermPtr mk_match(TermPtr scrut, PatternPtr pat, TermPtr thn, TermPtr els, SourceLoc loc) {
  auto t = make_term(TermKind::Match, loc);
  t->pat = std::move(pat);
  t->kids = {std::move(scrut), std::move(thn), std::move(els)};
  return t;
}

PatternPtr mk_pat(PatKind kind, SourceLoc loc) {
  auto p = std::make_shared<Pattern>();
  p->kind = kind;
  p->loc = loc;
  return p;
}

PatternPtr mk_true_pat(SourceLoc loc) {
  auto p = mk_pat(PatKind::Lit, loc);
  p->lit = true;
  return p;
}

PatternPtr clone(const PatternPtr& p) {
  if (!p) return nullptr;
  auto out = std::make_shared<Pattern>(*p);
  out->sub = clone(p->sub);
  for (auto& f : out->fields) f.second = clone(f.second);
  return out;
}

TermPtr clone(const TermPtr& t) {
  if (!t) return nullptr;
  auto out = std::make_shared<Term>(*t);
  for (auto& k : out->kids) k = clone(k);
  for (auto& b : out->bindings) b.body = clone(b.body);
  out->pat = clone(t->pat);
  return out;
}

namespace {

bool same_ann(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  return type_to_string(a) == type_to_string(b);
}

}  // namespace

bool equal(const PatternPtr& a, const PatternPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->kind == PatKind::Lit && a->lit != b->lit) return false;
  if (!equal(a->sub, b->sub)) return false;
  if (a->fields.size() != b->fields.size()) return false;
  for (std::size_t i = 0; i < a->fields.size(); ++i) {
    if (a->fields[i].first != b->fields[i].first) return false;
    if (!equal(a->fields[i].second, b->fields[i].second)) return false;
  }
  return true;
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->kind == TermKind::Const && a->lit != b->lit) return false;
  if (a->kind == TermKind::Dist && a->dist != b->dist) return false;
  if (a->labels != b->labels) return false;
  if (!same_ann(a->ann, b->ann)) return false;
  if (!equal(a->pat, b->pat)) return false;
  if (a->kids.size() != b->kids.size() || a->bindings.size() != b->bindings.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!equal(a->kids[i], b->kids[i])) return false;
  }
  for (std::size_t i = 0; i < a->bindings.size(); ++i) {
    const auto& x = a->bindings[i];
    const auto& y = b->bindings[i];
    if (x.name != y.name || !same_ann(x.ann, y.ann) || !equal(x.body, y.body)) return false;
  }
  return true;
}

void pattern_vars(const PatternPtr& p, std::vector<std::string>& out) {
  if (!p) return;
  if (p->kind == PatKind::Var) out.push_back(p->name);
  pattern_vars(p->sub, out);
  for (const auto& f : p->fields) pattern_vars(f.second, out);
}

namespace {

void free_vars_rec(const TermPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!t) return;
  auto with_bound = [&](const std::vector<std::string>& names, const TermPtr& body) {
    std::vector<std::string> added;
    for (const auto& n : names) {
      if (bound.insert(n).second) added.push_back(n);
    }
    free_vars_rec(body, bound, out);
    for (const auto& n : added) bound.erase(n);
  };
  switch (t->kind) {
    case TermKind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case TermKind::Lam:
      with_bound({t->name}, t->kids[0]);
      return;
    case TermKind::Let:
      free_vars_rec(t->kids[0], bound, out);
      with_bound({t->name}, t->kids[1]);
      return;
    case TermKind::RecLet: {
      std::vector<std::string> names;
      for (const auto& b : t->bindings) names.push_back(b.name);
      for (const auto& b : t->bindings) with_bound(names, b.body);
      with_bound(names, t->kids[0]);
      return;
    }
    case TermKind::Match: {
      free_vars_rec(t->kids[0], bound, out);
      std::vector<std::string> names;
      pattern_vars(t->pat, names);
      with_bound(names, t->kids[1]);
      free_vars_rec(t->kids[2], bound, out);
      return;
    }
    default:
      for (const auto& k : t->kids) free_vars_rec(k, bound, out);
  }
}

void pattern_names(const PatternPtr& p, std::set<std::string>& out) {
  if (!p) return;
  if (p->kind == PatKind::Var) out.insert(p->name);
  pattern_names(p->sub, out);
  for (const auto& f : p->fields) pattern_names(f.second, out);
}

}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> bound;
  std::set<std::string> out;
  free_vars_rec(t, bound, out);
  return out;
}

void collect_names(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Lam:
    case TermKind::Let:
      out.insert(t->name);
      break;
    default:
      break;
  }
  for (const auto& b : t->bindings) {
    out.insert(b.name);
    collect_names(b.body, out);
  }
  pattern_names(t->pat, out);
  for (const auto& k : t->kids) collect_names(k, out);
}

bool is_trivial(const TermPtr& t) {
  return t->kind == TermKind::Var || t->kind == TermKind::Const;
}

std::string format_float(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".ein") == std::string::npos) s += '.';
  return s;
}

std::string literal_to_string(const Literal& lit) {
  if (const auto* i = std::get_if<std::int64_t>(&lit)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&lit)) return format_float(*d);
  return std::get<bool>(lit) ? "true" : "false";
}

}  // namespace pcfg
