#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pcfg/error.hpp"
#include "pcfg/types.hpp"

namespace pcfg {

using Literal = std::variant<std::int64_t, double, bool>;

enum class DistKind { Bernoulli, Normal, Gamma, Exponential, Poisson, Binomial, Uniform, Beta };

struct DistInfo {
  DistKind kind;
  const char* name;
  std::vector<TypeKind> params;
  TypeKind result;
};

const std::vector<DistInfo>& dist_table();
const DistInfo& dist_info(DistKind kind);
std::optional<DistKind> dist_by_name(const std::string& name);

enum class BuiltinSig { IntIntInt, IntInt, IntIntBool, FloatFloatFloat, FloatFloat,
                        FloatFloatBool, IntFloat, BoolBoolBool, BoolBool, Get, Length };

struct BuiltinInfo {
  const char* name;
  BuiltinSig sig;
  std::size_t arity;
};

const std::vector<BuiltinInfo>& builtin_table();
const BuiltinInfo* builtin_by_name(const std::string& name);

enum class PatKind { Wild, Var, Lit, Con, Record };

struct Pattern;
using PatternPtr = std::shared_ptr<Pattern>;

struct Pattern {
  PatKind kind = PatKind::Wild;
  std::string name;  // Var: variable, Con: constructor
  Literal lit;       // Lit
  PatternPtr sub;    // Con
  std::vector<std::pair<std::string, PatternPtr>> fields;  // Record, source order
  SourceLoc loc;
  TypePtr type;
};

enum class TermKind {
  Var, Builtin, Const, Lam, App, Let, RecLet, Con, Match, If, Seq, SeqLit, Record,
  Assume, Weight, Observe, Dist, Resample, TypeDecl, ConDecl
};

struct Term;
using TermPtr = std::shared_ptr<Term>;

struct RecBinding {
  std::string name;
  TypePtr ann;
  TermPtr body;
  SourceLoc loc;
  TypePtr type;  // filled in by typecheck_lite
};

/// One node type for every production. Field use by kind:
///   Var/Builtin: name.  Const: lit.
///   Lam: name (parameter), ann, kids = {body}.
///   App: kids = {function, args...} (n-ary, curried surface syntax).
///   Let: name, ann, kids = {rhs, body}.  RecLet: bindings, kids = {body}.
///   Con: name, kids = {payload}.  Match: pat, kids = {scrutinee, then, else}.
///   If: kids = {cond, then, else}.  Seq: kids = {first, second}.
///   SeqLit: kids.  Record: labels + kids (source order).
///   Assume: kids = {dist}.  Weight: kids = {logw}.  Observe: kids = {value, dist}.
///   Dist: dist + kids = params.  TypeDecl: name, kids = {body}.
///   ConDecl: name, ann (arrow payload -> variant), kids = {body}.
struct Term {
  TermKind kind = TermKind::Const;
  SourceLoc loc;
  std::string name;
  Literal lit;
  DistKind dist = DistKind::Bernoulli;
  std::vector<TermPtr> kids;
  std::vector<std::string> labels;
  std::vector<RecBinding> bindings;
  PatternPtr pat;
  TypePtr ann;
  TypePtr type;         // filled in by typecheck_lite
  TypePtr binder_type;  // Let/Lam: type of the bound variable, after checking
};

TermPtr make_term(TermKind kind, SourceLoc loc = {});
TermPtr mk_var(const std::string& name, SourceLoc loc = {});
TermPtr mk_const(Literal lit, SourceLoc loc = {});
TermPtr mk_let(const std::string& name, TermPtr rhs, TermPtr body, SourceLoc loc = {});
TermPtr mk_match(TermPtr scrut, PatternPtr pat, TermPtr thn, TermPtr els, SourceLoc loc = {});
PatternPtr mk_pat(PatKind kind, SourceLoc loc = {});
PatternPtr mk_true_pat(SourceLoc loc = {});

TermPtr clone(const TermPtr& t);
PatternPtr clone(const PatternPtr& p);

/// Structural equality, ignoring source locations and type annotations
/// filled in by the checker (`type`). Surface annotations (`ann`) compare
/// by printed form.
bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const PatternPtr& a, const PatternPtr& b);

std::set<std::string> free_vars(const TermPtr& t);
void pattern_vars(const PatternPtr& p, std::vector<std::string>& out);

/// Every identifier that appears anywhere (binders and uses).
void collect_names(const TermPtr& t, std::set<std::string>& out);

bool is_trivial(const TermPtr& t);

std::string literal_to_string(const Literal& lit);
/// Shortest round-trip decimal form, always containing '.', 'e', "inf" or "nan".
std::string format_float(double v);

}  // namespace pcfg
