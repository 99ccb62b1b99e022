#include "pcfg/anf.hpp"

#include <cstdlib>
#include <functional>
#include <map>

namespace pcfg {

namespace {

class Renamer {
 public:
  explicit Renamer(const TermPtr& root) { collect_names(root, taken_); }

  TermPtr run(const TermPtr& t, std::map<std::string, std::string> subst) {
    auto out = std::make_shared<Term>(*t);
    switch (t->kind) {
      case TermKind::Var: {
        auto it = subst.find(t->name);
        if (it != subst.end()) out->name = it->second;
        return out;
      }
      case TermKind::Lam:
        out->name = bind(t->name, subst);
        out->kids = {run(t->kids[0], subst)};
        return out;
      case TermKind::Let: {
        TermPtr rhs = run(t->kids[0], subst);
        out->name = bind(t->name, subst);
        out->kids = {rhs, run(t->kids[1], subst)};
        return out;
      }
      case TermKind::RecLet:
        for (auto& b : out->bindings) b.name = bind(b.name, subst);
        for (auto& b : out->bindings) b.body = run(b.body, subst);
        out->kids = {run(t->kids[0], subst)};
        return out;
      case TermKind::Match: {
        TermPtr scrut = run(t->kids[0], subst);
        TermPtr els = run(t->kids[2], subst);
        out->pat = clone(t->pat);
        rename_pattern(out->pat, subst);
        out->kids = {scrut, run(t->kids[1], subst), els};
        return out;
      }
      default:
        for (auto& k : out->kids) k = run(k, subst);
        for (auto& b : out->bindings) b.body = run(b.body, subst);
        return out;
    }
  }

 private:
  std::set<std::string> taken_;
  std::set<std::string> bound_;

  std::string bind(const std::string& name, std::map<std::string, std::string>& subst) {
    std::string fresh = name;
    if (bound_.count(name)) {
      for (int k = 1;; ++k) {
        fresh = name + "'" + std::to_string(k);
        if (!taken_.count(fresh)) break;
      }
      taken_.insert(fresh);
    }
    bound_.insert(fresh);
    subst[name] = fresh;
    return fresh;
  }

  void rename_pattern(const PatternPtr& p, std::map<std::string, std::string>& subst) {
    if (!p) return;
    if (p->kind == PatKind::Var) p->name = bind(p->name, subst);
    rename_pattern(p->sub, subst);
    for (auto& f : p->fields) rename_pattern(f.second, subst);
  }
};

bool is_effect_or_call(const TermPtr& op) {
  switch (op->kind) {
    case TermKind::Assume:
    case TermKind::Observe:
    case TermKind::Weight:
    case TermKind::Resample:
      return true;
    case TermKind::App:
      return op->kids[0]->kind == TermKind::Var;
    default:
      return false;
  }
}

enum class Ctx { Tail, Rhs, Bind };

struct Cont {
  Ctx ctx;
  std::function<TermPtr(const TermPtr&)> fn;
};

int max_temp(const TermPtr& t) {
  std::set<std::string> names;
  collect_names(t, names);
  int best = 0;
  for (const auto& n : names) {
    if (n.size() < 2 || n[0] != 't') continue;
    if (n.find_first_not_of("0123456789", 1) != std::string::npos) continue;
    if (n.size() > 9) continue;
    best = std::max(best, std::atoi(n.c_str() + 1));
  }
  return best;
}

class Normalizer {
 public:
  explicit Normalizer(int base) : base_(base), next_(base) {}

  TermPtr tail(const TermPtr& t) { return norm(t, tail_cont()); }

 private:
  int base_;
  int next_;

  Cont tail_cont() {
    return {Ctx::Tail, [this](const TermPtr& op) {
              if (!is_effect_or_call(op)) return op;
              return bind_temp(op, [](const TermPtr& v) { return v; });
            }};
  }

  static Cont rhs_cont() {
    return {Ctx::Rhs, [](const TermPtr& op) { return op; }};
  }

  TermPtr bind_temp(const TermPtr& op, const std::function<TermPtr(const TermPtr&)>& k) {
    std::string name = "t" + std::to_string(next_++);
    auto var = mk_var(name, op->loc);
    var->type = op->type;
    TermPtr body = k(var);
    auto let = mk_let(name, op, body, op->loc);
    let->binder_type = op->type;
    let->type = body->type;
    return let;
  }

  TermPtr function_body(const TermPtr& lam) {
    int saved = next_;
    next_ = base_;
    auto out = std::make_shared<Term>(*lam);
    if (lam->kids[0]->kind == TermKind::Lam) {
      out->kids = {function_body(lam->kids[0])};
    } else {
      out->kids = {tail(lam->kids[0])};
    }
    next_ = saved;
    return out;
  }

  // Normalizes `t` to a trivial term and hands it to `k`.
  TermPtr name(const TermPtr& t, const std::function<TermPtr(const TermPtr&)>& k) {
    if (is_trivial(t)) return k(t);
    return norm(t, {Ctx::Bind, [this, k](const TermPtr& op) {
                      if (is_trivial(op)) return k(op);
                      return bind_temp(op, k);
                    }});
  }

  TermPtr names(const std::vector<TermPtr>& ts, std::size_t i, std::vector<TermPtr> acc,
                const std::function<TermPtr(std::vector<TermPtr>)>& k) {
    if (i == ts.size()) return k(std::move(acc));
    return name(ts[i], [this, &ts, i, acc, &k](const TermPtr& v) {
      auto next = acc;
      next.push_back(v);
      return names(ts, i + 1, std::move(next), k);
    });
  }

  TermPtr with_kids(const TermPtr& t, std::size_t from, const Cont& k) {
    std::vector<TermPtr> args(t->kids.begin() + static_cast<std::ptrdiff_t>(from), t->kids.end());
    return names(args, 0, {}, [t, from, &k](std::vector<TermPtr> vs) {
      auto out = std::make_shared<Term>(*t);
      out->kids.resize(from);
      for (auto& v : vs) out->kids.push_back(v);
      return k.fn(out);
    });
  }

  TermPtr norm(const TermPtr& t, const Cont& k) {
    switch (t->kind) {
      case TermKind::Var:
      case TermKind::Const:
      case TermKind::Resample:
        return k.fn(t);
      case TermKind::App:
        return with_kids(t, 1, k);
      case TermKind::Con:
      case TermKind::Record:
      case TermKind::SeqLit:
      case TermKind::Weight:
        return with_kids(t, 0, k);
      case TermKind::Assume: {
        const TermPtr& dist = t->kids[0];
        return names(dist->kids, 0, {}, [t, dist, &k](std::vector<TermPtr> vs) {
          auto d = std::make_shared<Term>(*dist);
          d->kids = std::move(vs);
          auto out = std::make_shared<Term>(*t);
          out->kids = {d};
          return k.fn(out);
        });
      }
      case TermKind::Observe: {
        const TermPtr& dist = t->kids[1];
        std::vector<TermPtr> all = {t->kids[0]};
        all.insert(all.end(), dist->kids.begin(), dist->kids.end());
        return names(all, 0, {}, [t, dist, &k](std::vector<TermPtr> vs) {
          auto d = std::make_shared<Term>(*dist);
          d->kids.assign(vs.begin() + 1, vs.end());
          auto out = std::make_shared<Term>(*t);
          out->kids = {vs[0], d};
          return k.fn(out);
        });
      }
      case TermKind::Let: {
        const TermPtr& rhs = t->kids[0];
        if (rhs->kind == TermKind::Lam) {
          auto out = std::make_shared<Term>(*t);
          out->kids = {function_body(rhs), norm(t->kids[1], k)};
          out->type = out->kids[1]->type;
          return out;
        }
        return norm(rhs, {Ctx::Bind, [this, t, &k](const TermPtr& op) {
                            TermPtr body = norm(t->kids[1], k);
                            auto out = std::make_shared<Term>(*t);
                            out->kids = {op, body};
                            out->type = body->type;
                            return TermPtr(out);
                          }});
      }
      case TermKind::RecLet:
      case TermKind::TypeDecl:
      case TermKind::ConDecl: {
        auto out = std::make_shared<Term>(*t);
        for (auto& b : out->bindings) b.body = function_body(b.body);
        out->kids = {norm(t->kids[0], k)};
        out->type = out->kids[0]->type;
        return out;
      }
      case TermKind::Match: {
        Ctx branch = k.ctx == Ctx::Tail ? Ctx::Tail : Ctx::Rhs;
        return name(t->kids[0], [this, t, branch, &k](const TermPtr& scrut) {
          auto out = std::make_shared<Term>(*t);
          Cont bk = branch == Ctx::Tail ? tail_cont() : rhs_cont();
          out->kids = {scrut, norm(t->kids[1], bk), norm(t->kids[2], bk)};
          return k.fn(out);
        });
      }
      case TermKind::Lam:
        throw CompileError("anf", t->loc, "functions must be bound by a top-level let");
      default:
        throw CompileError("anf", t->loc, "internal: unexpected term in normalize");
    }
  }
};

std::string violation(const TermPtr& t, bool allow_functions);

std::string check_trivials(const TermPtr& t, std::size_t from) {
  for (std::size_t i = from; i < t->kids.size(); ++i) {
    if (!is_trivial(t->kids[i])) {
      return "argument " + std::to_string(i - from + 1) + " at " + std::to_string(t->loc.line) + ":" +
             std::to_string(t->loc.column) + " is not a variable or constant";
    }
  }
  return {};
}

// An expression that may appear as a let right-hand side or in tail position.
std::string op_violation(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Const:
    case TermKind::Resample:
      return {};
    case TermKind::App:
      if (t->kids[0]->kind != TermKind::Var && t->kids[0]->kind != TermKind::Builtin) {
        return "application head is not a named function";
      }
      return check_trivials(t, 1);
    case TermKind::Con:
    case TermKind::Record:
    case TermKind::SeqLit:
    case TermKind::Weight:
      return check_trivials(t, 0);
    case TermKind::Assume:
      return check_trivials(t->kids[0], 0);
    case TermKind::Observe: {
      if (!is_trivial(t->kids[0])) return "observed value is not a variable or constant";
      return check_trivials(t->kids[1], 0);
    }
    case TermKind::Match:
      if (!is_trivial(t->kids[0])) return "match scrutinee is not a variable or constant";
      if (auto v = violation(t->kids[1], false); !v.empty()) return v;
      return violation(t->kids[2], false);
    default:
      return "unexpected construct in operation position";
  }
}

std::string violation(const TermPtr& t, bool spine) {
  switch (t->kind) {
    case TermKind::Let: {
      const TermPtr& rhs = t->kids[0];
      if (rhs->kind == TermKind::Lam) {
        if (!spine) return "function '" + t->name + "' is not bound at top level";
        TermPtr body = rhs;
        while (body->kind == TermKind::Lam) body = body->kids[0];
        if (auto v = violation(body, false); !v.empty()) return v;
      } else if (auto v = op_violation(rhs); !v.empty()) {
        return v;
      }
      return violation(t->kids[1], spine);
    }
    case TermKind::RecLet:
      if (!spine) return "recursive group is not at top level";
      for (const auto& b : t->bindings) {
        TermPtr body = b.body;
        if (body->kind != TermKind::Lam) return "recursive binding '" + b.name + "' is not a function";
        while (body->kind == TermKind::Lam) body = body->kids[0];
        if (auto v = violation(body, false); !v.empty()) return v;
      }
      return violation(t->kids[0], spine);
    case TermKind::TypeDecl:
    case TermKind::ConDecl:
      return violation(t->kids[0], spine);
    default:
      return op_violation(t);
  }
}

}  // namespace

TermPtr uniquify(const TermPtr& t) {
  Renamer r(t);
  return r.run(t, {});
}

TermPtr normalize(const TermPtr& t) {
  TermPtr unique = uniquify(t);
  Normalizer n(max_temp(unique) + 1);
  return n.tail(unique);
}

std::string anf_violation(const TermPtr& t) { return violation(t, true); }

bool validate_anf(const TermPtr& t) { return anf_violation(t).empty(); }

}  // namespace pcfg
