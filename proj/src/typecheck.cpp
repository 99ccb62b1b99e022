#include "pcfg/typecheck.hpp"

#include <functional>
#include <map>

#include "pcfg/desugar.hpp"

namespace pcfg {

namespace {

[[noreturn]] void fail(SourceLoc loc, const std::string& msg) {
  throw CompileError("typecheck", loc, msg);
}

TypePtr scalar(TypeKind k) {
  switch (k) {
    case TypeKind::Int:
      return int_type();
    case TypeKind::Float:
      return float_type();
    default:
      return bool_type();
  }
}

TypePtr literal_type(const Literal& lit) {
  if (std::holds_alternative<std::int64_t>(lit)) return int_type();
  if (std::holds_alternative<double>(lit)) return float_type();
  return bool_type();
}

bool occurs(int id, const TypePtr& in) {
  TypePtr t = resolve(in);
  if (!t) return false;
  switch (t->kind) {
    case TypeKind::Var:
      return t->var_id == id;
    case TypeKind::Record:
      for (const auto& f : t->fields) {
        if (occurs(id, f.second)) return true;
      }
      return false;
    case TypeKind::Seq:
      return occurs(id, t->elem) || occurs(id, t->length);
    case TypeKind::Arrow:
      return occurs(id, t->from) || occurs(id, t->to);
    default:
      return false;
  }
}

void unify(const TypePtr& ain, const TypePtr& bin, SourceLoc loc) {
  TypePtr a = resolve(ain);
  TypePtr b = resolve(bin);
  if (a == b) return;
  auto mismatch = [&]() {
    fail(loc, "type mismatch: expected " + type_to_string(a) + ", found " + type_to_string(b));
  };
  if (a->kind == TypeKind::Var || b->kind == TypeKind::Var) {
    TypePtr var = a->kind == TypeKind::Var ? a : b;
    TypePtr other = var == a ? b : a;
    if (occurs(var->var_id, other)) fail(loc, "recursive type " + type_to_string(other));
    var->link = other;
    return;
  }
  if (a->kind != b->kind) mismatch();
  switch (a->kind) {
    case TypeKind::Int:
    case TypeKind::Float:
    case TypeKind::Bool:
      return;
    case TypeKind::Len:
      if (a->len != b->len) {
        fail(loc, "sequence length mismatch: " + std::to_string(a->len) + " vs " +
                      std::to_string(b->len));
      }
      return;
    case TypeKind::Variant:
      if (a->name != b->name) mismatch();
      return;
    case TypeKind::Record:
      if (a->fields.size() != b->fields.size()) mismatch();
      for (std::size_t i = 0; i < a->fields.size(); ++i) {
        if (a->fields[i].first != b->fields[i].first) mismatch();
      }
      for (std::size_t i = 0; i < a->fields.size(); ++i) {
        unify(a->fields[i].second, b->fields[i].second, loc);
      }
      return;
    case TypeKind::Seq:
      unify(a->elem, b->elem, loc);
      unify(a->length, b->length, loc);
      return;
    case TypeKind::Arrow:
      unify(a->from, b->from, loc);
      unify(a->to, b->to, loc);
      return;
    case TypeKind::Var:
      return;
  }
}

/// Copies a surface annotation, giving unspecified sequence lengths fresh
/// variables so the parsed annotation itself is never mutated.
TypePtr instantiate(const TypePtr& in) {
  TypePtr t = resolve(in);
  if (!t) return fresh_type_var();
  switch (t->kind) {
    case TypeKind::Record: {
      std::vector<std::pair<std::string, TypePtr>> fields;
      for (const auto& [l, ft] : t->fields) fields.emplace_back(l, instantiate(ft));
      return record_type(std::move(fields));
    }
    case TypeKind::Seq:
      return seq_type(instantiate(t->elem), instantiate(t->length));
    case TypeKind::Arrow:
      return arrow_type(instantiate(t->from), instantiate(t->to));
    case TypeKind::Var:
      return fresh_type_var();
    default:
      return t;
  }
}

enum class Binding { Function, Global, Local };

struct Entry {
  std::string name;
  TypePtr type;
  Binding binding;
  std::size_t arity = 0;
};

enum class Pos { Value, Head, Arg };

std::size_t lam_arity(const TermPtr& t) {
  std::size_t n = 0;
  for (TermPtr cur = t; cur->kind == TermKind::Lam; cur = cur->kids[0]) ++n;
  return n;
}

class Checker {
 public:
  DataEnv data;

  void declare_all(const TermPtr& t) {
    if (!t) return;
    if (t->kind == TermKind::TypeDecl) {
      if (data.has_variant(t->name)) fail(t->loc, "type '" + t->name + "' declared twice");
      data.declare_variant(t->name);
    }
    for (const auto& k : t->kids) declare_all(k);
    for (const auto& b : t->bindings) declare_all(b.body);
  }

  void declare_cons(const TermPtr& t) {
    if (!t) return;
    if (t->kind == TermKind::ConDecl) {
      if (data.has_constructor(t->name)) fail(t->loc, "constructor '" + t->name + "' declared twice");
      TypePtr arrow = resolve(t->ann);
      TypePtr payload = zonk(arrow->from);
      std::function<void(const TypePtr&)> check = [&](const TypePtr& ty) {
        TypePtr r = resolve(ty);
        if (!r) fail(t->loc, "constructor payload needs a complete type");
        if (r->kind == TypeKind::Arrow) fail(t->loc, "constructor payloads cannot contain functions");
        if (r->kind == TypeKind::Seq) {
          TypePtr len = resolve(r->length);
          if (!len || len->kind != TypeKind::Len) {
            fail(t->loc, "sequence in constructor payload needs a fixed length, e.g. [Float; 3]");
          }
          check(r->elem);
        }
        for (const auto& f : r->fields) check(f.second);
      };
      check(payload);
      data.declare_constructor(t->name, resolve(arrow->to)->name, payload);
    }
    for (const auto& k : t->kids) declare_cons(k);
    for (const auto& b : t->bindings) declare_cons(b.body);
  }

  TypePtr infer(const TermPtr& t, bool spine, Pos pos = Pos::Value) {
    TypePtr ty = infer_node(t, spine, pos);
    t->type = ty;
    return ty;
  }

  void finish(const TermPtr& t) {
    if (!t) return;
    auto ground = [&](TypePtr& slot, const std::string& what) {
      slot = zonk(slot);
      if (!is_ground(slot)) fail(t->loc, "could not determine the type of " + what);
    };
    if (t->type) ground(t->type, "this expression");
    if (t->binder_type) ground(t->binder_type, "'" + t->name + "'");
    for (auto& b : t->bindings) {
      b.type = zonk(b.type);
      if (!is_ground(b.type)) fail(b.loc, "could not determine the type of '" + b.name + "'");
      finish(b.body);
    }
    if (t->pat) finish_pattern(t->pat);
    for (const auto& k : t->kids) finish(k);
  }

 private:
  std::vector<Entry> env_;

  const Entry* lookup(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }

  // Names whose innermost binding is a top-level constant.
  std::set<std::string> globals() const {
    std::set<std::string> out;
    std::set<std::string> seen;
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (seen.insert(it->name).second && it->binding == Binding::Global) out.insert(it->name);
    }
    return out;
  }

  void finish_pattern(const PatternPtr& p) {
    p->type = zonk(p->type);
    if (!is_ground(p->type)) fail(p->loc, "could not determine the type of this pattern");
    if (p->sub) finish_pattern(p->sub);
    for (const auto& f : p->fields) finish_pattern(f.second);
  }

  void check_captures(const std::string& fname, const TermPtr& lam, const std::set<std::string>& group) {
    for (const auto& v : free_vars(lam)) {
      if (group.count(v)) continue;
      const Entry* e = lookup(v);
      if (e && e->binding == Binding::Local) {
        fail(lam->loc, "function '" + fname + "' captures '" + v +
                           "', which is not a function or top-level constant");
      }
    }
  }

  // Types a function definition `lam x1 ... xn. body` against `fn_type`.
  void check_function(const TermPtr& lam, const TypePtr& fn_type) {
    std::size_t mark = env_.size();
    TermPtr cur = lam;
    TypePtr expected = fn_type;
    while (cur->kind == TermKind::Lam) {
      TypePtr arrow = resolve(expected);
      TypePtr param = cur->ann ? instantiate(cur->ann) : fresh_type_var();
      unify(arrow->from, param, cur->loc);
      cur->binder_type = arrow->from;
      cur->type = arrow;
      env_.push_back({cur->name, arrow->from, Binding::Local});
      expected = arrow->to;
      cur = cur->kids[0];
    }
    unify(expected, infer(cur, false), cur->loc);
    env_.resize(mark);
  }

  TypePtr function_skeleton(const TermPtr& lam, const TypePtr& ann, SourceLoc loc) {
    std::vector<TypePtr> parts;
    for (std::size_t i = 0; i <= lam_arity(lam); ++i) parts.push_back(fresh_type_var());
    TypePtr t = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) t = arrow_type(parts[i], t);
    if (ann) unify(t, instantiate(ann), loc);
    return t;
  }

  TypePtr infer_node(const TermPtr& t, bool spine, Pos pos) {
    switch (t->kind) {
      case TermKind::Var: {
        const Entry* e = lookup(t->name);
        if (!e) fail(t->loc, "unbound variable '" + t->name + "'");
        if (e->binding == Binding::Function && pos != Pos::Head) {
          if (pos == Pos::Arg) fail(t->loc, "functions cannot be passed as arguments ('" + t->name + "')");
          fail(t->loc, "functions are not first-class values ('" + t->name + "')");
        }
        return e->type;
      }
      case TermKind::Builtin:
        if (pos != Pos::Head) fail(t->loc, "builtin '" + t->name + "' must be fully applied");
        return fresh_type_var();
      case TermKind::Const:
        return literal_type(t->lit);
      case TermKind::Lam:
        fail(t->loc, "functions must be bound by a top-level let (nested functions are not supported)");
      case TermKind::App:
        return infer_app(t);
      case TermKind::Let: {
        const TermPtr& rhs = t->kids[0];
        Binding binding = Binding::Local;
        std::size_t arity = 0;
        TypePtr bound;
        if (rhs->kind == TermKind::Lam) {
          if (!spine) fail(rhs->loc, "functions must be bound by a top-level let (nested functions are not supported)");
          check_captures(t->name, rhs, {});
          bound = function_skeleton(rhs, t->ann, t->loc);
          check_function(rhs, bound);
          rhs->type = bound;
          binding = Binding::Function;
          arity = lam_arity(rhs);
        } else {
          bound = infer(rhs, false);
          if (t->ann) unify(instantiate(t->ann), bound, t->loc);
          if (spine && is_constant_expr(rhs, globals())) binding = Binding::Global;
        }
        t->binder_type = bound;
        env_.push_back({t->name, bound, binding, arity});
        TypePtr body = infer(t->kids[1], spine);
        env_.pop_back();
        return body;
      }
      case TermKind::RecLet: {
        if (!spine) fail(t->loc, "recursive functions must be defined at top level");
        std::set<std::string> group;
        std::size_t mark = env_.size();
        for (auto& b : t->bindings) {
          if (b.body->kind != TermKind::Lam) fail(b.loc, "recursive binding '" + b.name + "' must be a function");
          group.insert(b.name);
          b.type = function_skeleton(b.body, b.ann, b.loc);
          env_.push_back({b.name, b.type, Binding::Function, lam_arity(b.body)});
        }
        for (auto& b : t->bindings) check_captures(b.name, b.body, group);
        for (auto& b : t->bindings) {
          check_function(b.body, b.type);
          b.body->type = b.type;
        }
        TypePtr body = infer(t->kids[0], spine);
        env_.resize(mark);
        return body;
      }
      case TermKind::Con: {
        if (!data.has_constructor(t->name)) fail(t->loc, "unknown constructor '" + t->name + "'");
        const auto& con = data.constructor(t->name);
        unify(con.payload, infer(t->kids[0], false, Pos::Arg), t->kids[0]->loc);
        if (data.is_recursive(con.variant) && !is_constant_expr(t, globals())) {
          fail(t->loc, "dynamically sized return value: '" + t->name + "' builds a value of recursive type '" +
                           con.variant + "' at run time, which needs heap allocation");
        }
        return variant_type(con.variant);
      }
      case TermKind::Match: {
        TypePtr scrut = infer(t->kids[0], false);
        std::size_t mark = env_.size();
        check_pattern(t->pat, scrut);
        TypePtr thn = infer(t->kids[1], false);
        env_.resize(mark);
        TypePtr els = infer(t->kids[2], false);
        unify(thn, els, t->kids[2]->loc);
        return thn;
      }
      case TermKind::If:
      case TermKind::Seq:
        fail(t->loc, "internal: typecheck_lite expects a desugared term");
      case TermKind::SeqLit: {
        TypePtr elem = fresh_type_var();
        for (const auto& k : t->kids) unify(elem, infer(k, false, Pos::Arg), k->loc);
        return seq_type(elem, len_type(t->kids.size()));
      }
      case TermKind::Record: {
        std::vector<std::pair<std::string, TypePtr>> fields;
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
          fields.emplace_back(t->labels[i], infer(t->kids[i], false, Pos::Arg));
        }
        return record_type(std::move(fields));
      }
      case TermKind::Assume:
        return infer(t->kids[0], false);
      case TermKind::Weight:
        unify(float_type(), infer(t->kids[0], false, Pos::Arg), t->kids[0]->loc);
        return unit_type();
      case TermKind::Observe: {
        TypePtr value = infer(t->kids[0], false, Pos::Arg);
        unify(infer(t->kids[1], false), value, t->kids[0]->loc);
        return unit_type();
      }
      case TermKind::Dist: {
        const auto& info = dist_info(t->dist);
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
          unify(scalar(info.params[i]), infer(t->kids[i], false, Pos::Arg), t->kids[i]->loc);
        }
        return scalar(info.result);
      }
      case TermKind::Resample:
        return unit_type();
      case TermKind::TypeDecl:
      case TermKind::ConDecl:
        return infer(t->kids[0], spine);
    }
    fail(t->loc, "internal: unknown term");
  }

  TypePtr infer_app(const TermPtr& t) {
    const TermPtr& head = t->kids[0];
    std::size_t nargs = t->kids.size() - 1;
    if (head->kind == TermKind::Builtin) {
      const BuiltinInfo* b = builtin_by_name(head->name);
      if (nargs != b->arity) {
        fail(t->loc, "builtin '" + head->name + "' expects " + std::to_string(b->arity) +
                         " argument(s), got " + std::to_string(nargs));
      }
      std::vector<TypePtr> args;
      for (std::size_t i = 1; i < t->kids.size(); ++i) args.push_back(infer(t->kids[i], false, Pos::Arg));
      auto expect = [&](std::size_t i, TypePtr ty) { unify(ty, args[i], t->kids[i + 1]->loc); };
      using S = BuiltinSig;
      switch (b->sig) {
        case S::IntIntInt:
          expect(0, int_type()), expect(1, int_type());
          return int_type();
        case S::IntInt:
          expect(0, int_type());
          return int_type();
        case S::IntIntBool:
          expect(0, int_type()), expect(1, int_type());
          return bool_type();
        case S::FloatFloatFloat:
          expect(0, float_type()), expect(1, float_type());
          return float_type();
        case S::FloatFloat:
          expect(0, float_type());
          return float_type();
        case S::FloatFloatBool:
          expect(0, float_type()), expect(1, float_type());
          return bool_type();
        case S::IntFloat:
          expect(0, int_type());
          return float_type();
        case S::BoolBoolBool:
          expect(0, bool_type()), expect(1, bool_type());
          return bool_type();
        case S::BoolBool:
          expect(0, bool_type());
          return bool_type();
        case S::Get: {
          TypePtr elem = fresh_type_var();
          expect(0, seq_type(elem, fresh_type_var()));
          expect(1, int_type());
          return elem;
        }
        case S::Length:
          expect(0, seq_type(fresh_type_var(), fresh_type_var()));
          return int_type();
      }
    }
    if (head->kind != TermKind::Var) fail(head->loc, "only named functions can be applied");
    const Entry* e = lookup(head->name);
    if (!e) fail(head->loc, "unbound variable '" + head->name + "'");
    if (e->binding != Binding::Function) fail(head->loc, "'" + head->name + "' is not a function");
    if (nargs != e->arity) {
      fail(t->loc, "function '" + head->name + "' expects " + std::to_string(e->arity) +
                       " argument(s), got " + std::to_string(nargs) +
                       " (partial application is not supported)");
    }
    TypePtr fn = infer(head, false, Pos::Head);
    for (std::size_t i = 1; i < t->kids.size(); ++i) {
      TypePtr arrow = resolve(fn);
      unify(arrow->from, infer(t->kids[i], false, Pos::Arg), t->kids[i]->loc);
      fn = arrow->to;
    }
    return fn;
  }

  void check_pattern(const PatternPtr& p, const TypePtr& scrut) {
    p->type = scrut;
    switch (p->kind) {
      case PatKind::Wild:
        return;
      case PatKind::Var:
        env_.push_back({p->name, scrut, Binding::Local});
        return;
      case PatKind::Lit:
        unify(scrut, literal_type(p->lit), p->loc);
        return;
      case PatKind::Con: {
        if (!data.has_constructor(p->name)) fail(p->loc, "unknown constructor '" + p->name + "'");
        const auto& con = data.constructor(p->name);
        unify(scrut, variant_type(con.variant), p->loc);
        check_pattern(p->sub, con.payload);
        return;
      }
      case PatKind::Record: {
        TypePtr r = resolve(scrut);
        if (r->kind != TypeKind::Record) {
          fail(p->loc, "record pattern needs a scrutinee of known record type, found " + type_to_string(r));
        }
        for (const auto& [label, sub] : p->fields) {
          TypePtr field;
          for (const auto& f : r->fields) {
            if (f.first == label) field = f.second;
          }
          if (!field) fail(sub->loc, "record type " + type_to_string(r) + " has no label '" + label + "'");
          check_pattern(sub, field);
        }
        return;
      }
    }
  }
};

}  // namespace

bool is_constant_expr(const TermPtr& t, const std::set<std::string>& globals) {
  switch (t->kind) {
    case TermKind::Const:
      return true;
    case TermKind::Var:
      return globals.count(t->name) > 0;
    case TermKind::Record:
    case TermKind::SeqLit:
    case TermKind::Con:
      for (const auto& k : t->kids) {
        if (!is_constant_expr(k, globals)) return false;
      }
      return true;
    default:
      return false;
  }
}

CheckedProgram typecheck_lite(const TermPtr& input) {
  TermPtr t = clone(input);
  std::function<void(const TermPtr&)> check_sugar = [&](const TermPtr& n) {
    if (n->kind == TermKind::If || n->kind == TermKind::Seq) {
      throw CompileError("typecheck", n->loc, "internal: typecheck_lite expects a desugared term");
    }
    if (n->pat && !is_shallow(n->pat)) {
      throw CompileError("typecheck", n->loc, "internal: nested pattern survived desugaring");
    }
    for (const auto& k : n->kids) check_sugar(k);
    for (const auto& b : n->bindings) check_sugar(b.body);
  };
  check_sugar(t);
  Checker c;
  c.declare_all(t);
  c.declare_cons(t);
  c.data.finalize();
  c.infer(t, true);
  c.finish(t);
  return {t, std::move(c.data)};
}

}  // namespace pcfg
