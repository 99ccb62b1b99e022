#include "interpreter.hpp"

#include <cmath>
#include <stdexcept>

#include "pcfg/dists.hpp"

namespace oracle {

using pcfg::PatKind;
using pcfg::TermKind;
using pcfg::TermPtr;

namespace {

struct Env;
using EnvPtr = std::shared_ptr<const Env>;
struct Env {
  std::string name;
  OValue value;
  EnvPtr next;
};

EnvPtr extend(EnvPtr env, const std::string& name, OValue v) {
  return std::make_shared<const Env>(Env{name, std::move(v), std::move(env)});
}

struct Closure {
  TermPtr lam;
  EnvPtr env;
};

OValue vint(std::int64_t i) {
  OValue v;
  v.kind = OValue::Int;
  v.i = i;
  return v;
}
OValue vfloat(double f) {
  OValue v;
  v.kind = OValue::Float;
  v.f = f;
  return v;
}
OValue vbool(bool b) {
  OValue v;
  v.kind = OValue::Bool;
  v.b = b;
  return v;
}
OValue unit() { return OValue{}; }

double num(const OValue& v) { return v.kind == OValue::Int ? static_cast<double>(v.i) : v.f; }

class Interp {
 public:
  Interp(pcfg::Rng rng, const std::vector<pcfg::Cell>* replay) : rng_(rng), replay_(replay) {}

  OracleRun run(const TermPtr& t) {
    OracleRun r;
    r.value = eval(t, nullptr, 0);
    r.log_weight = log_weight_;
    r.tape = std::move(tape_);
    if (replay_ && pos_ != replay_->size()) throw std::runtime_error("tape not fully consumed");
    return r;
  }

 private:
  pcfg::Rng rng_;
  const std::vector<pcfg::Cell>* replay_;
  std::size_t pos_ = 0;
  std::vector<pcfg::Cell> tape_;
  double log_weight_ = 0.0;
  std::map<std::string, Closure> functions_;

  const OValue& lookup(const EnvPtr& env, const std::string& name) {
    for (const Env* e = env.get(); e; e = e->next.get()) {
      if (e->name == name) return e->value;
    }
    throw std::runtime_error("oracle: unbound " + name);
  }

  OValue literal(const pcfg::Literal& lit) {
    if (auto i = std::get_if<std::int64_t>(&lit)) return vint(*i);
    if (auto d = std::get_if<double>(&lit)) return vfloat(*d);
    return vbool(std::get<bool>(lit));
  }

  bool match(const pcfg::PatternPtr& p, const OValue& v, EnvPtr& env) {
    switch (p->kind) {
      case PatKind::Wild:
        return true;
      case PatKind::Var:
        env = extend(env, p->name, v);
        return true;
      case PatKind::Lit: {
        OValue l = literal(p->lit);
        if (l.kind == OValue::Int) return v.i == l.i;
        if (l.kind == OValue::Float) return v.f == l.f;
        return v.b == l.b;
      }
      case PatKind::Con:
        if (v.con != p->name) return false;
        return match(p->sub, v.elems[0], env);
      case PatKind::Record:
        for (const auto& [label, sub] : p->fields) {
          if (!match(sub, v.fields.at(label), env)) return false;
        }
        return true;
    }
    return false;
  }

  pcfg::DistParams params(const TermPtr& d, const EnvPtr& env, int depth) {
    pcfg::DistParams p{0.0, 0.0};
    for (std::size_t i = 0; i < d->kids.size(); ++i) p[i] = num(eval(d->kids[i], env, depth));
    pcfg::validate_params(d->dist, p);
    return p;
  }

  OValue from_cell(pcfg::DistKind k, pcfg::Cell c) {
    switch (pcfg::dist_info(k).result) {
      case pcfg::TypeKind::Bool:
        return vbool(pcfg::as_bool(c));
      case pcfg::TypeKind::Int:
        return vint(pcfg::as_int(c));
      default:
        return vfloat(pcfg::as_float(c));
    }
  }

  pcfg::Cell to_cell(const OValue& v) {
    switch (v.kind) {
      case OValue::Int:
        return pcfg::from_int(v.i);
      case OValue::Float:
        return pcfg::from_float(v.f);
      case OValue::Bool:
        return pcfg::from_bool(v.b);
      default:
        throw std::runtime_error("oracle: non-scalar observation");
    }
  }

  OValue builtin(const std::string& name, const std::vector<OValue>& a) {
    if (name == "addi") return vint(a[0].i + a[1].i);
    if (name == "subi") return vint(a[0].i - a[1].i);
    if (name == "muli") return vint(a[0].i * a[1].i);
    if (name == "divi" || name == "modi") {
      if (a[1].i == 0) throw std::runtime_error("division by zero");
      return vint(name == "divi" ? a[0].i / a[1].i : a[0].i % a[1].i);
    }
    if (name == "negi") return vint(-a[0].i);
    if (name == "eqi") return vbool(a[0].i == a[1].i);
    if (name == "neqi") return vbool(a[0].i != a[1].i);
    if (name == "lti") return vbool(a[0].i < a[1].i);
    if (name == "leqi") return vbool(a[0].i <= a[1].i);
    if (name == "gti") return vbool(a[0].i > a[1].i);
    if (name == "geqi") return vbool(a[0].i >= a[1].i);
    if (name == "addf") return vfloat(a[0].f + a[1].f);
    if (name == "subf") return vfloat(a[0].f - a[1].f);
    if (name == "mulf") return vfloat(a[0].f * a[1].f);
    if (name == "divf") return vfloat(a[0].f / a[1].f);
    if (name == "pow") return vfloat(std::pow(a[0].f, a[1].f));
    if (name == "negf") return vfloat(-a[0].f);
    if (name == "eqf") return vbool(a[0].f == a[1].f);
    if (name == "neqf") return vbool(a[0].f != a[1].f);
    if (name == "ltf") return vbool(a[0].f < a[1].f);
    if (name == "leqf") return vbool(a[0].f <= a[1].f);
    if (name == "gtf") return vbool(a[0].f > a[1].f);
    if (name == "geqf") return vbool(a[0].f >= a[1].f);
    if (name == "log") return vfloat(std::log(a[0].f));
    if (name == "exp") return vfloat(std::exp(a[0].f));
    if (name == "sqrt") return vfloat(std::sqrt(a[0].f));
    if (name == "int2float") return vfloat(static_cast<double>(a[0].i));
    if (name == "and") return vbool(a[0].b && a[1].b);
    if (name == "or") return vbool(a[0].b || a[1].b);
    if (name == "not") return vbool(!a[0].b);
    if (name == "length") return vint(static_cast<std::int64_t>(a[0].elems.size()));
    if (name == "get") {
      if (a[1].i < 0 || a[1].i >= static_cast<std::int64_t>(a[0].elems.size())) {
        throw std::runtime_error("index out of range");
      }
      return a[0].elems[static_cast<std::size_t>(a[1].i)];
    }
    throw std::runtime_error("oracle: unknown builtin " + name);
  }

  OValue eval(TermPtr t, EnvPtr env, int depth) {
    if (depth > 100000) throw std::runtime_error("oracle: recursion too deep");
    for (;;) {
      switch (t->kind) {
        case TermKind::Var:
          return lookup(env, t->name);
        case TermKind::Const:
          return literal(t->lit);
        case TermKind::TypeDecl:
        case TermKind::ConDecl:
          t = t->kids[0];
          continue;
        case TermKind::RecLet:
          for (const auto& b : t->bindings) functions_[b.name] = {b.body, env};
          t = t->kids[0];
          continue;
        case TermKind::Let:
          if (t->kids[0]->kind == TermKind::Lam) {
            functions_[t->name] = {t->kids[0], env};
          } else {
            env = extend(env, t->name, eval(t->kids[0], env, depth + 1));
          }
          t = t->kids[1];
          continue;
        case TermKind::Match: {
          OValue scrut = eval(t->kids[0], env, depth + 1);
          EnvPtr inner = env;
          if (match(t->pat, scrut, inner)) {
            env = inner;
            t = t->kids[1];
          } else {
            t = t->kids[2];
          }
          continue;
        }
        case TermKind::Record: {
          OValue v;
          for (std::size_t i = 0; i < t->kids.size(); ++i) v.fields[t->labels[i]] = eval(t->kids[i], env, depth + 1);
          return v;
        }
        case TermKind::SeqLit: {
          OValue v;
          v.kind = OValue::Seq;
          for (const auto& k : t->kids) v.elems.push_back(eval(k, env, depth + 1));
          return v;
        }
        case TermKind::Con: {
          OValue v;
          v.kind = OValue::Con;
          v.con = t->name;
          v.elems.push_back(eval(t->kids[0], env, depth + 1));
          return v;
        }
        case TermKind::Assume: {
          const TermPtr& d = t->kids[0];
          pcfg::DistParams p = params(d, env, depth);
          pcfg::Cell c;
          if (replay_) {
            if (pos_ >= replay_->size()) throw std::runtime_error("tape exhausted");
            c = (*replay_)[pos_++];
          } else {
            c = pcfg::sample(d->dist, p, rng_);
            tape_.push_back(c);
          }
          return from_cell(d->dist, c);
        }
        case TermKind::Observe: {
          OValue x = eval(t->kids[0], env, depth + 1);
          const TermPtr& d = t->kids[1];
          pcfg::DistParams p = params(d, env, depth);
          log_weight_ += pcfg::log_density(d->dist, p, to_cell(x));
          return unit();
        }
        case TermKind::Weight:
          log_weight_ += eval(t->kids[0], env, depth + 1).f;
          return unit();
        case TermKind::Resample:
          return unit();
        case TermKind::App: {
          std::vector<OValue> args;
          for (std::size_t i = 1; i < t->kids.size(); ++i) args.push_back(eval(t->kids[i], env, depth + 1));
          const TermPtr& head = t->kids[0];
          if (head->kind == TermKind::Builtin) return builtin(head->name, args);
          const Closure& c = functions_.at(head->name);
          EnvPtr fenv = c.env;
          TermPtr body = c.lam;
          for (auto& a : args) {
            fenv = extend(fenv, body->name, std::move(a));
            body = body->kids[0];
          }
          return eval(body, fenv, depth + 1);
        }
        default:
          throw std::runtime_error("oracle: unexpected term");
      }
    }
  }
};

}  // namespace

OracleRun interpret_direct(const TermPtr& anf, pcfg::Rng rng) { return Interp(rng, nullptr).run(anf); }

OracleRun interpret_replay(const TermPtr& anf, const std::vector<pcfg::Cell>& tape) {
  OracleRun r = Interp(pcfg::Rng(0), &tape).run(anf);
  r.tape = tape;
  return r;
}

pcfg::Value to_value(const OValue& v) {
  pcfg::Value out;
  switch (v.kind) {
    case OValue::Int:
      out.kind = pcfg::Value::Int;
      out.scalar = pcfg::from_int(v.i);
      return out;
    case OValue::Float:
      out.kind = pcfg::Value::Float;
      out.scalar = pcfg::from_float(v.f);
      return out;
    case OValue::Bool:
      out.kind = pcfg::Value::Bool;
      out.scalar = pcfg::from_bool(v.b);
      return out;
    case OValue::Record:
      out.kind = pcfg::Value::Record;
      for (const auto& [label, f] : v.fields) {
        out.labels.push_back(label);
        out.kids.push_back(to_value(f));
      }
      return out;
    case OValue::Seq:
      out.kind = pcfg::Value::Seq;
      for (const auto& e : v.elems) out.kids.push_back(to_value(e));
      return out;
    case OValue::Con:
      out.kind = pcfg::Value::Con;
      out.con = v.con;
      out.kids.push_back(to_value(v.elems[0]));
      return out;
  }
  return out;
}

}  // namespace oracle
