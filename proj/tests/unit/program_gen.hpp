#pragma once

#include <string>
#include <vector>

#include "common.hpp"

/// Random well-typed source programs over Int, Float and Bool. Every
/// program terminates: helper functions are non-recursive, and the one
/// recursive function counts a literal argument down to zero.
class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : g_(seed) {}

  std::string program() {
    std::string out;
    std::size_t helpers = g_.below(3);
    for (std::size_t k = 0; k < helpers; ++k) out += helper();
    if (g_.coin()) out += recursive();
    scope_.clear();
    char ty = type();
    out += expr(ty, 4);
    return out;
  }

 private:
  struct Var {
    std::string name;
    char ty;
  };
  struct Fn {
    std::string name;
    std::vector<char> params;
    char ret;
    bool counter = false;
  };

  Gen g_;
  int fresh_ = 0;
  std::vector<Var> scope_;
  std::vector<Fn> fns_;

  char type() { return "ifb"[g_.below(3)]; }

  static std::string type_name(char t) { return t == 'i' ? "Int" : t == 'f' ? "Float" : "Bool"; }

  std::string name(const char* prefix) { return prefix + std::to_string(++fresh_); }

  std::string helper() {
    Fn f{name("h"), {}, type()};
    std::size_t n = 1 + g_.below(2);
    scope_.clear();
    std::string sig, lams;
    for (std::size_t i = 0; i < n; ++i) {
      char t = type();
      f.params.push_back(t);
      std::string p = name("p");
      scope_.push_back({p, t});
      sig += type_name(t) + " -> ";
      lams += "lam " + p + ". ";
    }
    std::string body = expr(f.ret, 3);
    fns_.push_back(f);
    return "let " + f.name + ": " + sig + type_name(f.ret) + " = " + lams + body + " in\n";
  }

  std::string recursive() {
    Fn f{name("r"), {'i', 'f'}, 'f', true};
    std::string n = name("p"), acc = name("p");
    scope_ = {{n, 'i'}, {acc, 'f'}};
    std::string step = expr('f', 2);
    fns_.push_back(f);
    return "recursive let " + f.name + ": Int -> Float -> Float = lam " + n + ". lam " + acc + ".\n  if eqi " + n +
           " 0 then " + acc + " else (resample; " + f.name + " (subi " + n + " 1) " + step + ")\nin\n";
  }

  std::string literal(char ty) {
    switch (ty) {
      case 'i':
        return std::to_string(static_cast<int>(g_.below(7)) - 3);
      case 'f':
        return std::to_string(static_cast<int>(g_.below(9)) - 4) + "." + std::to_string(g_.below(10));
      default:
        return g_.coin() ? "true" : "false";
    }
  }

  std::string leaf(char ty) {
    std::vector<const Var*> vars;
    for (const auto& v : scope_)
      if (v.ty == ty) vars.push_back(&v);
    if (!vars.empty() && g_.below(3) != 0) return vars[g_.below(vars.size())]->name;
    return literal(ty);
  }

  std::string builtin(char ty, int d) {
    static const char* ints[] = {"addi", "subi", "muli"};
    static const char* floats[] = {"addf", "subf", "mulf"};
    switch (ty) {
      case 'i':
        return std::string(ints[g_.below(3)]) + " " + expr('i', d) + " " + expr('i', d);
      case 'f':
        if (g_.below(4) == 0) return "int2float " + expr('i', d);
        return std::string(floats[g_.below(3)]) + " " + expr('f', d) + " " + expr('f', d);
      default:
        switch (g_.below(4)) {
          case 0:
            return "eqi " + expr('i', d) + " " + expr('i', d);
          case 1:
            return "geqf " + expr('f', d) + " " + expr('f', d);
          case 2:
            return "leqf " + expr('f', d) + " " + expr('f', d);
          default:
            return "and " + expr('b', d) + " " + expr('b', d);
        }
    }
  }

  std::string assume(char ty, int d) {
    switch (ty) {
      case 'i':
        return "assume (Poisson 2.)";
      case 'f':
        return "assume (Normal " + expr('f', d) + " 1.)";
      default:
        return "assume (Bernoulli 0.5)";
    }
  }

  std::string call(char ty, int d) {
    std::vector<const Fn*> cands;
    for (const auto& f : fns_)
      if (f.ret == ty) cands.push_back(&f);
    if (cands.empty()) return builtin(ty, d);
    const Fn& f = *cands[g_.below(cands.size())];
    std::string out = f.name;
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (f.counter && i == 0)
        out += " " + std::to_string(g_.below(4));
      else
        out += " " + expr(f.params[i], d);
    }
    return out;
  }

  std::string expr(char ty, int depth) {
    if (depth <= 0) return leaf(ty);
    int d = depth - 1;
    switch (g_.below(12)) {
      case 0:
      case 1:
        return leaf(ty);
      case 2: {
        char t = type();
        std::string rhs = expr(t, d);
        std::string v = name("v");
        scope_.push_back({v, t});
        std::string body = expr(ty, d);
        scope_.pop_back();
        return "(let " + v + " = " + rhs + " in " + body + ")";
      }
      case 3:
        return "(if " + expr('b', d) + " then " + expr(ty, d) + " else " + expr(ty, d) + ")";
      case 4:
        return "(" + builtin(ty, d) + ")";
      case 5:
        return "(" + assume(ty, d) + ")";
      case 6:
        return "(weight " + expr('f', d) + "; " + expr(ty, d) + ")";
      case 7:
        return "(resample; " + expr(ty, d) + ")";
      case 8:
        return "(observe " + expr('f', d) + " (Normal " + expr('f', d) + " 2.); " + expr(ty, d) + ")";
      case 9:
        return "(" + call(ty, d) + ")";
      case 10: {
        std::string a = expr('i', d), b = expr('f', d);
        std::string va = name("v"), vb = name("v");
        scope_.push_back({va, 'i'});
        scope_.push_back({vb, 'f'});
        std::string thn = expr(ty, d);
        scope_.resize(scope_.size() - 2);
        return "(match {a = " + a + ", b = " + b + "} with {a = " + va + ", b = " + vb + "} then " + thn +
               " else " + expr(ty, d) + ")";
      }
      default:
        if (ty == 'f')
          return "(get [" + expr('f', d) + ", " + expr('f', d) + ", " + expr('f', d) + "] " +
                 std::to_string(g_.below(3)) + ")";
        return "(" + call(ty, d) + ")";
    }
  }
};
