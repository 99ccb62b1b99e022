#include "pcfg/printer.hpp"

namespace pcfg {

namespace {

bool is_seq_binder(const std::string& name) {
  if (name.size() <= 4 || name.compare(0, 4, "_seq") != 0) return false;
  return name.find_first_not_of("0123456789", 4) == std::string::npos;
}

bool multiline(const std::string& s) { return s.find('\n') != std::string::npos; }

std::string pad(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

std::string ann_suffix(const TypePtr& ann) {
  return ann ? ": " + type_to_string(ann) : "";
}

bool is_if_pattern(const PatternPtr& p) {
  return p->kind == PatKind::Lit && std::holds_alternative<bool>(p->lit) && std::get<bool>(p->lit);
}

class Printer {
 public:
  std::string term(const TermPtr& t, int ind) {
    switch (t->kind) {
      case TermKind::Lam: {
        std::string head = "lam " + t->name + ann_suffix(t->ann) + ".";
        std::string body = term(t->kids[0], ind + 2);
        if (multiline(body)) return head + "\n" + pad(ind + 2) + body;
        return head + " " + body;
      }
      case TermKind::Let: {
        const TermPtr& rhs = t->kids[0];
        std::string body = term(t->kids[1], ind);
        if (is_seq_binder(t->name) && !t->ann && !free_vars(t->kids[1]).count(t->name)) {
          return group_app(rhs, ind) + ";\n" + pad(ind) + body;
        }
        std::string head = "let " + t->name + ann_suffix(t->ann) + " =";
        std::string value = term(rhs, ind + 2);
        if (multiline(value)) {
          return head + "\n" + pad(ind + 2) + value + " in\n" + pad(ind) + body;
        }
        return head + " " + value + " in\n" + pad(ind) + body;
      }
      case TermKind::RecLet: {
        std::string out = "recursive";
        for (const auto& b : t->bindings) {
          out += "\n" + pad(ind + 2) + "let " + b.name + ann_suffix(b.ann) + " =\n" +
                 pad(ind + 4) + term(b.body, ind + 4);
        }
        return out + "\n" + pad(ind) + "in\n" + pad(ind) + term(t->kids[0], ind);
      }
      case TermKind::Match:
      case TermKind::If: {
        std::string head;
        if (t->kind == TermKind::If || is_if_pattern(t->pat)) {
          head = "if " + term(t->kids[0], ind + 2) + " then";
        } else {
          head = "match " + term(t->kids[0], ind + 2) + " with " + pattern(t->pat) + " then";
        }
        std::string thn = term(t->kids[1], ind + 2);
        std::string els = term(t->kids[2], ind + 2);
        if (!multiline(head) && !multiline(thn) && !multiline(els) &&
            head.size() + thn.size() + els.size() < 72) {
          return head + " " + thn + " else " + els;
        }
        std::string out = head + "\n" + pad(ind + 2) + thn + "\n" + pad(ind) + "else";
        if (multiline(els)) return out + "\n" + pad(ind + 2) + els;
        return out + " " + els;
      }
      case TermKind::Seq:
        return group_app(t->kids[0], ind) + ";\n" + pad(ind) + term(t->kids[1], ind);
      case TermKind::TypeDecl:
        return "type " + t->name + " in\n" + pad(ind) + term(t->kids[0], ind);
      case TermKind::ConDecl:
        return "con " + t->name + " : " + type_to_string(t->ann) + " in\n" + pad(ind) +
               term(t->kids[0], ind);
      default:
        return app(t, ind);
    }
  }

  std::string pattern(const PatternPtr& p) {
    switch (p->kind) {
      case PatKind::Wild:
        return "_";
      case PatKind::Var:
        return p->name;
      case PatKind::Lit:
        return literal_to_string(p->lit);
      case PatKind::Con: {
        std::string sub = pattern(p->sub);
        if (p->sub->kind == PatKind::Con) sub = "(" + sub + ")";
        return p->name + " " + sub;
      }
      case PatKind::Record: {
        std::string out = "{";
        for (std::size_t i = 0; i < p->fields.size(); ++i) {
          if (i) out += ", ";
          out += p->fields[i].first + " = " + pattern(p->fields[i].second);
        }
        return out + "}";
      }
    }
    return "?";
  }

 private:
  static bool is_app_level(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Lam:
      case TermKind::Let:
      case TermKind::RecLet:
      case TermKind::Match:
      case TermKind::If:
      case TermKind::Seq:
      case TermKind::TypeDecl:
      case TermKind::ConDecl:
        return false;
      default:
        return true;
    }
  }

  static bool is_atom(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var:
      case TermKind::Builtin:
      case TermKind::Const:
      case TermKind::SeqLit:
      case TermKind::Record:
        return true;
      default:
        return false;
    }
  }

  std::string group_app(const TermPtr& t, int ind) {
    if (is_app_level(t)) return app(t, ind);
    return "(" + term(t, ind + 1) + ")";
  }

  std::string atom(const TermPtr& t, int ind) {
    if (is_atom(t)) return app(t, ind);
    return "(" + term(t, ind + 1) + ")";
  }

  std::string app(const TermPtr& t, int ind) {
    switch (t->kind) {
      case TermKind::Var:
      case TermKind::Builtin:
        return t->name;
      case TermKind::Const:
        return literal_to_string(t->lit);
      case TermKind::Resample:
        return "resample";
      case TermKind::App: {
        std::string out = atom(t->kids[0], ind);
        for (std::size_t i = 1; i < t->kids.size(); ++i) out += " " + atom(t->kids[i], ind);
        return out;
      }
      case TermKind::Con:
        return t->name + " " + atom(t->kids[0], ind);
      case TermKind::Dist: {
        std::string out = dist_info(t->dist).name;
        for (const auto& k : t->kids) out += " " + atom(k, ind);
        return out;
      }
      case TermKind::Assume:
        return "assume " + atom(t->kids[0], ind);
      case TermKind::Weight:
        return "weight " + atom(t->kids[0], ind);
      case TermKind::Observe:
        return "observe " + atom(t->kids[0], ind) + " " + atom(t->kids[1], ind);
      case TermKind::SeqLit: {
        std::string out = "[";
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
          if (i) out += ", ";
          out += term(t->kids[i], ind + 1);
        }
        return out + "]";
      }
      case TermKind::Record: {
        std::string out = "{";
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
          if (i) out += ", ";
          out += t->labels[i] + " = " + term(t->kids[i], ind + 1);
        }
        return out + "}";
      }
      default:
        return "(" + term(t, ind + 1) + ")";
    }
  }
};

}  // namespace

std::string print_term(const TermPtr& t) {
  Printer p;
  return p.term(t, 0) + "\n";
}

std::string print_pattern(const PatternPtr& p) {
  Printer printer;
  return printer.pattern(p);
}

}  // namespace pcfg
