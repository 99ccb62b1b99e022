#include "pcfg/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <vector>

#include "pcfg/desugar.hpp"

namespace pcfg {

namespace {

enum class Tok { Ident, UIdent, Int, Float, Keyword, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

const std::set<std::string> kKeywords = {
    "lam",    "let",     "in",     "recursive", "match",    "with",  "then", "else",
    "if",     "assume",  "weight", "observe",   "resample", "true",  "false", "type",
    "con"};

[[noreturn]] void fail(SourceLoc loc, const std::string& msg) {
  throw CompileError("parse", loc, msg);
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto is_ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.loc = {line, col};
    bool negative_number = c == '-' && i + 1 < src.size() &&
                           std::isdigit(static_cast<unsigned char>(src[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || negative_number) {
      std::size_t j = i + (negative_number ? 1 : 0);
      bool is_float = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        is_float = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      tok.kind = is_float ? Tok::Float : Tok::Int;
      tok.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(tok);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      tok.text = src.substr(i, j - i);
      if (kKeywords.count(tok.text)) {
        tok.kind = Tok::Keyword;
      } else if (std::isupper(static_cast<unsigned char>(c))) {
        tok.kind = Tok::UIdent;
      } else {
        tok.kind = Tok::Ident;
      }
      advance(j - i);
      out.push_back(tok);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      tok.kind = Tok::Punct;
      tok.text = "->";
      advance(2);
      out.push_back(tok);
      continue;
    }
    if (std::string("()[]{},;=:.").find(c) != std::string::npos) {
      tok.kind = Tok::Punct;
      tok.text = std::string(1, c);
      advance(1);
      out.push_back(tok);
      continue;
    }
    fail(tok.loc, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.loc = {line, col};
  out.push_back(end);
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End:
      return "end of input";
    case Tok::Keyword:
      return "keyword '" + t.text + "'";
    default:
      return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  TermPtr program() {
    TermPtr t = term();
    if (peek().kind != Tok::End) fail(peek().loc, "expected end of input, found " + describe(peek()));
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> cons_;
  std::vector<std::string> types_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_punct(const char* p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }
  bool at_kw(const char* k) const {
    return peek().kind == Tok::Keyword && peek().text == k;
  }
  void expect_punct(const char* p) {
    if (!at_punct(p)) fail(peek().loc, std::string("expected '") + p + "', found " + describe(peek()));
    next();
  }
  void expect_kw(const char* k) {
    if (!at_kw(k)) fail(peek().loc, std::string("expected '") + k + "', found " + describe(peek()));
    next();
  }

  std::string binder() {
    if (peek().kind != Tok::Ident) fail(peek().loc, "expected identifier, found " + describe(peek()));
    Token t = next();
    if (t.text == "_") fail(t.loc, "'_' cannot be bound");
    if (builtin_by_name(t.text)) fail(t.loc, "cannot rebind builtin '" + t.text + "'");
    return t.text;
  }

  bool in_scope(const std::vector<std::string>& s, const std::string& name) const {
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      if (*it == name) return true;
    }
    return false;
  }

  TypePtr type() {
    TypePtr lhs = type_atom();
    if (at_punct("->")) {
      next();
      return arrow_type(lhs, type());
    }
    return lhs;
  }

  TypePtr type_atom() {
    Token t = peek();
    if (t.kind == Tok::UIdent) {
      next();
      if (t.text == "Int") return int_type();
      if (t.text == "Float") return float_type();
      if (t.text == "Bool") return bool_type();
      if (!in_scope(types_, t.text)) fail(t.loc, "unknown type '" + t.text + "'");
      return variant_type(t.text);
    }
    if (at_punct("(")) {
      next();
      TypePtr inner = type();
      expect_punct(")");
      return inner;
    }
    if (at_punct("[")) {
      next();
      TypePtr elem = type();
      TypePtr len;
      if (at_punct(";")) {
        next();
        if (peek().kind != Tok::Int) fail(peek().loc, "expected sequence length");
        len = len_type(static_cast<std::size_t>(std::stoll(next().text)));
      }
      expect_punct("]");
      return seq_type(elem, len);
    }
    if (at_punct("{")) {
      next();
      std::vector<std::pair<std::string, TypePtr>> fields;
      std::set<std::string> seen;
      while (!at_punct("}")) {
        if (peek().kind != Tok::Ident) fail(peek().loc, "expected record label, found " + describe(peek()));
        Token label = next();
        if (!seen.insert(label.text).second) fail(label.loc, "duplicate label '" + label.text + "'");
        expect_punct(":");
        fields.emplace_back(label.text, type());
        if (!at_punct(",")) break;
        next();
      }
      expect_punct("}");
      return record_type(std::move(fields));
    }
    fail(t.loc, "expected type, found " + describe(t));
  }

  TypePtr opt_annotation() {
    if (!at_punct(":")) return nullptr;
    next();
    return type();
  }

  TermPtr term() {
    Token t = peek();
    if (at_kw("lam")) {
      next();
      auto lam = make_term(TermKind::Lam, t.loc);
      lam->name = binder();
      lam->ann = opt_annotation();
      expect_punct(".");
      lam->kids = {term()};
      return lam;
    }
    if (at_kw("let")) {
      next();
      auto let = make_term(TermKind::Let, t.loc);
      let->name = binder();
      let->ann = opt_annotation();
      expect_punct("=");
      TermPtr rhs = term();
      expect_kw("in");
      TermPtr body = term();
      let->kids = {rhs, body};
      return let;
    }
    if (at_kw("recursive")) {
      next();
      auto rec = make_term(TermKind::RecLet, t.loc);
      std::set<std::string> names;
      while (at_kw("let")) {
        next();
        RecBinding b;
        b.loc = peek().loc;
        b.name = binder();
        if (!names.insert(b.name).second) fail(b.loc, "duplicate binding '" + b.name + "'");
        b.ann = opt_annotation();
        expect_punct("=");
        b.body = term();
        rec->bindings.push_back(std::move(b));
      }
      if (rec->bindings.empty()) fail(peek().loc, "expected 'let' after 'recursive'");
      expect_kw("in");
      rec->kids = {term()};
      return rec;
    }
    if (at_kw("match")) {
      next();
      auto m = make_term(TermKind::Match, t.loc);
      TermPtr scrut = term();
      expect_kw("with");
      std::vector<std::string> vars;
      m->pat = pattern(vars);
      expect_kw("then");
      TermPtr thn = term();
      expect_kw("else");
      TermPtr els = term();
      m->kids = {scrut, thn, els};
      return m;
    }
    if (at_kw("if")) {
      next();
      auto i = make_term(TermKind::If, t.loc);
      TermPtr cond = term();
      expect_kw("then");
      TermPtr thn = term();
      expect_kw("else");
      TermPtr els = term();
      i->kids = {cond, thn, els};
      return i;
    }
    if (at_kw("type")) {
      next();
      auto d = make_term(TermKind::TypeDecl, t.loc);
      if (peek().kind != Tok::UIdent) fail(peek().loc, "expected type name, found " + describe(peek()));
      d->name = next().text;
      if (d->name == "Int" || d->name == "Float" || d->name == "Bool") {
        fail(t.loc, "cannot redeclare type '" + d->name + "'");
      }
      expect_kw("in");
      types_.push_back(d->name);
      d->kids = {term()};
      types_.pop_back();
      return d;
    }
    if (at_kw("con")) {
      next();
      auto d = make_term(TermKind::ConDecl, t.loc);
      if (peek().kind != Tok::UIdent) fail(peek().loc, "expected constructor name, found " + describe(peek()));
      Token name = next();
      if (dist_by_name(name.text)) fail(name.loc, "'" + name.text + "' is a distribution name");
      d->name = name.text;
      expect_punct(":");
      d->ann = type();
      TypePtr target = resolve(d->ann);
      if (target->kind != TypeKind::Arrow || resolve(target->to)->kind != TypeKind::Variant) {
        fail(name.loc, "constructor type must have the form Payload -> Variant");
      }
      expect_kw("in");
      cons_.push_back(d->name);
      d->kids = {term()};
      cons_.pop_back();
      return d;
    }
    return seq_expr();
  }

  TermPtr seq_expr() {
    TermPtr first = app();
    if (at_punct(";")) {
      Token semi = next();
      auto s = make_term(TermKind::Seq, semi.loc);
      s->kids = {first, term()};
      return s;
    }
    return first;
  }

  bool atom_start() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
      case Tok::Int:
      case Tok::Float:
        return true;
      case Tok::Keyword:
        return t.text == "true" || t.text == "false";
      case Tok::Punct:
        return t.text == "(" || t.text == "[" || t.text == "{";
      default:
        return false;
    }
  }

  TermPtr app() {
    Token t = peek();
    if (at_kw("assume")) {
      next();
      auto a = make_term(TermKind::Assume, t.loc);
      TermPtr d = atom();
      if (d->kind != TermKind::Dist) fail(d->loc, "assume expects a distribution");
      a->kids = {d};
      return a;
    }
    if (at_kw("weight")) {
      next();
      auto w = make_term(TermKind::Weight, t.loc);
      w->kids = {atom()};
      return w;
    }
    if (at_kw("observe")) {
      next();
      auto o = make_term(TermKind::Observe, t.loc);
      TermPtr value = atom();
      TermPtr d = atom();
      if (d->kind != TermKind::Dist) fail(d->loc, "observe expects a distribution");
      o->kids = {value, d};
      return o;
    }
    if (at_kw("resample")) {
      next();
      return make_term(TermKind::Resample, t.loc);
    }
    if (t.kind == Tok::UIdent) {
      next();
      if (auto dist = dist_by_name(t.text)) {
        auto d = make_term(TermKind::Dist, t.loc);
        d->dist = *dist;
        const auto& info = dist_info(*dist);
        while (atom_start()) d->kids.push_back(atom());
        if (d->kids.size() != info.params.size()) {
          fail(t.loc, t.text + " expects " + std::to_string(info.params.size()) +
                          " argument(s), got " + std::to_string(d->kids.size()));
        }
        return d;
      }
      if (!in_scope(cons_, t.text)) fail(t.loc, "unknown constructor '" + t.text + "'");
      auto c = make_term(TermKind::Con, t.loc);
      c->name = t.text;
      if (!atom_start()) fail(peek().loc, "constructor '" + t.text + "' expects an argument");
      c->kids = {atom()};
      if (atom_start()) fail(peek().loc, "constructor '" + t.text + "' takes exactly one argument");
      return c;
    }
    TermPtr head = atom();
    if (!atom_start()) return head;
    auto a = make_term(TermKind::App, head->loc);
    a->kids.push_back(head);
    while (atom_start()) a->kids.push_back(atom());
    return a;
  }

  TermPtr atom() {
    Token t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        next();
        if (t.text == "_") fail(t.loc, "'_' is not a value");
        return mk_var(t.text, t.loc);
      }
      case Tok::Int: {
        next();
        std::int64_t v = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc()) fail(t.loc, "integer literal out of range");
        return mk_const(v, t.loc);
      }
      case Tok::Float: {
        next();
        double v = 0;
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        return mk_const(v, t.loc);
      }
      case Tok::Keyword:
        if (t.text == "true" || t.text == "false") {
          next();
          return mk_const(t.text == "true", t.loc);
        }
        break;
      case Tok::Punct:
        if (t.text == "(") {
          next();
          TermPtr inner = term();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") {
          next();
          auto s = make_term(TermKind::SeqLit, t.loc);
          while (!at_punct("]")) {
            s->kids.push_back(term());
            if (!at_punct(",")) break;
            next();
          }
          expect_punct("]");
          return s;
        }
        if (t.text == "{") {
          next();
          auto r = make_term(TermKind::Record, t.loc);
          std::set<std::string> seen;
          while (!at_punct("}")) {
            if (peek().kind != Tok::Ident) fail(peek().loc, "expected record label, found " + describe(peek()));
            Token label = next();
            if (!seen.insert(label.text).second) fail(label.loc, "duplicate label '" + label.text + "'");
            expect_punct("=");
            r->labels.push_back(label.text);
            r->kids.push_back(term());
            if (!at_punct(",")) break;
            next();
          }
          expect_punct("}");
          return r;
        }
        break;
      default:
        break;
    }
    fail(t.loc, "expected expression, found " + describe(t));
  }

  PatternPtr pattern(std::vector<std::string>& vars) {
    Token t = peek();
    if (t.kind == Tok::UIdent) {
      next();
      if (!in_scope(cons_, t.text)) fail(t.loc, "unknown constructor '" + t.text + "'");
      auto p = mk_pat(PatKind::Con, t.loc);
      p->name = t.text;
      p->sub = pattern_atom(vars);
      return p;
    }
    return pattern_atom(vars);
  }

  PatternPtr pattern_atom(std::vector<std::string>& vars) {
    Token t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        next();
        if (t.text == "_") return mk_pat(PatKind::Wild, t.loc);
        if (builtin_by_name(t.text)) fail(t.loc, "cannot rebind builtin '" + t.text + "'");
        for (const auto& v : vars) {
          if (v == t.text) fail(t.loc, "pattern variable '" + t.text + "' bound twice");
        }
        vars.push_back(t.text);
        auto p = mk_pat(PatKind::Var, t.loc);
        p->name = t.text;
        return p;
      }
      case Tok::Int:
      case Tok::Float: {
        TermPtr lit = atom();
        auto p = mk_pat(PatKind::Lit, t.loc);
        p->lit = lit->lit;
        return p;
      }
      case Tok::Keyword:
        if (t.text == "true" || t.text == "false") {
          next();
          auto p = mk_pat(PatKind::Lit, t.loc);
          p->lit = t.text == "true";
          return p;
        }
        break;
      case Tok::Punct:
        if (t.text == "(") {
          next();
          PatternPtr inner = pattern(vars);
          expect_punct(")");
          return inner;
        }
        if (t.text == "{") {
          next();
          auto p = mk_pat(PatKind::Record, t.loc);
          std::set<std::string> seen;
          while (!at_punct("}")) {
            if (peek().kind != Tok::Ident) fail(peek().loc, "expected record label, found " + describe(peek()));
            Token label = next();
            if (!seen.insert(label.text).second) fail(label.loc, "duplicate label '" + label.text + "'");
            expect_punct("=");
            p->fields.emplace_back(label.text, pattern(vars));
            if (!at_punct(",")) break;
            next();
          }
          expect_punct("}");
          return p;
        }
        break;
      default:
        break;
    }
    fail(t.loc, "expected pattern, found " + describe(t));
  }
};

// Variables are resolved after parsing so that every binding of a
// recursive group is visible in all bodies of the group.
void resolve_scopes(const TermPtr& t, std::vector<std::string>& scope) {
  if (!t) return;
  auto under = [&](const std::vector<std::string>& names, const TermPtr& body) {
    std::size_t mark = scope.size();
    scope.insert(scope.end(), names.begin(), names.end());
    resolve_scopes(body, scope);
    scope.resize(mark);
  };
  switch (t->kind) {
    case TermKind::Var: {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
        if (*it == t->name) return;
      }
      if (builtin_by_name(t->name)) {
        t->kind = TermKind::Builtin;
        return;
      }
      fail(t->loc, "unbound variable '" + t->name + "'");
    }
    case TermKind::Lam:
      under({t->name}, t->kids[0]);
      return;
    case TermKind::Let:
      resolve_scopes(t->kids[0], scope);
      under({t->name}, t->kids[1]);
      return;
    case TermKind::RecLet: {
      std::vector<std::string> names;
      for (const auto& b : t->bindings) names.push_back(b.name);
      for (const auto& b : t->bindings) under(names, b.body);
      under(names, t->kids[0]);
      return;
    }
    case TermKind::Match: {
      resolve_scopes(t->kids[0], scope);
      std::vector<std::string> names;
      pattern_vars(t->pat, names);
      under(names, t->kids[1]);
      resolve_scopes(t->kids[2], scope);
      return;
    }
    default:
      for (const auto& k : t->kids) resolve_scopes(k, scope);
  }
}

void check_dist_positions(const TermPtr& t, bool allowed) {
  if (!t) return;
  if (t->kind == TermKind::Dist && !allowed) {
    fail(t->loc, "distributions may only appear directly under assume or observe");
  }
  for (std::size_t i = 0; i < t->kids.size(); ++i) {
    bool ok = (t->kind == TermKind::Assume && i == 0) || (t->kind == TermKind::Observe && i == 1);
    check_dist_positions(t->kids[i], ok);
  }
  for (const auto& b : t->bindings) check_dist_positions(b.body, false);
}

}  // namespace

TermPtr parse_raw(const std::string& source) {
  Parser p(lex(source));
  TermPtr t = p.program();
  std::vector<std::string> scope;
  resolve_scopes(t, scope);
  check_dist_positions(t, false);
  return t;
}

TermPtr parse(const std::string& source) { return desugar(parse_raw(source)); }

}  // namespace pcfg
