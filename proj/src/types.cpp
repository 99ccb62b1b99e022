#include "pcfg/types.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <set>
#include <stdexcept>

namespace pcfg {

namespace {

TypePtr make(TypeKind kind) {
  auto t = std::make_shared<Type>();
  t->kind = kind;
  return t;
}

}  // namespace

TypePtr int_type() { return make(TypeKind::Int); }
TypePtr float_type() { return make(TypeKind::Float); }
TypePtr bool_type() { return make(TypeKind::Bool); }
TypePtr unit_type() { return record_type({}); }

TypePtr record_type(std::vector<std::pair<std::string, TypePtr>> fields) {
  auto t = make(TypeKind::Record);
  std::sort(fields.begin(), fields.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  t->fields = std::move(fields);
  return t;
}

TypePtr seq_type(TypePtr elem, TypePtr length) {
  auto t = make(TypeKind::Seq);
  t->elem = std::move(elem);
  t->length = std::move(length);
  return t;
}

TypePtr len_type(std::size_t n) {
  auto t = make(TypeKind::Len);
  t->len = n;
  return t;
}

TypePtr variant_type(std::string name) {
  auto t = make(TypeKind::Variant);
  t->name = std::move(name);
  return t;
}

TypePtr arrow_type(TypePtr from, TypePtr to) {
  auto t = make(TypeKind::Arrow);
  t->from = std::move(from);
  t->to = std::move(to);
  return t;
}

TypePtr fresh_type_var() {
  static std::atomic<int> counter{0};
  auto t = make(TypeKind::Var);
  t->var_id = ++counter;
  return t;
}

TypePtr resolve(TypePtr t) {
  while (t && t->kind == TypeKind::Var && t->link) t = t->link;
  return t;
}

TypePtr zonk(const TypePtr& in) {
  TypePtr t = resolve(in);
  if (!t) return t;
  switch (t->kind) {
    case TypeKind::Record: {
      std::vector<std::pair<std::string, TypePtr>> fields;
      for (const auto& [label, ft] : t->fields) fields.emplace_back(label, zonk(ft));
      return record_type(std::move(fields));
    }
    case TypeKind::Seq:
      return seq_type(zonk(t->elem), zonk(t->length));
    case TypeKind::Arrow:
      return arrow_type(zonk(t->from), zonk(t->to));
    default:
      return t;
  }
}

bool is_ground(const TypePtr& in) {
  TypePtr t = resolve(in);
  if (!t) return false;
  switch (t->kind) {
    case TypeKind::Var:
      return false;
    case TypeKind::Record:
      return std::all_of(t->fields.begin(), t->fields.end(),
                         [](const auto& f) { return is_ground(f.second); });
    case TypeKind::Seq:
      return is_ground(t->elem) && is_ground(t->length);
    case TypeKind::Arrow:
      return is_ground(t->from) && is_ground(t->to);
    default:
      return true;
  }
}

bool same_type(const TypePtr& ain, const TypePtr& bin) {
  TypePtr a = resolve(ain);
  TypePtr b = resolve(bin);
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Int:
    case TypeKind::Float:
    case TypeKind::Bool:
      return true;
    case TypeKind::Len:
      return a->len == b->len;
    case TypeKind::Variant:
      return a->name == b->name;
    case TypeKind::Var:
      return a->var_id == b->var_id;
    case TypeKind::Seq:
      return same_type(a->elem, b->elem) && same_type(a->length, b->length);
    case TypeKind::Arrow:
      return same_type(a->from, b->from) && same_type(a->to, b->to);
    case TypeKind::Record:
      if (a->fields.size() != b->fields.size()) return false;
      for (std::size_t i = 0; i < a->fields.size(); ++i) {
        if (a->fields[i].first != b->fields[i].first) return false;
        if (!same_type(a->fields[i].second, b->fields[i].second)) return false;
      }
      return true;
  }
  return false;
}

std::string type_to_string(const TypePtr& in) {
  TypePtr t = resolve(in);
  if (!t) return "?";
  switch (t->kind) {
    case TypeKind::Int:
      return "Int";
    case TypeKind::Float:
      return "Float";
    case TypeKind::Bool:
      return "Bool";
    case TypeKind::Variant:
      return t->name;
    case TypeKind::Len:
      return std::to_string(t->len);
    case TypeKind::Var:
      return "'a" + std::to_string(t->var_id);
    case TypeKind::Seq: {
      TypePtr len = resolve(t->length);
      std::string out = "[" + type_to_string(t->elem);
      if (len && len->kind == TypeKind::Len) out += "; " + std::to_string(len->len);
      return out + "]";
    }
    case TypeKind::Arrow: {
      TypePtr from = resolve(t->from);
      std::string lhs = type_to_string(from);
      if (from && from->kind == TypeKind::Arrow) lhs = "(" + lhs + ")";
      return lhs + " -> " + type_to_string(t->to);
    }
    case TypeKind::Record: {
      std::string out = "{";
      for (std::size_t i = 0; i < t->fields.size(); ++i) {
        if (i) out += ", ";
        out += t->fields[i].first + " : " + type_to_string(t->fields[i].second);
      }
      return out + "}";
    }
  }
  return "?";
}

void DataEnv::declare_variant(const std::string& name) {
  variants_[name].name = name;
}

void DataEnv::declare_constructor(const std::string& name, const std::string& variant,
                                  TypePtr payload) {
  auto& info = variants_.at(variant);
  ConstructorInfo con;
  con.name = name;
  con.variant = variant;
  con.tag = static_cast<int>(info.constructors.size());
  con.payload = std::move(payload);
  info.constructors.push_back(name);
  constructors_[name] = std::move(con);
}

void DataEnv::finalize() {
  // A variant is recursive when it can reach itself through constructor
  // payloads (directly or via other variants).
  std::function<void(const TypePtr&, std::set<std::string>&)> collect =
      [&](const TypePtr& in, std::set<std::string>& out) {
        TypePtr t = resolve(in);
        if (!t) return;
        switch (t->kind) {
          case TypeKind::Variant:
            out.insert(t->name);
            break;
          case TypeKind::Record:
            for (const auto& f : t->fields) collect(f.second, out);
            break;
          case TypeKind::Seq:
            collect(t->elem, out);
            break;
          default:
            break;
        }
      };
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& [name, info] : variants_) {
    for (const auto& con : info.constructors) collect(constructors_.at(con).payload, edges[name]);
  }
  for (auto& [name, info] : variants_) {
    std::set<std::string> seen;
    std::vector<std::string> work(edges[name].begin(), edges[name].end());
    while (!work.empty()) {
      std::string v = work.back();
      work.pop_back();
      if (!seen.insert(v).second) continue;
      for (const auto& w : edges[v]) work.push_back(w);
    }
    info.recursive = seen.count(name) > 0;
  }
}

bool DataEnv::has_variant(const std::string& name) const { return variants_.count(name) > 0; }

bool DataEnv::has_constructor(const std::string& name) const {
  return constructors_.count(name) > 0;
}

const VariantInfo& DataEnv::variant(const std::string& name) const { return variants_.at(name); }

const ConstructorInfo& DataEnv::constructor(const std::string& name) const {
  return constructors_.at(name);
}

bool DataEnv::is_recursive(const std::string& variant) const {
  auto it = variants_.find(variant);
  return it != variants_.end() && it->second.recursive;
}

std::size_t DataEnv::size_of(const TypePtr& in) const {
  TypePtr t = resolve(in);
  if (!t) throw std::logic_error("size_of: missing type");
  switch (t->kind) {
    case TypeKind::Int:
    case TypeKind::Float:
    case TypeKind::Bool:
      return 1;
    case TypeKind::Record: {
      std::size_t n = 0;
      for (const auto& f : t->fields) n += size_of(f.second);
      return n;
    }
    case TypeKind::Seq: {
      TypePtr len = resolve(t->length);
      if (!len || len->kind != TypeKind::Len) throw std::logic_error("size_of: unknown length");
      return len->len * size_of(t->elem);
    }
    case TypeKind::Variant: {
      const auto& info = variants_.at(t->name);
      if (info.recursive) return 1;
      std::size_t payload = 0;
      for (const auto& con : info.constructors) {
        payload = std::max(payload, size_of(constructors_.at(con).payload));
      }
      return 1 + payload;
    }
    case TypeKind::Arrow:
    case TypeKind::Var:
    case TypeKind::Len:
      break;
  }
  throw std::logic_error("size_of: type has no cell layout: " + type_to_string(t));
}

std::size_t DataEnv::field_offset(const TypePtr& in, const std::string& label) const {
  TypePtr t = resolve(in);
  std::size_t offset = 0;
  for (const auto& [name, ft] : t->fields) {
    if (name == label) return offset;
    offset += size_of(ft);
  }
  throw std::logic_error("field_offset: no label " + label);
}

}  // namespace pcfg
