#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pcfg {

enum class TypeKind { Int, Float, Bool, Record, Seq, Variant, Arrow, Var, Len };

struct Type;
using TypePtr = std::shared_ptr<Type>;

/// Monomorphic types. `Var` nodes are unification variables; once bound,
/// `link` points at the representative. `Len` is a sequence length, kept as
/// a type so that lengths unify like everything else.
struct Type {
  TypeKind kind = TypeKind::Var;
  std::vector<std::pair<std::string, TypePtr>> fields;  // Record, sorted by label
  TypePtr elem;                                         // Seq
  TypePtr length;                                       // Seq: Len or Var
  TypePtr from, to;                                     // Arrow
  std::string name;                                     // Variant
  std::size_t len = 0;                                  // Len
  int var_id = 0;                                       // Var
  TypePtr link;                                         // Var, once bound
};

TypePtr int_type();
TypePtr float_type();
TypePtr bool_type();
TypePtr unit_type();
TypePtr record_type(std::vector<std::pair<std::string, TypePtr>> fields);
TypePtr seq_type(TypePtr elem, TypePtr length);
TypePtr len_type(std::size_t n);
TypePtr variant_type(std::string name);
TypePtr arrow_type(TypePtr from, TypePtr to);
TypePtr fresh_type_var();

/// Follows Var links to the representative node.
TypePtr resolve(TypePtr t);

/// Resolves links all the way down, producing a link-free copy.
/// Unbound variables are kept as `Var` nodes.
TypePtr zonk(const TypePtr& t);

bool is_ground(const TypePtr& t);
bool same_type(const TypePtr& a, const TypePtr& b);
std::string type_to_string(const TypePtr& t);

struct ConstructorInfo {
  std::string name;
  std::string variant;
  int tag = 0;
  TypePtr payload;
};

struct VariantInfo {
  std::string name;
  std::vector<std::string> constructors;
  bool recursive = false;
};

/// Declared variant types and the cell-level layout rules shared by the
/// code generator and result decoding.
///
/// Layout: scalars take one cell; records are their fields in label order;
/// sequences are `length` contiguous elements; a non-recursive variant is a
/// tag cell followed by room for its largest payload; a recursive variant is
/// a single cell holding an offset into the constant pool.
class DataEnv {
 public:
  void declare_variant(const std::string& name);
  void declare_constructor(const std::string& name, const std::string& variant,
                           TypePtr payload);
  /// Marks variants that (transitively) contain themselves. Call once all
  /// constructors are declared.
  void finalize();

  bool has_variant(const std::string& name) const;
  bool has_constructor(const std::string& name) const;
  const VariantInfo& variant(const std::string& name) const;
  const ConstructorInfo& constructor(const std::string& name) const;
  const std::map<std::string, VariantInfo>& variants() const { return variants_; }

  bool is_recursive(const std::string& variant) const;
  std::size_t size_of(const TypePtr& t) const;
  /// Cell offset of `label` within a record of type `t`.
  std::size_t field_offset(const TypePtr& record, const std::string& label) const;

 private:
  std::map<std::string, VariantInfo> variants_;
  std::map<std::string, ConstructorInfo> constructors_;
};

}  // namespace pcfg
