#ifndef QUILL_SYNTAX_HPP
#define QUILL_SYNTAX_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace quill {

// ---------------------------------------------------------------------------
// Kinds

struct KindNode;

class Kind {
 public:
  static Kind star();
  static Kind arrow(Kind arg, Kind result);
  // The kind of a binary type constructor: * -> * -> *.
  static Kind binary();

  bool is_star() const { return node_ == nullptr; }
  const Kind& arg() const;
  const Kind& result() const;

  // Number of arguments before reaching *.
  int arity() const;

  bool operator==(const Kind& other) const;
  bool operator!=(const Kind& other) const { return !(*this == other); }

  std::string str() const;

 private:
  std::shared_ptr<const KindNode> node_;  // null means *
};

struct KindNode {
  Kind arg;
  Kind result;
};

// ---------------------------------------------------------------------------
// Type variables

enum class Flavor { Flexible, Rigid };

struct TypeVar {
  std::string name;
  Kind kind;
  Flavor flavor = Flavor::Flexible;

  bool rigid() const { return flavor == Flavor::Rigid; }
  bool operator==(const TypeVar& o) const { return name == o.name; }
  bool operator<(const TypeVar& o) const { return name < o.name; }
};

using TypeVarSet = std::set<TypeVar>;

// ---------------------------------------------------------------------------
// Types

class Type;

struct TypeCon {
  std::string name;
  Kind kind;
};

struct TypeApp;   // below, after Type
struct TypeNode;  // below, after TypeApp

class Type {
 public:
  Type() = default;

  static Type var(TypeVar v);
  static Type con(std::string name, Kind kind);
  static Type app(Type fun, Type arg);  // kind-checked
  static Type app_spine(Type head, const std::vector<Type>& args);

  // Built-in constructors, all at kind * -> * -> *.
  static Type lin_arrow();  // -o
  static Type un_arrow();   // ->*
  static Type sum_con();    // +

  // Fully applied conveniences.
  static Type lin(Type a, Type b) { return app(app(lin_arrow(), a), b); }
  static Type un(Type a, Type b) { return app(app(un_arrow(), a), b); }
  static Type sum(Type a, Type b) { return app(app(sum_con(), a), b); }

  bool defined() const { return node_ != nullptr; }
  bool is_var() const;
  bool is_con() const;
  bool is_app() const;

  const TypeVar& as_var() const;
  const TypeCon& as_con() const;
  const Type& fun() const;
  const Type& arg() const;

  Kind kind() const;

  // Decomposes nested applications: spine() of `f a b` is (f, [a, b]).
  std::pair<Type, std::vector<Type>> spine() const;

  bool is_con_named(const std::string& name) const;

  bool operator==(const Type& other) const;
  bool operator!=(const Type& other) const { return !(*this == other); }
  // Structural total order, for use in ordered containers.
  bool operator<(const Type& other) const;

 private:
  std::shared_ptr<const TypeNode> node_;
};

struct TypeApp {
  Type fun;
  Type arg;
};

struct TypeNode {
  std::variant<TypeVar, TypeCon, TypeApp> v;
};

inline const std::string kLinArrowName = "-o";
inline const std::string kUnArrowName = "->*";
inline const std::string kSumName = "+";

int compare(const Type& a, const Type& b);

// ---------------------------------------------------------------------------
// Predicates, qualified types, schemes

enum class PredKind { Un, Fun, Geq };

struct Predicate {
  PredKind kind;
  Type lhs;            // subject of Un/Fun, left side of >=
  Type rhs;            // right side of >=, undefined otherwise

  static Predicate un(Type t) { return {PredKind::Un, std::move(t), {}}; }
  static Predicate fun(Type t) { return {PredKind::Fun, std::move(t), {}}; }
  static Predicate geq(Type l, Type r) { return {PredKind::Geq, std::move(l), std::move(r)}; }

  bool operator==(const Predicate& o) const;
  bool operator<(const Predicate& o) const;
};

using PredSet = std::set<Predicate>;

PredSet pred_union(const PredSet& a, const PredSet& b);

struct QualType {
  PredSet context;
  Type body;
};

struct Scheme {
  std::vector<TypeVar> quantified;
  QualType qual;

  static Scheme mono(Type t) { return Scheme{{}, {{}, std::move(t)}}; }
  bool is_mono() const { return quantified.empty() && qual.context.empty(); }
};

// Constructor signature  forall v̄. (forall t̄. exists ū. Q => payload) ->* T v̄
struct ConstructorSig {
  std::string name;                 // K
  std::string data_name;            // T
  std::vector<TypeVar> outer;       // v̄
  std::vector<TypeVar> univ;        // t̄
  std::vector<TypeVar> exist;       // ū
  PredSet context;                  // Q
  Type payload;                     // τ'
  Type result;                      // T v̄
};

// ---------------------------------------------------------------------------
// Substitutions

class Subst {
 public:
  Subst() = default;

  static Subst singleton(const TypeVar& v, Type t);

  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  bool binds(const std::string& name) const { return map_.count(name) != 0; }
  const Type* lookup(const std::string& name) const;

  // Adds v := t, where t must have v's kind and v must be flexible.
  void bind(const TypeVar& v, Type t);

  Type apply(const Type& t) const;
  Predicate apply(const Predicate& p) const;
  PredSet apply(const PredSet& ps) const;
  QualType apply(const QualType& q) const;
  // Capture-avoiding: quantified variables shadow the substitution.
  Scheme apply(const Scheme& s) const;

  // compose(outer, inner): apply(result, x) == outer.apply(inner.apply(x)).
  static Subst compose(const Subst& outer, const Subst& inner);

  const std::map<std::string, Type>& entries() const { return map_; }

 private:
  std::map<std::string, Type> map_;
};

// Maps a list of variables to a parallel list of replacement types.
Subst zip_subst(const std::vector<TypeVar>& vars, const std::vector<Type>& types);

// ---------------------------------------------------------------------------
// Free type variables

void collect_free_vars(const Type& t, TypeVarSet& out);
TypeVarSet free_vars(const Type& t);
TypeVarSet free_vars(const Predicate& p);
TypeVarSet free_vars(const PredSet& ps);
TypeVarSet free_vars(const QualType& q);
TypeVarSet free_vars(const Scheme& s);

// ---------------------------------------------------------------------------
// Fresh variable supply (one per inference session)

class FreshSupply {
 public:
  TypeVar fresh(Kind kind, Flavor flavor = Flavor::Flexible, const std::string& hint = "t");

 private:
  long counter_ = 0;
};

// ---------------------------------------------------------------------------
// Canonicalization

// Renames quantified variables to a fixed sequence (star-kinded first, in
// order of first occurrence in body then sorted context; then arrow-kinded;
// then the rest) and sorts the context.  Alpha-equivalent schemes
// canonicalize identically.
Scheme canonicalize(const Scheme& s);

bool scheme_equal(const Scheme& a, const Scheme& b);

}  // namespace quill

#endif
