#include "quill/syntax.hpp"

#include <algorithm>
#include <cassert>

#include "quill/error.hpp"

namespace quill {

// ---------------------------------------------------------------------------
// Kind

Kind Kind::star() { return Kind{}; }

Kind Kind::arrow(Kind arg, Kind result) {
  Kind k;
  k.node_ = std::make_shared<const KindNode>(KindNode{std::move(arg), std::move(result)});
  return k;
}

Kind Kind::binary() { return arrow(star(), arrow(star(), star())); }

const Kind& Kind::arg() const {
  assert(node_);
  return node_->arg;
}

const Kind& Kind::result() const {
  assert(node_);
  return node_->result;
}

int Kind::arity() const {
  int n = 0;
  const Kind* k = this;
  while (!k->is_star()) {
    ++n;
    k = &k->result();
  }
  return n;
}

bool Kind::operator==(const Kind& other) const {
  if (is_star() || other.is_star()) return is_star() == other.is_star();
  if (node_ == other.node_) return true;
  return node_->arg == other.node_->arg && node_->result == other.node_->result;
}

std::string Kind::str() const {
  if (is_star()) return "*";
  std::string lhs = arg().is_star() ? "*" : "(" + arg().str() + ")";
  return lhs + " -> " + result().str();
}

// ---------------------------------------------------------------------------
// Type

Type Type::var(TypeVar v) {
  Type t;
  t.node_ = std::make_shared<const TypeNode>(TypeNode{std::move(v)});
  return t;
}

Type Type::con(std::string name, Kind kind) {
  Type t;
  t.node_ = std::make_shared<const TypeNode>(TypeNode{TypeCon{std::move(name), std::move(kind)}});
  return t;
}

Type Type::app(Type fun, Type arg) {
  Kind fk = fun.kind();
  if (fk.is_star() || fk.arg() != arg.kind())
    throw Error(ErrorKind::Internal, "ill-kinded type application");
  Type t;
  t.node_ = std::make_shared<const TypeNode>(TypeNode{TypeApp{std::move(fun), std::move(arg)}});
  return t;
}

Type Type::app_spine(Type head, const std::vector<Type>& args) {
  Type t = std::move(head);
  for (const Type& a : args) t = app(t, a);
  return t;
}

Type Type::lin_arrow() { return con(kLinArrowName, Kind::binary()); }
Type Type::un_arrow() { return con(kUnArrowName, Kind::binary()); }
Type Type::sum_con() { return con(kSumName, Kind::binary()); }

bool Type::is_var() const { return node_ && std::holds_alternative<TypeVar>(node_->v); }
bool Type::is_con() const { return node_ && std::holds_alternative<TypeCon>(node_->v); }
bool Type::is_app() const { return node_ && std::holds_alternative<TypeApp>(node_->v); }

const TypeVar& Type::as_var() const { return std::get<TypeVar>(node_->v); }
const TypeCon& Type::as_con() const { return std::get<TypeCon>(node_->v); }
const Type& Type::fun() const { return std::get<TypeApp>(node_->v).fun; }
const Type& Type::arg() const { return std::get<TypeApp>(node_->v).arg; }

Kind Type::kind() const {
  if (is_var()) return as_var().kind;
  if (is_con()) return as_con().kind;
  return fun().kind().result();
}

std::pair<Type, std::vector<Type>> Type::spine() const {
  std::vector<Type> args;
  Type head = *this;
  while (head.is_app()) {
    args.push_back(head.arg());
    head = head.fun();
  }
  std::reverse(args.begin(), args.end());
  return {head, args};
}

bool Type::is_con_named(const std::string& name) const {
  return is_con() && as_con().name == name;
}

int compare(const Type& a, const Type& b) {
  auto tag = [](const Type& t) { return t.is_var() ? 0 : t.is_con() ? 1 : 2; };
  if (tag(a) != tag(b)) return tag(a) < tag(b) ? -1 : 1;
  if (a.is_var()) return a.as_var().name.compare(b.as_var().name);
  if (a.is_con()) return a.as_con().name.compare(b.as_con().name);
  if (int c = compare(a.fun(), b.fun())) return c;
  return compare(a.arg(), b.arg());
}

bool Type::operator==(const Type& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  return compare(*this, other) == 0;
}

bool Type::operator<(const Type& other) const { return compare(*this, other) < 0; }

// ---------------------------------------------------------------------------
// Predicate

bool Predicate::operator==(const Predicate& o) const {
  if (kind != o.kind) return false;
  if (lhs != o.lhs) return false;
  if (kind == PredKind::Geq) return rhs == o.rhs;
  return true;
}

bool Predicate::operator<(const Predicate& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (int c = compare(lhs, o.lhs)) return c < 0;
  if (kind == PredKind::Geq) return compare(rhs, o.rhs) < 0;
  return false;
}

PredSet pred_union(const PredSet& a, const PredSet& b) {
  PredSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

// ---------------------------------------------------------------------------
// Subst

Subst Subst::singleton(const TypeVar& v, Type t) {
  Subst s;
  s.bind(v, std::move(t));
  return s;
}

const Type* Subst::lookup(const std::string& name) const {
  auto it = map_.find(name);
  return it == map_.end() ? nullptr : &it->second;
}

void Subst::bind(const TypeVar& v, Type t) {
  if (v.rigid()) throw Error(ErrorKind::Internal, "substitution binds rigid variable " + v.name);
  if (!(v.kind == t.kind()))
    throw Error(ErrorKind::Internal, "kind-changing substitution for " + v.name);
  map_[v.name] = std::move(t);
}

Type Subst::apply(const Type& t) const {
  if (map_.empty()) return t;
  if (t.is_var()) {
    const Type* r = lookup(t.as_var().name);
    return r ? *r : t;
  }
  if (t.is_app()) {
    Type f = apply(t.fun());
    Type a = apply(t.arg());
    if (f == t.fun() && a == t.arg()) return t;
    return Type::app(std::move(f), std::move(a));
  }
  return t;
}

Predicate Subst::apply(const Predicate& p) const {
  Predicate out = p;
  out.lhs = apply(p.lhs);
  if (p.kind == PredKind::Geq) out.rhs = apply(p.rhs);
  return out;
}

PredSet Subst::apply(const PredSet& ps) const {
  PredSet out;
  for (const Predicate& p : ps) out.insert(apply(p));
  return out;
}

QualType Subst::apply(const QualType& q) const { return QualType{apply(q.context), apply(q.body)}; }

Scheme Subst::apply(const Scheme& s) const {
  if (map_.empty()) return s;
  std::set<std::string> bound;
  for (const TypeVar& q : s.quantified) bound.insert(q.name);
  // Only the bindings that can actually reach the scheme's free
  // variables matter; quantified variables are renamed only when such a
  // binding would capture them.
  Subst outer;
  TypeVarSet qual_free = free_vars(s.qual);
  for (const TypeVar& q : s.quantified) qual_free.erase(q);
  TypeVarSet reachable_range;
  for (const auto& [name, ty] : map_) {
    if (bound.count(name)) continue;
    outer.map_[name] = ty;
    if (qual_free.count(TypeVar{name, {}, {}})) collect_free_vars(ty, reachable_range);
  }
  Subst inner;
  std::vector<TypeVar> quantified;
  long salt = 0;
  for (const TypeVar& q : s.quantified) {
    TypeVar out = q;
    if (reachable_range.count(q)) {
      out.name = q.name + "#" + std::to_string(salt++);
      inner.map_[q.name] = Type::var(out);
    }
    quantified.push_back(out);
  }
  QualType qual = inner.empty() ? s.qual : inner.apply(s.qual);
  return Scheme{std::move(quantified), outer.apply(qual)};
}

Subst Subst::compose(const Subst& outer, const Subst& inner) {
  Subst out;
  for (const auto& [name, ty] : inner.map_) out.map_[name] = outer.apply(ty);
  for (const auto& [name, ty] : outer.map_)
    if (!out.map_.count(name)) out.map_[name] = ty;
  return out;
}

Subst zip_subst(const std::vector<TypeVar>& vars, const std::vector<Type>& types) {
  assert(vars.size() == types.size());
  Subst s;
  for (size_t i = 0; i < vars.size(); ++i) {
    TypeVar v = vars[i];
    v.flavor = Flavor::Flexible;  // instantiation may replace rigid binders
    s.bind(v, types[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Free variables

void collect_free_vars(const Type& t, TypeVarSet& out) {
  if (!t.defined()) return;
  if (t.is_var()) {
    out.insert(t.as_var());
  } else if (t.is_app()) {
    collect_free_vars(t.fun(), out);
    collect_free_vars(t.arg(), out);
  }
}

TypeVarSet free_vars(const Type& t) {
  TypeVarSet out;
  collect_free_vars(t, out);
  return out;
}

TypeVarSet free_vars(const Predicate& p) {
  TypeVarSet out;
  collect_free_vars(p.lhs, out);
  if (p.kind == PredKind::Geq) collect_free_vars(p.rhs, out);
  return out;
}

TypeVarSet free_vars(const PredSet& ps) {
  TypeVarSet out;
  for (const Predicate& p : ps) {
    collect_free_vars(p.lhs, out);
    if (p.kind == PredKind::Geq) collect_free_vars(p.rhs, out);
  }
  return out;
}

TypeVarSet free_vars(const QualType& q) {
  TypeVarSet out = free_vars(q.context);
  collect_free_vars(q.body, out);
  return out;
}

TypeVarSet free_vars(const Scheme& s) {
  TypeVarSet out = free_vars(s.qual);
  for (const TypeVar& q : s.quantified) out.erase(q);
  return out;
}

// ---------------------------------------------------------------------------
// FreshSupply

TypeVar FreshSupply::fresh(Kind kind, Flavor flavor, const std::string& hint) {
  // The '%' makes the name unlexable, so fresh names never collide with
  // source-program variables.
  return TypeVar{hint + "%" + std::to_string(counter_++), std::move(kind), flavor};
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

void occurrence_order(const Type& t, const std::set<std::string>& quantified,
                      std::vector<TypeVar>& order, std::set<std::string>& seen) {
  if (t.is_var()) {
    const TypeVar& v = t.as_var();
    if (quantified.count(v.name) && !seen.count(v.name)) {
      seen.insert(v.name);
      order.push_back(v);
    }
  } else if (t.is_app()) {
    occurrence_order(t.fun(), quantified, order, seen);
    occurrence_order(t.arg(), quantified, order, seen);
  }
}

std::string canonical_name(const Kind& k, int index, const std::set<std::string>& taken) {
  static const char* star_names[] = {"t", "u", "v", "w"};
  static const char* fun_names[] = {"f", "g", "h"};
  auto pick = [&](const char** base, int n, const std::string& overflow) {
    std::string name = index < n ? base[index] : overflow + std::to_string(index - n + 1);
    while (taken.count(name)) name += "'";
    return name;
  };
  if (k.is_star()) return pick(star_names, 4, "t");
  if (k == Kind::binary()) return pick(fun_names, 3, "f");
  return pick(nullptr, 0, "k");
}

}  // namespace

Scheme canonicalize(const Scheme& s) {
  std::set<std::string> quantified;
  for (const TypeVar& q : s.quantified) quantified.insert(q.name);

  // First occurrence in body, then in the (sorted) context.
  std::vector<TypeVar> order;
  std::set<std::string> seen;
  occurrence_order(s.qual.body, quantified, order, seen);
  for (const Predicate& p : s.qual.context) {
    occurrence_order(p.lhs, quantified, order, seen);
    if (p.kind == PredKind::Geq) occurrence_order(p.rhs, quantified, order, seen);
  }
  // Quantified vars with no occurrence at all would be ill-formed; keep
  // them at the end deterministically anyway.
  for (const TypeVar& q : s.quantified)
    if (!seen.count(q.name)) order.push_back(q);

  // Star-kinded first, then binary (arrow) kinds, then the rest, each
  // group in occurrence order.
  std::stable_sort(order.begin(), order.end(), [](const TypeVar& a, const TypeVar& b) {
    auto group = [](const TypeVar& v) {
      if (v.kind.is_star()) return 0;
      if (v.kind == Kind::binary()) return 1;
      return 2;
    };
    return group(a) < group(b);
  });

  // Names already free in the scheme stay off-limits.
  std::set<std::string> taken;
  for (const TypeVar& v : free_vars(s)) taken.insert(v.name);

  Subst rename;
  std::vector<TypeVar> fresh_quantified;
  int star_i = 0, fun_i = 0, other_i = 0;
  for (const TypeVar& v : order) {
    int* idx = v.kind.is_star() ? &star_i : v.kind == Kind::binary() ? &fun_i : &other_i;
    TypeVar nv{canonical_name(v.kind, (*idx)++, taken), v.kind, Flavor::Flexible};
    taken.insert(nv.name);
    fresh_quantified.push_back(nv);
    TypeVar flex = v;
    flex.flavor = Flavor::Flexible;
    rename.bind(flex, Type::var(nv));
  }

  return Scheme{std::move(fresh_quantified), rename.apply(s.qual)};
}

bool scheme_equal(const Scheme& a, const Scheme& b) {
  Scheme ca = canonicalize(a);
  Scheme cb = canonicalize(b);
  if (ca.quantified.size() != cb.quantified.size()) return false;
  for (size_t i = 0; i < ca.quantified.size(); ++i) {
    if (ca.quantified[i].name != cb.quantified[i].name) return false;
    if (!(ca.quantified[i].kind == cb.quantified[i].kind)) return false;
  }
  if (ca.qual.body != cb.qual.body) return false;
  return ca.qual.context == cb.qual.context;
}

}  // namespace quill
