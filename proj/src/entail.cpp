#include "quill/entail.hpp"

#include <set>

#include "quill/error.hpp"
#include "quill/pretty.hpp"

namespace quill {

namespace {

// Strips a variable-headed application to its head; other types are left
// intact.  This realizes the ">= lifting" reading: `f a b >= g` holds
// exactly when `f >= g` does.
Type geq_normal(const Type& t) {
  if (!t.is_app()) return t;
  auto [head, args] = t.spine();
  (void)args;
  return head.is_var() ? head : t;
}

// Left sides additionally collapse fully-known function types to their
// arrow constructor: how restricted a function type is ignores its
// argument and result.
Type geq_left_normal(const Type& t) {
  Type n = geq_normal(t);
  if (!n.is_app()) return n;
  auto [head, args] = n.spine();
  (void)args;
  if (head.is_con_named(kLinArrowName) || head.is_con_named(kUnArrowName)) return head;
  return n;
}

class Entailer {
 public:
  explicit Entailer(const EntailEnv& env) : env_(env) {}

  bool prove(const PredSet& p, const Predicate& goal) {
    if (p.count(goal)) return true;
    switch (goal.kind) {
      case PredKind::Fun:
        return goal.lhs.is_con_named(kLinArrowName) || goal.lhs.is_con_named(kUnArrowName);
      case PredKind::Un: {
        auto r = un_residual(p, goal.lhs, /*collect=*/false);
        return r.has_value() && r->empty();
      }
      case PredKind::Geq:
        return geq(p, goal.lhs, goal.rhs);
    }
    return false;
  }

  // Residual predicates (over flexible variables) that would make
  // `p |- Un tau` derivable; nullopt when no assumption can help.  With
  // collect=false, any needed residual counts as failure.
  std::optional<PredSet> un_residual(const PredSet& p, const Type& tau, bool collect) {
    auto [head, args] = tau.spine();
    // Any assumption about a prefix of the spine settles the goal: Un
    // lifts through application.
    {
      Type prefix = head;
      if (p.count(Predicate::un(prefix))) return PredSet{};
      for (const Type& a : args) {
        prefix = Type::app(prefix, a);
        if (p.count(Predicate::un(prefix))) return PredSet{};
      }
    }
    if (head.is_var()) {
      const TypeVar& v = head.as_var();
      if (collect && !v.rigid()) return PredSet{Predicate::un(head)};
      return std::nullopt;
    }
    const std::string& name = head.as_con().name;
    if (name == kUnArrowName) return PredSet{};
    if (name == kLinArrowName) return std::nullopt;
    if (name == kSumName) {
      if (args.size() != 2) return std::nullopt;
      auto l = un_residual(p, args[0], collect);
      if (!l) return std::nullopt;
      auto r = un_residual(p, args[1], collect);
      if (!r) return std::nullopt;
      return pred_union(*l, *r);
    }
    return un_datatype(p, head, args, collect);
  }

  bool geq(const PredSet& p, const Type& l, const Type& r) {
    auto [rhead, rargs] = r.spine();
    (void)rargs;
    if (rhead.is_con_named(kLinArrowName)) return true;
    if (rhead.is_con_named(kUnArrowName)) {
      if (geq_assumed(p, l, rhead)) return true;
      auto u = un_residual(p, l, /*collect=*/false);
      return u.has_value() && u->empty();
    }
    if (!rhead.is_var()) return false;  // >= with a datatype or sum on the right
    if (geq_assumed(p, l, rhead)) return true;
    // An unrestricted left side is at least as permissive as any function.
    auto u = un_residual(p, l, /*collect=*/false);
    return u.has_value() && u->empty();
  }

 private:
  bool geq_assumed(const PredSet& p, const Type& l, const Type& rhead) {
    Type ln = geq_left_normal(l);
    for (const Predicate& q : p) {
      if (q.kind != PredKind::Geq) continue;
      if (geq_normal(q.rhs) == rhead && geq_left_normal(q.lhs) == ln) return true;
    }
    return false;
  }

  std::optional<PredSet> un_datatype(const PredSet& p, const Type& head,
                                     const std::vector<Type>& args, bool collect) {
    const std::string& name = head.as_con().name;
    if (!env_.datatypes)
      throw Error(ErrorKind::Scope, "unknown datatype '" + name + "' in entailment goal");
    auto it = env_.datatypes->find(name);
    if (it == env_.datatypes->end())
      throw Error(ErrorKind::Scope, "unknown datatype '" + name + "' in entailment goal");
    const ConstructorSig& sig = it->second;
    if (args.size() != sig.outer.size()) return std::nullopt;

    std::string key = print_type(Type::app_spine(head, args));
    // A goal met again during its own derivation holds coinductively
    // (recursive datatypes).
    if (inflight_.count(key)) return PredSet{};
    inflight_.insert(key);

    Subst inst = zip_subst(sig.outer, args);
    PredSet assume = p;
    for (const TypeVar& t : sig.univ) {
      TypeVar sk = skolems_.fresh(t.kind, Flavor::Rigid, "sk");
      TypeVar flex = t;
      flex.flavor = Flavor::Flexible;
      inst.bind(flex, Type::var(sk));
      assume.insert(Predicate::un(Type::var(sk)));
    }
    for (const TypeVar& u : sig.exist) {
      TypeVar sk = skolems_.fresh(u.kind, Flavor::Rigid, "sk");
      TypeVar flex = u;
      flex.flavor = Flavor::Flexible;
      inst.bind(flex, Type::var(sk));
    }
    assume = pred_union(assume, inst.apply(sig.context));
    auto result = un_residual(assume, inst.apply(sig.payload), collect);
    inflight_.erase(key);
    return result;
  }

  const EntailEnv& env_;
  std::set<std::string> inflight_;
  FreshSupply skolems_;
};

}  // namespace

bool entails(const EntailEnv& env, const Predicate& goal) {
  Entailer e(env);
  return e.prove(env.assumptions, goal);
}

bool entails(const EntailEnv& env, const PredSet& goals) {
  for (const Predicate& g : goals)
    if (!entails(env, g)) return false;
  return true;
}

std::optional<PredSet> un_scheme(const EntailEnv& env, const Scheme& s) {
  PredSet assume = pred_union(env.assumptions, s.qual.context);
  for (const TypeVar& v : s.quantified) assume.insert(Predicate::un(Type::var(v)));
  Entailer e(env);
  return e.un_residual(assume, s.qual.body, /*collect=*/true);
}

PredSet simplify(const EntailEnv& env, const PredSet& p) {
  PredSet out;
  for (const Predicate& pi : p) {
    switch (pi.kind) {
      case PredKind::Fun: {
        if (pi.lhs.is_con_named(kLinArrowName) || pi.lhs.is_con_named(kUnArrowName)) break;
        if (pi.lhs.is_var()) {
          out.insert(pi);
          break;
        }
        throw Error(ErrorKind::Unsatisfiable,
                    "unsatisfiable predicate: " + print_predicate(pi));
      }
      case PredKind::Un: {
        Entailer e(env);
        auto r = e.un_residual(env.assumptions, pi.lhs, /*collect=*/true);
        if (!r)
          throw Error(ErrorKind::Unsatisfiable,
                      "unsatisfiable predicate: " + print_predicate(pi));
        out = pred_union(out, *r);
        break;
      }
      case PredKind::Geq: {
        auto [rhead, rargs] = pi.rhs.spine();
        (void)rargs;
        if (rhead.is_con_named(kLinArrowName)) break;
        if (rhead.is_con_named(kUnArrowName)) {
          Entailer e(env);
          auto r = e.un_residual(env.assumptions, pi.lhs, /*collect=*/true);
          if (!r)
            throw Error(ErrorKind::Unsatisfiable,
                        "unsatisfiable predicate: " + print_predicate(pi));
          out = pred_union(out, *r);
          break;
        }
        if (!rhead.is_var())
          throw Error(ErrorKind::Unsatisfiable,
                      "unsatisfiable predicate: " + print_predicate(pi));
        Entailer e(env);
        if (e.geq(env.assumptions, pi.lhs, pi.rhs)) break;
        out.insert(Predicate::geq(geq_left_normal(pi.lhs), rhead));
        break;
      }
    }
  }
  return out;
}

Subst improving_subst(const EntailEnv& env, const PredSet& simple, const TypeVarSet& ambiguous) {
  (void)env;
  // Un-constrained variables, closed under >=: if the right side of a
  // bound is unrestricted, so must the left side be.
  std::set<std::string> un;
  for (const Predicate& p : simple)
    if (p.kind == PredKind::Un && p.lhs.is_var()) un.insert(p.lhs.as_var().name);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Predicate& p : simple) {
      if (p.kind != PredKind::Geq || !p.rhs.is_var() || !p.lhs.is_var()) continue;
      if (un.count(p.rhs.as_var().name) && !un.count(p.lhs.as_var().name)) {
        un.insert(p.lhs.as_var().name);
        changed = true;
      }
    }
  }
  Subst s;
  for (const TypeVar& v : ambiguous) {
    if (v.kind != Kind::binary()) continue;
    s.bind(v, un.count(v.name) ? Type::un_arrow() : Type::lin_arrow());
  }
  return s;
}

}  // namespace quill
