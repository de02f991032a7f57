#include "quill/sdcheck.hpp"

#include <algorithm>

#include "quill/error.hpp"
#include "quill/pretty.hpp"
#include "quill/unify.hpp"

namespace quill {

namespace {

struct Outcome {
  Type type;
  std::set<std::string> used;
};

class Checker {
 public:
  explicit Checker(const Program& prog) : prog_(prog) {}

  Outcome check(const TypeEnv& env, const PredSet& p, const Term& m);

 private:
  EntailEnv with(const PredSet& p) const { return EntailEnv{&prog_.datatypes, p}; }

  static void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) throw Error(kind, msg);
  }

  void need_entailed(const PredSet& p, const PredSet& goals, const std::string& what) {
    for (const Predicate& g : goals)
      require(entails(with(p), g), ErrorKind::UnEntail,
              what + ": cannot justify " + print_predicate(g));
  }

  // The binding must be (provably) unrestricted under p.
  void need_un_binding(const PredSet& p, const std::string& y, const Scheme& s,
                       const std::string& why) {
    auto r = un_scheme(with(p), s);
    require(r.has_value(), ErrorKind::UnEntail,
            "'" + display_name(y) + "' has linear type but " + why);
    need_entailed(p, *r, "'" + display_name(y) + "' " + why);
  }

  // The binding must be capturable by a function of type `phi`.
  void need_capture_ok(const PredSet& p, const std::string& y, const Scheme& s,
                       const Type& phi) {
    if (s.is_mono()) {
      try {
        PredSet r = simplify(with(p), {Predicate::geq(s.qual.body, phi)});
        need_entailed(p, r, "capture of '" + display_name(y) + "'");
        return;
      } catch (const Error& e) {
        if (e.kind != ErrorKind::Unsatisfiable) throw;
        throw Error(ErrorKind::UnEntail, "'" + display_name(y) +
                                             "' cannot be captured by a function of type " +
                                             print_type(phi));
      }
    }
    Subst sk;
    PredSet assume = p;
    TypeVarSet skvars;
    for (const TypeVar& v : s.quantified) {
      TypeVar fresh = supply_.fresh(v.kind, Flavor::Rigid, "sk");
      TypeVar flex = v;
      flex.flavor = Flavor::Flexible;
      sk.bind(flex, Type::var(fresh));
      assume.insert(Predicate::un(Type::var(fresh)));
      skvars.insert(fresh);
    }
    assume = pred_union(assume, sk.apply(s.qual.context));
    bool ok = false;
    try {
      PredSet r = simplify(with(assume), {Predicate::geq(sk.apply(s.qual.body), phi)});
      ok = true;
      for (const Predicate& q : r) {
        for (const TypeVar& v : free_vars(q))
          if (skvars.count(v)) ok = false;
        if (ok && !entails(with(p), q)) ok = false;
      }
    } catch (const Error&) {
      ok = false;
    }
    if (ok) return;
    need_un_binding(p, y, s, "is captured by a closure it cannot enter");
  }

  const Program& prog_;
  FreshSupply supply_;
};

std::set<std::string> minus(std::set<std::string> a, const std::string& x) {
  a.erase(x);
  return a;
}

std::set<std::string> inter(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  for (const auto& x : a)
    if (b.count(x)) out.insert(x);
  return out;
}

std::set<std::string> unite(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

Subst instantiation(const std::vector<TypeVar>& vars, const std::vector<Type>& types) {
  return zip_subst(vars, types);
}

Outcome Checker::check(const TypeEnv& env, const PredSet& p, const Term& m) {
  require(m != nullptr, ErrorKind::Internal, "missing term node");
  require(m->ann.defined(), ErrorKind::Internal, "missing type annotation");
  switch (m->tag) {
    case TermTag::Var: {
      const Scheme* s = env.lookup(m->name);
      require(s != nullptr, ErrorKind::Scope, "unbound variable '" + display_name(m->name) + "'");
      require(m->inst.size() == s->quantified.size(), ErrorKind::Internal,
              "instantiation arity mismatch at '" + display_name(m->name) + "'");
      Subst th = instantiation(s->quantified, m->inst);
      require(th.apply(s->qual.body) == m->ann, ErrorKind::Internal,
              "annotation at '" + display_name(m->name) + "' is not an instance of its scheme");
      need_entailed(p, th.apply(s->qual.context), "use of '" + display_name(m->name) + "'");
      return {m->ann, {m->name}};
    }

    case TermTag::Lam: {
      auto [phi, args] = m->ann.spine();
      require(args.size() == 2, ErrorKind::Internal, "lambda annotated with a non-function type");
      require(entails(with(p), Predicate::fun(phi)), ErrorKind::UnEntail,
              "lambda whose arrow " + print_type(phi) + " is not known to be a function");
      auto body = check(env.extended(m->name, Scheme::mono(args[0])), p, m->a);
      require(body.type == args[1], ErrorKind::Internal, "lambda body type mismatch");
      for (const auto& y : minus(body.used, m->name))
        if (const Scheme* s = env.lookup(y)) need_capture_ok(p, y, *s, phi);
      if (!body.used.count(m->name))
        need_un_binding(p, m->name, Scheme::mono(args[0]), "is never used");
      return {m->ann, minus(body.used, m->name)};
    }

    case TermTag::App: {
      auto f = check(env, p, m->a);
      auto x = check(env, p, m->b);
      auto [phi, args] = f.type.spine();
      require(args.size() == 2 && args[0] == x.type && args[1] == m->ann, ErrorKind::Internal,
              "ill-typed application");
      require(entails(with(p), Predicate::fun(phi)), ErrorKind::UnEntail,
              "application through " + print_type(phi) + ", not known to be a function");
      for (const auto& y : inter(f.used, x.used))
        if (const Scheme* s = env.lookup(y))
          need_un_binding(p, y, *s, "is used by both function and argument");
      return {m->ann, unite(f.used, x.used)};
    }

    case TermTag::Inl:
    case TermTag::Inr: {
      auto [head, args] = m->ann.spine();
      require(head.is_con_named(kSumName) && args.size() == 2, ErrorKind::Internal,
              "injection annotated with a non-sum type");
      auto sub = check(env, p, m->a);
      require(sub.type == (m->tag == TermTag::Inl ? args[0] : args[1]), ErrorKind::Internal,
              "injection payload type mismatch");
      return {m->ann, sub.used};
    }

    case TermTag::Case: {
      auto sc = check(env, p, m->a);
      require(sc.type == Type::sum(m->binder_ann, m->binder_ann_r), ErrorKind::Internal,
              "case scrutinee type mismatch");
      auto l = check(env.extended(m->binder, Scheme::mono(m->binder_ann)), p, m->b);
      auto r = check(env.extended(m->binder_r, Scheme::mono(m->binder_ann_r)), p, m->c);
      require(l.type == m->ann && r.type == m->ann, ErrorKind::Internal,
              "case branch type mismatch");
      std::set<std::string> lb = minus(l.used, m->binder);
      std::set<std::string> rb = minus(r.used, m->binder_r);
      std::set<std::string> divergent;
      for (const auto& y : lb)
        if (!rb.count(y)) divergent.insert(y);
      for (const auto& y : rb)
        if (!lb.count(y)) divergent.insert(y);
      for (const auto& y : inter(sc.used, unite(lb, rb))) divergent.insert(y);
      for (const auto& y : divergent)
        if (const Scheme* s = env.lookup(y))
          need_un_binding(p, y, *s, "is shared or dropped across case paths");
      if (!l.used.count(m->binder))
        need_un_binding(p, m->binder, Scheme::mono(m->binder_ann), "is never used");
      if (!r.used.count(m->binder_r))
        need_un_binding(p, m->binder_r, Scheme::mono(m->binder_ann_r), "is never used");
      return {m->ann, unite(sc.used, unite(lb, rb))};
    }

    case TermTag::Let: {
      require(m->let_scheme.has_value(), ErrorKind::Internal, "let without a recorded scheme");
      const Scheme& sigma = *m->let_scheme;
      auto bound = check(env, pred_union(p, sigma.qual.context), m->a);
      require(bound.type == sigma.qual.body, ErrorKind::Internal,
              "let binding does not match its recorded scheme");
      auto body = check(env.extended(m->name, sigma), p, m->b);
      require(body.type == m->ann, ErrorKind::Internal, "let body type mismatch");
      for (const auto& y : inter(bound.used, body.used))
        if (const Scheme* s = env.lookup(y))
          need_un_binding(p, y, *s, "is used by both a let binding and its body");
      if (!body.used.count(m->name)) need_un_binding(p, m->name, sigma, "is never used");
      return {m->ann, unite(bound.used, minus(body.used, m->name))};
    }

    case TermTag::Make: {
      auto it = prog_.constructors.find(m->name);
      require(it != prog_.constructors.end(), ErrorKind::Scope,
              "unknown constructor '" + m->name + "'");
      const ConstructorSig& sig = it->second;
      std::vector<TypeVar> all = sig.outer;
      all.insert(all.end(), sig.univ.begin(), sig.univ.end());
      all.insert(all.end(), sig.exist.begin(), sig.exist.end());
      require(m->inst.size() == all.size(), ErrorKind::Internal,
              "constructor instantiation arity mismatch at '" + m->name + "'");
      Subst th = instantiation(all, m->inst);
      require(th.apply(sig.result) == m->ann, ErrorKind::Internal,
              "constructor result type mismatch at '" + m->name + "'");
      auto sub = check(env, pred_union(p, th.apply(sig.context)), m->a);
      require(sub.type == th.apply(sig.payload), ErrorKind::Internal,
              "constructor payload type mismatch at '" + m->name + "'");
      // Eigenvariable condition: a still-undetermined universal must not
      // be pinned down by the types of the values the payload consumes.
      TypeVarSet outside = env.restricted(sub.used).free();
      for (size_t i = sig.outer.size(); i < sig.outer.size() + sig.univ.size(); ++i)
        if (m->inst[i].is_var())
          require(!outside.count(m->inst[i].as_var()), ErrorKind::SkolemEscape,
                  "polymorphic payload of '" + m->name + "' constrains its environment");
      return {m->ann, sub.used};
    }

    case TermTag::Break: {
      auto it = prog_.constructors.find(m->name);
      require(it != prog_.constructors.end(), ErrorKind::Scope,
              "unknown constructor '" + m->name + "'");
      const ConstructorSig& sig = it->second;
      std::vector<TypeVar> all = sig.outer;
      all.insert(all.end(), sig.univ.begin(), sig.univ.end());
      all.insert(all.end(), sig.exist.begin(), sig.exist.end());
      require(m->inst.size() == all.size(), ErrorKind::Internal,
              "constructor instantiation arity mismatch at '" + m->name + "'");
      Subst th = instantiation(all, m->inst);
      auto bound = check(env, p, m->a);
      require(bound.type == th.apply(sig.result), ErrorKind::Internal,
              "opened value type mismatch at '" + m->name + "'");
      require(m->binder_ann == th.apply(sig.payload), ErrorKind::Internal,
              "opened binder type mismatch at '" + m->name + "'");
      PredSet inner = pred_union(p, th.apply(sig.context));
      auto body = check(env.extended(m->binder, Scheme::mono(m->binder_ann)), inner, m->b);
      require(body.type == m->ann, ErrorKind::Internal, "body type mismatch at '" + m->name + "'");
      // Eigenvariable condition: an existential opened here must not leak
      // into the result type or the surrounding bindings.
      TypeVarSet outside = env.free();
      for (const TypeVar& v : free_vars(m->ann)) outside.insert(v);
      for (size_t i = sig.outer.size() + sig.univ.size(); i < all.size(); ++i)
        if (m->inst[i].is_var())
          require(!outside.count(m->inst[i].as_var()), ErrorKind::SkolemEscape,
                  "existential opened from '" + m->name + "' escapes its scope");
      if (!body.used.count(m->binder))
        need_un_binding(inner, m->binder, Scheme::mono(m->binder_ann), "is never used");
      for (const auto& y : inter(bound.used, body.used))
        if (const Scheme* s = env.lookup(y))
          need_un_binding(p, y, *s, "is used both by the opened value and the body");
      return {m->ann, unite(bound.used, minus(body.used, m->binder))};
    }
  }
  throw Error(ErrorKind::Internal, "unhandled term form");
}

}  // namespace

bool instance_of(const QualScheme& specific, const QualScheme& general, const EntailEnv& env) {
  FreshSupply supply;
  Subst sk;
  for (const TypeVar& v : specific.scheme.quantified) {
    TypeVar s = supply.fresh(v.kind, Flavor::Rigid, display_name(v.name));
    TypeVar flex = v;
    flex.flavor = Flavor::Flexible;
    sk.bind(flex, Type::var(s));
  }
  Type sbody = sk.apply(specific.scheme.qual.body);
  PredSet sctx = sk.apply(specific.scheme.qual.context);

  Subst in;
  for (const TypeVar& v : general.scheme.quantified) {
    TypeVar u = supply.fresh(v.kind, Flavor::Flexible, display_name(v.name));
    TypeVar flex = v;
    flex.flavor = Flavor::Flexible;
    in.bind(flex, Type::var(u));
  }
  Type gbody = in.apply(general.scheme.qual.body);
  PredSet gctx = in.apply(general.scheme.qual.context);

  TypeVarSet rigid = free_vars(sbody);
  for (const TypeVar& v : free_vars(sctx)) rigid.insert(v);
  Subst u;
  try {
    u = mgu(rigid, gbody, sbody);
  } catch (const Error&) {
    return false;
  }
  EntailEnv e = env.with(pred_union(pred_union(specific.outer, general.outer), sctx));
  return entails(e, u.apply(gctx));
}

void check_term(const Program& prog, const TypeEnv& env, const PredSet& context, const Term& m) {
  Checker c(prog);
  c.check(env, context, m);
}

void check_program(const Program& prog, const ProgramTypes& types) {
  TypeEnv env;
  EntailEnv base{&prog.datatypes, {}};
  for (const Def& d : prog.defs) {
    auto it = types.defs.find(d.name);
    if (it == types.defs.end())
      throw Error(ErrorKind::Internal, "no recorded typing for '" + d.name + "'");
    const DefTyping& t = it->second;
    try {
      Checker c(prog);
      Outcome o = c.check(env, t.residual.context, d.term);
      if (o.type != t.residual.body)
        throw Error(ErrorKind::Internal, "derived type does not match the recorded one");
      if (d.declared &&
          !instance_of(QualScheme{{}, t.scheme}, QualScheme{{}, t.principal}, base))
        throw Error(ErrorKind::NotInstance,
                    "recorded type " + print_scheme(t.scheme) +
                        " is not an instance of the inferred " + print_scheme(t.principal));
    } catch (const Error& e) {
      throw Error(e.kind, "while checking definition '" + d.name + "': " + e.what());
    }
    env.bind(d.name, t.scheme);
  }
}

}  // namespace quill
