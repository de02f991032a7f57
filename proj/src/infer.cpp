#include "quill/infer.hpp"

#include <algorithm>

#include "quill/error.hpp"
#include "quill/pretty.hpp"
#include "quill/sdcheck.hpp"
#include "quill/unify.hpp"

namespace quill {

namespace {

std::set<std::string> set_minus(std::set<std::string> a, const std::string& x) {
  a.erase(x);
  return a;
}

std::set<std::string> set_inter(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  for (const auto& x : a)
    if (b.count(x)) out.insert(x);
  return out;
}

std::set<std::string> set_union(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

void occurrence_order(const Type& t, std::vector<TypeVar>& order, std::set<std::string>& seen) {
  if (t.is_var()) {
    if (seen.insert(t.as_var().name).second) order.push_back(t.as_var());
  } else if (t.is_app()) {
    occurrence_order(t.fun(), order, seen);
    occurrence_order(t.arg(), order, seen);
  }
}

// Free variables of a qualified type in first-occurrence order (body
// first, then the context in its set order) — keeps quantifier lists
// deterministic.
std::vector<TypeVar> ordered_ftv(const QualType& q) {
  std::vector<TypeVar> order;
  std::set<std::string> seen;
  occurrence_order(q.body, order, seen);
  for (const Predicate& p : q.context) {
    occurrence_order(p.lhs, order, seen);
    if (p.kind == PredKind::Geq) occurrence_order(p.rhs, order, seen);
  }
  return order;
}

bool mentions_any(const TypeVarSet& vars, const std::vector<TypeVar>& of) {
  for (const TypeVar& v : of)
    if (vars.count(v)) return true;
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Auxiliaries

PredSet InferSession::leq_constraints(const Type& arrow, const TypeEnv& env) {
  PredSet out;
  for (const auto& [y, sigma] : env.bindings()) {
    if (sigma.quantified.empty() && sigma.qual.context.empty()) {
      out = pred_union(out, simplify(env_, {Predicate::geq(sigma.qual.body, arrow)}));
      continue;
    }
    // Polymorphic binding: skolemize the quantifiers (assumed
    // unrestricted) and ask whether the body is at least as restricted
    // as the arrow.
    Subst sk;
    PredSet assume;
    TypeVarSet skvars;
    for (const TypeVar& v : sigma.quantified) {
      TypeVar s = supply_.fresh(v.kind, Flavor::Rigid, display_name(v.name));
      TypeVar flex = v;
      flex.flavor = Flavor::Flexible;
      sk.bind(flex, Type::var(s));
      assume.insert(Predicate::un(Type::var(s)));
      skvars.insert(s);
    }
    assume = pred_union(assume, sk.apply(sigma.qual.context));
    bool ok = false;
    PredSet r;
    try {
      r = simplify(env_.with(assume), {Predicate::geq(sk.apply(sigma.qual.body), arrow)});
      ok = true;
      for (const Predicate& p : r)
        for (const TypeVar& v : free_vars(p))
          if (skvars.count(v)) ok = false;
    } catch (const Error&) {
      ok = false;
    }
    if (ok) {
      out = pred_union(out, r);
      continue;
    }
    // Fall back: an unrestricted binding is capturable by any function.
    if (auto u = un_scheme(env_, sigma)) {
      out = pred_union(out, *u);
      continue;
    }
    throw Error(ErrorKind::UnEntail, "the binding '" + display_name(y) +
                                         "' cannot be captured by a function of type " +
                                         print_type(arrow));
  }
  return out;
}

PredSet InferSession::un_constraints(const TypeEnv& env) {
  PredSet out;
  for (const auto& [y, sigma] : env.bindings()) {
    auto r = un_scheme(env_, sigma);
    if (!r)
      throw Error(ErrorKind::UnEntail, "'" + display_name(y) +
                                           "' is used more than once, but its type " +
                                           print_type(sigma.qual.body) + " is linear");
    out = pred_union(out, *r);
  }
  return out;
}

PredSet InferSession::weaken(const std::string& x, const Scheme& s,
                             const std::set<std::string>& used) {
  if (used.count(x)) return {};
  auto r = un_scheme(env_, s);
  if (!r)
    throw Error(ErrorKind::UnEntail, "the binder '" + display_name(x) +
                                         "' of linear type " + print_type(s.qual.body) +
                                         " is never used");
  return *r;
}

Scheme InferSession::gen_i(const TypeEnv& env, const QualType& qual, const TypeVarSet& protect,
                           Subst* improve_out) {
  PredSet p1 = simplify(env_, qual.context);
  TypeVarSet env_ftv = env.free();
  TypeVarSet body_ftv = free_vars(qual.body);

  TypeVarSet ambiguous;
  for (const TypeVar& v : free_vars(p1))
    if (!env_ftv.count(v) && !body_ftv.count(v) && !protect.count(v) && !v.rigid())
      ambiguous.insert(v);
  Subst improve = improving_subst(env_, p1, ambiguous);
  if (prefer_un_arrows_) {
    // Upgrade -o choices to ->* where every bound on the variable has a
    // provably unrestricted left side (so the set stays satisfiable).
    Subst upgraded;
    EntailEnv penv = env_.with(p1);
    for (const auto& [name, image] : improve.entries()) {
      if (!image.is_con_named(kLinArrowName)) {
        upgraded.bind(TypeVar{name, image.kind()}, image);
        continue;
      }
      Type var = Type::var(TypeVar{name, Kind::binary()});
      bool safe = true;
      for (const Predicate& q : p1)
        if (q.kind == PredKind::Geq && q.rhs == var && !entails(penv, Predicate::un(q.lhs)))
          safe = false;
      upgraded.bind(TypeVar{name, Kind::binary()}, safe ? Type::un_arrow() : image);
    }
    improve = upgraded;
  }
  if (improve_out) *improve_out = improve;
  PredSet p2 = simplify(env_, improve.apply(p1));
  QualType out{std::move(p2), improve.apply(qual.body)};

  std::vector<TypeVar> quantified;
  for (const TypeVar& v : ordered_ftv(out))
    if (!env_ftv.count(v) && !protect.count(v) && !v.rigid()) quantified.push_back(v);
  return Scheme{std::move(quantified), std::move(out)};
}

// ---------------------------------------------------------------------------
// Algorithm M

InferOutcome InferSession::infer(const Subst& s, const TypeVarSet& rigid, const TypeEnv& env,
                                 const Term& m, const Type& expected) {
  return infer_node(s, rigid, env, m, expected);
}

InferOutcome InferSession::infer_node(const Subst& s, const TypeVarSet& rigid, const TypeEnv& env,
                                      const Term& m, const Type& expected) {
  switch (m->tag) {
    case TermTag::Var: {
      const Scheme* sp = env.lookup(m->name);
      if (!sp) throw Error(ErrorKind::Scope, "unbound variable '" + display_name(m->name) + "'");
      Scheme sigma = s.apply(*sp);
      Subst inst;
      m->inst.clear();
      for (const TypeVar& v : sigma.quantified) {
        TypeVar u = supply_.fresh(v.kind, Flavor::Flexible, display_name(v.name));
        TypeVar flex = v;
        flex.flavor = Flavor::Flexible;
        inst.bind(flex, Type::var(u));
        m->inst.push_back(Type::var(u));
      }
      Subst u = mgu(rigid, inst.apply(sigma.qual.body), s.apply(expected));
      m->ann = expected;
      return {inst.apply(sigma.qual.context), Subst::compose(u, s), {m->name}};
    }

    case TermTag::Lam: {
      Type u1 = Type::var(supply_.fresh(Kind::binary(), Flavor::Flexible, "f"));
      Type u2 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      Type u3 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      Type arr = Type::app_spine(u1, {u2, u3});
      Subst s1 = Subst::compose(mgu(rigid, s.apply(expected), arr), s);
      auto sub = infer_node(s1, rigid, env.extended(m->name, Scheme::mono(u2)), m->a, u3);
      const Subst& r = sub.subst;
      PredSet q{Predicate::fun(r.apply(u1))};
      q = pred_union(q, leq_constraints(r.apply(u1), env.restricted(sub.used).applied(r)));
      q = pred_union(q, weaken(m->name, Scheme::mono(r.apply(u2)), sub.used));
      m->ann = arr;
      return {pred_union(sub.preds, q), r, set_minus(sub.used, m->name)};
    }

    case TermTag::App: {
      Type u1 = Type::var(supply_.fresh(Kind::binary(), Flavor::Flexible, "f"));
      Type u2 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      auto mo = infer_node(s, rigid, env, m->a, Type::app_spine(u1, {u2, expected}));
      auto no = infer_node(mo.subst, rigid, env, m->b, u2);
      const Subst& r = no.subst;
      PredSet q{Predicate::fun(r.apply(u1))};
      q = pred_union(q, un_constraints(env.restricted(set_inter(mo.used, no.used)).applied(r)));
      m->ann = expected;
      return {pred_union(pred_union(mo.preds, no.preds), q), r, set_union(mo.used, no.used)};
    }

    case TermTag::Inl:
    case TermTag::Inr: {
      Type u1 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      Type u2 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      Type sum = Type::sum(u1, u2);
      Subst s1 = Subst::compose(mgu(rigid, s.apply(expected), sum), s);
      auto sub = infer_node(s1, rigid, env, m->a, m->tag == TermTag::Inl ? u1 : u2);
      m->ann = sum;
      return sub;
    }

    case TermTag::Case: {
      Type u1 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      Type u2 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      auto mo = infer_node(s, rigid, env, m->a, Type::sum(u1, u2));
      auto no = infer_node(mo.subst, rigid, env.extended(m->binder, Scheme::mono(u1)), m->b,
                           expected);
      auto po = infer_node(no.subst, rigid, env.extended(m->binder_r, Scheme::mono(u2)), m->c,
                           expected);
      const Subst& r = po.subst;
      // Variables used in exactly one branch may be dropped on the other
      // path; variables shared between scrutinee and a branch are reused.
      std::set<std::string> divergent;
      for (const auto& x : no.used)
        if (!po.used.count(x)) divergent.insert(x);
      for (const auto& x : po.used)
        if (!no.used.count(x)) divergent.insert(x);
      for (const auto& x : set_inter(mo.used, set_union(no.used, po.used))) divergent.insert(x);
      PredSet q = un_constraints(env.restricted(divergent).applied(r));
      q = pred_union(q, weaken(m->binder, Scheme::mono(r.apply(u1)), no.used));
      q = pred_union(q, weaken(m->binder_r, Scheme::mono(r.apply(u2)), po.used));
      m->ann = expected;
      m->binder_ann = u1;
      m->binder_ann_r = u2;
      PredSet preds = pred_union(pred_union(mo.preds, no.preds), pred_union(po.preds, q));
      std::set<std::string> used =
          set_union(mo.used, set_union(set_minus(no.used, m->binder),
                                       set_minus(po.used, m->binder_r)));
      return {std::move(preds), r, std::move(used)};
    }

    case TermTag::Let: {
      Type u1 = Type::var(supply_.fresh(Kind::star(), Flavor::Flexible, "t"));
      auto mo = infer_node(s, rigid, env, m->a, u1);
      const Subst& r0 = mo.subst;
      Subst improve;
      Scheme sigma = gen_i(env.applied(r0), QualType{r0.apply(mo.preds), r0.apply(u1)}, rigid,
                           &improve);
      // Keep the bound term's annotations in step with the improved
      // scheme; improvement only touches variables private to it.  The
      // annotations must be resolved first, or a later substitution pass
      // could reintroduce an improved variable through an alias.
      apply_to_annotations(r0, m->a);
      apply_to_annotations(improve, m->a);
      auto no = infer_node(r0, rigid, env.extended(m->name, sigma), m->b, expected);
      const Subst& r = no.subst;
      PredSet q = un_constraints(env.restricted(set_inter(mo.used, no.used)).applied(r));
      q = pred_union(q, weaken(m->name, r.apply(sigma), no.used));
      // Context predicates over non-quantified variables still constrain
      // the environment even when the binder goes unused; keep them.
      for (const Predicate& p : sigma.qual.context)
        if (!mentions_any(free_vars(p), sigma.quantified)) q.insert(r.apply(p));
      m->ann = expected;
      m->let_scheme = sigma;
      return {pred_union(no.preds, q), r, set_union(mo.used, set_minus(no.used, m->name))};
    }

    case TermTag::Make: {
      const ConstructorSig& sig = constructors_->at(m->name);
      Subst inst;
      m->inst.clear();
      std::vector<TypeVar> univ_fresh;
      auto freshen = [&](const std::vector<TypeVar>& vars, std::vector<TypeVar>* keep) {
        for (const TypeVar& v : vars) {
          TypeVar u = supply_.fresh(v.kind, Flavor::Flexible, display_name(v.name));
          TypeVar flex = v;
          flex.flavor = Flavor::Flexible;
          inst.bind(flex, Type::var(u));
          m->inst.push_back(Type::var(u));
          if (keep) keep->push_back(u);
        }
      };
      freshen(sig.outer, nullptr);
      freshen(sig.univ, &univ_fresh);
      freshen(sig.exist, nullptr);
      Subst s1 = Subst::compose(mgu(rigid, inst.apply(sig.result), s.apply(expected)), s);
      TypeVarSet rigid2 = rigid;
      for (const TypeVar& v : univ_fresh) rigid2.insert(v);
      auto sub = infer_node(s1, rigid2, env, m->a, inst.apply(sig.payload));
      const Subst& r = sub.subst;
      PredSet inst_q = r.apply(inst.apply(sig.context));
      // Discharge payload predicates justified by the signature context.
      EntailEnv de = env_.with(inst_q);
      PredSet residual;
      for (const Predicate& p : r.apply(sub.preds))
        if (!entails(de, p)) residual.insert(p);
      TypeVarSet escape = free_vars(residual);
      for (const TypeVar& v : env.applied(r).free()) escape.insert(v);
      for (const TypeVar& v : univ_fresh)
        if (escape.count(v))
          throw Error(ErrorKind::SkolemEscape,
                      "the polymorphic type of '" + m->name +
                          "' would leak its quantified variable into the context");
      m->ann = expected;
      return {pred_union(residual, inst_q), r, sub.used};
    }

    case TermTag::Break: {
      const ConstructorSig& sig = constructors_->at(m->name);
      Subst inst;
      m->inst.clear();
      std::vector<TypeVar> exist_fresh;
      auto freshen = [&](const std::vector<TypeVar>& vars, std::vector<TypeVar>* keep) {
        for (const TypeVar& v : vars) {
          TypeVar u = supply_.fresh(v.kind, Flavor::Flexible, display_name(v.name));
          TypeVar flex = v;
          flex.flavor = Flavor::Flexible;
          inst.bind(flex, Type::var(u));
          m->inst.push_back(Type::var(u));
          if (keep) keep->push_back(u);
        }
      };
      freshen(sig.outer, nullptr);
      freshen(sig.univ, nullptr);
      freshen(sig.exist, &exist_fresh);
      auto mo = infer_node(s, rigid, env, m->a, inst.apply(sig.result));
      TypeVarSet rigid2 = rigid;
      for (const TypeVar& v : exist_fresh) rigid2.insert(v);
      Type xty = inst.apply(sig.payload);
      auto no = infer_node(mo.subst, rigid2, env.extended(m->binder, Scheme::mono(xty)), m->b,
                           expected);
      const Subst& r = no.subst;
      PredSet inst_q = r.apply(inst.apply(sig.context));
      EntailEnv de = env_.with(inst_q);
      PredSet raw = r.apply(no.preds);
      raw = pred_union(raw, weaken(m->binder, Scheme::mono(r.apply(xty)), no.used));
      raw = pred_union(raw,
                       un_constraints(env.restricted(set_inter(mo.used, no.used)).applied(r)));
      PredSet residual;
      for (const Predicate& p : raw)
        if (!entails(de, p)) residual.insert(p);
      TypeVarSet res_ftv = free_vars(residual);
      TypeVarSet ctx_ftv = env.applied(r).free();
      for (const TypeVar& v : free_vars(r.apply(expected))) ctx_ftv.insert(v);
      for (const TypeVar& v : exist_fresh) {
        if (res_ftv.count(v))
          throw Error(ErrorKind::Discharge,
                      "a predicate about the existential type opened from '" + m->name +
                          "' cannot be discharged");
        if (ctx_ftv.count(v))
          throw Error(ErrorKind::SkolemEscape, "the existential type opened from '" + m->name +
                                                   "' escapes its scope");
      }
      m->ann = expected;
      m->binder_ann = xty;
      return {pred_union(mo.preds, residual), r,
              set_union(mo.used, set_minus(no.used, m->binder))};
    }
  }
  throw Error(ErrorKind::Internal, "unhandled term form");
}

// ---------------------------------------------------------------------------
// Programs

ProgramTypes infer_program(Program& prog, bool prefer_un_arrows) {
  ProgramTypes out;
  TypeEnv env;
  InferSession session(prog);
  session.set_prefer_un_arrows(prefer_un_arrows);
  for (Def& d : prog.defs) {
    try {
      Type u0 = Type::var(session.supply().fresh(Kind::star(), Flavor::Flexible, "t"));
      auto o = session.infer({}, {}, env, d.term, u0);
      apply_to_annotations(o.subst, d.term);
      QualType qual{o.subst.apply(o.preds), o.subst.apply(u0)};
      Subst improve;
      Scheme principal = session.gen_i(env, qual, {}, &improve);
      apply_to_annotations(improve, d.term);
      Scheme recorded = principal;
      if (d.declared) {
        if (!instance_of(QualScheme{{}, *d.declared}, QualScheme{{}, principal},
                         session.entail_env()))
          throw Error(ErrorKind::NotInstance,
                      "declared type " + print_scheme(*d.declared) +
                          " is not an instance of the inferred type " + print_scheme(principal));
        recorded = *d.declared;
      }
      out.defs[d.name] = DefTyping{recorded, principal, principal.qual};
      env.bind(d.name, recorded);
    } catch (const Error& e) {
      throw Error(e.kind, "in definition '" + d.name + "': " + e.what());
    }
  }
  return out;
}

}  // namespace quill
