#include "quill/term.hpp"

#include <map>

#include "quill/error.hpp"

namespace quill {

namespace {

Term node(TermTag tag) {
  auto n = std::make_shared<TermNode>();
  n->tag = tag;
  return n;
}

}  // namespace

Term mk_var(std::string x) {
  Term t = node(TermTag::Var);
  t->name = std::move(x);
  return t;
}

Term mk_lam(std::string x, Term body) {
  Term t = node(TermTag::Lam);
  t->name = std::move(x);
  t->a = std::move(body);
  return t;
}

Term mk_app(Term fun, Term arg) {
  Term t = node(TermTag::App);
  t->a = std::move(fun);
  t->b = std::move(arg);
  return t;
}

Term mk_inl(Term body) {
  Term t = node(TermTag::Inl);
  t->a = std::move(body);
  return t;
}

Term mk_inr(Term body) {
  Term t = node(TermTag::Inr);
  t->a = std::move(body);
  return t;
}

Term mk_case(Term scrut, std::string xl, Term left, std::string xr, Term right) {
  Term t = node(TermTag::Case);
  t->a = std::move(scrut);
  t->binder = std::move(xl);
  t->b = std::move(left);
  t->binder_r = std::move(xr);
  t->c = std::move(right);
  return t;
}

Term mk_let(std::string x, Term bound, Term body) {
  Term t = node(TermTag::Let);
  t->name = std::move(x);
  t->a = std::move(bound);
  t->b = std::move(body);
  return t;
}

Term mk_make(std::string con, Term arg) {
  Term t = node(TermTag::Make);
  t->name = std::move(con);
  t->a = std::move(arg);
  return t;
}

Term mk_break(std::string con, std::string x, Term bound, Term body) {
  Term t = node(TermTag::Break);
  t->name = std::move(con);
  t->binder = std::move(x);
  t->a = std::move(bound);
  t->b = std::move(body);
  return t;
}

Term clone_term(const Term& t) {
  if (!t) return nullptr;
  auto out = std::make_shared<TermNode>(*t);
  out->a = clone_term(t->a);
  out->b = clone_term(t->b);
  out->c = clone_term(t->c);
  return out;
}

namespace {

void collect_free(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!t) return;
  switch (t->tag) {
    case TermTag::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      break;
    case TermTag::Lam: {
      bool fresh = bound.insert(t->name).second;
      collect_free(t->a, bound, out);
      if (fresh) bound.erase(t->name);
      break;
    }
    case TermTag::App:
      collect_free(t->a, bound, out);
      collect_free(t->b, bound, out);
      break;
    case TermTag::Inl:
    case TermTag::Inr:
    case TermTag::Make:
      collect_free(t->a, bound, out);
      break;
    case TermTag::Case: {
      collect_free(t->a, bound, out);
      bool fl = bound.insert(t->binder).second;
      collect_free(t->b, bound, out);
      if (fl) bound.erase(t->binder);
      bool fr = bound.insert(t->binder_r).second;
      collect_free(t->c, bound, out);
      if (fr) bound.erase(t->binder_r);
      break;
    }
    case TermTag::Let: {
      collect_free(t->a, bound, out);
      bool fresh = bound.insert(t->name).second;
      collect_free(t->b, bound, out);
      if (fresh) bound.erase(t->name);
      break;
    }
    case TermTag::Break: {
      collect_free(t->a, bound, out);
      bool fresh = bound.insert(t->binder).second;
      collect_free(t->b, bound, out);
      if (fresh) bound.erase(t->binder);
      break;
    }
  }
}

}  // namespace

std::set<std::string> free_term_vars(const Term& t) {
  std::set<std::string> bound, out;
  collect_free(t, bound, out);
  return out;
}

Term subst_term(const Term& t, const std::string& x, const Term& value) {
  if (!t) return nullptr;
  if (t->tag == TermTag::Var) return t->name == x ? clone_term(value) : clone_term(t);
  // A binder shadowing x stops the substitution below it.
  auto shadowed = [&](const std::string& b) { return b == x; };
  auto out = std::make_shared<TermNode>(*t);
  switch (t->tag) {
    case TermTag::Lam:
      out->a = shadowed(t->name) ? clone_term(t->a) : subst_term(t->a, x, value);
      break;
    case TermTag::App:
      out->a = subst_term(t->a, x, value);
      out->b = subst_term(t->b, x, value);
      break;
    case TermTag::Inl:
    case TermTag::Inr:
    case TermTag::Make:
      out->a = subst_term(t->a, x, value);
      break;
    case TermTag::Case:
      out->a = subst_term(t->a, x, value);
      out->b = shadowed(t->binder) ? clone_term(t->b) : subst_term(t->b, x, value);
      out->c = shadowed(t->binder_r) ? clone_term(t->c) : subst_term(t->c, x, value);
      break;
    case TermTag::Let:
      out->a = subst_term(t->a, x, value);
      out->b = shadowed(t->name) ? clone_term(t->b) : subst_term(t->b, x, value);
      break;
    case TermTag::Break:
      out->a = subst_term(t->a, x, value);
      out->b = shadowed(t->binder) ? clone_term(t->b) : subst_term(t->b, x, value);
      break;
    default:
      break;
  }
  return out;
}

void apply_to_annotations(const Subst& s, const Term& t) {
  if (!t) return;
  if (t->ann.defined()) t->ann = s.apply(t->ann);
  if (t->binder_ann.defined()) t->binder_ann = s.apply(t->binder_ann);
  if (t->binder_ann_r.defined()) t->binder_ann_r = s.apply(t->binder_ann_r);
  for (Type& i : t->inst) i = s.apply(i);
  if (t->let_scheme) t->let_scheme = s.apply(*t->let_scheme);
  apply_to_annotations(s, t->a);
  apply_to_annotations(s, t->b);
  apply_to_annotations(s, t->c);
}

std::string NameSupply::fresh(const std::string& hint) {
  return hint + "%" + std::to_string(counter_++);
}

namespace {

void rename(const Term& t, std::map<std::string, std::string>& scope,
            const std::set<std::string>& globals, NameSupply& supply) {
  if (!t) return;
  auto bind = [&](std::string& binder) {
    auto prev = scope.find(binder);
    std::optional<std::string> saved;
    if (prev != scope.end()) saved = prev->second;
    std::string fresh = supply.fresh(binder);
    scope[binder] = fresh;
    std::string original = binder;
    binder = fresh;
    return std::pair(original, saved);
  };
  auto unbind = [&](const std::pair<std::string, std::optional<std::string>>& saved) {
    if (saved.second)
      scope[saved.first] = *saved.second;
    else
      scope.erase(saved.first);
  };
  switch (t->tag) {
    case TermTag::Var: {
      auto it = scope.find(t->name);
      if (it != scope.end()) {
        t->name = it->second;
      } else if (!globals.count(t->name)) {
        throw Error(ErrorKind::Scope, "unbound variable '" + t->name + "'");
      }
      break;
    }
    case TermTag::Lam: {
      auto saved = bind(t->name);
      rename(t->a, scope, globals, supply);
      unbind(saved);
      break;
    }
    case TermTag::App:
      rename(t->a, scope, globals, supply);
      rename(t->b, scope, globals, supply);
      break;
    case TermTag::Inl:
    case TermTag::Inr:
    case TermTag::Make:
      rename(t->a, scope, globals, supply);
      break;
    case TermTag::Case: {
      rename(t->a, scope, globals, supply);
      auto sl = bind(t->binder);
      rename(t->b, scope, globals, supply);
      unbind(sl);
      auto sr = bind(t->binder_r);
      rename(t->c, scope, globals, supply);
      unbind(sr);
      break;
    }
    case TermTag::Let: {
      rename(t->a, scope, globals, supply);
      auto saved = bind(t->name);
      rename(t->b, scope, globals, supply);
      unbind(saved);
      break;
    }
    case TermTag::Break: {
      rename(t->a, scope, globals, supply);
      auto saved = bind(t->binder);
      rename(t->b, scope, globals, supply);
      unbind(saved);
      break;
    }
  }
}

}  // namespace

void rename_apart(const Term& t, const std::set<std::string>& globals, NameSupply& supply) {
  std::map<std::string, std::string> scope;
  rename(t, scope, globals, supply);
}

}  // namespace quill
