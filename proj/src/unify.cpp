#include "quill/unify.hpp"

#include "quill/error.hpp"
#include "quill/pretty.hpp"

namespace quill {

namespace {

bool is_rigid(const TypeVarSet& rigid, const TypeVar& v) {
  return v.rigid() || rigid.count(v) != 0;
}

void bind_var(const TypeVarSet& rigid, Subst& s, const TypeVar& v, const Type& t) {
  if (t.is_var() && t.as_var() == v) return;
  if (is_rigid(rigid, v))
    throw Error(ErrorKind::UnifyRigid,
                "cannot instantiate the rigid type variable '" + display_name(v.name) +
                    "' to " + print_type(t));
  if (free_vars(t).count(v))
    throw Error(ErrorKind::UnifyOccurs,
                "occurs check: '" + display_name(v.name) + "' in " + print_type(t));
  if (v.kind != t.kind())
    throw Error(ErrorKind::UnifyMismatch, "kind mismatch unifying '" + display_name(v.name) +
                                              "' with " + print_type(t));
  // Keep the substitution idempotent.
  Subst step = Subst::singleton(v, t);
  s = Subst::compose(step, s);
}

void unify(const TypeVarSet& rigid, Subst& s, const Type& a0, const Type& b0) {
  Type a = s.apply(a0);
  Type b = s.apply(b0);
  if (a.is_var()) {
    if (b.is_var() && is_rigid(rigid, a.as_var()) && !is_rigid(rigid, b.as_var())) {
      bind_var(rigid, s, b.as_var(), a);
      return;
    }
    bind_var(rigid, s, a.as_var(), b);
    return;
  }
  if (b.is_var()) {
    bind_var(rigid, s, b.as_var(), a);
    return;
  }
  if (a.is_con() && b.is_con()) {
    if (a.as_con().name != b.as_con().name || a.as_con().kind != b.as_con().kind)
      throw Error(ErrorKind::UnifyMismatch,
                  "cannot unify " + print_type(a) + " with " + print_type(b));
    return;
  }
  if (a.is_app() && b.is_app()) {
    unify(rigid, s, a.fun(), b.fun());
    unify(rigid, s, a.arg(), b.arg());
    return;
  }
  throw Error(ErrorKind::UnifyMismatch,
              "cannot unify " + print_type(a) + " with " + print_type(b));
}

}  // namespace

Subst mgu(const TypeVarSet& rigid, const Type& left, const Type& right) {
  if (left.kind() != right.kind())
    throw Error(ErrorKind::UnifyMismatch, "kind mismatch unifying " + print_type(left) +
                                              " with " + print_type(right));
  Subst s;
  unify(rigid, s, left, right);
  return s;
}

}  // namespace quill
