#ifndef QUILL_UNIFY_HPP
#define QUILL_UNIFY_HPP

#include "quill/syntax.hpp"

namespace quill {

// Kinded most-general unification.  Variables in `rigid` (and variables
// with rigid flavor) are treated as constants: they unify only with
// themselves.  Throws Error(UnifyMismatch/UnifyOccurs/UnifyRigid).
Subst mgu(const TypeVarSet& rigid, const Type& left, const Type& right);

}  // namespace quill

#endif
