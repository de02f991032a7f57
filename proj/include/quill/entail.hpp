#ifndef QUILL_ENTAIL_HPP
#define QUILL_ENTAIL_HPP

#include <map>
#include <optional>

#include "quill/syntax.hpp"

namespace quill {

struct EntailEnv {
  // Datatype name -> its (single) constructor's signature.
  const std::map<std::string, ConstructorSig>* datatypes = nullptr;
  PredSet assumptions;

  EntailEnv with(PredSet extra) const {
    return EntailEnv{datatypes, pred_union(assumptions, std::move(extra))};
  }
};

// Backward-chaining decision procedure for `P entails goal`.
bool entails(const EntailEnv& env, const Predicate& goal);
bool entails(const EntailEnv& env, const PredSet& goals);

// For a scheme `forall ts. Q => tau`, the least residual predicate set P
// (over the scheme's free variables) with `P, Q, Un ts |- Un tau`;
// nullopt when the scheme cannot be unrestricted at all.
std::optional<PredSet> un_scheme(const EntailEnv& env, const Scheme& s);

// Reduces a predicate set to simple form (`Un t`, `Fun t`, `tau >= t`);
// fully decided predicates are dropped.  Throws Error(Unsatisfiable) on a
// predicate with no satisfying instantiation.
PredSet simplify(const EntailEnv& env, const PredSet& p);

// Each ambiguous function-kinded variable maps to an arrow constructor:
// ->* when Un-constrained, -o otherwise.  Variables of other kinds are
// left alone.
Subst improving_subst(const EntailEnv& env, const PredSet& simple, const TypeVarSet& ambiguous);

}  // namespace quill

#endif
