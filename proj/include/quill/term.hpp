#ifndef QUILL_TERM_HPP
#define QUILL_TERM_HPP

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "quill/syntax.hpp"

namespace quill {

// Terms are mutable trees: inference fills in the annotation slots, and
// the evaluator splices value terms in by substitution.  Values carry a
// non-negative index once introduced by the evaluator.

enum class TermTag { Var, Lam, App, Inl, Inr, Case, Let, Make, Break };

struct TermNode;
using Term = std::shared_ptr<TermNode>;

struct TermNode {
  TermTag tag;

  // Var: name; Lam/Let: binder name; Make/Break: constructor name.
  std::string name;
  // Break: binder name.  Case: left/right binders.
  std::string binder;
  std::string binder_r;

  // Lam: a = body.  App: a = fun, b = arg.  Inl/Inr/Make: a = body.
  // Case: a = scrutinee, b = left body, c = right body.
  // Let/Break: a = bound, b = body.
  Term a, b, c;

  // Filled by elaboration: the type inferred for this node.
  Type ann;
  // Break: the type given to the opened binder.  Case: left binder.
  Type binder_ann;
  // Case: right binder's type.
  Type binder_ann_r;
  // Var: instantiation of the binding's quantified variables, in order.
  // Make/Break: instantiation of the signature's outer ++ univ ++ exist.
  std::vector<Type> inst;
  // Let: the generalized scheme of the bound definition.
  std::optional<Scheme> let_scheme;

  // Evaluator tag; negative means "not (yet) an introduced value".
  long index = -1;
};

Term mk_var(std::string x);
Term mk_lam(std::string x, Term body);
Term mk_app(Term fun, Term arg);
Term mk_inl(Term body);
Term mk_inr(Term body);
Term mk_case(Term scrut, std::string xl, Term left, std::string xr, Term right);
Term mk_let(std::string x, Term bound, Term body);
Term mk_make(std::string con, Term arg);
Term mk_break(std::string con, std::string x, Term bound, Term body);

// Deep copy; shares nothing with the original.
Term clone_term(const Term& t);

std::set<std::string> free_term_vars(const Term& t);

// Capture is impossible when binders have been renamed apart, which the
// parser guarantees; the evaluator preserves it by cloning spliced values.
Term subst_term(const Term& t, const std::string& x, const Term& value);

// Applies a type substitution to every annotation slot, in place.
void apply_to_annotations(const Subst& s, const Term& t);

// Renames all binders to globally fresh names ("x%7"), in place.
// Reports unbound variables unless they appear in `globals`.
class NameSupply {
 public:
  std::string fresh(const std::string& hint);

 private:
  long counter_ = 0;
};

void rename_apart(const Term& t, const std::set<std::string>& globals, NameSupply& supply);

}  // namespace quill

#endif
