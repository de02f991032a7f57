#ifndef QUILL_SDCHECK_HPP
#define QUILL_SDCHECK_HPP

#include "quill/entail.hpp"
#include "quill/infer.hpp"
#include "quill/parser.hpp"
#include "quill/syntax.hpp"
#include "quill/term.hpp"

namespace quill {

// A scheme together with predicates assumed from the enclosing scope.
struct QualScheme {
  PredSet outer;
  Scheme scheme;
};

// Is `specific` an instance of `general`?  The general scheme's
// quantifiers are instantiated, the specific scheme's are held rigid,
// the bodies are matched, and the instantiated general context must
// follow from the specific one (plus both outer assumption sets).
bool instance_of(const QualScheme& specific, const QualScheme& general, const EntailEnv& env);

// Syntax-directed validation of an elaborated term: every annotation is
// re-derived bottom-up and every side condition (Fun obligations,
// capture restrictions, weakening/contraction residuals, instantiated
// constructor contexts, eigenvariable scoping) is re-checked by
// entailment under `context`.  Throws Error on the first violation.
void check_term(const Program& prog, const TypeEnv& env, const PredSet& context, const Term& m);

// Validates every definition of an inferred program against its recorded
// typing, accumulating the definition environment as inference did.
void check_program(const Program& prog, const ProgramTypes& types);

}  // namespace quill

#endif
