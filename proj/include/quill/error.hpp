#ifndef QUILL_ERROR_HPP
#define QUILL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace quill {

// Every failure mode the pipeline can report.  The CLI maps these onto
// exit codes: Parse/Scope/Kind are source errors, the rest are type or
// evaluation errors.
enum class ErrorKind {
  Parse,          // malformed source text
  Scope,          // unbound variable, duplicate name, unknown constructor
  Kind,           // kind mismatch in a declaration or annotation
  UnifyMismatch,  // constructor clash
  UnifyOccurs,    // occurs-check failure
  UnifyRigid,     // attempt to bind a rigid variable
  UnEntail,       // required Un predicate not derivable
  Unsatisfiable,  // predicate with no satisfying instantiation
  SkolemEscape,   // eigenvariable disjointness violation
  Discharge,      // break could not discharge the body's predicates
  NotInstance,    // declared scheme is not an instance of the inferred one
  StepBudget,     // evaluator ran out of steps
  Internal,       // broken invariant; always a bug
};

struct Error : std::runtime_error {
  Error(ErrorKind k, std::string msg) : std::runtime_error(std::move(msg)), kind(k) {}
  ErrorKind kind;
};

inline bool is_source_error(ErrorKind k) {
  return k == ErrorKind::Parse || k == ErrorKind::Scope || k == ErrorKind::Kind;
}

}  // namespace quill

#endif
