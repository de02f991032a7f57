#ifndef QUILL_EVAL_HPP
#define QUILL_EVAL_HPP

#include <map>
#include <string>
#include <vector>

#include "quill/entail.hpp"
#include "quill/syntax.hpp"
#include "quill/term.hpp"

namespace quill {

// The evaluator tags every value it introduces with a fresh index and
// keeps the multisets of introduced and eliminated values, so that the
// audit can tell whether any linear value was duplicated or discarded.

struct ValueInfo {
  Type ann;             // the value's elaborated type at introduction
  std::string summary;  // printed shape, for reports
};

struct EvalTrace {
  std::map<long, long> introduced;  // index -> multiplicity (always 1)
  std::map<long, long> eliminated;  // index -> multiplicity
  std::map<long, ValueInfo> values;
  std::vector<std::string> lines;  // one line per rule application
};

struct EvalResult {
  Term value;
  EvalTrace trace;
};

// Big-step call-by-value evaluation of a closed elaborated term.  The
// term is cloned first; substituted values share indices with their
// originals, which is what makes duplication observable.  Throws
// Error(StepBudget) after `step_budget` rule applications and
// Error(Internal) on an elimination-position mismatch.
EvalResult eval_term(const Term& m, long step_budget = 1000000, bool record_lines = false);

// Val(-): every value-shaped node of the term (indices >= 0), as a
// multiset by index, looking under binders and inside values.
std::map<long, long> value_subterms(const Term& t);

struct AuditReport {
  std::map<long, long> discarded;  // I \ E'
  std::map<long, long> copied;     // E' \ I
  std::vector<long> violations;    // members whose annotation is not Un
  std::map<long, ValueInfo> values;
  bool ok() const { return violations.empty(); }
};

// Theorem-8-style audit: with E' = E + Val(result), every discarded
// (I \ E') or copied (E' \ I) value must have a provably unrestricted
// annotation under `preds`.
AuditReport audit(const Term& result, const EvalTrace& trace, const PredSet& preds,
                  const EntailEnv& env);

// `<fun>`, `inl V`, `inr V`, `K V`; indices shown as a ^j suffix on demand.
std::string print_value(const Term& v, bool with_indices = false);

}  // namespace quill

#endif
