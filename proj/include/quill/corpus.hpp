#ifndef QUILL_CORPUS_HPP
#define QUILL_CORPUS_HPP

#include <string>
#include <vector>

#include "quill/error.hpp"
#include "quill/eval.hpp"
#include "quill/infer.hpp"
#include "quill/parser.hpp"

namespace quill {

struct CorpusEntry {
  enum class Expect { Scheme, Error, Run };

  std::string name;
  std::string source;
  Expect expect;
  std::string subject;          // Expect::Scheme: which definition
  std::string expected_scheme;  // Expect::Scheme: golden scheme source
  ErrorKind expected_error = ErrorKind::Internal;  // Expect::Error
  std::string expected_value;   // Expect::Run: printed value ("" = audit only)
};

const std::vector<CorpusEntry>& corpus();

struct CorpusResult {
  std::string name;
  bool pass;
  std::string detail;
};

// Runs every entry: inference, the syntax-directed checker, and (for
// runnable entries) evaluation plus the linearity audit.
std::vector<CorpusResult> run_corpus();

struct RunOutcome {
  Term term;  // the inlined, elaborated program body
  Term value;
  EvalTrace trace;
  AuditReport report;
  PredSet preds;  // residual context the audit was performed under
};

// Inlines the program's definitions as nested lets around `main`, infers
// the result, defaults still-ambiguous arrow annotations to ->*, then
// evaluates and audits.  Requires a `main` definition.
RunOutcome run_program(const Program& prog, long step_budget = 1000000,
                       bool record_lines = false);

// Deterministically generates `count` distinct well-typed closed term
// sources (filtering random candidates through inference).
std::vector<std::string> generated_sources(unsigned seed, int count);

}  // namespace quill

#endif
