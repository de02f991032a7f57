#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "quill/corpus.hpp"
#include "quill/error.hpp"
#include "quill/eval.hpp"
#include "quill/infer.hpp"
#include "quill/parser.hpp"
#include "quill/pretty.hpp"
#include "quill/sdcheck.hpp"

namespace {

constexpr int kExitTypeError = 1;
constexpr int kExitSourceError = 2;
constexpr int kExitAudit = 3;
constexpr int kExitBudget = 4;

int exit_code(const quill::Error& e) {
  switch (e.kind) {
    case quill::ErrorKind::Parse:
    case quill::ErrorKind::Scope:
    case quill::ErrorKind::Kind:
      return kExitSourceError;
    case quill::ErrorKind::StepBudget:
      return kExitBudget;
    default:
      return kExitTypeError;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw quill::Error(quill::ErrorKind::Parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_infer(const std::string& path) {
  quill::Program prog = quill::parse_program(slurp(path));
  quill::ProgramTypes types = quill::infer_program(prog);
  for (const quill::Def& d : prog.defs)
    std::cout << d.name << " : "
              << quill::print_scheme(quill::canonicalize(types.defs.at(d.name).scheme)) << "\n";
  return 0;
}

int cmd_check(const std::string& path) {
  quill::Program prog = quill::parse_program(slurp(path));
  quill::ProgramTypes types = quill::infer_program(prog);
  quill::check_program(prog, types);
  for (const quill::Def& d : prog.defs) std::cout << d.name << " : ok\n";
  return 0;
}

int cmd_run(const std::string& path, bool audit, bool trace) {
  quill::Program prog = quill::parse_program(slurp(path));
  quill::RunOutcome run = quill::run_program(prog, 1000000, trace);
  if (trace)
    for (const std::string& line : run.trace.lines) std::cout << line << "\n";
  std::cout << quill::print_value(run.value, trace) << "\n";
  if (audit) {
    std::cout << "audit: introduced " << run.trace.introduced.size() << ", eliminated "
              << run.trace.eliminated.size() << ", discarded " << run.report.discarded.size()
              << ", copied " << run.report.copied.size() << "\n";
    if (run.report.ok()) {
      std::cout << "audit: ok\n";
    } else {
      for (long idx : run.report.violations) {
        const auto& info = run.report.values.at(idx);
        std::cerr << "audit violation: value ^" << idx << " (" << info.summary << ") of type "
                  << quill::print_type(info.ann) << " is linear but was "
                  << (run.report.discarded.count(idx) ? "discarded" : "copied") << "\n";
      }
      return kExitAudit;
    }
  }
  return 0;
}

int cmd_corpus() {
  int failures = 0;
  for (const quill::CorpusResult& r : quill::run_corpus()) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.pass) {
      std::cout << "  (" << r.detail << ")";
      ++failures;
    }
    std::cout << "\n";
  }
  if (failures) std::cerr << failures << " corpus entries failed\n";
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quill: linearity via qualified types"};
  app.require_subcommand(1);

  std::string path;
  bool audit = false, trace = false;

  CLI::App* infer = app.add_subcommand("infer", "print the inferred scheme of each definition");
  infer->add_option("file", path, "source file")->required();

  CLI::App* run = app.add_subcommand("run", "evaluate `main`");
  run->add_option("file", path, "source file")->required();
  run->add_flag("--audit", audit, "report the linearity audit");
  run->add_flag("--trace", trace, "print one line per evaluation rule");

  CLI::App* check = app.add_subcommand("check", "validate elaborations with the checker");
  check->add_option("file", path, "source file")->required();

  CLI::App* corpus = app.add_subcommand("corpus", "run the embedded example corpus");

  CLI11_PARSE(app, argc, argv);

  try {
    if (infer->parsed()) return cmd_infer(path);
    if (run->parsed()) return cmd_run(path, audit, trace);
    if (check->parsed()) return cmd_check(path);
    if (corpus->parsed()) return cmd_corpus();
  } catch (const quill::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
