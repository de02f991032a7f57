// Acceptance harness: one line per criterion, nonzero exit on any failure.
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "quill/corpus.hpp"
#include "quill/entail.hpp"
#include "quill/error.hpp"
#include "quill/eval.hpp"
#include "quill/infer.hpp"
#include "quill/parser.hpp"
#include "quill/pretty.hpp"
#include "quill/sdcheck.hpp"

using namespace quill;

namespace {

constexpr unsigned kSeed = 20260823;
int g_failures = 0;

void criterion(const std::string& name, const std::function<std::string()>& body) {
  std::string detail;
  try {
    detail = body();
  } catch (const std::exception& e) {
    detail = e.what();
  }
  if (detail.empty()) {
    std::cout << "PASS " << name << "\n";
  } else {
    std::cout << "FAIL " << name << ": " << detail << "\n";
    ++g_failures;
  }
}

Scheme principal(const std::string& source, const std::string& name) {
  Program p = parse_program(source);
  return infer_program(p).defs.at(name).principal;
}

std::string golden_types() {
  struct Case {
    const char* source;
    const char* name;
    const char* expected;
  } cases[] = {
      {"def it = \\x -> \\y -> x;", "it", "forall t u g f. (Un u, t >= f) => t -g> u -f> t"},
      {"def it = \\f -> \\x -> f x;", "it",
       "forall t u f g h. (f >= g) => (t -f> u) -h> t -g> u"},
      {"con MP : forall t u. ((forall v f. (t >= f, u >= f) => (t -> u -> v) -f> v) ->* MP t u);\n"
       "def it = \\x -> \\y -> MP (\\f -> f x y);",
       "it", "forall t u g f. (t >= f) => t -g> u -f> MP t u"},
      {"def it = \\x -> x;", "it", "forall t f. t -f> t"},
      {"def it = \\x -> \\y -> y;", "it", "forall t u g f. (Un t) => t -g> u -f> u"},
  };
  for (const Case& c : cases) {
    Program p = parse_program(c.source);
    Scheme got = infer_program(p).defs.at(c.name).principal;
    Scheme want = parse_scheme(c.expected, p.data_kinds);
    if (!scheme_equal(got, want))
      return std::string("inferred ") + print_scheme(canonicalize(got)) + " for " + c.source;
  }
  return "";
}

std::string ambiguity_improvement() {
  Scheme let_style = principal("def it = let y = \\w -> w in (\\x -> x) y;", "it");
  TypeVarSet body = free_vars(let_style.qual.body);
  for (const TypeVar& v : let_style.quantified)
    if (!body.count(v)) return "ambiguous variable survives in the let-style scheme";

  for (const CorpusEntry& e : corpus()) {
    if (e.expect == CorpusEntry::Expect::Error) continue;
    Program p = parse_program(e.source);
    ProgramTypes t = infer_program(p);
    for (const Def& d : p.defs) {
      const Scheme& s = t.defs.at(d.name).scheme;
      TypeVarSet b = free_vars(s.qual.body);
      for (const TypeVar& v : s.quantified)
        if (v.kind == Kind::binary() && !b.count(v))
          return "residual ambiguous arrow variable in " + e.name + "/" + d.name;
    }
  }
  return "";
}

std::vector<std::string>& generated() {
  static std::vector<std::string> sources = generated_sources(kSeed, 500);
  return sources;
}

std::string soundness_oracle() {
  for (const CorpusEntry& e : corpus()) {
    if (e.expect == CorpusEntry::Expect::Error) continue;
    Program p = parse_program(e.source);
    check_program(p, infer_program(p));
  }
  if (generated().size() != 500) return "could not generate 500 well-typed terms";
  for (const std::string& src : generated()) {
    Program p = parse_program(src);
    check_program(p, infer_program(p));
  }
  return "";
}

std::string conservativity() {
  int count = 0;
  for (const CorpusResult& r : run_corpus()) {
    if (r.name.rfind("conservativity-", 0) != 0) continue;
    ++count;
    if (!r.pass) return r.name + ": " + r.detail;
  }
  return count >= 30 ? "" : "only " + std::to_string(count) + " non-linear corpus terms";
}

std::string type_safety_audit() {
  for (const CorpusEntry& e : corpus()) {
    if (e.expect != CorpusEntry::Expect::Run) continue;
    Program p = parse_program(e.source);
    RunOutcome r = run_program(p);
    if (!r.report.ok()) return "audit violation in " + e.name;
  }
  for (const std::string& src : generated()) {
    Program p = parse_program(src);
    RunOutcome r = run_program(p);
    if (!r.report.ok()) return "audit violation in generated term: " + src;
  }

  // Positive control: a discarded token value must be flagged.
  Program tok = parse_program("con MkTok : ((exists u. u) ->* Tok);");
  EvalTrace trace;
  trace.introduced[0] = 1;
  trace.values[0] = ValueInfo{Type::con("Tok", Kind::star()), "MkTok <fun>"};
  AuditReport rep = audit(mk_var("r"), trace, {}, EntailEnv{&tok.datatypes, {}});
  if (rep.ok()) return "synthetic token violation went unflagged";
  return "";
}

std::string negative_suite() {
  int count = 0;
  for (const CorpusResult& r : run_corpus()) {
    if (r.name.rfind("neg-", 0) != 0) continue;
    ++count;
    if (!r.pass) return r.name + ": " + r.detail;
  }
  return count >= 6 ? "" : "only " + std::to_string(count) + " negative programs";
}

std::string determinism() {
  std::string first, second;
  for (std::string* out : {&first, &second}) {
    for (const CorpusEntry& e : corpus()) {
      if (e.expect == CorpusEntry::Expect::Error) continue;
      Program p = parse_program(e.source);
      ProgramTypes t = infer_program(p);
      for (const Def& d : p.defs)
        *out += d.name + " : " + print_scheme(canonicalize(t.defs.at(d.name).scheme)) + "\n";
    }
  }
  return first == second ? "" : "corpus inference output differs between runs";
}

std::string entailment_properties() {
  TypeVar t1{"t1", Kind::star()}, t2{"t2", Kind::star()};
  EntailEnv empty{nullptr, {}};
  Type a = Type::var(TypeVar{"a", Kind::star()});
  Type b = Type::var(TypeVar{"b", Kind::star()});
  Type c = Type::var(TypeVar{"c", Kind::star()});

  Program tok = parse_program("con MkTok : ((exists u. u) ->* Tok);");
  bool examples =
      entails(empty, Predicate::un(Type::un(a, b))) &&
      entails(empty, Predicate::geq(a, Type::lin(b, c))) &&
      entails(EntailEnv{nullptr, {Predicate::un(a)}}, Predicate::geq(a, Type::un(b, c))) &&
      !entails(empty, Predicate::un(Type::lin(a, b))) &&
      entails(EntailEnv{nullptr, {Predicate::un(Type::var(t1)), Predicate::un(Type::var(t2))}},
              Predicate::un(Type::sum(Type::var(t1), Type::var(t2)))) &&
      !entails(EntailEnv{&tok.datatypes, {}}, Predicate::un(Type::con("Tok", Kind::star())));
  if (!examples) return "an entailment example does not hold";

  std::mt19937 rng(kSeed);
  auto star = [&](auto self, int depth) -> Type {
    switch (rng() % (depth <= 0 ? 1 : 5)) {
      case 0:
        return Type::var(TypeVar{"t" + std::to_string(1 + rng() % 3), Kind::star()});
      case 1:
        return Type::lin(self(self, depth - 1), self(self, depth - 1));
      case 2:
        return Type::un(self(self, depth - 1), self(self, depth - 1));
      case 3:
        return Type::sum(self(self, depth - 1), self(self, depth - 1));
      default:
        return Type::app_spine(
            Type::var(TypeVar{"f" + std::to_string(1 + rng() % 2), Kind::binary()}),
            {self(self, depth - 1), self(self, depth - 1)});
    }
  };
  auto arrow = [&]() -> Type {
    switch (rng() % 3) {
      case 0:
        return Type::var(TypeVar{"f" + std::to_string(1 + rng() % 2), Kind::binary()});
      case 1:
        return Type::lin_arrow();
      default:
        return Type::un_arrow();
    }
  };
  auto pred = [&]() -> Predicate {
    switch (rng() % 4) {
      case 0:
        return Predicate::un(star(star, 2));
      case 1:
        return Predicate::un(arrow());
      case 2:
        return Predicate::fun(arrow());
      default:
        return Predicate::geq(star(star, 2), arrow());
    }
  };
  auto preds = [&](int n) {
    PredSet out;
    for (int i = 0; i < n; ++i) out.insert(pred());
    return out;
  };

  for (int i = 0; i < 1000; ++i) {
    PredSet p = preds(3);
    Predicate goal = pred();
    if (entails(EntailEnv{nullptr, p}, goal) &&
        !entails(EntailEnv{nullptr, pred_union(p, preds(3))}, goal))
      return "monotonicity failed";
  }
  for (int i = 0; i < 1000; ++i) {
    PredSet p = preds(4);
    PredSet simple;
    try {
      simple = simplify(empty, p);
    } catch (const Error&) {
      continue;
    }
    if (!entails(EntailEnv{nullptr, simple}, p)) return "simplify output does not entail input";
  }
  return "";
}

}  // namespace

int main() {
  criterion("golden-principal-types", golden_types);
  criterion("ambiguity-improvement", ambiguity_improvement);
  criterion("soundness-oracle", soundness_oracle);
  criterion("conservativity", conservativity);
  criterion("type-safety-audit", type_safety_audit);
  criterion("negative-suite", negative_suite);
  criterion("determinism", determinism);
  criterion("entailment-properties", entailment_properties);
  return g_failures == 0 ? 0 : 1;
}
