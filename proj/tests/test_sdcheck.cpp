#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>

#include "doctest.h"
#include "quill/corpus.hpp"
#include "quill/error.hpp"
#include "quill/infer.hpp"
#include "quill/parser.hpp"
#include "quill/pretty.hpp"
#include "quill/sdcheck.hpp"

using namespace quill;

namespace {

EntailEnv env0() { return EntailEnv{nullptr, {}}; }

QualScheme qs(const std::string& src) { return QualScheme{{}, parse_scheme(src)}; }

bool leq(const std::string& a, const std::string& b) {
  return instance_of(qs(a), qs(b), env0());
}

}  // namespace

TEST_CASE("instance examples") {
  CHECK(leq("forall t. t -o t", "forall t f. t -f> t"));
  CHECK(leq("forall t. t ->* t", "forall t f. t -f> t"));
  CHECK_FALSE(leq("forall t. t ->* t", "forall t. t -o t"));
  CHECK_FALSE(leq("forall t f. t -f> t", "forall t. t -o t"));
  // Monomorphic instances of a quantified scheme.
  CHECK(leq("forall f. (Un f) => a -f> a", "forall t f. t -f> t"));
  // Context entailment matters, not just bodies: a scheme with more
  // requirements is an instance of one with fewer, not vice versa.
  CHECK(leq("forall t u g f. (Un u, Un t, t >= f) => t -g> u -f> t",
            "forall t u g f. (Un u, t >= f) => t -g> u -f> t"));
  CHECK_FALSE(leq("forall t u g f. (Un u, t >= f) => t -g> u -f> t",
                  "forall t u g f. (Un u, Un t, t >= f) => t -g> u -f> t"));
}

TEST_CASE("instance relation is reflexive and transitive") {
  const char* pool[] = {
      "forall t. t -o t",
      "forall t. t ->* t",
      "forall t f. t -f> t",
      "forall t u f. t -f> u",
      "forall t u. t -o u",
      "forall t u g f. (Un u, t >= f) => t -g> u -f> t",
      "forall t u g f. (Un t) => t -g> u -f> u",
      "forall a b. a + b ->* a + b",
      "forall a. a + a ->* a + a",
  };
  std::vector<QualScheme> schemes;
  for (const char* s : pool) schemes.push_back(qs(s));

  for (const QualScheme& s : schemes) CHECK(instance_of(s, s, env0()));

  for (const QualScheme& a : schemes)
    for (const QualScheme& b : schemes)
      for (const QualScheme& c : schemes)
        if (instance_of(a, b, env0()) && instance_of(b, c, env0()))
          CHECK(instance_of(a, c, env0()));
}

TEST_CASE("checker accepts every corpus elaboration") {
  int checked = 0;
  for (const CorpusEntry& e : corpus()) {
    if (e.expect == CorpusEntry::Expect::Error) continue;
    Program p = parse_program(e.source);
    ProgramTypes t = infer_program(p);
    CHECK_NOTHROW(check_program(p, t));
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("checker accepts 500 generated elaborations in under a minute") {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::string> sources = generated_sources(20260823, 500);
  REQUIRE(sources.size() == 500);
  for (const std::string& src : sources) {
    Program p = parse_program(src);
    ProgramTypes t = infer_program(p);
    check_program(p, t);
  }
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  CHECK(secs < 60);
}

TEST_CASE("missing context assumptions are caught") {
  // k discards y; without the residual `Un u` assumption the weakening
  // premise has no justification.
  Program p = parse_program("def k = \\x -> \\y -> x;");
  ProgramTypes t = infer_program(p);
  const QualType& residual = t.defs.at("k").residual;
  REQUIRE_FALSE(residual.context.empty());
  CHECK_NOTHROW(check_term(p, TypeEnv{}, residual.context, p.defs[0].term));
  CHECK_THROWS_AS(check_term(p, TypeEnv{}, {}, p.defs[0].term), Error);
}

TEST_CASE("tampered annotations are rejected") {
  Program p = parse_program("def app = \\f -> \\x -> f x;");
  ProgramTypes t = infer_program(p);
  const QualType& residual = t.defs.at("app").residual;

  // Rewrite the inner lambda's arrow to ->*: its captured `f` is only
  // known to satisfy `f >= g` for the original arrow g, and the node
  // types no longer line up with the outer annotation.
  Term inner = p.defs[0].term->a;
  REQUIRE(inner->tag == TermTag::Lam);
  auto [head, args] = inner->ann.spine();
  REQUIRE(args.size() == 2);
  inner->ann = Type::un(args[0], args[1]);
  CHECK_THROWS_AS(check_term(p, TypeEnv{}, residual.context, p.defs[0].term), Error);
}

TEST_CASE("check_program validates declared schemes") {
  Program p = parse_program("def id : forall t. t -o t = \\x -> x;");
  ProgramTypes t = infer_program(p);
  CHECK_NOTHROW(check_program(p, t));

  // Forging a non-instance recorded scheme must be rejected.
  t.defs.at("id").scheme = parse_scheme("forall t u f. t -f> u");
  CHECK_THROWS_AS(check_program(p, t), Error);
}
