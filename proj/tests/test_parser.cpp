#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "quill/corpus.hpp"
#include "quill/error.hpp"
#include "quill/parser.hpp"
#include "quill/pretty.hpp"

using namespace quill;

TEST_CASE("lambda definition parses to nested lams") {
  Program p = parse_program("def k = \\x -> \\y -> x;");
  REQUIRE(p.defs.size() == 1);
  const Term& t = p.defs[0].term;
  REQUIRE(t->tag == TermTag::Lam);
  REQUIRE(t->a->tag == TermTag::Lam);
  REQUIRE(t->a->a->tag == TermTag::Var);
  // The inner variable refers to the outer binder (modulo renaming).
  CHECK(t->a->a->name == t->name);
  CHECK(display_name(t->name) == "x");
}

TEST_CASE("existential constructor declaration") {
  Program p = parse_program("con MkTok : ((exists u. u) ->* Tok);");
  REQUIRE(p.constructors.count("MkTok"));
  const ConstructorSig& sig = p.constructors.at("MkTok");
  CHECK(sig.outer.empty());
  CHECK(sig.univ.empty());
  REQUIRE(sig.exist.size() == 1);
  CHECK(sig.payload == Type::var(sig.exist[0]));
  CHECK(sig.result.is_con_named("Tok"));
  CHECK(p.data_kinds.at("Tok") == Kind::star());
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_WITH_AS(parse_program("def w = \\x ->"), doctest::Contains("expected"),
                       Error);
  try {
    parse_program("def w = \\x ->");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::Parse);
  }
}

TEST_CASE("scope errors") {
  try {
    parse_program("def w = y;");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::Scope);
  }
  try {
    parse_program("def a = \\x -> x;\ndef a = \\x -> x;");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::Scope);
  }
  try {
    parse_program("def w = Nope (\\x -> x);");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::Scope);
  }
}

TEST_CASE("bare arrow sugar introduces one fresh Fun variable") {
  Scheme s = parse_scheme("t -> u");
  // t and u stay free; only the fresh arrow variable is quantified.
  REQUIRE(s.quantified.size() == 1);
  REQUIRE(s.qual.context.size() == 1);
  const Predicate& p = *s.qual.context.begin();
  CHECK(p.kind == PredKind::Fun);
  REQUIRE(p.lhs.is_var());
  auto [head, args] = s.qual.body.spine();
  CHECK(head == p.lhs);
  REQUIRE(args.size() == 2);
  CHECK(args[0].is_var());
  CHECK(args[1].is_var());
}

TEST_CASE("annotated arrow sugar uses the named variable") {
  Scheme s = parse_scheme("forall t u f. t -f> u");
  REQUIRE(s.qual.context.size() == 1);
  CHECK(s.qual.context.begin()->kind == PredKind::Fun);
  auto [head, args] = s.qual.body.spine();
  REQUIRE(head.is_var());
  CHECK(head.as_var().kind == Kind::binary());
  CHECK(s.qual.context.begin()->lhs == head);
}

TEST_CASE("builtin arrows carry no predicate") {
  Scheme s = parse_scheme("forall t u. t ->* u");
  CHECK(s.qual.context.empty());
  auto [head, args] = s.qual.body.spine();
  CHECK(head.is_con_named(kUnArrowName));

  Scheme l = parse_scheme("forall t u. t -o u");
  CHECK(l.qual.context.empty());
  CHECK(l.qual.body.spine().first.is_con_named(kLinArrowName));
}

TEST_CASE("sum binds looser than arrows and is right associative") {
  Scheme s = parse_scheme("forall a b c. a -o b + c");
  auto [head, args] = s.qual.body.spine();
  CHECK(head.is_con_named(kSumName));
  CHECK(args[0].spine().first.is_con_named(kLinArrowName));

  Scheme r = parse_scheme("forall a b c. a + b + c");
  auto [h2, a2] = r.qual.body.spine();
  CHECK(h2.is_con_named(kSumName));
  CHECK(a2[1].spine().first.is_con_named(kSumName));
}

TEST_CASE("comments and declared def schemes") {
  Program p = parse_program(
      "-- the identity, restricted\n"
      "def id : forall t. t -o t = \\x -> x;\n");
  REQUIRE(p.defs[0].declared.has_value());
  CHECK(scheme_equal(*p.defs[0].declared, parse_scheme("forall t. t -o t")));
}

TEST_CASE("scheme print/parse round trip") {
  const char* sources[] = {
      "forall t u g f. (Un u, t >= f) => t -g> u -f> t",
      "forall t u f g h. (f >= g) => (t -f> u) -h> t -g> u",
      "forall t f. t -f> t",
      "forall t u g f. (Un t) => t -g> u -f> u",
      "forall a b. a + b ->* a -o b",
  };
  for (const char* src : sources) {
    Scheme s = canonicalize(parse_scheme(src));
    Scheme back = canonicalize(parse_scheme(print_scheme(s)));
    CHECK(scheme_equal(s, back));
    CHECK(print_scheme(back) == print_scheme(s));
  }
}

TEST_CASE("term print/parse round trip over the corpus") {
  int checked = 0;
  for (const CorpusEntry& e : corpus()) {
    Program p;
    try {
      p = parse_program(e.source);
    } catch (const Error&) {
      continue;  // negative parse entries
    }
    if (!p.constructors.empty()) continue;  // parse_term has no signature table
    for (const Def& d : p.defs) {
      std::string printed = print_term(d.term);
      Term back = parse_term(printed);
      CHECK(print_term(back) == printed);
      ++checked;
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("program source round trip") {
  const char* src =
      "con MP : forall t u. ((forall v f. (t >= f, u >= f) => (t -> u -> v) -f> v) ->* MP t u);\n"
      "def pair = \\x -> \\y -> MP (\\f -> f x y);\n";
  Program p1 = parse_program(src);
  std::string again = "con MP : forall t u. ((forall v f. (t >= f, u >= f) => (t -> u -> v) -f> v) ->* MP t u);\n";
  again += "def pair = " + print_term(p1.defs[0].term) + ";\n";
  Program p2 = parse_program(again);
  CHECK(print_term(p2.defs[0].term) == print_term(p1.defs[0].term));
}
