#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "quill/entail.hpp"
#include "quill/error.hpp"
#include "quill/parser.hpp"

using namespace quill;

namespace {

TypeVar sv(const std::string& n) { return TypeVar{n, Kind::star(), Flavor::Flexible}; }
TypeVar bv(const std::string& n) { return TypeVar{n, Kind::binary(), Flavor::Flexible}; }
Type tv(const std::string& n) { return Type::var(sv(n)); }

EntailEnv env0() { return EntailEnv{nullptr, {}}; }
EntailEnv with(PredSet p) { return EntailEnv{nullptr, std::move(p)}; }

// Random types over star variables t1..t3 and arrow variables f1..f2;
// no datatype constructors, so every query is closed under the rules.
Type random_star(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 4);
  switch (pick(rng)) {
    case 0:
      return tv("t" + std::to_string(1 + rng() % 3));
    case 1:
      return Type::lin(random_star(rng, depth - 1), random_star(rng, depth - 1));
    case 2:
      return Type::un(random_star(rng, depth - 1), random_star(rng, depth - 1));
    case 3:
      return Type::sum(random_star(rng, depth - 1), random_star(rng, depth - 1));
    default:
      return Type::app_spine(Type::var(bv("f" + std::to_string(1 + rng() % 2))),
                             {random_star(rng, depth - 1), random_star(rng, depth - 1)});
  }
}

Type random_arrow(std::mt19937& rng) {
  switch (rng() % 3) {
    case 0:
      return Type::var(bv("f" + std::to_string(1 + rng() % 2)));
    case 1:
      return Type::lin_arrow();
    default:
      return Type::un_arrow();
  }
}

Predicate random_pred(std::mt19937& rng) {
  switch (rng() % 4) {
    case 0:
      return Predicate::un(random_star(rng, 2));
    case 1:
      return Predicate::un(random_arrow(rng));
    case 2:
      return Predicate::fun(random_arrow(rng));
    default:
      return Predicate::geq(random_star(rng, 2), random_arrow(rng));
  }
}

PredSet random_preds(std::mt19937& rng, int n) {
  PredSet out;
  for (int i = 0; i < n; ++i) out.insert(random_pred(rng));
  return out;
}

}  // namespace

TEST_CASE("entailment axioms and rules") {
  CHECK(entails(env0(), Predicate::un(Type::un(tv("a"), tv("b")))));
  CHECK(entails(env0(), Predicate::geq(tv("a"), Type::lin(tv("b"), tv("c")))));
  CHECK(entails(with({Predicate::un(tv("t"))}),
                Predicate::geq(tv("t"), Type::un(tv("b"), tv("c")))));
  CHECK_FALSE(entails(env0(), Predicate::un(Type::lin(tv("a"), tv("b")))));
  CHECK(entails(with({Predicate::un(tv("t1")), Predicate::un(tv("t2"))}),
                Predicate::un(Type::sum(tv("t1"), tv("t2")))));

  Program tok = parse_program("con MkTok : ((exists u. u) ->* Tok);");
  EntailEnv e{&tok.datatypes, {}};
  CHECK_FALSE(entails(e, Predicate::un(Type::con("Tok", Kind::star()))));
}

TEST_CASE("Fun holds exactly for the arrows") {
  CHECK(entails(env0(), Predicate::fun(Type::lin_arrow())));
  CHECK(entails(env0(), Predicate::fun(Type::un_arrow())));
  CHECK_FALSE(entails(env0(), Predicate::fun(Type::var(bv("f")))));
  CHECK(entails(with({Predicate::fun(Type::var(bv("f")))}),
                Predicate::fun(Type::var(bv("f")))));
}

TEST_CASE("set goals are conjunctions") {
  PredSet goals{Predicate::un(Type::un(tv("a"), tv("b"))),
                Predicate::geq(tv("c"), Type::lin(tv("a"), tv("b")))};
  CHECK(entails(env0(), goals));
  goals.insert(Predicate::un(tv("x")));
  CHECK_FALSE(entails(env0(), goals));
}

TEST_CASE("un_scheme") {
  Scheme id = parse_scheme("forall t f. t -f> t");
  auto r = un_scheme(env0(), id);
  REQUIRE(r.has_value());
  CHECK(r->empty());

  auto lin = un_scheme(env0(), Scheme::mono(Type::lin(tv("a"), tv("b"))));
  CHECK_FALSE(lin.has_value());

  auto var = un_scheme(env0(), Scheme::mono(tv("t")));
  REQUIRE(var.has_value());
  CHECK(*var == PredSet{Predicate::un(tv("t"))});
}

TEST_CASE("simplify to simple form") {
  CHECK(simplify(env0(), {Predicate::un(Type::sum(tv("t1"), tv("t2")))}) ==
        PredSet{Predicate::un(tv("t1")), Predicate::un(tv("t2"))});

  CHECK(simplify(env0(), {Predicate::un(Type::un(tv("a"), tv("b")))}).empty());

  Type fab = Type::app_spine(Type::var(bv("f")), {tv("t"), tv("u")});
  CHECK(simplify(env0(), {Predicate::geq(fab, Type::var(bv("g")))}) ==
        PredSet{Predicate::geq(Type::var(bv("f")), Type::var(bv("g")))});

  CHECK_THROWS_AS(simplify(env0(), {Predicate::un(Type::lin(tv("a"), tv("b")))}), Error);
  try {
    simplify(env0(), {Predicate::un(Type::lin(tv("a"), tv("b")))});
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::Unsatisfiable);
  }
}

TEST_CASE("improving substitution") {
  Type f = Type::var(bv("f"));
  Subst s1 = improving_subst(env0(), {Predicate::fun(f), Predicate::un(f)}, {bv("f")});
  CHECK(s1.apply(f) == Type::un_arrow());

  Subst s2 = improving_subst(env0(), {Predicate::fun(f)}, {bv("f")});
  CHECK(s2.apply(f) == Type::lin_arrow());

  // Star-kinded ambiguous variables are left alone.
  Subst s3 = improving_subst(env0(), {Predicate::un(tv("t"))}, {sv("t")});
  CHECK(s3.empty());
}

TEST_CASE("recursive datatype entailment terminates") {
  Program list = parse_program("con MkList : forall t. ((t + List t) ->* List t);");
  Type list_t = Type::app(Type::con("List", Kind::arrow(Kind::star(), Kind::star())), tv("t"));
  EntailEnv assume{&list.datatypes, {Predicate::un(tv("t"))}};
  CHECK(entails(assume, Predicate::un(list_t)));

  EntailEnv plain{&list.datatypes, {}};
  Type lin_list = Type::app(Type::con("List", Kind::arrow(Kind::star(), Kind::star())),
                            Type::lin(tv("a"), tv("b")));
  CHECK_FALSE(entails(plain, Predicate::un(lin_list)));
}

TEST_CASE("monotonicity under extra assumptions") {
  std::mt19937 rng(41);
  int held = 0;
  for (int i = 0; i < 1000; ++i) {
    PredSet p = random_preds(rng, 3);
    Predicate goal = random_pred(rng);
    if (!entails(with(p), goal)) continue;
    ++held;
    PredSet bigger = pred_union(p, random_preds(rng, 3));
    CHECK(entails(with(bigger), goal));
  }
  CHECK(held > 100);
}

TEST_CASE("simplify is sound: output entails input") {
  std::mt19937 rng(43);
  int satisfiable = 0;
  for (int i = 0; i < 1000; ++i) {
    PredSet p = random_preds(rng, 4);
    PredSet simple;
    try {
      simple = simplify(env0(), p);
    } catch (const Error&) {
      continue;
    }
    ++satisfiable;
    for (const Predicate& q : simple) {
      CHECK((q.kind != PredKind::Geq ? q.lhs.is_var() : q.rhs.is_var()));
    }
    CHECK(entails(with(simple), p));
  }
  CHECK(satisfiable > 200);
}

namespace {

// Ground satisfiability by exhaustion: star variables go to the
// unrestricted datatype U (the most permissive choice in every position
// they can occur), arrow variables range over both constructors.
bool ground_sat(const EntailEnv& env, const PredSet& p) {
  Subst stars;
  std::vector<TypeVar> arrows;
  for (const TypeVar& v : free_vars(p)) {
    if (v.kind == Kind::star())
      stars.bind(v, Type::con("U", Kind::star()));
    else
      arrows.push_back(v);
  }
  PredSet g = stars.apply(p);
  for (unsigned mask = 0; mask < (1u << arrows.size()); ++mask) {
    Subst s;
    for (size_t i = 0; i < arrows.size(); ++i)
      s.bind(arrows[i], (mask >> i) & 1 ? Type::un_arrow() : Type::lin_arrow());
    if (entails(EntailEnv{env.datatypes, {}}, s.apply(g))) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("improvement preserves satisfiability") {
  Program u = parse_program("con MkU : ((forall v. v ->* v) ->* U);");
  EntailEnv env{&u.datatypes, {}};
  std::mt19937 rng(47);
  int improved = 0;
  for (int i = 0; i < 1000; ++i) {
    PredSet simple;
    try {
      simple = simplify(env, random_preds(rng, 4));
    } catch (const Error&) {
      continue;
    }
    if (!ground_sat(env, simple)) continue;
    // Treat every arrow variable as ambiguous; the substitution must not
    // make the set unsatisfiable.
    TypeVarSet ambiguous;
    for (const TypeVar& v : free_vars(simple))
      if (v.kind == Kind::binary()) ambiguous.insert(v);
    if (ambiguous.empty()) continue;
    Subst s = improving_subst(env, simple, ambiguous);
    if (s.empty()) continue;
    ++improved;
    PredSet after;
    CHECK_NOTHROW(after = simplify(env, s.apply(simple)));
    CHECK(ground_sat(env, after));
  }
  CHECK(improved > 100);
}
