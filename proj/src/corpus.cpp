#include "quill/corpus.hpp"

#include <random>
#include <sstream>

#include "quill/pretty.hpp"
#include "quill/sdcheck.hpp"

namespace quill {

namespace {

const std::string kMP =
    "con MP : forall t u. ((forall v f. (t >= f, u >= f) => (t -> u -> v) -f> v) ->* MP t u);\n";
const std::string kAP =
    "con AP : forall t u. ((forall v f. (t >= f, u >= f) => (((t -f> v) + (u -f> v)) -f> v)) "
    "->* AP t u);\n";
const std::string kTok = "con MkTok : ((exists u. u) ->* Tok);\n";
const std::string kPack = "con Pack : forall t. ((t -o t) ->* Pack t);\n";

std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> out;
  auto golden = [&](std::string name, std::string source, std::string subject,
                    std::string scheme) {
    out.push_back({std::move(name), std::move(source), CorpusEntry::Expect::Scheme,
                   std::move(subject), std::move(scheme), ErrorKind::Internal, ""});
  };
  auto runnable = [&](std::string name, std::string source, std::string value = "") {
    out.push_back({std::move(name), std::move(source), CorpusEntry::Expect::Run, "", "",
                   ErrorKind::Internal, std::move(value)});
  };
  auto negative = [&](std::string name, std::string source, ErrorKind kind) {
    out.push_back({std::move(name), std::move(source), CorpusEntry::Expect::Error, "", "", kind,
                   ""});
  };

  // -- Golden types ---------------------------------------------------------
  golden("k-combinator", "def k = \\x -> \\y -> x;\n", "k",
         "forall t u g f. (Un u, t >= f) => t -g> u -f> t");
  golden("curried-application", "def app = \\f -> \\x -> f x;\n", "app",
         "forall t u f g h. (f >= g) => (t -f> u) -h> t -g> u");
  golden("identity", "def id = \\x -> x;\n", "id", "forall t f. t -f> t");
  golden("flip-const", "def flipconst = \\x -> \\y -> y;\n", "flipconst",
         "forall t u g f. (Un t) => t -g> u -f> u");
  golden("pair-constructor", kMP + "def pair = \\x -> \\y -> MP (\\f -> f x y);\n", "pair",
         "forall t u g f. (t >= f) => t -g> u -f> MP t u");
  golden("uncurried-application",
         kMP + "def unapp = \\p -> let MP f = p in f (\\g -> \\x -> g x);\n", "unapp",
         "forall t u f g. MP (t -f> u) t -g> u");

  // -- Product encodings ----------------------------------------------------
  golden("additive-fst",
         kAP + "def afst = \\p -> let AP f = p in f (inl (\\x -> x));\n", "afst",
         "forall t u f. AP t u -f> t");
  golden("additive-snd",
         kAP + "def asnd = \\p -> let AP f = p in f (inr (\\x -> x));\n", "asnd",
         "forall t u f. AP t u -f> u");
  golden("additive-pair",
         kAP +
             "def apair = \\x -> \\y -> AP (\\l -> case l of { inl f -> f x; inr g -> g y });\n",
         "apair", "forall t u g f. (Un t, Un u, t >= f) => t -g> u -f> AP t u");

  runnable("mp-swap-run",
           kMP +
               "def pair = \\x -> \\y -> MP (\\f -> f x y);\n"
               "def swap = \\p -> let MP f = p in f (\\x -> \\y -> MP (\\g -> g y x));\n"
               "def main = swap (pair (inl (\\z -> z)) (inr (\\w -> w)));\n",
           "MP <fun>");
  runnable("mp-fst-run",
           kMP +
               "def pair = \\x -> \\y -> MP (\\f -> f x y);\n"
               "def main = let MP f = pair (inl (\\z -> z)) (inr (\\w -> w))\n"
               "           in f (\\x -> \\y -> x);\n",
           "inl <fun>");
  runnable("ap-fst-run",
           kAP +
               "def apair = \\x -> \\y -> AP (\\l -> case l of { inl f -> f x; inr g -> g y });\n"
               "def afst = \\p -> let AP f = p in f (inl (\\x -> x));\n"
               "def main = afst (apair (inl (\\a -> a)) (inr (\\b -> b)));\n",
           "inl <fun>");
  runnable("ap-snd-run",
           kAP +
               "def apair = \\x -> \\y -> AP (\\l -> case l of { inl f -> f x; inr g -> g y });\n"
               "def asnd = \\p -> let AP f = p in f (inr (\\x -> x));\n"
               "def main = asnd (apair (inl (\\a -> a)) (inr (\\b -> b)));\n",
           "inr <fun>");
  runnable("apply-id-run", "def main = (\\x -> x) (inl (\\y -> y));\n", "inl <fun>");
  runnable("tok-repack-run",
           kTok +
               "def repack = \\t -> let MkTok u = t in MkTok u;\n"
               "def main = repack (MkTok (\\x -> x));\n",
           "MkTok <fun>");

  // -- Conservativity: purely non-linear terms ------------------------------
  const char* conservativity[] = {
      "\\x -> x",
      "\\x -> \\y -> x",
      "\\x -> \\y -> y",
      "\\f -> \\g -> \\x -> f (g x)",
      "\\f -> \\x -> f x",
      "\\f -> \\x -> f (f x)",
      "\\x -> \\f -> f x",
      "\\f -> \\g -> \\x -> f x (g x)",
      "let id = \\x -> x in id id",
      "let k = \\x -> \\y -> x in k k",
      "\\x -> inl x",
      "\\x -> inr x",
      "\\x -> case x of { inl a -> a; inr b -> b }",
      "\\x -> case x of { inl a -> inr a; inr b -> inl b }",
      "\\f -> \\x -> case x of { inl a -> inl (f a); inr b -> inr b }",
      "let not = \\b -> case b of { inl t -> inr t; inr f -> inl f } in not",
      "\\b -> \\t -> \\e -> case b of { inl u -> t; inr u -> e }",
      "\\f -> \\x -> x",
      "\\n -> \\f -> \\x -> f (n f x)",
      "\\m -> \\n -> \\f -> \\x -> m f (n f x)",
      "\\x -> \\y -> \\f -> f x y",
      "\\p -> p (\\x -> \\y -> x)",
      "\\p -> p (\\x -> \\y -> y)",
      "let t = \\x -> \\y -> x in let f = \\x -> \\y -> y in t f t",
      "\\x -> let y = x in y",
      "let a = \\x -> x in let b = a in b",
      "\\f -> let g = \\x -> f x in g",
      "\\x -> \\y -> let p = \\f -> f x y in p",
      "\\z -> case z of { inl a -> inl (inl a); inr b -> inr (inr b) }",
      "let w = \\f -> \\x -> f x x in w",
      "\\x -> inl (inl x)",
      "let s = \\f -> \\g -> \\x -> f x (g x) in let k = \\x -> \\y -> x in s k k",
  };
  int n = 0;
  for (const char* t : conservativity) {
    ++n;
    std::ostringstream name;
    name << "conservativity-" << (n < 10 ? "0" : "") << n;
    runnable(name.str(), std::string("def main = ") + t + ";\n");
  }

  // -- Negative suite -------------------------------------------------------
  negative("neg-linear-discard", kTok + "def bad = \\x -> let t = MkTok x in x;\n",
           ErrorKind::UnEntail);
  negative("neg-linear-duplicate",
           kTok + kMP + "def bad = \\x -> let t = MkTok x in MP (\\f -> f t t);\n",
           ErrorKind::UnEntail);
  negative("neg-skolem-escape", kTok + "def bad = \\x -> let MkTok y = MkTok (inl x) in y;\n",
           ErrorKind::SkolemEscape);
  negative("neg-rigid-unify", kMP + "def bad = MP (\\f -> f);\n", ErrorKind::UnifyRigid);
  negative("neg-un-linear-arrow",
           kPack + kMP + "def bad = \\b -> let Pack f = b in MP (\\p -> p f f);\n",
           ErrorKind::UnEntail);
  negative("neg-discard-existential",
           kTok + "def bad = \\t -> let MkTok u = t in \\y -> y;\n", ErrorKind::Discharge);
  negative("neg-not-instance",
           "def bad : forall t u. t -> u -> t = \\x -> \\y -> x;\n", ErrorKind::NotInstance);

  return out;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = build_corpus();
  return entries;
}

std::vector<CorpusResult> run_corpus() {
  std::vector<CorpusResult> results;
  for (const CorpusEntry& e : corpus()) {
    CorpusResult r{e.name, false, ""};
    try {
      Program prog = parse_program(e.source);
      if (e.expect == CorpusEntry::Expect::Error) {
        try {
          infer_program(prog);
          r.detail = "expected a type error, but the program was accepted";
        } catch (const Error& err) {
          if (err.kind == e.expected_error) {
            r.pass = true;
          } else {
            r.detail = std::string("wrong error: ") + err.what();
          }
        }
        results.push_back(std::move(r));
        continue;
      }
      ProgramTypes types = infer_program(prog);
      check_program(prog, types);
      if (e.expect == CorpusEntry::Expect::Scheme) {
        const Scheme& got = types.defs.at(e.subject).scheme;
        Scheme want = parse_scheme(e.expected_scheme, prog.data_kinds);
        if (scheme_equal(got, want)) {
          r.pass = true;
        } else {
          r.detail = "inferred " + print_scheme(got) + ", expected " + print_scheme(want);
        }
      } else {
        RunOutcome run = run_program(prog);
        std::string printed = print_value(run.value);
        if (!run.report.ok()) {
          r.detail = "audit reported a linearity violation";
        } else if (!e.expected_value.empty() && printed != e.expected_value) {
          r.detail = "evaluated to " + printed + ", expected " + e.expected_value;
        } else {
          r.pass = true;
        }
      }
    } catch (const Error& err) {
      r.detail = err.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

void collect_annotation_vars(const Term& t, TypeVarSet& out) {
  if (!t) return;
  auto add = [&](const Type& ty) {
    if (ty.defined())
      for (const TypeVar& v : free_vars(ty)) out.insert(v);
  };
  add(t->ann);
  add(t->binder_ann);
  add(t->binder_ann_r);
  for (const Type& ty : t->inst) add(ty);
  if (t->let_scheme)
    for (const TypeVar& v : free_vars(*t->let_scheme)) out.insert(v);
  collect_annotation_vars(t->a, out);
  collect_annotation_vars(t->b, out);
  collect_annotation_vars(t->c, out);
}

}  // namespace

RunOutcome run_program(const Program& prog, long step_budget, bool record_lines) {
  bool has_main = false;
  for (const Def& d : prog.defs) has_main = has_main || d.name == "main";
  if (!has_main) throw Error(ErrorKind::Scope, "no definition of 'main'");

  Term body = mk_var("main");
  for (auto it = prog.defs.rbegin(); it != prog.defs.rend(); ++it)
    body = mk_let(it->name, clone_term(it->term), body);

  Program whole;
  whole.data_kinds = prog.data_kinds;
  whole.constructors = prog.constructors;
  whole.datatypes = prog.datatypes;
  whole.defs.push_back(Def{"main", std::nullopt, body});
  ProgramTypes types = infer_program(whole, /*prefer_un_arrows=*/true);
  const DefTyping& typing = types.defs.at("main");

  // The choice between -o and ->* for a still-undetermined arrow is
  // unobservable to typing; picking ->* keeps the audit from flagging
  // values whose arrows were merely never pinned down.
  TypeVarSet vars;
  collect_annotation_vars(body, vars);
  for (const TypeVar& v : free_vars(typing.residual)) vars.insert(v);
  Subst defaulting;
  for (const TypeVar& v : vars)
    if (!v.rigid() && v.kind == Kind::binary()) defaulting.bind(v, Type::un_arrow());
  apply_to_annotations(defaulting, body);
  PredSet preds = defaulting.apply(typing.residual.context);

  EvalResult ev = eval_term(body, step_budget, record_lines);
  AuditReport report = audit(ev.value, ev.trace, preds, EntailEnv{&prog.datatypes, {}});
  return RunOutcome{body, ev.value, std::move(ev.trace), std::move(report), std::move(preds)};
}

// ---------------------------------------------------------------------------
// Generated terms

namespace {

class TermGen {
 public:
  explicit TermGen(unsigned seed) : rng_(seed) {}

  std::string closed() {
    counter_ = 0;
    std::vector<std::string> scope;
    return term(scope, 4);
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::string fresh() { return "v" + std::to_string(counter_++); }

  std::string term(std::vector<std::string>& scope, int depth) {
    if (depth <= 0) return leaf(scope);
    switch (pick(8)) {
      case 0:
        return leaf(scope);
      case 1:
      case 2: {  // abstraction
        std::string x = fresh();
        scope.push_back(x);
        std::string body = term(scope, depth - 1);
        scope.pop_back();
        return "(\\" + x + " -> " + body + ")";
      }
      case 3: {  // redex: biased toward typable applications
        std::string x = fresh();
        scope.push_back(x);
        std::string body = term(scope, depth - 1);
        scope.pop_back();
        return "((\\" + x + " -> " + body + ") " + term(scope, depth - 1) + ")";
      }
      case 4: {
        std::string x = fresh();
        std::string bound = term(scope, depth - 1);
        scope.push_back(x);
        std::string body = term(scope, depth - 1);
        scope.pop_back();
        return "(let " + x + " = " + bound + " in " + body + ")";
      }
      case 5:
        return "(inl " + term(scope, depth - 1) + ")";
      case 6:
        return "(inr " + term(scope, depth - 1) + ")";
      default: {
        std::string scrut = (pick(2) ? "(inl " : "(inr ") + term(scope, depth - 1) + ")";
        std::string a = fresh(), b = fresh();
        scope.push_back(a);
        std::string left = term(scope, depth - 1);
        scope.pop_back();
        scope.push_back(b);
        std::string right = term(scope, depth - 1);
        scope.pop_back();
        return "(case " + scrut + " of { inl " + a + " -> " + left + "; inr " + b + " -> " +
               right + " })";
      }
    }
  }

  std::string leaf(std::vector<std::string>& scope) {
    if (!scope.empty() && pick(3) != 0) return scope[pick(int(scope.size()))];
    std::string x = fresh();
    return "(\\" + x + " -> " + x + ")";
  }

  std::mt19937 rng_;
  int counter_ = 0;
};

}  // namespace

std::vector<std::string> generated_sources(unsigned seed, int count) {
  TermGen gen(seed);
  std::vector<std::string> out;
  int attempts = 0, limit = count * 200;
  while (int(out.size()) < count && attempts++ < limit) {
    std::string src = "def main = " + gen.closed() + ";\n";
    try {
      Program prog = parse_program(src);
      infer_program(prog);
    } catch (const Error&) {
      continue;
    }
    out.push_back(std::move(src));
  }
  return out;
}

}  // namespace quill
