#ifndef QUILL_INFER_HPP
#define QUILL_INFER_HPP

#include <map>
#include <set>
#include <string>

#include "quill/entail.hpp"
#include "quill/parser.hpp"
#include "quill/syntax.hpp"
#include "quill/term.hpp"

namespace quill {

class TypeEnv {
 public:
  TypeEnv() = default;

  void bind(const std::string& x, Scheme s) { map_[x] = std::move(s); }
  const Scheme* lookup(const std::string& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? nullptr : &it->second;
  }
  TypeEnv extended(const std::string& x, Scheme s) const {
    TypeEnv out = *this;
    out.bind(x, std::move(s));
    return out;
  }
  TypeEnv restricted(const std::set<std::string>& keep) const {
    TypeEnv out;
    for (const auto& [x, s] : map_)
      if (keep.count(x)) out.map_[x] = s;
    return out;
  }
  TypeEnv applied(const Subst& s) const {
    TypeEnv out;
    for (const auto& [x, sc] : map_) out.map_[x] = s.apply(sc);
    return out;
  }
  TypeVarSet free() const {
    TypeVarSet out;
    for (const auto& [x, s] : map_) {
      (void)x;
      for (const TypeVar& v : free_vars(s)) out.insert(v);
    }
    return out;
  }
  const std::map<std::string, Scheme>& bindings() const { return map_; }

 private:
  std::map<std::string, Scheme> map_;
};

struct InferOutcome {
  PredSet preds;
  Subst subst;
  std::set<std::string> used;
};

class InferSession {
 public:
  explicit InferSession(const Program& prog)
      : env_{&prog.datatypes, {}}, constructors_(&prog.constructors) {}

  // Algorithm M.  Fills in the term's annotation slots as it goes; the
  // caller applies the final substitution to them afterwards.
  InferOutcome infer(const Subst& s, const TypeVarSet& rigid, const TypeEnv& env, const Term& m,
                     const Type& expected);

  // Predicates making every binding of `env` at least as restricted as
  // the function type `arrow`.
  PredSet leq_constraints(const Type& arrow, const TypeEnv& env);
  // Predicates making every binding of `env` unrestricted.
  PredSet un_constraints(const TypeEnv& env);
  // Un-residual for a binder that went unused.
  PredSet weaken(const std::string& x, const Scheme& s, const std::set<std::string>& used);
  // Improvement + generalization.  Variables in `protect` (and rigid or
  // environment variables) are not quantified.  When `improve_out` is
  // given, it receives the improving substitution so the caller can keep
  // term annotations in step with the scheme.
  Scheme gen_i(const TypeEnv& env, const QualType& qual, const TypeVarSet& protect = {},
               Subst* improve_out = nullptr);

  const EntailEnv& entail_env() const { return env_; }
  FreshSupply& supply() { return supply_; }

  // When set, improvement resolves an otherwise-unconstrained ambiguous
  // arrow to ->* instead of -o whenever that stays satisfiable.  The two
  // choices type the same programs, but ->* annotations keep the
  // evaluator's audit from mistaking such closures for linear values.
  void set_prefer_un_arrows(bool on) { prefer_un_arrows_ = on; }

 private:
  InferOutcome infer_node(const Subst& s, const TypeVarSet& rigid, const TypeEnv& env,
                          const Term& m, const Type& expected);

  EntailEnv env_;
  const std::map<std::string, ConstructorSig>* constructors_;
  FreshSupply supply_;
  bool prefer_un_arrows_ = false;
};

struct DefTyping {
  Scheme scheme;      // recorded (declared if present, else inferred principal)
  Scheme principal;   // inferred principal scheme
  QualType residual;  // open predicates and type the derivation is checked under
};

struct ProgramTypes {
  std::map<std::string, DefTyping> defs;
};

// Infers every definition in order, elaborating the terms in place.
// Declared schemes must be instances of the inferred principal schemes.
// `prefer_un_arrows` selects the audit-friendly improvement choice.
ProgramTypes infer_program(Program& prog, bool prefer_un_arrows = false);

}  // namespace quill

#endif
