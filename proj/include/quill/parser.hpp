#ifndef QUILL_PARSER_HPP
#define QUILL_PARSER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quill/syntax.hpp"
#include "quill/term.hpp"

namespace quill {

struct Def {
  std::string name;
  std::optional<Scheme> declared;
  Term term;
};

struct Program {
  // Datatype name -> declared or inferred kind.
  std::map<std::string, Kind> data_kinds;
  // Constructor name K -> signature; datatype name T -> same signature
  // (each datatype has at most one constructor).
  std::map<std::string, ConstructorSig> constructors;
  std::map<std::string, ConstructorSig> datatypes;
  std::vector<Def> defs;
};

// Parses a whole `.ql` source: `data T : kind;`, `con K : sig;`,
// `def x [: scheme] = term;` declarations.  All binders are renamed
// apart and all arrow sugar desugared.  Throws Error on failure.
Program parse_program(const std::string& source);

// Parses a scheme in isolation (used for golden expectations).  Free
// type variables are permitted; bare arrows introduce quantified fresh
// variables with Fun predicates.
Scheme parse_scheme(const std::string& source,
                    const std::map<std::string, Kind>& data_kinds = {});

// Parses a standalone closed term (binders renamed apart).
Term parse_term(const std::string& source);

}  // namespace quill

#endif
