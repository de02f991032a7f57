#ifndef QUILL_PRETTY_HPP
#define QUILL_PRETTY_HPP

#include <string>

#include "quill/syntax.hpp"
#include "quill/term.hpp"

namespace quill {

// Types print with arrow sugar: `f a b` prints as `a -f> b` whenever a
// `Fun f` assumption is in scope, `-o`/`->*`/`+` print infix.
std::string print_type(const Type& t, const PredSet& funs = {});
std::string print_predicate(const Predicate& p, const PredSet& funs = {});

// `forall t f. (P) => tau`; `Fun f` is elided when every occurrence of f
// in the body is in (printed) arrow-annotation position, so the printed
// form re-parses to the same scheme.
std::string print_scheme(const Scheme& s);

// Surface syntax; used by the program printer and diagnostics.
std::string print_term(const Term& t);

// Strips the renamer's "%n" suffix for display.
std::string display_name(const std::string& name);

}  // namespace quill

#endif
