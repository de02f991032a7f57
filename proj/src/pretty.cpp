#include "quill/pretty.hpp"

#include <set>

namespace quill {

namespace {

// Precedence levels: 0 sum, 1 arrow, 2 application, 3 atom.  Sum binds
// looser than the arrows; both are right-associative.
std::string show_type(const Type& t, const std::set<std::string>& funs, int level);

bool is_fun_var(const Type& head, const std::set<std::string>& funs) {
  return head.is_var() && funs.count(head.as_var().name) != 0;
}

std::string paren_if(bool cond, std::string s) { return cond ? "(" + std::move(s) + ")" : std::move(s); }

std::string show_type(const Type& t, const std::set<std::string>& funs, int level) {
  if (t.is_var()) return display_name(t.as_var().name);
  if (t.is_con()) {
    const std::string& n = t.as_con().name;
    // Bare operator constructors only occur partially applied.
    if (n == kLinArrowName || n == kUnArrowName || n == kSumName) return "(" + n + ")";
    return n;
  }
  auto [head, args] = t.spine();
  if (args.size() == 2) {
    if (head.is_con_named(kSumName))
      return paren_if(level > 0, show_type(args[0], funs, 1) + " + " + show_type(args[1], funs, 0));
    if (head.is_con_named(kLinArrowName))
      return paren_if(level > 1, show_type(args[0], funs, 2) + " -o " + show_type(args[1], funs, 1));
    if (head.is_con_named(kUnArrowName))
      return paren_if(level > 1, show_type(args[0], funs, 2) + " ->* " + show_type(args[1], funs, 1));
    if (is_fun_var(head, funs))
      return paren_if(level > 1, show_type(args[0], funs, 2) + " -" +
                                     display_name(head.as_var().name) + "> " +
                                     show_type(args[1], funs, 1));
  }
  std::string out = show_type(head, funs, 2);
  for (const Type& a : args) out += " " + show_type(a, funs, 3);
  return paren_if(level > 2, out);
}

std::set<std::string> fun_var_names(const PredSet& ps) {
  std::set<std::string> out;
  for (const Predicate& p : ps)
    if (p.kind == PredKind::Fun && p.lhs.is_var()) out.insert(p.lhs.as_var().name);
  return out;
}

// Occurrences of each variable in arrow-annotation position (head of a
// fully applied binary application) vs. anywhere else.
void scan_occurrences(const Type& t, const std::set<std::string>& funs,
                      std::set<std::string>& sugared, std::set<std::string>& other) {
  if (t.is_var()) {
    other.insert(t.as_var().name);
    return;
  }
  if (!t.is_app()) return;
  auto [head, args] = t.spine();
  if (args.size() == 2 && is_fun_var(head, funs))
    sugared.insert(head.as_var().name);
  else if (head.is_var())
    other.insert(head.as_var().name);
  for (const Type& a : args) scan_occurrences(a, funs, sugared, other);
}

}  // namespace

std::string display_name(const std::string& name) {
  auto pos = name.find('%');
  return pos == std::string::npos ? name : name.substr(0, pos);
}

std::string print_type(const Type& t, const PredSet& funs) {
  return show_type(t, fun_var_names(funs), 0);
}

std::string print_predicate(const Predicate& p, const PredSet& funs) {
  std::set<std::string> fv = fun_var_names(funs);
  switch (p.kind) {
    case PredKind::Un:
      return "Un " + show_type(p.lhs, fv, 3);
    case PredKind::Fun:
      return "Fun " + show_type(p.lhs, fv, 3);
    case PredKind::Geq:
      return show_type(p.lhs, fv, 2) + " >= " + show_type(p.rhs, fv, 2);
  }
  return "?";
}

std::string print_scheme(const Scheme& s) {
  std::set<std::string> funs = fun_var_names(s.qual.context);

  // `Fun f` can be left implicit when every occurrence of f in the body
  // prints as `-f>` sugar, which re-introduces the predicate on parsing.
  std::set<std::string> sugared, other;
  scan_occurrences(s.qual.body, funs, sugared, other);
  std::vector<Predicate> printed;
  for (const Predicate& p : s.qual.context) {
    if (p.kind == PredKind::Fun && p.lhs.is_var()) {
      const std::string& n = p.lhs.as_var().name;
      if (sugared.count(n) && !other.count(n)) continue;
    }
    printed.push_back(p);
  }

  std::string out;
  if (!s.quantified.empty()) {
    out += "forall";
    for (const TypeVar& v : s.quantified) out += " " + display_name(v.name);
    out += ". ";
  }
  if (!printed.empty()) {
    std::string ctx;
    for (size_t i = 0; i < printed.size(); ++i) {
      if (i) ctx += ", ";
      ctx += print_predicate(printed[i], s.qual.context);
    }
    out += (printed.size() > 1 ? "(" + ctx + ")" : ctx) + " => ";
  }
  out += show_type(s.qual.body, funs, 0);
  return out;
}

namespace {

// Precedence: 0 full terms (lambda, let, case), 1 application, 2 atoms.
std::string show_term(const Term& t, int level) {
  if (!t) return "?";
  switch (t->tag) {
    case TermTag::Var:
      return display_name(t->name);
    case TermTag::Lam:
      return paren_if(level > 0,
                      "\\" + display_name(t->name) + " -> " + show_term(t->a, 0));
    case TermTag::App:
      return paren_if(level > 1, show_term(t->a, 1) + " " + show_term(t->b, 2));
    case TermTag::Inl:
      return paren_if(level > 1, "inl " + show_term(t->a, 2));
    case TermTag::Inr:
      return paren_if(level > 1, "inr " + show_term(t->a, 2));
    case TermTag::Make:
      return paren_if(level > 1, t->name + " " + show_term(t->a, 2));
    case TermTag::Case:
      return paren_if(level > 0, "case " + show_term(t->a, 0) + " of { inl " +
                                     display_name(t->binder) + " -> " + show_term(t->b, 0) +
                                     " ; inr " + display_name(t->binder_r) + " -> " +
                                     show_term(t->c, 0) + " }");
    case TermTag::Let:
      return paren_if(level > 0, "let " + display_name(t->name) + " = " + show_term(t->a, 0) +
                                     " in " + show_term(t->b, 0));
    case TermTag::Break:
      return paren_if(level > 0, "let " + t->name + " " + display_name(t->binder) + " = " +
                                     show_term(t->a, 0) + " in " + show_term(t->b, 0));
  }
  return "?";
}

}  // namespace

std::string print_term(const Term& t) { return show_term(t, 0); }

}  // namespace quill
