#include "quill/eval.hpp"

#include "quill/error.hpp"
#include "quill/pretty.hpp"

namespace quill {

namespace {

void add(std::map<long, long>& bag, long idx, long n = 1) { bag[idx] += n; }

class Evaluator {
 public:
  Evaluator(long budget, bool record) : budget_(budget), record_(record) {}

  Term eval(const Term& m) {
    if (m->index >= 0) return m;  // values evaluate to themselves
    if (++steps_ > budget_)
      throw Error(ErrorKind::StepBudget, "evaluation exceeded the step budget");
    switch (m->tag) {
      case TermTag::Lam: {
        introduce(m, "LAM");
        return m;
      }
      case TermTag::App: {
        Term f = eval(m->a);
        if (f->tag != TermTag::Lam || f->index < 0)
          throw Error(ErrorKind::Internal, "application of a non-function value");
        Term v = eval(m->b);
        Term body = subst_term(f->a, f->name, v);
        Term w = eval(body);
        eliminate(f, "APP");
        return w;
      }
      case TermTag::Inl:
      case TermTag::Inr: {
        m->a = eval(m->a);
        introduce(m, m->tag == TermTag::Inl ? "INL" : "INR");
        return m;
      }
      case TermTag::Make: {
        m->a = eval(m->a);
        introduce(m, "CON");
        return m;
      }
      case TermTag::Let: {
        Term v = eval(m->a);
        Term body = subst_term(m->b, m->name, v);
        Term w = eval(body);
        line("LET", -1, {}, {});
        return w;
      }
      case TermTag::Case: {
        Term v = eval(m->a);
        if ((v->tag != TermTag::Inl && v->tag != TermTag::Inr) || v->index < 0)
          throw Error(ErrorKind::Internal, "case scrutinee is not a sum value");
        Term body = v->tag == TermTag::Inl ? subst_term(m->b, m->binder, v->a)
                                           : subst_term(m->c, m->binder_r, v->a);
        Term w = eval(body);
        eliminate(v, "CASE");
        return w;
      }
      case TermTag::Break: {
        Term v = eval(m->a);
        if (v->tag != TermTag::Make || v->index < 0 || v->name != m->name)
          throw Error(ErrorKind::Internal, "opened value does not match its constructor");
        Term body = subst_term(m->b, m->binder, v->a);
        Term w = eval(body);
        eliminate(v, "BREAK");
        return w;
      }
      case TermTag::Var:
        throw Error(ErrorKind::Internal,
                    "free variable '" + display_name(m->name) + "' during evaluation");
    }
    throw Error(ErrorKind::Internal, "unhandled term form");
  }

  EvalTrace take_trace() { return std::move(trace_); }

 private:
  void introduce(const Term& v, const char* rule) {
    v->index = next_index_++;
    add(trace_.introduced, v->index);
    trace_.values[v->index] = ValueInfo{v->ann, print_value(v)};
    line(rule, v->index, {v->index}, {});
  }

  void eliminate(const Term& v, const char* rule) {
    add(trace_.eliminated, v->index);
    line(rule, v->index, {}, {v->index});
  }

  void line(const char* rule, long idx, std::vector<long> i_delta, std::vector<long> e_delta) {
    if (!record_) return;
    std::string out = rule;
    if (idx >= 0) out += " " + std::to_string(idx);
    auto bag = [](const std::vector<long>& xs) {
      std::string s = "[";
      for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(xs[i]);
      }
      return s + "]";
    };
    out += " " + bag(i_delta) + " " + bag(e_delta);
    trace_.lines.push_back(std::move(out));
  }

  long budget_;
  bool record_;
  long steps_ = 0;
  long next_index_ = 0;
  EvalTrace trace_;
};

void collect_values(const Term& t, std::map<long, long>& out) {
  if (!t) return;
  if (t->index >= 0) add(out, t->index);
  collect_values(t->a, out);
  collect_values(t->b, out);
  collect_values(t->c, out);
}

void collect_annotations(const Term& t, std::map<long, ValueInfo>& out) {
  if (!t) return;
  if (t->index >= 0 && !out.count(t->index)) out[t->index] = ValueInfo{t->ann, print_value(t)};
  collect_annotations(t->a, out);
  collect_annotations(t->b, out);
  collect_annotations(t->c, out);
}

}  // namespace

EvalResult eval_term(const Term& m, long step_budget, bool record_lines) {
  Evaluator e(step_budget, record_lines);
  Term value = e.eval(clone_term(m));
  return EvalResult{std::move(value), e.take_trace()};
}

std::map<long, long> value_subterms(const Term& t) {
  std::map<long, long> out;
  collect_values(t, out);
  return out;
}

AuditReport audit(const Term& result, const EvalTrace& trace, const PredSet& preds,
                  const EntailEnv& env) {
  AuditReport report;
  report.values = trace.values;
  collect_annotations(result, report.values);

  std::map<long, long> eliminated = trace.eliminated;
  for (const auto& [idx, n] : value_subterms(result)) add(eliminated, idx, n);

  for (const auto& [idx, n] : trace.introduced) {
    auto it = eliminated.find(idx);
    long seen = it == eliminated.end() ? 0 : it->second;
    if (n > seen) report.discarded[idx] = n - seen;
  }
  for (const auto& [idx, n] : eliminated) {
    auto it = trace.introduced.find(idx);
    long seen = it == trace.introduced.end() ? 0 : it->second;
    if (n > seen) report.copied[idx] = n - seen;
  }

  EntailEnv e = env.with(preds);
  auto flag = [&](long idx) {
    auto it = report.values.find(idx);
    if (it == report.values.end() || !it->second.ann.defined()) {
      report.violations.push_back(idx);
      return;
    }
    // Violation only when no instantiation of the annotation's remaining
    // flexible variables could make the value unrestricted.
    try {
      (void)simplify(e, PredSet{Predicate::un(it->second.ann)});
    } catch (const Error&) {
      report.violations.push_back(idx);
    }
  };
  for (const auto& [idx, n] : report.discarded) {
    (void)n;
    flag(idx);
  }
  for (const auto& [idx, n] : report.copied) {
    (void)n;
    if (!report.discarded.count(idx)) flag(idx);
  }
  return report;
}

std::string print_value(const Term& v, bool with_indices) {
  auto idx = [&](const Term& t) {
    return with_indices && t->index >= 0 ? "^" + std::to_string(t->index) : std::string();
  };
  auto atom = [&](const Term& t) -> std::string {
    std::string s = print_value(t, with_indices);
    if (t->tag == TermTag::Lam) return s;  // already bracketed
    return "(" + s + ")";
  };
  switch (v->tag) {
    case TermTag::Lam:
      return "<fun>" + idx(v);
    case TermTag::Inl:
      return "inl" + idx(v) + " " + atom(v->a);
    case TermTag::Inr:
      return "inr" + idx(v) + " " + atom(v->a);
    case TermTag::Make:
      return v->name + idx(v) + " " + atom(v->a);
    default:
      return print_term(v);
  }
}

}  // namespace quill
