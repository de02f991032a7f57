#include "quill/parser.hpp"

#include <cctype>
#include <memory>
#include <set>

#include "quill/error.hpp"

namespace quill {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  End, Ident, ConId, Lambda, Arrow, UnArrow, LinArrow, AnnotArrow, Plus, Star,
  LParen, RParen, LBrace, RBrace, Comma, Semi, Colon, Dot, Equals, FatArrow,
  GeqOp, KwDef, KwCon, KwData, KwForall, KwExists, KwLet, KwIn, KwCase, KwOf,
  KwInl, KwInr,
};

struct Token {
  Tok type;
  std::string text;
  int line, col;
};

[[noreturn]] void parse_fail(int line, int col, const std::string& msg) {
  throw Error(ErrorKind::Parse,
              std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_' || c == '\''; }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  auto push = [&](Tok t, std::string text, int l, int c) {
    out.push_back({t, std::move(text), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    int l = line, co = col;
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-') {
      if (i + 1 < src.size() && src[i + 1] == '-') {
        while (i < src.size() && src[i] != '\n') advance(1);
        continue;
      }
      if (i + 1 < src.size() && src[i + 1] == '>') {
        if (i + 2 < src.size() && src[i + 2] == '*') {
          push(Tok::UnArrow, "->*", l, co);
          advance(3);
        } else {
          push(Tok::Arrow, "->", l, co);
          advance(2);
        }
        continue;
      }
      if (i + 1 < src.size() && std::isalpha((unsigned char)src[i + 1])) {
        size_t j = i + 1;
        while (j < src.size() && ident_char(src[j])) ++j;
        std::string name = src.substr(i + 1, j - i - 1);
        if (j < src.size() && src[j] == '>') {
          push(Tok::AnnotArrow, name, l, co);
          advance(j - i + 1);
          continue;
        }
        if (name == "o") {
          push(Tok::LinArrow, "-o", l, co);
          advance(2);
          continue;
        }
        parse_fail(l, co, "expected '>' after arrow annotation '-" + name + "'");
      }
      parse_fail(l, co, "stray '-'");
    }
    if (c == '>' && i + 1 < src.size() && src[i + 1] == '=') {
      push(Tok::GeqOp, ">=", l, co);
      advance(2);
      continue;
    }
    if (c == '=') {
      if (i + 1 < src.size() && src[i + 1] == '>') {
        push(Tok::FatArrow, "=>", l, co);
        advance(2);
      } else {
        push(Tok::Equals, "=", l, co);
        advance(1);
      }
      continue;
    }
    if (std::isalpha((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      std::string word = src.substr(i, j - i);
      advance(j - i);
      if (word == "def") push(Tok::KwDef, word, l, co);
      else if (word == "con") push(Tok::KwCon, word, l, co);
      else if (word == "data") push(Tok::KwData, word, l, co);
      else if (word == "forall") push(Tok::KwForall, word, l, co);
      else if (word == "exists") push(Tok::KwExists, word, l, co);
      else if (word == "let") push(Tok::KwLet, word, l, co);
      else if (word == "in") push(Tok::KwIn, word, l, co);
      else if (word == "case") push(Tok::KwCase, word, l, co);
      else if (word == "of") push(Tok::KwOf, word, l, co);
      else if (word == "inl") push(Tok::KwInl, word, l, co);
      else if (word == "inr") push(Tok::KwInr, word, l, co);
      else if (std::isupper((unsigned char)c)) push(Tok::ConId, word, l, co);
      else push(Tok::Ident, word, l, co);
      continue;
    }
    switch (c) {
      case '\\': push(Tok::Lambda, "\\", l, co); break;
      case '+': push(Tok::Plus, "+", l, co); break;
      case '*': push(Tok::Star, "*", l, co); break;
      case '(': push(Tok::LParen, "(", l, co); break;
      case ')': push(Tok::RParen, ")", l, co); break;
      case '{': push(Tok::LBrace, "{", l, co); break;
      case '}': push(Tok::RBrace, "}", l, co); break;
      case ',': push(Tok::Comma, ",", l, co); break;
      case ';': push(Tok::Semi, ";", l, co); break;
      case ':': push(Tok::Colon, ":", l, co); break;
      case '.': push(Tok::Dot, ".", l, co); break;
      default:
        parse_fail(l, co, std::string("unexpected character '") + c + "'");
    }
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Surface syntax trees (pre-desugaring, pre-kind-inference)

struct SType;
using STypeP = std::shared_ptr<SType>;

enum class ArrowSugar { Lin, Un, Annot, Bare };

struct SType {
  enum class Tag { Var, Con, App, Arrow, Sum } tag;
  std::string name;        // Var/Con name; Arrow: annotation variable
  ArrowSugar sugar = ArrowSugar::Lin;
  STypeP a, b;
  int line = 0, col = 0;
};

struct SPred {
  PredKind kind;
  STypeP a, b;
};

struct SScheme {
  std::vector<std::string> foralls;
  std::vector<std::string> exists_;
  std::vector<SPred> context;
  STypeP body;
};

struct SConSig {
  std::vector<std::string> outer;
  SScheme inner;
  STypeP result;
};

STypeP snode(SType::Tag tag, int line, int col) {
  auto n = std::make_shared<SType>();
  n->tag = tag;
  n->line = line;
  n->col = col;
  return n;
}

// ---------------------------------------------------------------------------
// Kind solver: union-find cells holding *, arrows, or unknowns; residual
// unknowns default to *.

class KindSolver {
 public:
  int fresh() {
    cells_.push_back({});
    return (int)cells_.size() - 1;
  }
  int star() {
    int c = fresh();
    cells_[c].tag = 1;
    return c;
  }
  int arrow(int a, int b) {
    int c = fresh();
    cells_[c].tag = 2;
    cells_[c].a = a;
    cells_[c].b = b;
    return c;
  }
  int binary() { return arrow(star(), arrow(star(), star())); }
  int from_kind(const Kind& k) {
    return k.is_star() ? star() : arrow(from_kind(k.arg()), from_kind(k.result()));
  }

  void unify(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    Cell& cx = cells_[x];
    Cell& cy = cells_[y];
    if (cx.tag == 0) {
      if (occurs(x, y)) throw Error(ErrorKind::Kind, "cyclic kind");
      cx.link = y;
      return;
    }
    if (cy.tag == 0) {
      unify(y, x);
      return;
    }
    if (cx.tag != cy.tag)
      throw Error(ErrorKind::Kind, "kind mismatch: * vs. an arrow kind");
    if (cx.tag == 2) {
      int a1 = cx.a, b1 = cx.b, a2 = cy.a, b2 = cy.b;
      cells_[x].link = y;
      unify(a1, a2);
      unify(b1, b2);
    } else {
      cx.link = y;
    }
  }

  Kind to_kind(int c) {
    c = find(c);
    if (cells_[c].tag == 2) return Kind::arrow(to_kind(cells_[c].a), to_kind(cells_[c].b));
    return Kind::star();
  }

 private:
  struct Cell {
    int link = -1;
    int tag = 0;  // 0 unknown, 1 star, 2 arrow
    int a = 0, b = 0;
  };
  int find(int c) {
    while (cells_[c].link >= 0) c = cells_[c].link;
    return c;
  }
  bool occurs(int v, int c) {
    c = find(c);
    if (c == v) return true;
    if (cells_[c].tag == 2) return occurs(v, cells_[c].a) || occurs(v, cells_[c].b);
    return false;
  }
  std::vector<Cell> cells_;
};

// ---------------------------------------------------------------------------
// Surface -> core conversion with kind inference

class TypeBuilder {
 public:
  TypeBuilder(const std::map<std::string, Kind>& data_kinds, NameSupply& supply, bool strict)
      : data_kinds_(data_kinds), supply_(supply), strict_(strict) {}

  void set_self(const std::string& name, int cell) {
    self_name_ = name;
    self_cell_ = cell;
  }

  int declare(const std::string& name, int line, int col) {
    if (cells_.count(name))
      parse_fail(line, col, "duplicate type variable '" + name + "'");
    declared_.insert(name);
    return cells_[name] = ks.fresh();
  }

  int var_cell(const std::string& name, int line, int col) {
    auto it = cells_.find(name);
    if (it != cells_.end()) return it->second;
    if (strict_)
      throw Error(ErrorKind::Scope, std::to_string(line) + ":" + std::to_string(col) +
                                        ": unbound type variable '" + name + "'");
    return cells_[name] = ks.fresh();
  }

  int con_cell(const std::string& name, int line, int col) {
    if (name == self_name_) return self_cell_;
    auto it = data_kinds_.find(name);
    if (it == data_kinds_.end())
      throw Error(ErrorKind::Scope, std::to_string(line) + ":" + std::to_string(col) +
                                        ": unknown type constructor '" + name + "'");
    return ks.from_kind(it->second);
  }

  int constrain(const STypeP& t) {
    switch (t->tag) {
      case SType::Tag::Var:
        used_.insert(t->name);
        return var_cell(t->name, t->line, t->col);
      case SType::Tag::Con:
        return con_cell(t->name, t->line, t->col);
      case SType::Tag::App: {
        int cf = constrain(t->a);
        int ca = constrain(t->b);
        int r = ks.fresh();
        ks.unify(cf, ks.arrow(ca, r));
        return r;
      }
      case SType::Tag::Arrow: {
        ks.unify(constrain(t->a), ks.star());
        ks.unify(constrain(t->b), ks.star());
        if (t->sugar == ArrowSugar::Bare) {
          // Desugar: fresh annotation variable, recorded for quantification
          // at the nearest enclosing quantifier.
          t->name = supply_.fresh("f");
          introduced.push_back(t->name);
          cells_[t->name] = ks.binary();
          t->sugar = ArrowSugar::Annot;
        } else if (t->sugar == ArrowSugar::Annot) {
          used_.insert(t->name);
          ks.unify(var_cell(t->name, t->line, t->col), ks.binary());
        }
        return ks.star();
      }
      case SType::Tag::Sum:
        ks.unify(constrain(t->a), ks.star());
        ks.unify(constrain(t->b), ks.star());
        return ks.star();
    }
    throw Error(ErrorKind::Internal, "bad surface type");
  }

  void constrain_pred(const SPred& p) {
    switch (p.kind) {
      case PredKind::Un:
        constrain(p.a);
        break;
      case PredKind::Fun:
        ks.unify(constrain(p.a), ks.binary());
        break;
      case PredKind::Geq:
        // The two sides may have different kinds (`t >= f` relates a type
        // to an arrow constructor).
        constrain(p.a);
        constrain(p.b);
        break;
    }
  }

  TypeVar tyvar(const std::string& name) {
    return TypeVar{name, ks.to_kind(cells_.at(name)), Flavor::Flexible};
  }

  Type build(const STypeP& t, PredSet& funs_out) {
    switch (t->tag) {
      case SType::Tag::Var:
        return Type::var(tyvar(t->name));
      case SType::Tag::Con: {
        int c = t->name == self_name_ ? self_cell_ : con_cell(t->name, t->line, t->col);
        return Type::con(t->name, ks.to_kind(c));
      }
      case SType::Tag::App:
        return Type::app(build(t->a, funs_out), build(t->b, funs_out));
      case SType::Tag::Arrow: {
        Type a = build(t->a, funs_out);
        Type b = build(t->b, funs_out);
        if (t->sugar == ArrowSugar::Lin) return Type::lin(a, b);
        if (t->sugar == ArrowSugar::Un) return Type::un(a, b);
        Type f = Type::var(tyvar(t->name));
        funs_out.insert(Predicate::fun(f));
        return Type::app(Type::app(f, a), b);
      }
      case SType::Tag::Sum:
        return Type::sum(build(t->a, funs_out), build(t->b, funs_out));
    }
    throw Error(ErrorKind::Internal, "bad surface type");
  }

  Predicate build_pred(const SPred& p, PredSet& funs_out) {
    switch (p.kind) {
      case PredKind::Un:
        return Predicate::un(build(p.a, funs_out));
      case PredKind::Fun:
        return Predicate::fun(build(p.a, funs_out));
      case PredKind::Geq:
        return Predicate::geq(build(p.a, funs_out), build(p.b, funs_out));
    }
    throw Error(ErrorKind::Internal, "bad surface predicate");
  }

  bool was_used(const std::string& name) const { return used_.count(name) != 0; }

  KindSolver ks;
  std::vector<std::string> introduced;

 private:
  const std::map<std::string, Kind>& data_kinds_;
  NameSupply& supply_;
  bool strict_;
  std::map<std::string, int> cells_;
  std::set<std::string> declared_;
  std::set<std::string> used_;
  std::string self_name_;
  int self_cell_ = -1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(int ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok t) const { return peek().type == t; }
  bool at_end() const { return at(Tok::End); }
  const Token& next() { return toks_[pos_++]; }
  bool accept(Tok t) {
    if (at(t)) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(Tok t, const std::string& what) {
    if (!at(t)) parse_fail(peek().line, peek().col, "expected " + what);
    return next();
  }
  size_t mark() const { return pos_; }
  void reset(size_t p) { pos_ = p; }

  // --- kinds -------------------------------------------------------------

  Kind parse_kind() {
    Kind lhs = parse_katom();
    return parse_kind_rest(lhs);
  }

  // --- types -------------------------------------------------------------

  STypeP parse_stype() {
    STypeP l = parse_sarrow();
    if (accept(Tok::Plus)) {
      STypeP s = snode(SType::Tag::Sum, l->line, l->col);
      s->a = l;
      s->b = parse_stype();
      return s;
    }
    return l;
  }

  STypeP parse_sarrow() {
    STypeP l = parse_sapp();
    ArrowSugar sugar;
    std::string annot;
    if (accept(Tok::Arrow)) {
      sugar = ArrowSugar::Bare;
    } else if (accept(Tok::UnArrow)) {
      sugar = ArrowSugar::Un;
    } else if (accept(Tok::LinArrow)) {
      sugar = ArrowSugar::Lin;
    } else if (at(Tok::AnnotArrow)) {
      annot = next().text;
      sugar = ArrowSugar::Annot;
    } else {
      return l;
    }
    STypeP a = snode(SType::Tag::Arrow, l->line, l->col);
    a->sugar = sugar;
    a->name = annot;
    a->a = l;
    a->b = parse_sarrow();
    return a;
  }

  STypeP parse_sapp() {
    STypeP t = parse_satom();
    while (at(Tok::Ident) || at(Tok::ConId) || at(Tok::LParen)) {
      STypeP app = snode(SType::Tag::App, t->line, t->col);
      app->a = t;
      app->b = parse_satom();
      t = app;
    }
    return t;
  }

  STypeP parse_satom() {
    const Token& tk = peek();
    if (at(Tok::Ident)) {
      STypeP v = snode(SType::Tag::Var, tk.line, tk.col);
      v->name = next().text;
      return v;
    }
    if (at(Tok::ConId)) {
      STypeP c = snode(SType::Tag::Con, tk.line, tk.col);
      c->name = next().text;
      return c;
    }
    if (accept(Tok::LParen)) {
      STypeP t = parse_stype();
      expect(Tok::RParen, "')'");
      return t;
    }
    parse_fail(tk.line, tk.col, "expected a type");
  }

  // --- predicates and schemes --------------------------------------------

  SPred parse_pred() {
    if (at(Tok::ConId) && peek().text == "Un") {
      next();
      return SPred{PredKind::Un, parse_sapp(), nullptr};
    }
    if (at(Tok::ConId) && peek().text == "Fun") {
      next();
      return SPred{PredKind::Fun, parse_sapp(), nullptr};
    }
    STypeP l = parse_stype();
    expect(Tok::GeqOp, "'>='");
    return SPred{PredKind::Geq, l, parse_stype()};
  }

  std::optional<std::vector<SPred>> try_context() {
    size_t save = mark();
    try {
      std::vector<SPred> ps;
      if (accept(Tok::LParen)) {
        ps.push_back(parse_pred());
        while (accept(Tok::Comma)) ps.push_back(parse_pred());
        expect(Tok::RParen, "')'");
      } else {
        ps.push_back(parse_pred());
      }
      expect(Tok::FatArrow, "'=>'");
      return ps;
    } catch (const Error&) {
      reset(save);
      return std::nullopt;
    }
  }

  SScheme parse_sscheme(bool allow_exists) {
    SScheme s;
    if (accept(Tok::KwForall)) {
      while (at(Tok::Ident)) s.foralls.push_back(next().text);
      expect(Tok::Dot, "'.' after forall");
    }
    if (allow_exists && accept(Tok::KwExists)) {
      while (at(Tok::Ident)) s.exists_.push_back(next().text);
      expect(Tok::Dot, "'.' after exists");
    }
    if (auto ctx = try_context()) s.context = *ctx;
    s.body = parse_stype();
    return s;
  }

  // --- constructor signatures --------------------------------------------

  SConSig parse_consig() {
    SConSig sig;
    if (accept(Tok::KwForall)) {
      while (at(Tok::Ident)) sig.outer.push_back(next().text);
      expect(Tok::Dot, "'.' after forall");
    }
    parse_consig_body(sig);
    return sig;
  }

  // --- terms -------------------------------------------------------------

  Term parse_term() {
    if (accept(Tok::Lambda)) {
      std::string x = expect(Tok::Ident, "binder name").text;
      expect(Tok::Arrow, "'->'");
      return mk_lam(std::move(x), parse_term());
    }
    if (accept(Tok::KwLet)) {
      if (at(Tok::ConId)) {
        std::string k = next().text;
        std::string x = expect(Tok::Ident, "binder name").text;
        expect(Tok::Equals, "'='");
        Term bound = parse_term();
        expect(Tok::KwIn, "'in'");
        return mk_break(std::move(k), std::move(x), std::move(bound), parse_term());
      }
      std::string x = expect(Tok::Ident, "binder name").text;
      expect(Tok::Equals, "'='");
      Term bound = parse_term();
      expect(Tok::KwIn, "'in'");
      return mk_let(std::move(x), std::move(bound), parse_term());
    }
    if (accept(Tok::KwCase)) {
      Term scrut = parse_term();
      expect(Tok::KwOf, "'of'");
      expect(Tok::LBrace, "'{'");
      expect(Tok::KwInl, "'inl'");
      std::string xl = expect(Tok::Ident, "binder name").text;
      expect(Tok::Arrow, "'->'");
      Term left = parse_term();
      expect(Tok::Semi, "';'");
      expect(Tok::KwInr, "'inr'");
      std::string xr = expect(Tok::Ident, "binder name").text;
      expect(Tok::Arrow, "'->'");
      Term right = parse_term();
      expect(Tok::RBrace, "'}'");
      return mk_case(std::move(scrut), std::move(xl), std::move(left), std::move(xr),
                     std::move(right));
    }
    Term t = parse_factor();
    while (at(Tok::Ident) || at(Tok::LParen)) t = mk_app(t, parse_atom());
    return t;
  }

  Term parse_factor() {
    if (accept(Tok::KwInl)) return mk_inl(parse_atom());
    if (accept(Tok::KwInr)) return mk_inr(parse_atom());
    if (at(Tok::ConId)) {
      std::string k = next().text;
      return mk_make(std::move(k), parse_atom());
    }
    return parse_atom();
  }

  Term parse_atom() {
    const Token& tk = peek();
    if (at(Tok::Ident)) return mk_var(next().text);
    if (accept(Tok::LParen)) {
      Term t = parse_term();
      expect(Tok::RParen, "')'");
      return t;
    }
    parse_fail(tk.line, tk.col, "expected a term");
  }

 private:
  Kind parse_katom() {
    if (accept(Tok::Star)) return Kind::star();
    expect(Tok::LParen, "'*' or '('");
    Kind k = parse_kind();
    expect(Tok::RParen, "')'");
    return k;
  }
  Kind parse_kind_rest(Kind lhs) {
    if (accept(Tok::Arrow)) return Kind::arrow(std::move(lhs), parse_kind());
    // `->*` in kind position is an arrow immediately followed by a star.
    if (accept(Tok::UnArrow)) return Kind::arrow(std::move(lhs), parse_kind_rest(Kind::star()));
    return lhs;
  }

  void parse_consig_body(SConSig& sig) {
    if (accept(Tok::LParen)) {
      size_t save = mark();
      try {
        sig.inner = parse_sscheme(/*allow_exists=*/true);
        expect(Tok::RParen, "')'");
        expect(Tok::UnArrow, "'->*'");
        sig.result = parse_sapp();
        return;
      } catch (const Error&) {
        reset(save);
        parse_consig_body(sig);  // the '(' was grouping the whole signature
        expect(Tok::RParen, "')'");
        return;
      }
    }
    sig.inner.body = parse_sapp();
    expect(Tok::UnArrow, "'->*'");
    sig.result = parse_sapp();
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Declaration conversion

Scheme convert_scheme(SScheme& s, const std::map<std::string, Kind>& data_kinds,
                      NameSupply& supply, bool strict) {
  if (!s.exists_.empty())
    throw Error(ErrorKind::Parse, "existential quantifiers only appear in constructor signatures");
  TypeBuilder b(data_kinds, supply, strict);
  for (const std::string& v : s.foralls) b.declare(v, 0, 0);
  for (SPred& p : s.context) b.constrain_pred(p);
  b.ks.unify(b.constrain(s.body), b.ks.star());

  PredSet ctx;
  for (SPred& p : s.context) ctx.insert(b.build_pred(p, ctx));
  Type body = b.build(s.body, ctx);

  std::vector<TypeVar> quantified;
  for (const std::string& v : s.foralls) {
    if (!b.was_used(v))
      throw Error(ErrorKind::Scope, "quantified type variable '" + v + "' is unused");
    quantified.push_back(b.tyvar(v));
  }
  for (const std::string& v : b.introduced) quantified.push_back(b.tyvar(v));
  return Scheme{std::move(quantified), {std::move(ctx), std::move(body)}};
}

ConstructorSig convert_sig(const std::string& con_name, SConSig& s,
                           const std::map<std::string, Kind>& data_kinds, NameSupply& supply) {
  if (!s.result) throw Error(ErrorKind::Parse, "constructor signature lacks a result type");
  // The result must be `T v..` over exactly the outer variables.
  std::vector<STypeP> rargs;
  STypeP head = s.result;
  while (head->tag == SType::Tag::App) {
    rargs.push_back(head->b);
    head = head->a;
  }
  std::reverse(rargs.begin(), rargs.end());
  if (head->tag != SType::Tag::Con)
    parse_fail(s.result->line, s.result->col, "constructor result must name a datatype");
  const std::string data_name = head->name;
  if (rargs.size() != s.outer.size())
    parse_fail(s.result->line, s.result->col,
               "constructor result must apply the datatype to the outer variables");
  for (size_t i = 0; i < rargs.size(); ++i)
    if (rargs[i]->tag != SType::Tag::Var || rargs[i]->name != s.outer[i])
      parse_fail(rargs[i]->line, rargs[i]->col,
                 "constructor result argument must be the outer variable '" + s.outer[i] + "'");

  TypeBuilder b(data_kinds, supply, /*strict=*/true);
  std::vector<int> outer_cells;
  for (const std::string& v : s.outer) outer_cells.push_back(b.declare(v, 0, 0));
  for (const std::string& v : s.inner.foralls) b.declare(v, 0, 0);
  for (const std::string& v : s.inner.exists_) b.declare(v, 0, 0);

  // The datatype's kind takes the outer variables' kinds to *.
  int self = b.ks.star();
  for (auto it = outer_cells.rbegin(); it != outer_cells.rend(); ++it)
    self = b.ks.arrow(*it, self);
  b.set_self(data_name, self);
  auto declared = data_kinds.find(data_name);
  if (declared != data_kinds.end()) b.ks.unify(self, b.ks.from_kind(declared->second));

  for (SPred& p : s.inner.context) b.constrain_pred(p);
  b.ks.unify(b.constrain(s.inner.body), b.ks.star());
  b.constrain(s.result);

  ConstructorSig sig;
  sig.name = con_name;
  sig.data_name = data_name;
  for (SPred& p : s.inner.context) sig.context.insert(b.build_pred(p, sig.context));
  sig.payload = b.build(s.inner.body, sig.context);
  PredSet none;
  sig.result = b.build(s.result, none);
  for (const std::string& v : s.outer) sig.outer.push_back(b.tyvar(v));
  for (const std::string& v : s.inner.foralls) sig.univ.push_back(b.tyvar(v));
  for (const std::string& v : b.introduced) sig.univ.push_back(b.tyvar(v));
  for (const std::string& v : s.inner.exists_) sig.exist.push_back(b.tyvar(v));
  return sig;
}

void check_constructors(const Term& t, const std::map<std::string, ConstructorSig>& cons) {
  if (!t) return;
  if ((t->tag == TermTag::Make || t->tag == TermTag::Break) && !cons.count(t->name))
    throw Error(ErrorKind::Scope, "unknown constructor '" + t->name + "'");
  check_constructors(t->a, cons);
  check_constructors(t->b, cons);
  check_constructors(t->c, cons);
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry points

Program parse_program(const std::string& source) {
  Parser p(lex(source));
  Program prog;
  NameSupply term_supply;
  NameSupply type_supply;
  std::set<std::string> prior_defs;
  while (!p.at_end()) {
    if (p.accept(Tok::KwData)) {
      std::string name = p.expect(Tok::ConId, "datatype name").text;
      p.expect(Tok::Colon, "':'");
      Kind k = p.parse_kind();
      p.expect(Tok::Semi, "';'");
      if (prog.data_kinds.count(name))
        throw Error(ErrorKind::Scope, "duplicate datatype '" + name + "'");
      prog.data_kinds[name] = k;
      continue;
    }
    if (p.accept(Tok::KwCon)) {
      std::string name = p.expect(Tok::ConId, "constructor name").text;
      p.expect(Tok::Colon, "':'");
      SConSig surface = p.parse_consig();
      p.expect(Tok::Semi, "';'");
      if (prog.constructors.count(name))
        throw Error(ErrorKind::Scope, "duplicate constructor '" + name + "'");
      ConstructorSig sig = convert_sig(name, surface, prog.data_kinds, type_supply);
      if (prog.datatypes.count(sig.data_name))
        throw Error(ErrorKind::Scope,
                    "datatype '" + sig.data_name + "' already has a constructor");
      auto [rhead, rargs] = sig.result.spine();
      (void)rargs;
      prog.data_kinds[sig.data_name] = rhead.as_con().kind;
      prog.constructors[name] = sig;
      prog.datatypes[sig.data_name] = sig;
      continue;
    }
    if (p.accept(Tok::KwDef)) {
      Def d;
      d.name = p.expect(Tok::Ident, "definition name").text;
      if (p.accept(Tok::Colon)) {
        SScheme s = p.parse_sscheme(/*allow_exists=*/false);
        d.declared = convert_scheme(s, prog.data_kinds, type_supply, /*strict=*/true);
      }
      p.expect(Tok::Equals, "'='");
      d.term = p.parse_term();
      p.expect(Tok::Semi, "';'");
      for (const Def& prev : prog.defs)
        if (prev.name == d.name)
          throw Error(ErrorKind::Scope, "duplicate definition '" + d.name + "'");
      check_constructors(d.term, prog.constructors);
      rename_apart(d.term, prior_defs, term_supply);
      prior_defs.insert(d.name);
      prog.defs.push_back(std::move(d));
      continue;
    }
    parse_fail(p.peek().line, p.peek().col, "expected 'data', 'con', or 'def'");
  }
  return prog;
}

Scheme parse_scheme(const std::string& source, const std::map<std::string, Kind>& data_kinds) {
  Parser p(lex(source));
  SScheme s = p.parse_sscheme(/*allow_exists=*/false);
  if (!p.at_end())
    parse_fail(p.peek().line, p.peek().col, "trailing input after scheme");
  NameSupply supply;
  return convert_scheme(s, data_kinds, supply, /*strict=*/false);
}

Term parse_term(const std::string& source) {
  Parser p(lex(source));
  Term t = p.parse_term();
  if (!p.at_end())
    parse_fail(p.peek().line, p.peek().col, "trailing input after term");
  NameSupply supply;
  rename_apart(t, {}, supply);
  return t;
}

}  // namespace quill
