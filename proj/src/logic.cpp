#include "fw/logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace fw {

// ---------- Signature ----------

void Signature::validate() const {
  std::set<std::string> seen;
  auto add = [&](const std::string &n) {
    if (n.empty()) throw InputError("empty symbol name in signature");
    if (!seen.insert(n).second)
      throw InputError("duplicate symbol name in signature: " + n);
  };
  for (auto &c : constants) add(c);
  for (auto &[n, a] : functions) {
    add(n);
    if (a < 1) throw InputError("function arity must be >= 1: " + n);
  }
  for (auto &[n, a] : predicates) {
    add(n);
    if (a < 0) throw InputError("negative predicate arity: " + n);
  }
}

bool Signature::has_constant(const std::string &n) const {
  return std::find(constants.begin(), constants.end(), n) != constants.end();
}

int Signature::function_arity(const std::string &n) const {
  for (auto &[f, a] : functions)
    if (f == n) return a;
  return -1;
}

int Signature::predicate_arity(const std::string &n) const {
  for (auto &[p, a] : predicates)
    if (p == n) return a;
  return -1;
}

bool Signature::has_symbol(const std::string &n) const {
  return has_constant(n) || function_arity(n) >= 0 || predicate_arity(n) >= 0;
}

// ---------- Terms ----------

TermPtr Term::var(const std::string &n) {
  return std::make_shared<Term>(Term{Var, n, {}});
}
TermPtr Term::cnst(const std::string &n) {
  return std::make_shared<Term>(Term{Const, n, {}});
}
TermPtr Term::app(const std::string &n, std::vector<TermPtr> as) {
  return std::make_shared<Term>(Term{App, n, std::move(as)});
}

int term_height(const TermPtr &t) {
  if (t->kind != Term::App) return 0;
  int h = 0;
  for (auto &a : t->args) h = std::max(h, term_height(a));
  return 1 + h;
}

std::string print_term(const TermPtr &t) {
  if (t->kind != Term::App) return t->name;
  std::string s = t->name + "(";
  for (size_t i = 0; i < t->args.size(); ++i) {
    if (i) s += ", ";
    s += print_term(t->args[i]);
  }
  return s + ")";
}

bool term_equal(const TermPtr &a, const TermPtr &b) {
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  return true;
}

TermPtr substitute_term(const TermPtr &t, const std::string &var, const TermPtr &by) {
  switch (t->kind) {
    case Term::Var:
      return t->name == var ? by : t;
    case Term::Const:
      return t;
    case Term::App: {
      std::vector<TermPtr> as;
      as.reserve(t->args.size());
      for (auto &a : t->args) as.push_back(substitute_term(a, var, by));
      return Term::app(t->name, std::move(as));
    }
  }
  return t;
}

static void term_vars(const TermPtr &t, std::set<std::string> &out) {
  if (t->kind == Term::Var) out.insert(t->name);
  for (auto &a : t->args) term_vars(a, out);
}

// ---------- Formula constructors ----------

FormulaPtr Formula::atom(const std::string &pred, std::vector<TermPtr> ts) {
  return std::make_shared<Formula>(Formula{FKind::Atom, pred, std::move(ts), nullptr, nullptr});
}
FormulaPtr Formula::lnot(FormulaPtr f) {
  return std::make_shared<Formula>(Formula{FKind::Not, "", {}, std::move(f), nullptr});
}
FormulaPtr Formula::land(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FKind::And, "", {}, std::move(l), std::move(r)});
}
FormulaPtr Formula::lor(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FKind::Or, "", {}, std::move(l), std::move(r)});
}
FormulaPtr Formula::implies(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FKind::Implies, "", {}, std::move(l), std::move(r)});
}
FormulaPtr Formula::forall(const std::string &v, FormulaPtr body) {
  return std::make_shared<Formula>(Formula{FKind::Forall, v, {}, std::move(body), nullptr});
}
FormulaPtr Formula::exists(const std::string &v, FormulaPtr body) {
  return std::make_shared<Formula>(Formula{FKind::Exists, v, {}, std::move(body), nullptr});
}

// ---------- Parser ----------

namespace {

struct Token {
  enum Kind { Name, LPar, RPar, Comma, Dot, Amp, Bar, Arrow, Tilde, End } kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string &src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string &s) : src(s) {}

  void advance(size_t n) {
    for (size_t i = 0; i < n && pos < src.size(); ++i, ++pos) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  Token next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      advance(1);
    int l = line, c = col;
    if (pos >= src.size()) return {Token::End, "", l, c};
    char ch = src[pos];
    if (ch == '(') { advance(1); return {Token::LPar, "(", l, c}; }
    if (ch == ')') { advance(1); return {Token::RPar, ")", l, c}; }
    if (ch == ',') { advance(1); return {Token::Comma, ",", l, c}; }
    if (ch == '.') { advance(1); return {Token::Dot, ".", l, c}; }
    if (ch == '&') { advance(1); return {Token::Amp, "&", l, c}; }
    if (ch == '|') { advance(1); return {Token::Bar, "|", l, c}; }
    if (ch == '~') { advance(1); return {Token::Tilde, "~", l, c}; }
    if (ch == '-') {
      if (pos + 1 < src.size() && src[pos + 1] == '>') {
        advance(2);
        return {Token::Arrow, "->", l, c};
      }
      throw ParseError(l, c, "expected '->'");
    }
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        advance(1);
      return {Token::Name, src.substr(start, pos - start), l, c};
    }
    throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
  }
};

struct Parser {
  const Signature &sig;
  std::vector<Token> toks;
  size_t ix = 0;
  std::vector<std::string> bound;  // quantified variables in scope

  Parser(const Signature &s, const std::string &text) : sig(s) {
    Lexer lex(text);
    for (;;) {
      Token t = lex.next();
      toks.push_back(t);
      if (t.kind == Token::End) break;
    }
  }

  const Token &peek() const { return toks[ix]; }
  Token take() { return toks[ix++]; }
  bool accept(Token::Kind k) {
    if (peek().kind == k) { ++ix; return true; }
    return false;
  }
  void expect(Token::Kind k, const char *what) {
    if (!accept(k)) throw ParseError(peek().line, peek().col, std::string("expected ") + what);
  }

  bool in_scope(const std::string &n) const {
    return std::find(bound.begin(), bound.end(), n) != bound.end();
  }

  TermPtr parse_term() {
    Token t = take();
    if (t.kind != Token::Name)
      throw ParseError(t.line, t.col, "expected a term");
    if (peek().kind == Token::LPar) {
      int ar = sig.function_arity(t.text);
      if (ar < 0) throw ParseError(t.line, t.col, "unknown function symbol '" + t.text + "'");
      take();
      std::vector<TermPtr> args;
      if (peek().kind != Token::RPar) {
        args.push_back(parse_term());
        while (accept(Token::Comma)) args.push_back(parse_term());
      }
      expect(Token::RPar, "')'");
      if ((int)args.size() != ar)
        throw ParseError(t.line, t.col, "arity mismatch for '" + t.text + "': expected " +
                                            std::to_string(ar) + ", got " +
                                            std::to_string(args.size()));
      return Term::app(t.text, std::move(args));
    }
    if (in_scope(t.text)) return Term::var(t.text);
    if (sig.has_constant(t.text)) return Term::cnst(t.text);
    if (sig.has_symbol(t.text))
      throw ParseError(t.line, t.col, "symbol '" + t.text + "' is not usable as a term");
    return Term::var(t.text);  // free variable
  }

  FormulaPtr parse_atomic() {
    Token t = peek();
    if (t.kind == Token::LPar) {
      take();
      FormulaPtr f = parse_implies();
      expect(Token::RPar, "')'");
      return f;
    }
    if (t.kind == Token::Name && (t.text == "forall" || t.text == "exists")) {
      take();
      Token v = take();
      if (v.kind != Token::Name)
        throw ParseError(v.line, v.col, "expected a variable after quantifier");
      expect(Token::Dot, "'.'");
      bound.push_back(v.text);
      FormulaPtr body = parse_implies();  // quantifiers extend maximally right
      bound.pop_back();
      return t.text == "forall" ? Formula::forall(v.text, body)
                                : Formula::exists(v.text, body);
    }
    if (t.kind == Token::Name) {
      take();
      int ar = sig.predicate_arity(t.text);
      if (ar < 0) throw ParseError(t.line, t.col, "unknown predicate '" + t.text + "'");
      std::vector<TermPtr> args;
      if (peek().kind == Token::LPar) {
        take();
        if (peek().kind != Token::RPar) {
          args.push_back(parse_term());
          while (accept(Token::Comma)) args.push_back(parse_term());
        }
        expect(Token::RPar, "')'");
      }
      if ((int)args.size() != ar)
        throw ParseError(t.line, t.col, "arity mismatch for '" + t.text + "': expected " +
                                            std::to_string(ar) + ", got " +
                                            std::to_string(args.size()));
      return Formula::atom(t.text, std::move(args));
    }
    throw ParseError(t.line, t.col, "expected a formula");
  }

  FormulaPtr parse_neg() {
    if (accept(Token::Tilde)) return Formula::lnot(parse_neg());
    return parse_atomic();
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_neg();
    while (accept(Token::Amp)) f = Formula::land(f, parse_neg());
    return f;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (accept(Token::Bar)) f = Formula::lor(f, parse_and());
    return f;
  }

  FormulaPtr parse_implies() {  // right associative
    FormulaPtr f = parse_or();
    if (accept(Token::Arrow)) return Formula::implies(f, parse_implies());
    return f;
  }

  FormulaPtr run() {
    FormulaPtr f = parse_implies();
    if (peek().kind != Token::End)
      throw ParseError(peek().line, peek().col, "trailing input");
    return f;
  }
};

}  // namespace

FormulaPtr parse_formula(const Signature &sig, const std::string &text) {
  Parser p(sig, text);
  return p.run();
}

// ---------- Printer ----------

namespace {

int prec_of(const FormulaPtr &f) {
  switch (f->kind) {
    case FKind::Atom: return 5;
    case FKind::Not: return 4;
    case FKind::And: return 3;
    case FKind::Or: return 2;
    case FKind::Implies: return 1;
    case FKind::Forall:
    case FKind::Exists: return 0;
  }
  return 0;
}

void print_rec(const FormulaPtr &f, int parent_prec, std::string &out) {
  int p = prec_of(f);
  bool paren = p < parent_prec;
  if (paren) out += "(";
  switch (f->kind) {
    case FKind::Atom: {
      out += f->name;
      if (!f->terms.empty()) {
        out += "(";
        for (size_t i = 0; i < f->terms.size(); ++i) {
          if (i) out += ", ";
          out += print_term(f->terms[i]);
        }
        out += ")";
      }
      break;
    }
    case FKind::Not:
      out += "~";
      print_rec(f->a, 4, out);
      break;
    case FKind::And:
      print_rec(f->a, 3, out);
      out += " & ";
      print_rec(f->b, 4, out);
      break;
    case FKind::Or:
      print_rec(f->a, 2, out);
      out += " | ";
      print_rec(f->b, 3, out);
      break;
    case FKind::Implies:
      print_rec(f->a, 2, out);
      out += " -> ";
      print_rec(f->b, 1, out);
      break;
    case FKind::Forall:
    case FKind::Exists:
      out += f->kind == FKind::Forall ? "forall " : "exists ";
      out += f->name;
      out += ". ";
      print_rec(f->a, 0, out);
      break;
  }
  if (paren) out += ")";
}

}  // namespace

std::string print_formula(const FormulaPtr &f) {
  std::string out;
  print_rec(f, 0, out);
  return out;
}

void check_well_formed(const Signature &sig, const FormulaPtr &f) {
  struct Walk {
    const Signature &sig;
    void term(const TermPtr &t) {
      switch (t->kind) {
        case Term::Var: break;
        case Term::Const:
          if (!sig.has_constant(t->name))
            throw InputError("unknown constant: " + t->name);
          break;
        case Term::App: {
          int ar = sig.function_arity(t->name);
          if (ar < 0) throw InputError("unknown function: " + t->name);
          if ((int)t->args.size() != ar)
            throw InputError("arity mismatch for function " + t->name);
          for (auto &a : t->args) term(a);
          break;
        }
      }
    }
    void go(const FormulaPtr &g) {
      switch (g->kind) {
        case FKind::Atom: {
          int ar = sig.predicate_arity(g->name);
          if (ar < 0) throw InputError("unknown predicate: " + g->name);
          if ((int)g->terms.size() != ar)
            throw InputError("arity mismatch for predicate " + g->name);
          for (auto &t : g->terms) term(t);
          break;
        }
        case FKind::Not: go(g->a); break;
        case FKind::And:
        case FKind::Or:
        case FKind::Implies: go(g->a); go(g->b); break;
        case FKind::Forall:
        case FKind::Exists: go(g->a); break;
      }
    }
  } w{sig};
  w.go(f);
}

// ---------- Free variables ----------

static void free_vars_rec(const FormulaPtr &f, std::set<std::string> &bound,
                          std::set<std::string> &out) {
  switch (f->kind) {
    case FKind::Atom: {
      std::set<std::string> vs;
      for (auto &t : f->terms) term_vars(t, vs);
      for (auto &v : vs)
        if (!bound.count(v)) out.insert(v);
      break;
    }
    case FKind::Not:
      free_vars_rec(f->a, bound, out);
      break;
    case FKind::And:
    case FKind::Or:
    case FKind::Implies:
      free_vars_rec(f->a, bound, out);
      free_vars_rec(f->b, bound, out);
      break;
    case FKind::Forall:
    case FKind::Exists: {
      bool fresh = bound.insert(f->name).second;
      free_vars_rec(f->a, bound, out);
      if (fresh) bound.erase(f->name);
      break;
    }
  }
}

std::set<std::string> free_vars(const FormulaPtr &f) {
  std::set<std::string> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

bool is_sentence(const FormulaPtr &f) { return free_vars(f).empty(); }

// ---------- NNF ----------

static FormulaPtr nnf_pos(const FormulaPtr &f);
static FormulaPtr nnf_neg(const FormulaPtr &f);

static FormulaPtr nnf_pos(const FormulaPtr &f) {
  switch (f->kind) {
    case FKind::Atom: return f;
    case FKind::Not: return nnf_neg(f->a);
    case FKind::And: return Formula::land(nnf_pos(f->a), nnf_pos(f->b));
    case FKind::Or: return Formula::lor(nnf_pos(f->a), nnf_pos(f->b));
    case FKind::Implies: return Formula::lor(nnf_neg(f->a), nnf_pos(f->b));
    case FKind::Forall: return Formula::forall(f->name, nnf_pos(f->a));
    case FKind::Exists: return Formula::exists(f->name, nnf_pos(f->a));
  }
  return f;
}

static FormulaPtr nnf_neg(const FormulaPtr &f) {
  switch (f->kind) {
    case FKind::Atom: return Formula::lnot(f);
    case FKind::Not: return nnf_pos(f->a);
    case FKind::And: return Formula::lor(nnf_neg(f->a), nnf_neg(f->b));
    case FKind::Or: return Formula::land(nnf_neg(f->a), nnf_neg(f->b));
    case FKind::Implies: return Formula::land(nnf_pos(f->a), nnf_neg(f->b));
    case FKind::Forall: return Formula::exists(f->name, nnf_neg(f->a));
    case FKind::Exists: return Formula::forall(f->name, nnf_neg(f->a));
  }
  return f;
}

FormulaPtr to_nnf(const FormulaPtr &f) { return nnf_pos(f); }

bool is_nnf(const FormulaPtr &f) {
  switch (f->kind) {
    case FKind::Atom: return true;
    case FKind::Not: return f->a->kind == FKind::Atom;
    case FKind::And:
    case FKind::Or: return is_nnf(f->a) && is_nnf(f->b);
    case FKind::Implies: return false;
    case FKind::Forall:
    case FKind::Exists: return is_nnf(f->a);
  }
  return false;
}

// ---------- Measures ----------

int rank(const FormulaPtr &f) {
  switch (f->kind) {
    case FKind::Atom: return 0;
    case FKind::Not: return rank(f->a);
    case FKind::And:
    case FKind::Or:
    case FKind::Implies: return std::max(rank(f->a), rank(f->b));
    case FKind::Forall:
    case FKind::Exists: return 1 + rank(f->a);
  }
  return 0;
}

int quantifier_depth(const FormulaPtr &f) { return rank(f); }

int count_existentials(const FormulaPtr &f) {
  switch (f->kind) {
    case FKind::Atom: return 0;
    case FKind::Not: return count_existentials(f->a);
    case FKind::And:
    case FKind::Or:
    case FKind::Implies: return count_existentials(f->a) + count_existentials(f->b);
    case FKind::Forall: return count_existentials(f->a);
    case FKind::Exists: return 1 + count_existentials(f->a);
  }
  return 0;
}

// ---------- Substitution ----------

FormulaPtr substitute(const FormulaPtr &f, const std::string &var, const TermPtr &by) {
  switch (f->kind) {
    case FKind::Atom: {
      std::vector<TermPtr> ts;
      ts.reserve(f->terms.size());
      for (auto &t : f->terms) ts.push_back(substitute_term(t, var, by));
      return Formula::atom(f->name, std::move(ts));
    }
    case FKind::Not:
      return Formula::lnot(substitute(f->a, var, by));
    case FKind::And:
      return Formula::land(substitute(f->a, var, by), substitute(f->b, var, by));
    case FKind::Or:
      return Formula::lor(substitute(f->a, var, by), substitute(f->b, var, by));
    case FKind::Implies:
      return Formula::implies(substitute(f->a, var, by), substitute(f->b, var, by));
    case FKind::Forall:
    case FKind::Exists: {
      if (f->name == var) return f;
      std::set<std::string> byvars;
      term_vars(by, byvars);
      std::string bv = f->name;
      FormulaPtr body = f->a;
      if (byvars.count(bv)) {
        // rename the bound variable away from the substituted term
        std::string fresh = bv;
        std::set<std::string> avoid = byvars;
        auto fv = free_vars(f->a);
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(var);
        do { fresh += "_"; } while (avoid.count(fresh));
        body = substitute(body, bv, Term::var(fresh));
        bv = fresh;
      }
      body = substitute(body, var, by);
      return f->kind == FKind::Forall ? Formula::forall(bv, body)
                                      : Formula::exists(bv, body);
    }
  }
  return f;
}

// ---------- Alpha equivalence ----------

namespace {

void alpha_term(const TermPtr &t, const std::map<std::string, int> &env, std::string &out) {
  switch (t->kind) {
    case Term::Var: {
      auto it = env.find(t->name);
      if (it != env.end())
        out += "#" + std::to_string(it->second);
      else
        out += "?" + t->name;
      break;
    }
    case Term::Const:
      out += "c:" + t->name;
      break;
    case Term::App:
      out += "f:" + t->name + "(";
      for (auto &a : t->args) {
        alpha_term(a, env, out);
        out += ",";
      }
      out += ")";
      break;
  }
}

void alpha_rec(const FormulaPtr &f, std::map<std::string, int> env, int depth,
               std::string &out) {
  switch (f->kind) {
    case FKind::Atom:
      out += "A:" + f->name + "(";
      for (auto &t : f->terms) {
        alpha_term(t, env, out);
        out += ",";
      }
      out += ")";
      break;
    case FKind::Not:
      out += "N(";
      alpha_rec(f->a, env, depth, out);
      out += ")";
      break;
    case FKind::And:
    case FKind::Or:
    case FKind::Implies:
      out += f->kind == FKind::And ? "&(" : (f->kind == FKind::Or ? "|(" : ">(");
      alpha_rec(f->a, env, depth, out);
      out += ",";
      alpha_rec(f->b, env, depth, out);
      out += ")";
      break;
    case FKind::Forall:
    case FKind::Exists:
      out += f->kind == FKind::Forall ? "V(" : "E(";
      env[f->name] = depth;
      alpha_rec(f->a, env, depth + 1, out);
      out += ")";
      break;
  }
}

}  // namespace

std::string alpha_key(const FormulaPtr &f) {
  std::string out;
  alpha_rec(f, {}, 0, out);
  return out;
}

bool alpha_equal(const FormulaPtr &f, const FormulaPtr &g) {
  return alpha_key(f) == alpha_key(g);
}

// ---------- Subformulas ----------

static void subformulas_rec(const FormulaPtr &f, std::set<std::string> &seen,
                            std::vector<FormulaPtr> &out) {
  std::string key = alpha_key(f);
  if (seen.insert(key).second) out.push_back(f);
  switch (f->kind) {
    case FKind::Atom: break;
    case FKind::Not:
      subformulas_rec(f->a, seen, out);
      break;
    case FKind::And:
    case FKind::Or:
    case FKind::Implies:
      subformulas_rec(f->a, seen, out);
      subformulas_rec(f->b, seen, out);
      break;
    case FKind::Forall:
    case FKind::Exists:
      subformulas_rec(f->a, seen, out);
      break;
  }
}

std::vector<FormulaPtr> subformulas(const FormulaPtr &f) {
  std::set<std::string> seen;
  std::vector<FormulaPtr> out;
  subformulas_rec(f, seen, out);
  return out;
}

FormulaPtr universal_closure(const FormulaPtr &f) {
  FormulaPtr g = f;
  auto fv = free_vars(f);
  std::vector<std::string> vs(fv.begin(), fv.end());
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) g = Formula::forall(*it, g);
  return g;
}

// ---------- Skolemization ----------

namespace {

struct Skolemizer {
  const Signature &sig;
  std::vector<SkolemSymbol> symbols;
  std::set<std::string> used;

  explicit Skolemizer(const Signature &s) : sig(s) {
    for (auto &c : s.constants) used.insert(c);
    for (auto &[n, a] : s.functions) used.insert(n);
    for (auto &[n, a] : s.predicates) used.insert(n);
  }

  std::string fresh_name(bool existential, const std::string &path) {
    std::string base = std::string("sk") + (existential ? "E" : "A") +
                       (path.empty() ? "r" : path);
    std::string n = base;
    while (used.count(n)) n += "x";
    used.insert(n);
    return n;
  }

  FormulaPtr go(const FormulaPtr &f, const std::string &path) {
    switch (f->kind) {
      case FKind::Atom:
        return f;
      case FKind::Not:
        return Formula::lnot(go(f->a, path + "0"));
      case FKind::And:
        return Formula::land(go(f->a, path + "0"), go(f->b, path + "1"));
      case FKind::Or:
        return Formula::lor(go(f->a, path + "0"), go(f->b, path + "1"));
      case FKind::Implies:
        return Formula::implies(go(f->a, path + "0"), go(f->b, path + "1"));
      case FKind::Forall:
      case FKind::Exists: {
        bool ex = f->kind == FKind::Exists;
        auto fv = free_vars(f);
        std::vector<std::string> vs(fv.begin(), fv.end());
        std::string name = fresh_name(ex, path);
        symbols.push_back({name, (int)vs.size(), rank(f), ex, f});
        FormulaPtr body = go(f->a, path + "q");
        TermPtr skterm;
        if (vs.empty()) {
          skterm = Term::cnst(name);
        } else {
          std::vector<TermPtr> args;
          for (auto &v : vs) args.push_back(Term::var(v));
          skterm = Term::app(name, std::move(args));
        }
        return substitute(body, f->name, skterm);
      }
    }
    return f;
  }
};

}  // namespace

SkolemResult skolemize(const Signature &sig, const FormulaPtr &f) {
  Skolemizer sk(sig);
  FormulaPtr matrix = sk.go(f, "");
  Signature ext = sig;
  for (auto &s : sk.symbols) {
    if (s.arity == 0)
      ext.constants.push_back(s.name);
    else
      ext.functions.push_back({s.name, s.arity});
  }
  return {matrix, sk.symbols, ext};
}

}  // namespace fw
