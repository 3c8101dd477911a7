#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fw {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line_, int col_, const std::string &what_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + what_),
        line(line_), col(col_) {}
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------- Signature ----------

struct Signature {
  std::vector<std::string> constants;
  std::vector<std::pair<std::string, int>> functions;   // arity >= 1
  std::vector<std::pair<std::string, int>> predicates;  // arity >= 0

  void validate() const;  // distinct names, arity bounds
  bool has_constant(const std::string &n) const;
  int function_arity(const std::string &n) const;   // -1 if absent
  int predicate_arity(const std::string &n) const;  // -1 if absent
  bool has_symbol(const std::string &n) const;
};

// ---------- Terms ----------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum Kind { Var, Const, App };
  Kind kind;
  std::string name;
  std::vector<TermPtr> args;  // App only

  static TermPtr var(const std::string &n);
  static TermPtr cnst(const std::string &n);
  static TermPtr app(const std::string &n, std::vector<TermPtr> as);
};

int term_height(const TermPtr &t);
std::string print_term(const TermPtr &t);
bool term_equal(const TermPtr &a, const TermPtr &b);
TermPtr substitute_term(const TermPtr &t, const std::string &var, const TermPtr &by);

// ---------- Formulas ----------

enum class FKind { Atom, Not, And, Or, Implies, Forall, Exists };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind;
  std::string name;            // Atom: predicate; Forall/Exists: bound variable
  std::vector<TermPtr> terms;  // Atom only
  FormulaPtr a, b;             // Not: a; And/Or/Implies: a,b; quantifiers: a

  static FormulaPtr atom(const std::string &pred, std::vector<TermPtr> ts);
  static FormulaPtr lnot(FormulaPtr f);
  static FormulaPtr land(FormulaPtr l, FormulaPtr r);
  static FormulaPtr lor(FormulaPtr l, FormulaPtr r);
  static FormulaPtr implies(FormulaPtr l, FormulaPtr r);
  static FormulaPtr forall(const std::string &v, FormulaPtr body);
  static FormulaPtr exists(const std::string &v, FormulaPtr body);
};

// Parses the formula grammar: `forall v.`, `exists v.`, `&`, `|`, `->`, `~`,
// application `name(args)`; precedence ~ > & > | > ->; quantifiers extend
// maximally to the right. Checks symbols and arities against the signature.
FormulaPtr parse_formula(const Signature &sig, const std::string &text);

std::string print_formula(const FormulaPtr &f);

void check_well_formed(const Signature &sig, const FormulaPtr &f);

std::set<std::string> free_vars(const FormulaPtr &f);
bool is_sentence(const FormulaPtr &f);

// Negation normal form: no Implies, Not only on atoms.
FormulaPtr to_nnf(const FormulaPtr &f);
bool is_nnf(const FormulaPtr &f);

// Quantifier-nesting rank: 0 for quantifier-free, max under Boolean
// combination, +1 per quantifier.
int rank(const FormulaPtr &f);

int quantifier_depth(const FormulaPtr &f);
int count_existentials(const FormulaPtr &f);  // on NNF input

// Capture-avoiding substitution of a term for a free variable.
FormulaPtr substitute(const FormulaPtr &f, const std::string &var, const TermPtr &by);

// Canonical bound-variable renaming; alpha-equivalent formulas map to the
// same key.
std::string alpha_key(const FormulaPtr &f);
bool alpha_equal(const FormulaPtr &f, const FormulaPtr &g);

// Reflexive-transitive subformula closure, deduplicated up to alpha
// equivalence, in deterministic pre-order.
std::vector<FormulaPtr> subformulas(const FormulaPtr &f);

FormulaPtr universal_closure(const FormulaPtr &f);

// ---------- Skolemization ----------

struct SkolemSymbol {
  std::string name;
  int arity;
  int rank;             // rank of the source subformula
  bool existential;     // quantifier kind of the source
  FormulaPtr source;    // the quantified subformula it came from
};

struct SkolemResult {
  FormulaPtr matrix;                 // quantifier-free
  std::vector<SkolemSymbol> symbols; // one per quantifier occurrence
  Signature extended;                // signature plus the generated symbols
};

// S(atom)=atom; S respects Boolean connectives; S(Qx t)=S(t)(x/f \vec v) with
// \vec v the free variables of Qx t. Every quantifier gets a symbol; names are
// derived from the subformula position.
SkolemResult skolemize(const Signature &sig, const FormulaPtr &f);

}  // namespace fw
