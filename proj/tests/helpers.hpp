#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <functional>
#include <random>
#include <vector>

#include "fw/fulfil.hpp"
#include "fw/logic.hpp"
#include "fw/structure.hpp"

namespace fwtest {

using namespace fw;

// signature with two predicates and one unary function
inline Signature corpus_signature(bool with_function) {
  Signature sig;
  sig.predicates = {{"P", 1}, {"R", 2}};
  if (with_function) sig.functions = {{"f", 1}};
  return sig;
}

// enumerate every structure over a given domain for corpus_signature
inline std::vector<FiniteStructure> all_corpus_structures(int domain_size,
                                                          bool with_function) {
  std::vector<FiniteStructure> out;
  std::vector<ElemId> dom;
  for (int i = 0; i < domain_size; ++i) dom.push_back(i);
  int p_bits = domain_size;
  int r_bits = domain_size * domain_size;
  int f_opts = 1;
  if (with_function)
    for (int i = 0; i < domain_size; ++i) f_opts *= domain_size;
  for (int pm = 0; pm < (1 << p_bits); ++pm)
    for (int rm = 0; rm < (1 << r_bits); ++rm)
      for (int fm = 0; fm < f_opts; ++fm) {
        FiniteStructure s;
        s.sig = corpus_signature(with_function);
        s.domain = dom;
        std::map<Tuple, bool> P, R;
        for (int i = 0; i < domain_size; ++i) P[{i}] = (pm >> i) & 1;
        for (int i = 0; i < domain_size; ++i)
          for (int j = 0; j < domain_size; ++j)
            R[{i, j}] = (rm >> (i * domain_size + j)) & 1;
        s.predicates["P"] = P;
        s.predicates["R"] = R;
        if (with_function) {
          std::map<Tuple, ElemId> F;
          int m = fm;
          for (int i = 0; i < domain_size; ++i) {
            F[{i}] = m % domain_size;
            m /= domain_size;
          }
          s.functions["f"] = F;
        }
        out.push_back(std::move(s));
      }
  return out;
}

// all chains of non-empty subsets of {0..domain_size-1} with `len` tiers
inline std::vector<FulfilSequence> all_chains(int domain_size, int len) {
  std::vector<std::vector<ElemId>> subsets;
  for (int m = 1; m < (1 << domain_size); ++m) {
    std::vector<ElemId> t;
    for (int i = 0; i < domain_size; ++i)
      if ((m >> i) & 1) t.push_back(i);
    subsets.push_back(t);
  }
  std::vector<FulfilSequence> out;
  std::vector<int> pick(len, 0);
  for (;;) {
    FulfilSequence seq;
    for (int i = 0; i < len; ++i) seq.tiers.push_back(subsets[pick[i]]);
    out.push_back(seq);
    int k = len - 1;
    while (k >= 0 && pick[k] + 1 == (int)subsets.size()) pick[k--] = 0;
    if (k < 0) break;
    ++pick[k];
  }
  return out;
}

// Deterministic sample of NNF formulas over corpus_signature with bounded
// quantifier depth. Closed formulas only.
inline std::vector<FormulaPtr> sample_nnf_sentences(unsigned seed, int count,
                                                    int max_qdepth,
                                                    bool with_function = true) {
  std::mt19937 rng(seed);
  std::vector<FormulaPtr> out;
  std::vector<std::string> varpool = {"x", "y", "z", "u"};
  std::function<FormulaPtr(int, int, int)> gen = [&](int depth, int qleft,
                                                     int scope) -> FormulaPtr {
    auto literal = [&]() -> FormulaPtr {
      if (scope == 0)  // no variables in scope; close with a quantifier
        return (rng() % 2 ? Formula::forall : Formula::exists)(
            varpool[0], Formula::atom("P", {Term::var(varpool[0])}));
      TermPtr t = Term::var(varpool[rng() % scope]);
      if (with_function && rng() % 3 == 0) t = Term::app("f", {t});
      FormulaPtr a = rng() % 2
                         ? Formula::atom("P", {t})
                         : Formula::atom("R", {t, Term::var(varpool[rng() % scope])});
      return rng() % 2 ? a : Formula::lnot(a);
    };
    std::vector<int> opts;
    if (scope > 0) opts.push_back(0);
    if (depth > 0) { opts.push_back(1); opts.push_back(2); }
    if (depth > 0 && qleft > 0 && scope < (int)varpool.size()) {
      opts.push_back(3);
      opts.push_back(3);
    }
    if (opts.empty()) return literal();
    switch (opts[rng() % opts.size()]) {
      case 1:
        return Formula::land(gen(depth - 1, qleft, scope),
                             gen(depth - 1, qleft, scope));
      case 2:
        return Formula::lor(gen(depth - 1, qleft, scope),
                            gen(depth - 1, qleft, scope));
      case 3: {
        FormulaPtr body = gen(depth - 1, qleft - 1, scope + 1);
        return (rng() % 2 ? Formula::forall : Formula::exists)(varpool[scope], body);
      }
      default:
        return literal();
    }
  };
  int guard = 0;
  while ((int)out.size() < count && ++guard < 100000) {
    FormulaPtr f = gen(3 + (int)(rng() % 2), max_qdepth, 0);
    if (is_sentence(f) && quantifier_depth(f) <= max_qdepth) out.push_back(f);
  }
  return out;
}

// ---------- Independent direct-expansion oracle ----------
//
// Builds the bounded expansion of (f)^sigma_i as an explicit ground and/or
// tree over literal leaves, following the textbook unfolding: existentials
// become disjunctions over the next tier, universals become conjunctions over
// all later tiers. NNF input only. Shares nothing with the clause evaluator.

struct GroundExpr {
  enum Kind { Lit, Conj, Disj } kind;
  FormulaPtr lit;
  Valuation val;
  std::vector<GroundExpr> kids;
};

inline GroundExpr expand_oracle(const FulfilSequence &seq, const FormulaPtr &f,
                                const Valuation &v, int i) {
  switch (f->kind) {
    case FKind::Atom:
      return {GroundExpr::Lit, f, v, {}};
    case FKind::Not:
      if (f->a->kind != FKind::Atom) throw InputError("oracle expects NNF");
      return {GroundExpr::Lit, f, v, {}};
    case FKind::And: {
      GroundExpr g{GroundExpr::Conj, nullptr, {}, {}};
      g.kids.push_back(expand_oracle(seq, f->a, v, i));
      g.kids.push_back(expand_oracle(seq, f->b, v, i));
      return g;
    }
    case FKind::Or: {
      GroundExpr g{GroundExpr::Disj, nullptr, {}, {}};
      g.kids.push_back(expand_oracle(seq, f->a, v, i));
      g.kids.push_back(expand_oracle(seq, f->b, v, i));
      return g;
    }
    case FKind::Implies:
      throw InputError("oracle expects NNF");
    case FKind::Exists: {
      GroundExpr g{GroundExpr::Disj, nullptr, {}, {}};
      for (ElemId e : seq.tiers[i + 1]) {
        Valuation w = v;
        w[f->name] = e;
        g.kids.push_back(expand_oracle(seq, f->a, w, i));
      }
      return g;
    }
    case FKind::Forall: {
      GroundExpr g{GroundExpr::Conj, nullptr, {}, {}};
      for (int j = i; j + 1 < seq.size(); ++j)
        for (ElemId e : seq.tiers[j]) {
          Valuation w = v;
          w[f->name] = e;
          g.kids.push_back(expand_oracle(seq, f->a, w, j));
        }
      return g;
    }
  }
  throw InputError("oracle: bad formula");
}

inline bool eval_ground(const FiniteStructure &s, const GroundExpr &g) {
  switch (g.kind) {
    case GroundExpr::Lit:
      return eval_tarski(s, g.lit, g.val);
    case GroundExpr::Conj:
      for (auto &k : g.kids)
        if (!eval_ground(s, k)) return false;
      return true;
    case GroundExpr::Disj:
      for (auto &k : g.kids)
        if (eval_ground(s, k)) return true;
      return false;
  }
  return false;
}

inline bool oracle_fulfil_at(const FiniteStructure &s, const FulfilSequence &seq,
                             const FormulaPtr &f_nnf, const Valuation &v, int i) {
  return eval_ground(s, expand_oracle(seq, f_nnf, v, i));
}

}  // namespace fwtest
