#include "fw/fulfil.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

namespace fw {

// ---------- Sequence plumbing ----------

FulfilSequence sequence_from_json(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw InputError(std::string("bad sequence JSON: ") + e.what());
  }
  FulfilSequence seq;
  const nlohmann::json *tiers = &j;
  if (j.is_object()) {
    if (j.contains("kind") && j["kind"] == "initial-segment")
      seq.kind = FulfilSequence::InitialSegment;
    if (!j.contains("tiers")) throw InputError("sequence JSON missing 'tiers'");
    tiers = &j["tiers"];
  }
  for (auto &tier : *tiers) {
    std::vector<ElemId> t;
    for (auto &e : tier) t.push_back(e.get<ElemId>());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    seq.tiers.push_back(std::move(t));
  }
  if (seq.tiers.empty()) throw InputError("sequence must have at least one tier");
  return seq;
}

std::string sequence_to_json(const FulfilSequence &seq) {
  nlohmann::json tiers = nlohmann::json::array();
  for (auto &t : seq.tiers) tiers.push_back(t);
  if (seq.kind == FulfilSequence::InitialSegment) {
    nlohmann::json j;
    j["kind"] = "initial-segment";
    j["tiers"] = tiers;
    return j.dump();
  }
  return tiers.dump();
}

static void check_tiers_in_domain(const FiniteStructure &s, const FulfilSequence &seq) {
  if (seq.tiers.empty()) throw InputError("empty sequence");
  for (auto &tier : seq.tiers) {
    if (tier.empty()) throw InputError("empty tier in sequence");
    for (ElemId e : tier)
      if (!s.in_domain(e)) throw InputError("sequence element outside domain");
  }
}

static bool subset_of(const std::vector<ElemId> &a, const std::vector<ElemId> &b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

static bool contains(const std::vector<ElemId> &t, ElemId e) {
  return std::binary_search(t.begin(), t.end(), e);
}

bool check_increasing_closed(const FiniteStructure &s, const FulfilSequence &seq) {
  check_tiers_in_domain(s, seq);
  for (auto &[name, e] : s.constants) {
    (void)name;
    if (!contains(seq.tiers[0], e)) return false;
  }
  for (int i = 0; i + 1 < seq.size(); ++i) {
    if (!subset_of(seq.tiers[i], seq.tiers[i + 1])) return false;
    for (auto &[f, ar] : s.sig.functions) {
      Tuple t(ar);
      std::function<bool(int)> rec = [&](int k) -> bool {
        if (k == ar) return contains(seq.tiers[i + 1], s.apply_function(f, t));
        for (ElemId e : seq.tiers[i]) {
          t[k] = e;
          if (!rec(k + 1)) return false;
        }
        return true;
      };
      if (!rec(0)) return false;
    }
  }
  if (seq.kind == FulfilSequence::InitialSegment) {
    // each tier downward closed under the integer order
    if (s.int_values.empty()) throw InputError("initial-segment sequence needs an integer sort");
    for (auto &tier : seq.tiers)
      for (ElemId e : tier) {
        auto it = s.int_values.find(e);
        if (it == s.int_values.end())
          throw InputError("initial-segment tier element has no integer value");
        for (auto &[d, dv] : s.int_values)
          if (dv < it->second && !contains(tier, d)) return false;
      }
  }
  return true;
}

// ---------- Clause-by-clause evaluation ----------

namespace {

struct FulfilEval {
  const FiniteStructure &s;
  const FulfilSequence &seq;
  FulfilVariant variant;

  int top() const { return seq.top_index(); }
  // last index usable for clause recursion
  int max_index() const { return variant == FulfilVariant::V1 ? top() - 1 : top(); }

  void check_index(int i) const {
    if (i < 0 || i > max_index())
      throw InputError("fulfilment index out of range for the variant");
  }

  bool tarski_literal(const FormulaPtr &f, const Valuation &v) const {
    return eval_tarski(s, f, v);
  }

  static FormulaPtr negate_leaf(const FormulaPtr &f) {
    if (f->kind == FKind::Not) return f->a;
    return Formula::lnot(f);
  }

  bool here(const FormulaPtr &f, const Valuation &v, int i) {
    switch (f->kind) {
      case FKind::Atom:
        return tarski_literal(f, v);
      case FKind::Not: {
        const FormulaPtr &c = f->a;
        if (c->kind == FKind::Atom) return tarski_literal(f, v);
        if (c->kind == FKind::Forall)
          return here(Formula::exists(c->name, Formula::lnot(c->a)), v, i);
        if (c->kind == FKind::Exists)
          return here(Formula::forall(c->name, Formula::lnot(c->a)), v, i);
        return boolean(f, v, i, true);
      }
      case FKind::And:
      case FKind::Or:
      case FKind::Implies:
        return boolean(f, v, i, true);
      case FKind::Exists: {
        if (variant == FulfilVariant::V2) {
          if (i == top()) return true;  // no successor: true
          Valuation w = v;
          for (ElemId e : seq.tiers[i + 1]) {
            w[f->name] = e;
            if (here(f->a, w, i + 1)) return true;
          }
          return false;
        }
        Valuation w = v;
        for (ElemId e : seq.tiers[i + 1]) {
          w[f->name] = e;
          if (here(f->a, w, i)) return true;
        }
        return false;
      }
      case FKind::Forall: {
        Valuation w = v;
        for (int j = i; j <= max_index(); ++j)
          for (ElemId e : seq.tiers[j]) {
            w[f->name] = e;
            if (!here(f->a, w, j)) return false;
          }
        return true;
      }
    }
    return false;
  }

  // Clause (v): positive Boolean atoms become psi_i, negative ones
  // ~(~psi)_i; the skeleton evaluates classically.
  bool boolean(const FormulaPtr &f, const Valuation &v, int i, bool pos) {
    switch (f->kind) {
      case FKind::Not:
        return !boolean(f->a, v, i, !pos);
      case FKind::And:
        return boolean(f->a, v, i, pos) && boolean(f->b, v, i, pos);
      case FKind::Or:
        return boolean(f->a, v, i, pos) || boolean(f->b, v, i, pos);
      case FKind::Implies:
        return !boolean(f->a, v, i, !pos) || boolean(f->b, v, i, pos);
      case FKind::Atom:
      case FKind::Forall:
      case FKind::Exists:
        if (pos) return here(f, v, i);
        return !here(negate_leaf(f), v, i);
    }
    return false;
  }
};

}  // namespace

bool eval_fulfil_at(const FiniteStructure &s, const FulfilSequence &seq,
                    const FormulaPtr &f, const Valuation &v, int i,
                    FulfilVariant variant) {
  check_tiers_in_domain(s, seq);
  FulfilEval ev{s, seq, variant};
  ev.check_index(i);
  return ev.here(f, v, i);
}

bool fulfils(const FiniteStructure &s, const FulfilSequence &seq,
             const FormulaPtr &sentence, FulfilVariant variant, const Valuation &v) {
  if (!check_increasing_closed(s, seq)) return false;
  if (seq.size() == 1 && variant == FulfilVariant::V1)
    return true;  // a closed sequence of length one vacuously fulfils anything
  FulfilEval ev{s, seq, variant};
  return ev.here(sentence, v, 0);
}

// ---------- Failure diagnostics ----------

namespace {

struct Explainer {
  const FiniteStructure &s;
  const FulfilSequence &seq;
  FulfilVariant variant;
  std::string path;

  int top() const { return seq.top_index(); }
  int max_index() const { return variant == FulfilVariant::V1 ? top() - 1 : top(); }

  bool fail(const FormulaPtr &f, const Valuation &v, int i) {
    FulfilEval ev{s, seq, variant};
    if (ev.here(f, v, i)) return false;
    describe(f, v, i);
    return true;
  }

  void describe(const FormulaPtr &f, const Valuation &v, int i) {
    path += "(" + print_formula(f) + ")@" + std::to_string(i);
    FulfilEval ev{s, seq, variant};
    switch (f->kind) {
      case FKind::Atom:
        path += " -> atom false";
        return;
      case FKind::Not: {
        const FormulaPtr &c = f->a;
        if (c->kind == FKind::Atom) {
          path += " -> negated atom false";
          return;
        }
        if (c->kind == FKind::Forall) {
          path += " -> ";
          describe(Formula::exists(c->name, Formula::lnot(c->a)), v, i);
          return;
        }
        if (c->kind == FKind::Exists) {
          path += " -> ";
          describe(Formula::forall(c->name, Formula::lnot(c->a)), v, i);
          return;
        }
        path += " -> boolean clause false";
        return;
      }
      case FKind::And: {
        path += " -> ";
        if (!ev.here(f->a, v, i)) describe(f->a, v, i);
        else describe(f->b, v, i);
        return;
      }
      case FKind::Or:
        path += " -> both disjuncts false; first: ";
        describe(f->a, v, i);
        return;
      case FKind::Implies:
        path += " -> antecedent holds, consequent fails: ";
        describe(f->b, v, i);
        return;
      case FKind::Exists: {
        if (variant == FulfilVariant::V2 && i == top()) return;  // cannot fail
        path += " -> no witness in A_" + std::to_string(i + 1);
        return;
      }
      case FKind::Forall: {
        Valuation w = v;
        for (int j = i; j <= max_index(); ++j)
          for (ElemId e : seq.tiers[j]) {
            w[f->name] = e;
            int body_index = j;
            if (!ev.here(f->a, w, body_index)) {
              path += " -> j=" + std::to_string(j) + ", " + f->name + "=" +
                      std::to_string(e) + " -> ";
              describe(f->a, w, body_index);
              return;
            }
          }
        return;
      }
    }
  }
};

}  // namespace

std::optional<std::string> explain_failure(const FiniteStructure &s,
                                           const FulfilSequence &seq,
                                           const FormulaPtr &sentence,
                                           FulfilVariant variant, const Valuation &v) {
  if (!check_increasing_closed(s, seq))
    return "sequence is not increasing and closed";
  if (seq.size() == 1 && variant == FulfilVariant::V1) return std::nullopt;
  Explainer ex{s, seq, variant, ""};
  if (!ex.fail(sentence, v, 0)) return std::nullopt;
  return ex.path;
}

// ---------- Restriction, extraction ----------

FulfilSequence restrict_sequence(const FulfilSequence &seq, const std::vector<int> &J) {
  if (J.empty()) throw InputError("restriction index set is empty");
  for (size_t k = 0; k < J.size(); ++k) {
    if (J[k] < 0 || J[k] >= seq.size())
      throw InputError("restriction index out of range");
    if (k > 0 && J[k] <= J[k - 1])
      throw InputError("restriction indices must be strictly increasing");
  }
  FulfilSequence out;
  out.kind = seq.kind;
  for (int j : J) out.tiers.push_back(seq.tiers[j]);
  return out;
}

FiniteStructure extract_submodel(const FiniteStructure &s, const FulfilSequence &seq) {
  check_tiers_in_domain(s, seq);
  std::vector<ElemId> uni;
  for (auto &t : seq.tiers) uni.insert(uni.end(), t.begin(), t.end());
  std::sort(uni.begin(), uni.end());
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  if (uni.empty()) throw InputError("union of tiers is empty");
  return restrict_structure(s, uni);
}

bool is_saturated(const FulfilSequence &seq) {
  return seq.size() >= 2 && seq.tiers[seq.size() - 1] == seq.tiers[seq.size() - 2];
}

// ---------- Skolem-style construction ----------

namespace {

// Rename bound variables apart so each quantifier binds a distinct name.
FormulaPtr rename_apart(const FormulaPtr &f, int &counter) {
  switch (f->kind) {
    case FKind::Atom:
      return f;
    case FKind::Not:
      return Formula::lnot(rename_apart(f->a, counter));
    case FKind::And:
      return Formula::land(rename_apart(f->a, counter), rename_apart(f->b, counter));
    case FKind::Or:
      return Formula::lor(rename_apart(f->a, counter), rename_apart(f->b, counter));
    case FKind::Implies:
      return Formula::implies(rename_apart(f->a, counter), rename_apart(f->b, counter));
    case FKind::Forall:
    case FKind::Exists: {
      std::string fresh = "v" + std::to_string(counter++) + "_";
      FormulaPtr body = substitute(f->a, f->name, Term::var(fresh));
      body = rename_apart(body, counter);
      return f->kind == FKind::Forall ? Formula::forall(fresh, body)
                                      : Formula::exists(fresh, body);
    }
  }
  return f;
}

}  // namespace

FulfilSequence build_fulfilling_sequence(const FiniteStructure &s,
                                         const FormulaPtr &sentence, int n,
                                         const std::vector<ElemId> &seed) {
  if (n < 1) throw InputError("sequence length must be >= 1");
  std::vector<ElemId> a0 = seed;
  std::sort(a0.begin(), a0.end());
  a0.erase(std::unique(a0.begin(), a0.end()), a0.end());
  if (a0.empty()) throw InputError("seed must be non-empty");
  for (ElemId e : a0)
    if (!s.in_domain(e)) throw InputError("seed element outside domain");
  for (auto &[name, e] : s.constants)
    if (!contains(a0, e))
      throw InputError("seed is missing constant " + name);
  if (!eval_tarski(s, sentence, {}))
    throw InputError("sentence is false in the structure; no satisfaction functions exist");

  int counter = 0;
  FormulaPtr nnf = rename_apart(to_nnf(sentence), counter);

  // Satisfaction functions, one per existential occurrence. Arguments are the
  // universal variables in scope; witnesses follow the least-element rule and
  // cohere with the outer occurrences' choices.
  struct Occ {
    std::vector<std::string> univ;
    std::map<Tuple, ElemId> table;
  };
  std::vector<Occ> occs;
  std::function<void(const FormulaPtr &, const std::vector<std::string> &,
                     const std::map<Tuple, Valuation> &)>
      build = [&](const FormulaPtr &f, const std::vector<std::string> &univ,
                  const std::map<Tuple, Valuation> &choice) {
        // choice: universal tuple -> valuation of outer-bound variables
        switch (f->kind) {
          case FKind::Atom:
          case FKind::Not:
            return;
          case FKind::And:
          case FKind::Or:
            build(f->a, univ, choice);
            build(f->b, univ, choice);
            return;
          case FKind::Implies:
            throw InputError("expected NNF");
          case FKind::Forall: {
            std::vector<std::string> u2 = univ;
            u2.push_back(f->name);
            std::map<Tuple, Valuation> c2;
            for (auto &[key, val] : choice)
              for (ElemId e : s.domain) {
                Tuple k2 = key;
                k2.push_back(e);
                Valuation v2 = val;
                v2[f->name] = e;
                c2[k2] = v2;
              }
            build(f->a, u2, c2);
            return;
          }
          case FKind::Exists: {
            Occ occ;
            occ.univ = univ;
            std::map<Tuple, Valuation> c2;
            for (auto &[key, val] : choice) {
              Valuation w = val;
              ElemId pick = s.domain.front();
              for (ElemId e : s.domain) {
                w[f->name] = e;
                if (eval_tarski(s, f->a, w)) {
                  pick = e;
                  break;
                }
              }
              occ.table[key] = pick;
              Valuation v2 = val;
              v2[f->name] = pick;
              c2[key] = v2;
            }
            occs.push_back(occ);
            build(f->a, univ, c2);
            return;
          }
        }
      };
  std::map<Tuple, Valuation> root;
  root[Tuple{}] = Valuation{};
  build(nnf, {}, root);

  FulfilSequence seq;
  seq.tiers.push_back(a0);
  for (int i = 1; i < n; ++i) {
    std::vector<ElemId> next = seq.tiers.back();
    auto &prev = seq.tiers[i - 1];
    for (auto &[fname, ar] : s.sig.functions) {
      Tuple t(ar);
      std::function<void(int)> rec = [&](int k) {
        if (k == ar) {
          next.push_back(s.apply_function(fname, t));
          return;
        }
        for (ElemId e : prev) {
          t[k] = e;
          rec(k + 1);
        }
      };
      rec(0);
    }
    for (auto &occ : occs) {
      Tuple t(occ.univ.size());
      std::function<void(size_t)> rec = [&](size_t k) {
        if (k == occ.univ.size()) {
          auto it = occ.table.find(t);
          if (it != occ.table.end()) next.push_back(it->second);
          return;
        }
        for (ElemId e : prev) {
          t[k] = e;
          rec(k + 1);
        }
      };
      rec(0);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    seq.tiers.push_back(std::move(next));
  }
  return seq;
}

FulfilSequence v1_from_v2(const FulfilSequence &seq, int k) {
  if (k <= 0) throw InputError("existential count must be >= 1 for thinning");
  std::vector<int> J;
  for (int i = 0; i * k <= seq.top_index(); ++i) J.push_back(i * k);
  if (J.empty()) throw InputError("thinning produced an empty index set");
  return restrict_sequence(seq, J);
}

// ---------- Game evaluator ----------

namespace {

struct GameSolver {
  const FiniteStructure &s;
  const FulfilSequence &seq;
  std::vector<GameMove> line;
  bool record;

  int lambda() const { return seq.lambda_size(); }

  bool solve(const FormulaPtr &f, Valuation &v, int i) {
    switch (f->kind) {
      case FKind::Atom:
        return eval_tarski(s, f, v);
      case FKind::Not:
        if (f->a->kind != FKind::Atom)
          throw InputError("game evaluator expects NNF");
        return eval_tarski(s, f, v);
      case FKind::And: {
        // A-player picks the falsified conjunct if any
        if (!solve(f->a, v, i)) {
          if (record) line.push_back({'A', print_formula(f) + "@" + std::to_string(i), "left"});
          return false;
        }
        bool r = solve(f->b, v, i);
        if (record)
          line.push_back({'A', print_formula(f) + "@" + std::to_string(i),
                          r ? "left" : "right"});
        return r;
      }
      case FKind::Or: {
        if (solve(f->a, v, i)) {
          if (record) line.push_back({'E', print_formula(f) + "@" + std::to_string(i), "left"});
          return true;
        }
        bool r = solve(f->b, v, i);
        if (record)
          line.push_back({'E', print_formula(f) + "@" + std::to_string(i),
                          r ? "right" : "left"});
        return r;
      }
      case FKind::Implies:
        throw InputError("game evaluator expects NNF");
      case FKind::Exists: {
        if (i + 1 > seq.top_index()) return false;
        for (ElemId e : seq.tiers[i + 1]) {
          v[f->name] = e;
          bool r = solve(f->a, v, i);
          if (r) {
            if (record)
              line.push_back({'E', print_formula(f) + "@" + std::to_string(i),
                              f->name + "=" + std::to_string(e)});
            v.erase(f->name);
            return true;
          }
        }
        v.erase(f->name);
        if (record)
          line.push_back({'E', print_formula(f) + "@" + std::to_string(i), "stuck"});
        return false;
      }
      case FKind::Forall: {
        for (int j = i; j < lambda(); ++j)
          for (ElemId e : seq.tiers[j]) {
            v[f->name] = e;
            bool r = solve(f->a, v, j);
            if (!r) {
              if (record)
                line.push_back({'A', print_formula(f) + "@" + std::to_string(i),
                                "j=" + std::to_string(j) + "," + f->name + "=" +
                                    std::to_string(e)});
              v.erase(f->name);
              return false;
            }
          }
        v.erase(f->name);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

bool game_eval(const FiniteStructure &s, const FulfilSequence &seq,
               const FormulaPtr &sentence_nnf) {
  if (!is_nnf(sentence_nnf)) throw InputError("game evaluator expects NNF");
  check_tiers_in_domain(s, seq);
  if (seq.size() == 1) return true;  // empty game, vacuous
  GameSolver g{s, seq, {}, false};
  Valuation v;
  return g.solve(sentence_nnf, v, 0);
}

std::pair<bool, std::vector<GameMove>> game_eval_trace(const FiniteStructure &s,
                                                       const FulfilSequence &seq,
                                                       const FormulaPtr &sentence_nnf) {
  if (!is_nnf(sentence_nnf)) throw InputError("game evaluator expects NNF");
  check_tiers_in_domain(s, seq);
  if (seq.size() == 1) return {true, {}};
  GameSolver g{s, seq, {}, true};
  Valuation v;
  bool r = g.solve(sentence_nnf, v, 0);
  std::reverse(g.line.begin(), g.line.end());
  return {r, g.line};
}

// ---------- No-counterexample witnesses ----------

std::pair<ElemId, ElemId> no_counterexample(const FiniteStructure &s,
                                            const FormulaPtr &sentence,
                                            const std::map<Tuple, ElemId> &f,
                                            const std::map<Tuple, ElemId> &g) {
  // shape: Ex x Ay y Ex u Av v psi, psi quantifier-free
  const Formula *p = sentence.get();
  if (p->kind != FKind::Exists) throw InputError("expected Ex Ay Eu Av shape");
  std::string vx = p->name;
  p = p->a.get();
  if (p->kind != FKind::Forall) throw InputError("expected Ex Ay Eu Av shape");
  std::string vy = p->name;
  p = p->a.get();
  if (p->kind != FKind::Exists) throw InputError("expected Ex Ay Eu Av shape");
  std::string vu = p->name;
  p = p->a.get();
  if (p->kind != FKind::Forall) throw InputError("expected Ex Ay Eu Av shape");
  std::string vv = p->name;
  FormulaPtr psi = p->a;
  if (rank(psi) != 0) throw InputError("matrix must be quantifier-free");
  if (!eval_tarski(s, sentence, {}))
    throw InputError("sentence is false in the structure");
  for (ElemId e : s.domain) {
    if (!f.count({e})) throw InputError("f is not total on the domain");
    for (ElemId d : s.domain)
      if (!g.count({e, d})) throw InputError("g is not total on the domain");
  }

  // Build a 5-fulfilling chain (6 tiers) closed under f and g as well.
  std::vector<ElemId> seed;
  for (auto &[n, e] : s.constants) {
    (void)n;
    seed.push_back(e);
  }
  seed.push_back(s.domain.front());
  FiniteStructure ext = s;
  ext.sig.functions.push_back({"ncf_", 1});
  ext.sig.functions.push_back({"ncg_", 2});
  ext.functions["ncf_"] = f;
  ext.functions["ncg_"] = g;
  FulfilSequence seq = build_fulfilling_sequence(ext, sentence, 6, seed);

  const auto &s1 = seq.tiers[1];
  const auto &s3 = seq.tiers[3];
  for (ElemId x : s1)
    for (ElemId u : s3) {
      Valuation v;
      v[vx] = x;
      v[vy] = f.at({x});
      v[vu] = u;
      v[vv] = g.at({x, u});
      if (eval_tarski(s, psi, v)) return {x, u};
    }
  throw InputError("no witness pair found in sigma_1 x sigma_3");
}

}  // namespace fw
