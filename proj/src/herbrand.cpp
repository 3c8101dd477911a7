#include "fw/herbrand.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

namespace fw {

int StarSequence::tier_of(ElemId e) const {
  for (int i = 0; i < (int)tier_sizes.size(); ++i)
    if (e < tier_sizes[i]) return i;
  throw InputError("element outside the star universe");
}

std::string star_to_json(const Signature &sig, const StarSequence &seq) {
  nlohmann::json j;
  j["tiers"] = seq.tier_sizes;
  nlohmann::json consts = nlohmann::json::object();
  for (auto &[n, e] : seq.constants) consts[n] = e;
  j["constants"] = consts;
  nlohmann::json funcs = nlohmann::json::object();
  for (auto &[fname, ar] : sig.functions) {
    (void)ar;
    funcs[fname] = nlohmann::json::array();
  }
  for (auto &[key, val] : seq.func_cells) {
    nlohmann::json row = nlohmann::json::array();
    for (ElemId a : key.second) row.push_back(a);
    row.push_back(val);
    funcs[key.first].push_back(row);
  }
  j["functions"] = funcs;
  nlohmann::json preds = nlohmann::json::object();
  for (auto &[pname, ar] : sig.predicates) {
    (void)ar;
    preds[pname] = nlohmann::json::array();
  }
  for (auto &[key, val] : seq.pred_cells)
    if (val) preds[key.first].push_back(key.second);
  j["predicates"] = preds;
  if (!seq.int_values.empty()) {
    nlohmann::json ints = nlohmann::json::object();
    for (auto &[e, v] : seq.int_values) ints[std::to_string(e)] = v;
    j["integers"] = ints;
  }
  return j.dump();
}

// ---------- the cardinality bound ----------

namespace {

constexpr long long kSat = 1'000'000'000;

long long sat_mul(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSat / b) return kSat;
  return a * b;
}

long long sat_pow(long long a, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r = sat_mul(r, a);
  return r;
}

long long sat_add(long long a, long long b) { return std::min(kSat, a + b); }

void existential_stats(const FormulaPtr &nnf, int &count, int &max_free) {
  switch (nnf->kind) {
    case FKind::Atom:
    case FKind::Not:
      return;
    case FKind::And:
    case FKind::Or:
      existential_stats(nnf->a, count, max_free);
      existential_stats(nnf->b, count, max_free);
      return;
    case FKind::Implies:
      throw InputError("expected NNF");
    case FKind::Forall:
      existential_stats(nnf->a, count, max_free);
      return;
    case FKind::Exists:
      ++count;
      max_free = std::max(max_free, (int)free_vars(nnf).size());
      existential_stats(nnf->a, count, max_free);
      return;
  }
}

}  // namespace

long long cardinality_bound(const Signature &sig, const FormulaPtr &sentence, int n) {
  if (n < 0) throw InputError("bound index must be >= 0");
  FormulaPtr nnf = to_nnf(sentence);
  int q_count = 0, v_max = 0;
  existential_stats(nnf, q_count, v_max);
  long long b = (long long)sig.constants.size() + 1;
  for (int i = 0; i < n; ++i) {
    long long grow = sat_mul(q_count, sat_pow(b, v_max));
    for (auto &[fname, ar] : sig.functions) {
      (void)fname;
      grow = sat_add(grow, sat_pow(b, ar));
    }
    b = sat_add(b, grow);
  }
  return b;
}

// ---------- the star search ----------

namespace {

struct StarSolver {
  const Signature &sig;
  int n;  // tiers
  std::vector<int> sizes;
  std::map<std::string, ElemId> constants;
  std::map<std::pair<std::string, Tuple>, ElemId> func_cells;
  std::map<std::pair<std::string, Tuple>, bool> pred_cells;
  long long node_limit;
  long long &nodes;

  struct Goal {
    FormulaPtr f;
    Valuation v;
    int index;
  };

  enum class TrailKind { Func, Pred };
  struct TrailEntry {
    TrailKind kind;
    std::pair<std::string, Tuple> key;
  };
  std::vector<TrailEntry> trail;

  int tier_of(ElemId e) const {
    for (int i = 0; i < n; ++i)
      if (e < sizes[i]) return i;
    throw InputError("element outside universe");
  }

  void undo_to(size_t mark) {
    while (trail.size() > mark) {
      auto &te = trail.back();
      if (te.kind == TrailKind::Func)
        func_cells.erase(te.key);
      else
        pred_cells.erase(te.key);
      trail.pop_back();
    }
  }

  void bump() {
    if (++nodes > node_limit) throw LimitError("star search node limit exceeded");
  }

  // evaluates the terms of the literal goal; branches on undefined function
  // cells, then forces the atom cell and continues with the rest
  bool solve_literal(const FormulaPtr &lit, const Valuation &v, std::vector<Goal> &rest) {
    const FormulaPtr &atom = lit->kind == FKind::Not ? lit->a : lit;
    bool want = lit->kind != FKind::Not;

    // locate the first undefined function cell in a left-to-right walk
    struct Pending {
      std::string fname;
      Tuple args;
    };
    std::optional<Pending> pending;
    std::function<std::optional<ElemId>(const TermPtr &)> ev =
        [&](const TermPtr &t) -> std::optional<ElemId> {
      if (pending) return std::nullopt;
      switch (t->kind) {
        case Term::Var: {
          auto it = v.find(t->name);
          if (it == v.end()) throw InputError("valuation missing " + t->name);
          return it->second;
        }
        case Term::Const: {
          auto it = constants.find(t->name);
          if (it == constants.end()) throw InputError("constant missing " + t->name);
          return it->second;
        }
        case Term::App: {
          Tuple args;
          for (auto &a : t->args) {
            auto r = ev(a);
            if (!r) return std::nullopt;
            args.push_back(*r);
          }
          auto it = func_cells.find({t->name, args});
          if (it != func_cells.end()) return it->second;
          pending = Pending{t->name, args};
          return std::nullopt;
        }
      }
      return std::nullopt;
    };

    Tuple elems;
    bool complete = true;
    for (auto &t : atom->terms) {
      auto r = ev(t);
      if (!r) {
        complete = false;
        break;
      }
      elems.push_back(*r);
    }
    if (!complete) {
      if (!pending) throw InputError("term evaluation stalled");
      // closure: the value lives one tier above the arguments
      int t = 0;
      for (ElemId a : pending->args) t = std::max(t, tier_of(a));
      int hi = t + 1 < n ? sizes[t + 1] : sizes[n - 1];
      for (ElemId val = 0; val < hi; ++val) {
        size_t mark = trail.size();
        func_cells[{pending->fname, pending->args}] = val;
        trail.push_back({TrailKind::Func, {pending->fname, pending->args}});
        std::vector<Goal> again = rest;
        again.push_back({lit, v, 0});
        if (solve(again)) return true;
        undo_to(mark);
      }
      return false;
    }

    auto key = std::make_pair(atom->name, elems);
    auto it = pred_cells.find(key);
    if (it != pred_cells.end()) {
      if (it->second != want) return false;
      return solve(rest);
    }
    size_t mark = trail.size();
    pred_cells[key] = want;
    trail.push_back({TrailKind::Pred, key});
    if (solve(rest)) return true;
    undo_to(mark);
    return false;
  }

  bool solve(std::vector<Goal> goals) {
    bump();
    if (goals.empty()) return true;
    Goal g = goals.back();
    goals.pop_back();
    switch (g.f->kind) {
      case FKind::Atom:
        return solve_literal(g.f, g.v, goals);
      case FKind::Not:
        if (g.f->a->kind != FKind::Atom) throw InputError("expected NNF");
        return solve_literal(g.f, g.v, goals);
      case FKind::Implies:
        throw InputError("expected NNF");
      case FKind::And: {
        goals.push_back({g.f->b, g.v, g.index});
        goals.push_back({g.f->a, g.v, g.index});
        return solve(goals);
      }
      case FKind::Or: {
        size_t mark = trail.size();
        {
          std::vector<Goal> left = goals;
          left.push_back({g.f->a, g.v, g.index});
          if (solve(left)) return true;
        }
        undo_to(mark);
        goals.push_back({g.f->b, g.v, g.index});
        if (solve(goals)) return true;
        undo_to(mark);
        return false;
      }
      case FKind::Exists: {
        size_t mark = trail.size();
        for (ElemId x = 0; x < sizes[g.index + 1]; ++x) {
          std::vector<Goal> sub = goals;
          Valuation w = g.v;
          w[g.f->name] = x;
          sub.push_back({g.f->a, w, g.index});
          if (solve(sub)) return true;
          undo_to(mark);
        }
        return false;
      }
      case FKind::Forall: {
        for (int j = n - 2; j >= g.index; --j)
          for (ElemId x = sizes[j] - 1; x >= 0; --x) {
            Valuation w = g.v;
            w[g.f->name] = x;
            goals.push_back({g.f->a, w, j});
          }
        return solve(goals);
      }
    }
    return false;
  }
};

// restricted-growth enumeration of constant identifications
void constant_patterns(int count, std::vector<std::vector<int>> &out) {
  std::vector<int> cur(count, 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == count) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= used; ++v) {
      cur[i] = v;
      rec(i + 1, std::max(used, v + 1));
    }
  };
  if (count == 0)
    out.push_back({});
  else
    rec(0, 0);
}

}  // namespace

std::optional<StarSequence> star_search(const Signature &sig,
                                        const FormulaPtr &sentence, int n,
                                        long long node_limit, StarStats *stats) {
  if (n < 1) throw InputError("star search needs at least one tier");
  check_well_formed(sig, sentence);
  if (!is_sentence(sentence)) throw InputError("star search expects a sentence");
  FormulaPtr nnf = to_nnf(sentence);

  std::vector<long long> bound(n);
  for (int i = 0; i < n; ++i) bound[i] = cardinality_bound(sig, sentence, i);

  std::vector<std::vector<int>> patterns;
  constant_patterns((int)sig.constants.size(), patterns);

  long long nodes = 0;
  long long size_vectors = 0;

  // enumerate size vectors ascending, smallest first
  std::vector<int> sizes(n, 0);
  std::function<std::optional<StarSequence>(int)> try_sizes =
      [&](int i) -> std::optional<StarSequence> {
    if (i == n) {
      for (auto &pat : patterns) {
        int distinct = pat.empty() ? 0 : *std::max_element(pat.begin(), pat.end()) + 1;
        if (distinct > sizes[0]) continue;
        ++size_vectors;
        StarSolver solver{sig, n, sizes, {}, {}, {}, node_limit, nodes};
        for (size_t c = 0; c < sig.constants.size(); ++c)
          solver.constants[sig.constants[c]] = pat[c];
        std::vector<StarSolver::Goal> goals;
        goals.push_back({nnf, {}, 0});
        if (solver.solve(goals)) {
          StarSequence seq;
          seq.tier_sizes = sizes;
          seq.constants = solver.constants;
          seq.func_cells = solver.func_cells;
          seq.pred_cells = solver.pred_cells;
          if (stats) {
            stats->nodes = nodes;
            stats->size_vectors = size_vectors;
          }
          return seq;
        }
      }
      return std::nullopt;
    }
    int lo = i == 0 ? 1 : sizes[i - 1];
    long long hi = bound[i];
    for (int k = lo; k <= hi; ++k) {
      sizes[i] = k;
      if (auto r = try_sizes(i + 1)) return r;
    }
    return std::nullopt;
  };
  auto result = try_sizes(0);
  if (stats) {
    stats->nodes = nodes;
    stats->size_vectors = size_vectors;
  }
  return result;
}

// ---------- refutation ----------

RefutationOutcome refute(const Signature &sig, const FormulaPtr &sentence, int max_n,
                         long long node_limit) {
  if (max_n < 2) throw InputError("refutation depth cap must be >= 2");
  nlohmann::json cert = nlohmann::json::array();
  for (int n = 2; n <= max_n; ++n) {
    StarStats stats;
    auto witness = star_search(sig, sentence, n, node_limit, &stats);
    nlohmann::json entry;
    entry["n"] = n;
    entry["size_vectors"] = stats.size_vectors;
    entry["nodes"] = stats.nodes;
    entry["tier_bound"] = cardinality_bound(sig, sentence, n - 1);
    cert.push_back(entry);
    if (!witness) {
      RefutationOutcome out;
      out.kind = RefutationOutcome::Refuted;
      out.n = n;
      nlohmann::json top;
      top["outcome"] = "refuted";
      top["depth"] = n;
      top["search"] = cert;
      out.certificate_json = top.dump(2);
      return out;
    }
    // stabilized witness: tiers stopped growing; totalize and check truth
    if (n >= 2 && witness->tier_sizes[n - 1] == witness->tier_sizes[n - 2]) {
      FiniteStructure model;
      model.sig = sig;
      for (int e = 0; e < witness->universe(); ++e) model.domain.push_back(e);
      model.constants = witness->constants;
      for (auto &[fname, ar] : sig.functions) {
        auto &table = model.functions[fname];
        Tuple t(ar);
        std::function<void(int)> fill = [&](int k) {
          if (k == ar) {
            auto it = witness->func_cells.find({fname, t});
            table[t] = it != witness->func_cells.end() ? it->second : 0;
            return;
          }
          for (ElemId e : model.domain) {
            t[k] = e;
            fill(k + 1);
          }
        };
        fill(0);
      }
      for (auto &[key, val] : witness->pred_cells)
        if (val) model.predicates[key.first][key.second] = true;
      for (auto &[pname, ar] : sig.predicates) {
        (void)ar;
        model.predicates.try_emplace(pname);
      }
      if (eval_tarski(model, sentence, {})) {
        RefutationOutcome out;
        out.kind = RefutationOutcome::SatStable;
        out.n = n;
        out.model = model;
        nlohmann::json top;
        top["outcome"] = "satisfiable";
        top["depth"] = n;
        top["search"] = cert;
        out.certificate_json = top.dump(2);
        return out;
      }
    }
  }
  RefutationOutcome out;
  out.kind = RefutationOutcome::Unknown;
  out.n = max_n;
  nlohmann::json top;
  top["outcome"] = "unknown";
  top["depth"] = max_n;
  top["search"] = cert;
  out.certificate_json = top.dump(2);
  return out;
}

// ---------- half-star evaluation ----------

namespace {

struct HalfStarEval {
  const Signature &sig;
  const StarSequence &seq;

  int top() const { return seq.tiers() - 1; }

  std::optional<std::int64_t> int_of(ElemId e) const {
    auto it = seq.int_values.find(e);
    if (it == seq.int_values.end()) return std::nullopt;
    return it->second;
  }

  std::optional<ElemId> elem_with_value(std::int64_t v) const {
    for (auto &[e, val] : seq.int_values)
      if (val == v) return e;
    return std::nullopt;
  }

  ElemId eval_term(const TermPtr &t, const Valuation &v) const {
    switch (t->kind) {
      case Term::Var: {
        auto it = v.find(t->name);
        if (it == v.end()) throw InputError("valuation missing " + t->name);
        return it->second;
      }
      case Term::Const: {
        if (t->name == "i0" || t->name == "i1") {
          auto e = elem_with_value(t->name == "i0" ? 0 : 1);
          if (!e) throw InputError("integer constant has no carrier element");
          return *e;
        }
        auto it = seq.constants.find(t->name);
        if (it == seq.constants.end())
          throw InputError("constant missing " + t->name);
        return it->second;
      }
      case Term::App: {
        Tuple args;
        for (auto &a : t->args) args.push_back(eval_term(a, v));
        if (t->name == "iplus" || t->name == "itimes") {
          auto va = int_of(args[0]), vb = int_of(args[1]);
          if (!va || !vb)
            throw InputError("integer operation applied outside the integer sort");
          std::int64_t r = t->name == "iplus" ? *va + *vb : *va * *vb;
          auto cell = seq.func_cells.find({t->name, args});
          if (cell != seq.func_cells.end()) {
            auto rv = int_of(cell->second);
            if (!rv || *rv != r)
              throw InputError("standardness violation in the integer part");
            return cell->second;
          }
          auto e = elem_with_value(r);
          if (!e) throw InputError("integer result not present in the tiers");
          return *e;
        }
        auto cell = seq.func_cells.find({t->name, args});
        if (cell == seq.func_cells.end())
          throw InputError("function cell undefined where needed: " + t->name);
        return cell->second;
      }
    }
    throw InputError("bad term");
  }

  bool literal(const FormulaPtr &f, const Valuation &v) const {
    const FormulaPtr &atom = f->kind == FKind::Not ? f->a : f;
    Tuple args;
    for (auto &t : atom->terms) args.push_back(eval_term(t, v));
    bool val = false;
    auto it = seq.pred_cells.find({atom->name, args});
    if (it != seq.pred_cells.end()) val = it->second;
    return f->kind == FKind::Not ? !val : val;
  }

  static FormulaPtr negate_leaf(const FormulaPtr &f) {
    if (f->kind == FKind::Not) return f->a;
    return Formula::lnot(f);
  }

  bool here(const FormulaPtr &f, const Valuation &v, int i) const {
    switch (f->kind) {
      case FKind::Atom:
        return literal(f, v);
      case FKind::Not: {
        const FormulaPtr &c = f->a;
        if (c->kind == FKind::Atom) return literal(f, v);
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
        if (i + 1 > top()) return false;
        Valuation w = v;
        for (ElemId x = 0; x < seq.tier_sizes[i + 1]; ++x) {
          w[f->name] = x;
          if (here(f->a, w, i)) return true;
        }
        return false;
      }
      case FKind::Forall: {
        Valuation w = v;
        for (int j = i; j < top(); ++j)
          for (ElemId x = 0; x < seq.tier_sizes[j]; ++x) {
            w[f->name] = x;
            if (!here(f->a, w, j)) return false;
          }
        return true;
      }
    }
    return false;
  }

  bool boolean(const FormulaPtr &f, const Valuation &v, int i, bool pos) const {
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

bool eval_half_star(const Signature &sig, const StarSequence &seq,
                    const FormulaPtr &sentence) {
  if (seq.tiers() < 1) throw InputError("empty star sequence");
  // standardness: distinct carrier values, and user cells for the reserved
  // symbols must agree with machine arithmetic
  std::set<std::int64_t> vals;
  for (auto &[e, v] : seq.int_values) {
    (void)e;
    if (!vals.insert(v).second)
      throw InputError("integer carrier values must be distinct");
  }
  HalfStarEval ev{sig, seq};
  for (auto &[key, val] : seq.func_cells) {
    if (key.first != "iplus" && key.first != "itimes") continue;
    auto va = ev.int_of(key.second[0]), vb = ev.int_of(key.second[1]);
    auto vr = ev.int_of(val);
    if (!va || !vb || !vr)
      throw InputError("standardness violation in the integer part");
    std::int64_t want = key.first == "iplus" ? *va + *vb : *va * *vb;
    if (*vr != want)
      throw InputError("standardness violation in the integer part");
  }
  // closure on the defined cells, constants in tier 0
  for (auto &[name, e] : seq.constants) {
    (void)name;
    if (seq.tier_of(e) != 0) return false;
  }
  for (auto &[key, val] : seq.func_cells) {
    int t = 0;
    for (ElemId a : key.second) t = std::max(t, seq.tier_of(a));
    if (t + 1 < seq.tiers() && val >= seq.tier_sizes[t + 1]) return false;
  }
  return ev.here(sentence, {}, 0);
}

}  // namespace fw
