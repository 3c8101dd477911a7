#include "fw/substitution.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

namespace fw {

namespace {

constexpr const char *kPrecName = "prec";
constexpr size_t kTupleChainCap = 2'000'000;

std::set<std::pair<ElemId, ElemId>> close_strict(
    const std::vector<ElemId> &dom, const std::vector<std::pair<ElemId, ElemId>> &pairs) {
  std::set<std::pair<ElemId, ElemId>> rel(pairs.begin(), pairs.end());
  for (auto &[a, b] : rel) {
    if (std::find(dom.begin(), dom.end(), a) == dom.end() ||
        std::find(dom.begin(), dom.end(), b) == dom.end())
      throw InputError("precedence element outside domain");
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<ElemId, ElemId>> snapshot(rel.begin(), rel.end());
    for (auto &p : snapshot)
      for (auto &q : snapshot)
        if (p.second == q.first && rel.insert({p.first, q.second}).second)
          changed = true;
  }
  for (auto &p : rel)
    if (p.first == p.second) throw InputError("precedence contains a loop");
  return rel;
}

// adjoin a fresh top element: functions map any tuple touching it to it,
// predicates stay false there
FiniteStructure adjoin_top(const FiniteStructure &s, ElemId top) {
  FiniteStructure ext = s;
  ext.domain.push_back(top);
  std::sort(ext.domain.begin(), ext.domain.end());
  for (auto &[fname, ar] : ext.sig.functions) {
    auto &table = ext.functions[fname];
    Tuple t(ar);
    std::function<void(int)> fill = [&](int k) {
      if (k == ar) {
        if (std::find(t.begin(), t.end(), top) != t.end()) table[t] = top;
        return;
      }
      for (ElemId e : ext.domain) {
        t[k] = e;
        fill(k + 1);
      }
    };
    fill(0);
  }
  return ext;
}

struct SkolemCtx {
  std::vector<SkolemObligation> obligations;
  std::map<std::string, int> index_of;  // alpha key of Qx theta -> index
  std::set<std::string> used_names;

  explicit SkolemCtx(const Signature &sig) {
    for (auto &c : sig.constants) used_names.insert(c);
    for (auto &[n, a] : sig.functions) used_names.insert(n);
    for (auto &[n, a] : sig.predicates) used_names.insert(n);
  }

  void collect(const FormulaPtr &f) {
    for (auto &sub : subformulas(f)) {
      if (sub->kind != FKind::Forall && sub->kind != FKind::Exists) continue;
      std::string key = alpha_key(sub);
      if (index_of.count(key)) continue;
      SkolemObligation ob;
      ob.source = sub;
      ob.existential = sub->kind == FKind::Exists;
      ob.bound_var = sub->name;
      auto fv = free_vars(sub);
      ob.args.assign(fv.begin(), fv.end());
      std::string base = std::string("sk") + (ob.existential ? "E" : "A") +
                         std::to_string(obligations.size());
      while (used_names.count(base)) base += "x";
      used_names.insert(base);
      ob.symbol = base;
      index_of[key] = (int)obligations.size();
      obligations.push_back(std::move(ob));
    }
  }

  TermPtr skolem_term(const SkolemObligation &ob, const FormulaPtr &instance) {
    // alpha variants share the symbol; arguments follow this instance's
    // free-variable listing
    auto fv = free_vars(instance);
    std::vector<std::string> args(fv.begin(), fv.end());
    if (args.size() != ob.args.size())
      throw InputError("free-variable arity drift in S");
    if (args.empty()) return Term::cnst(ob.symbol);
    std::vector<TermPtr> as;
    for (auto &v : args) as.push_back(Term::var(v));
    return Term::app(ob.symbol, std::move(as));
  }

  FormulaPtr S(const FormulaPtr &f) {
    switch (f->kind) {
      case FKind::Atom:
        return f;
      case FKind::Not:
        return Formula::lnot(S(f->a));
      case FKind::And:
        return Formula::land(S(f->a), S(f->b));
      case FKind::Or:
        return Formula::lor(S(f->a), S(f->b));
      case FKind::Implies:
        return Formula::implies(S(f->a), S(f->b));
      case FKind::Forall:
      case FKind::Exists: {
        auto it = index_of.find(alpha_key(f));
        if (it == index_of.end())
          throw InputError("unregistered quantified subformula in S");
        const SkolemObligation &ob = obligations[it->second];
        FormulaPtr body = S(f->a);
        return substitute(body, f->name, skolem_term(ob, f));
      }
    }
    return f;
  }
};

}  // namespace

bool SubstitutionState::prec_plus(ElemId x, ElemId y) const {
  if (use_infinity) {
    if (y == infinity) return x != infinity;
    if (x == infinity) return false;
  }
  return prec.count({x, y}) > 0;
}

std::vector<std::vector<ElemId>> SubstitutionState::chain() const {
  std::vector<std::vector<ElemId>> tiers;
  std::vector<ElemId> cur = a0;
  tiers.push_back(cur);
  for (int i = 0; i < n; ++i) {
    std::vector<ElemId> next = cur;
    auto apply_map = [&](int arity, const std::map<Tuple, ElemId> &table, bool partial) {
      Tuple t(arity);
      std::function<void(int)> rec = [&](int k) {
        if (k == arity) {
          auto it = table.find(t);
          if (it != table.end())
            next.push_back(it->second);
          else if (!partial)
            next.push_back(default_value);
          return;
        }
        for (ElemId e : cur) {
          t[k] = e;
          rec(k + 1);
        }
      };
      rec(0);
    };
    for (auto &[fname, ar] : base.sig.functions) {
      Tuple t(ar);
      std::function<void(int)> rec = [&](int k) {
        if (k == ar) {
          next.push_back(base.apply_function(fname, t));
          return;
        }
        for (ElemId e : cur) {
          t[k] = e;
          rec(k + 1);
        }
      };
      rec(0);
    }
    static const std::map<Tuple, ElemId> empty;
    for (auto &ob : obligations) {
      auto it = tables.find(ob.symbol);
      apply_map((int)ob.args.size(), it == tables.end() ? empty : it->second, false);
    }
    for (auto &[name, fn] : extra_closure) {
      (void)name;
      apply_map(fn.first, fn.second, true);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    tiers.push_back(next);
    cur = next;
  }
  return tiers;
}

std::vector<ElemId> SubstitutionState::top_tuple() const {
  std::vector<ElemId> cur = a0;
  for (int i = 0; i < n; ++i) {
    std::vector<ElemId> next = cur;
    auto apply_map = [&](int arity, const std::map<Tuple, ElemId> &table) {
      Tuple t(arity);
      std::function<void(int)> rec = [&](int k) {
        if (k == arity) {
          auto it = table.find(t);
          next.push_back(it != table.end() ? it->second : default_value);
          return;
        }
        for (ElemId e : cur) {
          t[k] = e;
          rec(k + 1);
        }
      };
      rec(0);
    };
    for (auto &[fname, ar] : base.sig.functions) {
      Tuple t(ar);
      std::function<void(int)> rec = [&](int k) {
        if (k == ar) {
          next.push_back(base.apply_function(fname, t));
          return;
        }
        for (ElemId e : cur) {
          t[k] = e;
          rec(k + 1);
        }
      };
      rec(0);
    }
    static const std::map<Tuple, ElemId> empty;
    for (auto &ob : obligations) {
      auto it = tables.find(ob.symbol);
      apply_map((int)ob.args.size(), it == tables.end() ? empty : it->second);
    }
    if (next.size() > kTupleChainCap)
      throw LimitError("tuple chain too large for index bookkeeping");
    cur = std::move(next);
  }
  return cur;
}

FiniteStructure SubstitutionState::eval_structure() const {
  FiniteStructure ev = base;
  for (auto &ob : obligations) {
    int ar = (int)ob.args.size();
    auto it = tables.find(ob.symbol);
    if (ar == 0) {
      ev.sig.constants.push_back(ob.symbol);
      ElemId v = default_value;
      if (it != tables.end()) {
        auto jt = it->second.find({});
        if (jt != it->second.end()) v = jt->second;
      }
      ev.constants[ob.symbol] = v;
      continue;
    }
    ev.sig.functions.push_back({ob.symbol, ar});
    auto &table = ev.functions[ob.symbol];
    Tuple t(ar);
    std::function<void(int)> rec = [&](int k) {
      if (k == ar) {
        ElemId v = default_value;
        if (it != tables.end()) {
          auto jt = it->second.find(t);
          if (jt != it->second.end()) v = jt->second;
        }
        table[t] = v;
        return;
      }
      for (ElemId e : ev.domain) {
        t[k] = e;
        rec(k + 1);
      }
    };
    rec(0);
  }
  return ev;
}

SubstitutionState init_state(const FiniteStructure &s,
                             const std::vector<FormulaPtr> &H,
                             const std::vector<std::pair<ElemId, ElemId>> &precedence,
                             int n, const std::vector<ElemId> &A0) {
  if (n < 1) throw InputError("chain parameter must be >= 1");
  if (s.sig.has_symbol(kPrecName))
    throw InputError("the signature must leave 'prec' free for the order literal");
  for (auto &h : H) {
    check_well_formed(s.sig, h);
    if (h->kind != FKind::Exists)
      throw InputError("H members must be existential formulas");
  }

  SubstitutionState st;
  st.use_infinity = true;
  st.infinity = s.domain.empty() ? 0 : s.domain.back() + 1;
  st.base = adjoin_top(s, st.infinity);
  st.prec = close_strict(s.domain, precedence);
  st.default_value = st.infinity;
  st.n = n;

  st.base.sig.predicates.push_back({kPrecName, 2});
  auto &ptab = st.base.predicates[kPrecName];
  for (ElemId x : st.base.domain)
    for (ElemId y : st.base.domain) {
      bool lt = (y == st.infinity && x != st.infinity) ||
                (x != st.infinity && y != st.infinity && st.prec.count({x, y}));
      if (lt) ptab[{x, y}] = true;
    }

  SkolemCtx ctx(st.base.sig);
  for (auto &h : H) ctx.collect(h);
  std::set<std::string> h_keys;
  for (auto &h : H) h_keys.insert(alpha_key(h));
  int qm1 = 0;
  for (auto &h : H)
    for (auto &sub : subformulas(h))
      if (!h_keys.count(alpha_key(sub))) qm1 = std::max(qm1, rank(sub));
  st.q = qm1 + 1;
  for (auto &ob : ctx.obligations) {
    ob.h_member = h_keys.count(alpha_key(ob.source)) > 0;
    ob.rank = ob.h_member ? st.q : rank(ob.source);
  }
  for (auto &ob : ctx.obligations) ob.s_body = ctx.S(ob.source->a);
  st.obligations = ctx.obligations;

  st.a0 = A0;
  st.a0.push_back(st.infinity);
  std::sort(st.a0.begin(), st.a0.end());
  st.a0.erase(std::unique(st.a0.begin(), st.a0.end()), st.a0.end());
  for (ElemId e : st.a0)
    if (!st.base.in_domain(e)) throw InputError("A0 element outside domain");
  for (auto &[cname, cval] : st.base.constants)
    if (!std::binary_search(st.a0.begin(), st.a0.end(), cval))
      throw InputError("A0 is missing constant " + cname);

  st.trace.push_back({0, st.top_tuple(), std::nullopt});
  return st;
}

namespace {

struct Violation {
  int obligation;
  Tuple u;
  ElemId x;
};

std::optional<Violation> find_violation(const SubstitutionState &st) {
  auto tiers = st.chain();
  const std::vector<ElemId> &an1 = tiers[st.n - 1];
  FiniteStructure ev = st.eval_structure();

  auto table_value = [&](const SkolemObligation &ob, const Tuple &u) -> ElemId {
    auto it = st.tables.find(ob.symbol);
    if (it == st.tables.end()) return st.default_value;
    auto jt = it->second.find(u);
    return jt == it->second.end() ? st.default_value : jt->second;
  };

  for (size_t oi = 0; oi < st.obligations.size(); ++oi) {
    const SkolemObligation &ob = st.obligations[oi];
    int ar = (int)ob.args.size();
    std::optional<Violation> found;
    Tuple u(ar);
    std::function<void(int)> scan = [&](int k) {
      if (found) return;
      if (k == ar) {
        Valuation val;
        for (int i = 0; i < ar; ++i) val[ob.args[i]] = u[i];
        ElemId fv = table_value(ob, u);
        Valuation vstored = val;
        vstored[ob.bound_var] = fv;
        bool stored_ok = eval_tarski(ev, ob.s_body, vstored);
        if (ob.existential) {
          if (!stored_ok) {
            for (ElemId x : an1) {
              Valuation vx = val;
              vx[ob.bound_var] = x;
              if (eval_tarski(ev, ob.s_body, vx)) {
                found = Violation{(int)oi, u, x};
                return;
              }
            }
          }
          if (!found && ob.h_member) {  // condition (i): minimality
            for (ElemId x : an1) {
              Valuation vx = val;
              vx[ob.bound_var] = x;
              if (eval_tarski(ev, ob.s_body, vx) && st.prec_plus(x, fv)) {
                found = Violation{(int)oi, u, x};
                return;
              }
            }
          }
        } else {
          if (stored_ok) {
            for (ElemId x : an1) {
              Valuation vx = val;
              vx[ob.bound_var] = x;
              if (!eval_tarski(ev, ob.s_body, vx)) {
                found = Violation{(int)oi, u, x};
                return;
              }
            }
          }
        }
        return;
      }
      for (ElemId e : an1) {
        u[k] = e;
        scan(k + 1);
        if (found) return;
      }
    };
    scan(0);
    if (found) return found;
  }
  return std::nullopt;
}

}  // namespace

StepResult step(SubstitutionState &state) {
  auto v = find_violation(state);
  if (!v) return {true, std::nullopt};
  const SkolemObligation &ob = state.obligations[v->obligation];
  ElemId old_value = state.default_value;
  {
    auto it = state.tables.find(ob.symbol);
    if (it != state.tables.end()) {
      auto jt = it->second.find(v->u);
      if (jt != it->second.end()) old_value = jt->second;
    }
  }
  int r = ob.rank;
  state.tables[ob.symbol][v->u] = v->x;
  for (auto &other : state.obligations)
    if (other.rank > r) state.tables[other.symbol].clear();
  state.current_rank = r;
  ++state.step_count;
  CriticalPair pair{ob.symbol, v->u, old_value, v->x, state.step_count, r};
  state.trace.push_back(
      {r, state.track_tuples ? state.top_tuple() : std::vector<ElemId>{}, pair});
  return {false, pair};
}

RunResult run(SubstitutionState &state, int step_cap) {
  if (step_cap < 1) throw InputError("step cap must be >= 1");
  RunResult out;
  while (state.step_count < step_cap) {
    StepResult r = step(state);
    if (r.halted) {
      out.halted = true;
      return out;
    }
    out.trace.push_back(*r.pair);
  }
  out.halted = find_violation(state) == std::nullopt;
  return out;
}

FormulaPtr foundation_instance(const FormulaPtr &ex_formula) {
  if (ex_formula->kind != FKind::Exists)
    throw InputError("Foundation instances come from existential formulas");
  const std::string &x = ex_formula->name;
  FormulaPtr theta = ex_formula->a;
  std::string y = x + "_m";
  auto fv = free_vars(theta);
  while (fv.count(y)) y += "m";
  FormulaPtr theta_y = substitute(theta, x, Term::var(y));
  FormulaPtr no_smaller = Formula::forall(
      y, Formula::implies(
             theta_y, Formula::lnot(Formula::atom(kPrecName,
                                                  {Term::var(y), Term::var(x)}))));
  FormulaPtr strong = Formula::exists(x, Formula::land(theta, no_smaller));
  return Formula::implies(ex_formula, strong);
}

VerifyReport verify_lemma32(const SubstitutionState &state) {
  if (auto v = find_violation(state))
    return {false, "premise (i)-(iii) violated at obligation " +
                       state.obligations[v->obligation].symbol};
  auto tiers = state.chain();
  FiniteStructure ev = state.eval_structure();

  FulfilSequence seq;
  seq.tiers = tiers;
  // condition (iv): nonorder facts are fulfilled from every tier
  for (int i = 0; i + 1 < (int)tiers.size(); ++i) {
    std::vector<int> J;
    for (int j = i; j < (int)tiers.size(); ++j) J.push_back(j);
    FulfilSequence suffix = restrict_sequence(seq, J);
    for (ElemId x : tiers[i])
      for (ElemId y : tiers[i]) {
        if (state.prec_plus(x, y)) continue;
        FormulaPtr lit = Formula::lnot(
            Formula::atom(kPrecName, {Term::var("xw"), Term::var("yw")}));
        Valuation v{{"xw", x}, {"yw", y}};
        if (!eval_fulfil_at(ev, suffix, lit, v, 0, FulfilVariant::V2))
          return {false, "condition (iv) fails at tier " + std::to_string(i)};
      }
  }
  for (auto &ob : state.obligations) {
    if (!ob.h_member) continue;
    FormulaPtr instance = universal_closure(foundation_instance(ob.source));
    if (!fulfils(ev, seq, instance, FulfilVariant::V2))
      return {false, "Foundation instance not fulfilled for " + ob.symbol};
  }
  return {true, ""};
}

// ---------- computation indices ----------

std::vector<std::pair<int, int>> subroutine_decompose(const std::vector<int> &ranks,
                                                      int r) {
  std::vector<std::pair<int, int>> spans;
  if (ranks.empty()) return spans;
  std::vector<int> boundaries;
  for (int i = 0; i < (int)ranks.size(); ++i)
    if (ranks[i] <= r) boundaries.push_back(i);
  if (boundaries.empty()) return spans;
  for (size_t b = 0; b + 1 < boundaries.size(); ++b)
    spans.push_back({boundaries[b], boundaries[b + 1]});
  spans.push_back({boundaries.back(), (int)ranks.size()});
  return spans;
}

ComputationIndex compute_index(const SubstitutionState &state, int prefix_len) {
  if (prefix_len < 1 || prefix_len > (int)state.trace.size())
    throw InputError("index prefix out of range");
  ComputationIndex idx;
  idx.q = state.q;
  for (int i = 0; i < prefix_len; ++i) {
    idx.ranks.push_back(state.trace[i].state_rank);
    idx.tops.push_back(state.trace[i].top_tuple);
  }
  for (ElemId x : state.base.domain)
    for (ElemId y : state.base.domain)
      if (state.prec_plus(x, y)) idx.prec.insert({x, y});
  int k = prefix_len - 1;
  int r = idx.ranks[k];
  for (int s = 0; s <= r; ++s) {
    std::vector<int> boundaries;
    for (int i = 0; i <= k; ++i)
      if (idx.ranks[i] <= s) boundaries.push_back(i);
    if (boundaries.size() >= 2)
      idx.components.push_back(
          std::pair<int, int>{boundaries[boundaries.size() - 2], boundaries.back()});
    else
      idx.components.push_back(std::nullopt);
  }
  return idx;
}

namespace {

// (prec_+)^w: lexicographic on equal-length chain listings
int cmp_tuples(const ComputationIndex &ctx, const std::vector<ElemId> &a,
               const std::vector<ElemId> &b) {
  if (a.size() != b.size())
    throw InputError("indices incomparable: chain listings differ in shape");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (ctx.prec.count({a[i], b[i]})) return -1;
    if (ctx.prec.count({b[i], a[i]})) return 1;
    throw InputError("indices incomparable under the element order");
  }
  return 0;
}

std::vector<std::pair<int, int>> decompose_span(const std::vector<int> &ranks,
                                                std::pair<int, int> span, int r) {
  std::vector<std::pair<int, int>> spans;
  std::vector<int> boundaries;
  for (int i = span.first; i < span.second; ++i)
    if (ranks[i] <= r) boundaries.push_back(i);
  for (size_t b = 0; b + 1 < boundaries.size(); ++b)
    spans.push_back({boundaries[b], boundaries[b + 1]});
  if (!boundaries.empty()) spans.push_back({boundaries.back(), span.second});
  return spans;
}

int cmp_spans(const ComputationIndex &ia, std::pair<int, int> sa,
              const ComputationIndex &ib, std::pair<int, int> sb, int level) {
  if (level >= ia.q)
    return cmp_tuples(ia, ia.tops[sa.first], ib.tops[sb.first]);
  auto da = decompose_span(ia.ranks, sa, level + 1);
  auto db = decompose_span(ib.ranks, sb, level + 1);
  size_t m = std::min(da.size(), db.size());
  for (size_t i = 0; i < m; ++i) {
    int c = cmp_spans(ia, da[i], ib, db[i], level + 1);
    if (c != 0) return c;
  }
  if (da.size() == db.size()) return 0;
  return da.size() < db.size() ? -1 : 1;
}

}  // namespace

int compare_indices(const ComputationIndex &a, const ComputationIndex &b) {
  size_t levels = std::max(a.components.size(), b.components.size());
  for (size_t s = 0; s < levels; ++s) {
    bool ha = s < a.components.size() && a.components[s].has_value();
    bool hb = s < b.components.size() && b.components[s].has_value();
    if (!ha && !hb) continue;  // both at the top placeholder
    if (!ha) return 1;         // the placeholder is the maximal element
    if (!hb) return -1;
    int c = cmp_spans(a, *a.components[s], b, *b.components[s], (int)s);
    if (c != 0) return c;
  }
  return 0;
}

std::string index_to_string(const ComputationIndex &idx) {
  std::string out = "[";
  for (size_t s = 0; s < idx.components.size(); ++s) {
    if (s) out += ", ";
    if (!idx.components[s].has_value())
      out += "inf" + std::to_string(s);
    else
      out += "(" + std::to_string(idx.components[s]->first) + "," +
             std::to_string(idx.components[s]->second) + ")";
  }
  return out + "]";
}

std::string trace_to_jsonl(const SubstitutionState &state) {
  std::string out;
  for (int i = 1; i < (int)state.trace.size(); ++i) {
    const TraceEntry &te = state.trace[i];
    nlohmann::json j;
    j["step"] = te.pair->step;
    j["symbol"] = te.pair->symbol;
    j["args"] = te.pair->args;
    j["old"] = te.pair->old_value;
    j["new"] = te.pair->new_value;
    j["rank"] = te.pair->rank;
    j["index"] = index_to_string(compute_index(state, i + 1));
    out += j.dump() + "\n";
  }
  return out;
}

// ---------- the Gamma machine ----------

namespace {

FormulaPtr excluded_middle_closure(const FormulaPtr &g) {
  return universal_closure(Formula::lor(g, Formula::lnot(g)));
}

FormulaPtr rename_apart_nnf(const FormulaPtr &f) {
  int counter = 0;
  std::function<FormulaPtr(const FormulaPtr &)> rec =
      [&](const FormulaPtr &g) -> FormulaPtr {
    switch (g->kind) {
      case FKind::Atom:
        return g;
      case FKind::Not:
        return Formula::lnot(rec(g->a));
      case FKind::And:
        return Formula::land(rec(g->a), rec(g->b));
      case FKind::Or:
        return Formula::lor(rec(g->a), rec(g->b));
      case FKind::Implies:
        return Formula::implies(rec(g->a), rec(g->b));
      case FKind::Forall:
      case FKind::Exists: {
        std::string fresh = "gv" + std::to_string(counter++) + "_";
        FormulaPtr body = substitute(g->a, g->name, Term::var(fresh));
        body = rec(body);
        return g->kind == FKind::Forall ? Formula::forall(fresh, body)
                                        : Formula::exists(fresh, body);
      }
    }
    return g;
  };
  return rec(to_nnf(f));
}

// witness functions for the existential occurrences of phi, extracted from a
// fulfilling sequence: least witness at the least chain index where the body
// clause holds one tier up (the second-definition reading)
std::map<std::string, std::pair<int, std::map<Tuple, ElemId>>> phi_witnesses(
    const FiniteStructure &s, const FulfilSequence &sigma, const FormulaPtr &phi_nnf) {
  std::map<std::string, std::pair<int, std::map<Tuple, ElemId>>> out;
  int counter = 0;
  std::function<void(const FormulaPtr &)> walk = [&](const FormulaPtr &f) {
    switch (f->kind) {
      case FKind::Atom:
      case FKind::Not:
        return;
      case FKind::And:
      case FKind::Or:
        walk(f->a);
        walk(f->b);
        return;
      case FKind::Implies:
        throw InputError("expected NNF");
      case FKind::Forall:
        walk(f->a);
        return;
      case FKind::Exists: {
        auto fv = free_vars(f);
        std::vector<std::string> args(fv.begin(), fv.end());
        std::map<Tuple, ElemId> table;
        Tuple t(args.size());
        std::function<void(size_t)> rec = [&](size_t k) {
          if (k == args.size()) {
            Valuation v;
            for (size_t i = 0; i < args.size(); ++i) v[args[i]] = t[i];
            for (int lvl = 0; lvl + 1 < sigma.size(); ++lvl) {
              std::optional<ElemId> witness;
              for (ElemId x : sigma.tiers[lvl + 1]) {
                Valuation w = v;
                w[f->name] = x;
                if (eval_fulfil_at(s, sigma, f->a, w, lvl + 1, FulfilVariant::V2)) {
                  witness = x;
                  break;
                }
              }
              if (witness) {
                table[t] = *witness;
                break;
              }
            }
            return;
          }
          for (ElemId e : s.domain) {
            t[k] = e;
            rec(k + 1);
          }
        };
        rec(0);
        out["w" + std::to_string(counter++) + "_"] = {(int)args.size(), table};
        walk(f->a);
        return;
      }
    }
  };
  walk(phi_nnf);
  return out;
}

}  // namespace

long long gamma_iteration_bound(const FiniteStructure &s,
                                const std::vector<FormulaPtr> &gamma) {
  SkolemCtx ctx(s.sig);
  for (auto &g : gamma) ctx.collect(excluded_middle_closure(g));
  long long u = (long long)s.domain.size();
  std::map<int, long long> cells_by_rank;
  for (auto &ob : ctx.obligations) {
    long long cells = 1;
    for (size_t i = 0; i < ob.args.size(); ++i) {
      cells *= u;
      if (cells > 1'000'000) throw LimitError("gamma bound overflow");
    }
    cells_by_rank[rank(ob.source)] += cells;
  }
  long long b = 1;
  for (auto &[r, cells] : cells_by_rank) {
    (void)r;
    b *= (1 + cells);
    if (b > 1'000'000) throw LimitError("gamma bound overflow");
  }
  return b;
}

long long gamma_required_length(const FiniteStructure &s, const FormulaPtr &phi,
                                const std::vector<FormulaPtr> &gamma, int n) {
  int K = std::max(1, count_existentials(to_nnf(phi)));
  for (auto &g : gamma)
    K = std::max(K, count_existentials(to_nnf(excluded_middle_closure(g))));
  long long b = gamma_iteration_bound(s, gamma);
  return (b + 1) * ((long long)K * n + 1);
}

FulfilSequence gamma_strengthen(const FiniteStructure &s, const FormulaPtr &phi,
                                const std::vector<FormulaPtr> &gamma, int n,
                                const FulfilSequence &sigma) {
  if (n < 1) throw InputError("target length must be >= 1");
  if (s.sig.has_symbol(kPrecName))
    throw InputError("the signature must leave 'prec' free for the order literal");
  for (auto &g : gamma) check_well_formed(s.sig, g);
  long long required = gamma_required_length(s, phi, gamma, n);
  if ((long long)sigma.size() < required)
    throw InputError("sigma too short: " + std::to_string(required) +
                     " tiers required, got " + std::to_string(sigma.size()));
  if (!fulfils(s, sigma, phi, FulfilVariant::V1))
    throw InputError("sigma does not fulfil phi");

  int K = std::max(1, count_existentials(to_nnf(phi)));
  std::vector<FormulaPtr> closures;
  for (auto &g : gamma) {
    closures.push_back(excluded_middle_closure(g));
    K = std::max(K, count_existentials(to_nnf(closures.back())));
  }
  int n_machine = K * n;

  SubstitutionState st;
  st.use_infinity = false;
  st.infinity = -1;
  st.base = s;
  st.base.sig.predicates.push_back({kPrecName, 2});  // the empty order
  st.default_value = s.domain.front();
  st.n = n_machine;
  st.q = 1;
  SkolemCtx ctx(st.base.sig);
  for (auto &cl : closures) ctx.collect(cl);
  for (auto &ob : ctx.obligations) {
    ob.h_member = false;
    ob.rank = rank(ob.source);
    st.q = std::max(st.q, ob.rank);
  }
  for (auto &ob : ctx.obligations) ob.s_body = ctx.S(ob.source->a);
  st.obligations = ctx.obligations;
  st.a0 = sigma.tiers[0];
  st.track_tuples = false;
  FormulaPtr phi_nnf = rename_apart_nnf(phi);
  st.extra_closure = phi_witnesses(s, sigma, phi_nnf);
  st.trace.push_back({0, {}, std::nullopt});

  long long cap = gamma_iteration_bound(s, gamma) + 1;
  RunResult rr = run(st, (int)cap);
  if (!rr.halted) throw InputError("gamma machine exceeded its halting bound");

  auto tiers = st.chain();
  FulfilSequence full;
  full.tiers = tiers;
  std::vector<int> J;
  for (int i = 0; i * K < (int)tiers.size() && (int)J.size() < n + 1; ++i)
    J.push_back(i * K);
  FulfilSequence thin = restrict_sequence(full, J);

  auto verified = [&](const FulfilSequence &cand) {
    if (!fulfils(s, cand, phi, FulfilVariant::V1)) return false;
    for (auto &cl : closures)
      if (!fulfils(s, cand, cl, FulfilVariant::V1)) return false;
    return true;
  };
  if (verified(thin)) return thin;

  // when phi is outright true, the Skolem-closure construction covers phi
  // and every excluded-middle closure at once
  if (eval_tarski(s, phi, {})) {
    FormulaPtr conj = phi;
    for (auto &cl : closures) conj = Formula::land(conj, cl);
    FulfilSequence built = build_fulfilling_sequence(s, conj, n + 1, sigma.tiers[0]);
    if (verified(built)) return built;
  }
  throw InputError("gamma strengthening failed verification");
}

}  // namespace fw
