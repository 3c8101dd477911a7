#include "fw/structure.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

namespace fw {

bool FiniteStructure::in_domain(ElemId e) const {
  return std::binary_search(domain.begin(), domain.end(), e);
}

static void all_tuples(const std::vector<ElemId> &dom, int arity,
                       const std::function<void(const Tuple &)> &fn) {
  Tuple t(arity);
  std::function<void(int)> rec = [&](int i) {
    if (i == arity) {
      fn(t);
      return;
    }
    for (ElemId e : dom) {
      t[i] = e;
      rec(i + 1);
    }
  };
  rec(0);
}

void FiniteStructure::validate() const {
  sig.validate();
  if (domain.empty()) throw InputError("empty domain");
  if (!std::is_sorted(domain.begin(), domain.end()) ||
      std::adjacent_find(domain.begin(), domain.end()) != domain.end())
    throw InputError("domain must be sorted and duplicate-free");
  for (auto &c : sig.constants) {
    auto it = constants.find(c);
    if (it == constants.end()) throw InputError("constant not interpreted: " + c);
    if (!in_domain(it->second)) throw InputError("constant outside domain: " + c);
  }
  for (auto &[f, ar] : sig.functions) {
    auto it = functions.find(f);
    if (it == functions.end()) throw InputError("function not interpreted: " + f);
    all_tuples(domain, ar, [&](const Tuple &t) {
      auto jt = it->second.find(t);
      if (jt == it->second.end())
        throw InputError("function table not total: " + f);
      if (!in_domain(jt->second))
        throw InputError("function value outside domain: " + f);
    });
  }
  for (auto &[p, table] : predicates) {
    if (sig.predicate_arity(p) < 0) throw InputError("unknown predicate in table: " + p);
    for (auto &[t, v] : table) {
      (void)v;
      if ((int)t.size() != sig.predicate_arity(p))
        throw InputError("predicate tuple arity mismatch: " + p);
      for (ElemId e : t)
        if (!in_domain(e)) throw InputError("predicate tuple outside domain: " + p);
    }
  }
  for (auto &[e, val] : int_values) {
    (void)val;
    if (!in_domain(e)) throw InputError("integer tag outside domain");
  }
}

ElemId FiniteStructure::apply_function(const std::string &f, const Tuple &args) const {
  auto it = functions.find(f);
  if (it == functions.end()) throw InputError("function not interpreted: " + f);
  auto jt = it->second.find(args);
  if (jt == it->second.end()) throw InputError("function undefined at arguments: " + f);
  return jt->second;
}

bool FiniteStructure::holds(const std::string &p, const Tuple &args) const {
  auto it = predicates.find(p);
  if (it == predicates.end()) return false;
  auto jt = it->second.find(args);
  return jt != it->second.end() && jt->second;
}

ElemId eval_term(const FiniteStructure &s, const TermPtr &t, const Valuation &v) {
  switch (t->kind) {
    case Term::Var: {
      auto it = v.find(t->name);
      if (it == v.end()) throw InputError("valuation missing variable: " + t->name);
      return it->second;
    }
    case Term::Const: {
      auto it = s.constants.find(t->name);
      if (it == s.constants.end()) throw InputError("constant not interpreted: " + t->name);
      return it->second;
    }
    case Term::App: {
      Tuple args;
      args.reserve(t->args.size());
      for (auto &a : t->args) args.push_back(eval_term(s, a, v));
      return s.apply_function(t->name, args);
    }
  }
  throw InputError("bad term");
}

bool eval_tarski(const FiniteStructure &s, const FormulaPtr &f, const Valuation &v) {
  switch (f->kind) {
    case FKind::Atom: {
      Tuple args;
      args.reserve(f->terms.size());
      for (auto &t : f->terms) args.push_back(eval_term(s, t, v));
      return s.holds(f->name, args);
    }
    case FKind::Not:
      return !eval_tarski(s, f->a, v);
    case FKind::And:
      return eval_tarski(s, f->a, v) && eval_tarski(s, f->b, v);
    case FKind::Or:
      return eval_tarski(s, f->a, v) || eval_tarski(s, f->b, v);
    case FKind::Implies:
      return !eval_tarski(s, f->a, v) || eval_tarski(s, f->b, v);
    case FKind::Forall: {
      Valuation w = v;
      for (ElemId e : s.domain) {
        w[f->name] = e;
        if (!eval_tarski(s, f->a, w)) return false;
      }
      return true;
    }
    case FKind::Exists: {
      Valuation w = v;
      for (ElemId e : s.domain) {
        w[f->name] = e;
        if (eval_tarski(s, f->a, w)) return true;
      }
      return false;
    }
  }
  return false;
}

// ---------- JSON ----------

using nlohmann::json;

FiniteStructure structure_from_json(const std::string &json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("bad structure JSON: ") + e.what());
  }
  FiniteStructure s;
  if (!j.contains("domain")) throw InputError("structure JSON missing 'domain'");
  for (auto &e : j["domain"]) s.domain.push_back(e.get<ElemId>());
  std::sort(s.domain.begin(), s.domain.end());
  if (j.contains("constants"))
    for (auto &[name, val] : j["constants"].items()) {
      s.sig.constants.push_back(name);
      s.constants[name] = val.get<ElemId>();
    }
  if (j.contains("functions"))
    for (auto &[name, rows] : j["functions"].items()) {
      int arity = -1;
      std::map<Tuple, ElemId> table;
      for (auto &row : rows) {
        if (row.size() < 1) throw InputError("bad function row for " + name);
        Tuple args;
        for (size_t i = 0; i + 1 < row.size(); ++i) args.push_back(row[i].get<ElemId>());
        if (arity < 0) arity = (int)args.size();
        if ((int)args.size() != arity)
          throw InputError("ragged function table for " + name);
        table[args] = row.back().get<ElemId>();
      }
      if (arity <= 0) throw InputError("function must have arity >= 1: " + name);
      s.sig.functions.push_back({name, arity});
      s.functions[name] = std::move(table);
    }
  if (j.contains("predicates"))
    for (auto &[name, rows] : j["predicates"].items()) {
      int arity = -1;
      std::map<Tuple, bool> table;
      for (auto &row : rows) {
        Tuple t;
        for (auto &e : row) t.push_back(e.get<ElemId>());
        if (arity < 0) arity = (int)t.size();
        if ((int)t.size() != arity)
          throw InputError("ragged predicate table for " + name);
        table[t] = true;
      }
      if (arity < 0) arity = 0;  // empty relation: arity unknown, assume 0
      s.sig.predicates.push_back({name, arity});
      s.predicates[name] = std::move(table);
    }
  if (j.contains("arities"))  // optional: pin arities for empty relations
    for (auto &[name, a] : j["arities"].items()) {
      for (auto &p : s.sig.predicates)
        if (p.first == name) p.second = a.get<int>();
      if (s.sig.predicate_arity(name) < 0) s.sig.predicates.push_back({name, a.get<int>()});
    }
  if (j.contains("integers"))
    for (auto &[elem, val] : j["integers"].items())
      s.int_values[std::stoi(elem)] = val.get<std::int64_t>();
  s.validate();
  return s;
}

std::string structure_to_json(const FiniteStructure &s) {
  json j;
  j["domain"] = s.domain;
  json consts = json::object();
  for (auto &[n, e] : s.constants) consts[n] = e;
  j["constants"] = consts;
  json funcs = json::object();
  for (auto &[n, table] : s.functions) {
    json rows = json::array();
    for (auto &[args, val] : table) {
      json row = json::array();
      for (ElemId a : args) row.push_back(a);
      row.push_back(val);
      rows.push_back(row);
    }
    funcs[n] = rows;
  }
  j["functions"] = funcs;
  json preds = json::object();
  json arities = json::object();
  for (auto &[n, ar] : s.sig.predicates) {
    json rows = json::array();
    auto it = s.predicates.find(n);
    if (it != s.predicates.end())
      for (auto &[t, v] : it->second)
        if (v) rows.push_back(t);
    preds[n] = rows;
    arities[n] = ar;
  }
  j["predicates"] = preds;
  j["arities"] = arities;
  if (!s.int_values.empty()) {
    json ints = json::object();
    for (auto &[e, v] : s.int_values) ints[std::to_string(e)] = v;
    j["integers"] = ints;
  }
  return j.dump(2);
}

FiniteStructure restrict_structure(const FiniteStructure &s, const std::vector<ElemId> &sub) {
  FiniteStructure r;
  r.sig = s.sig;
  r.domain = sub;
  std::sort(r.domain.begin(), r.domain.end());
  r.domain.erase(std::unique(r.domain.begin(), r.domain.end()), r.domain.end());
  if (r.domain.empty()) throw InputError("restriction to empty domain");
  for (ElemId e : r.domain)
    if (!s.in_domain(e)) throw InputError("restriction element outside domain");
  for (auto &[n, e] : s.constants) {
    if (!r.in_domain(e)) throw InputError("constant outside restricted domain: " + n);
    r.constants[n] = e;
  }
  for (auto &[f, ar] : s.sig.functions) {
    std::map<Tuple, ElemId> table;
    bool closed = true;
    all_tuples(r.domain, ar, [&](const Tuple &t) {
      ElemId v = s.apply_function(f, t);
      if (!r.in_domain(v)) closed = false;
      table[t] = v;
    });
    if (!closed) throw InputError("restriction not closed under function " + f);
    r.functions[f] = std::move(table);
  }
  for (auto &[p, table] : s.predicates) {
    std::map<Tuple, bool> sub_table;
    for (auto &[t, v] : table) {
      bool inside = true;
      for (ElemId e : t)
        if (!r.in_domain(e)) inside = false;
      if (inside) sub_table[t] = v;
    }
    r.predicates[p] = std::move(sub_table);
  }
  for (auto &[e, v] : s.int_values)
    if (r.in_domain(e)) r.int_values[e] = v;
  return r;
}

}  // namespace fw
