#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fw/logic.hpp"

namespace fw {

using ElemId = int;
using Valuation = std::map<std::string, ElemId>;
using Tuple = std::vector<ElemId>;

// A finite structure: a finite domain of element ids with total
// interpretations of the signature. Element ids need not be contiguous.
struct FiniteStructure {
  Signature sig;
  std::vector<ElemId> domain;  // sorted, distinct
  std::map<std::string, ElemId> constants;
  std::map<std::string, std::map<Tuple, ElemId>> functions;
  std::map<std::string, std::map<Tuple, bool>> predicates;  // absent = false
  // Optional integer sort: element -> machine integer carrier value.
  std::map<ElemId, std::int64_t> int_values;

  bool in_domain(ElemId e) const;
  void validate() const;  // tables total over the domain, values in domain

  ElemId apply_function(const std::string &f, const Tuple &args) const;
  bool holds(const std::string &p, const Tuple &args) const;
};

ElemId eval_term(const FiniteStructure &s, const TermPtr &t, const Valuation &v);
bool eval_tarski(const FiniteStructure &s, const FormulaPtr &f, const Valuation &v);

// JSON document schema:
// {"domain":[...], "constants":{...}, "functions":{name:[[args...,value],...]},
//  "predicates":{name:[[tuple],...]}, "integers":{elem:value}?}
FiniteStructure structure_from_json(const std::string &json_text);
std::string structure_to_json(const FiniteStructure &s);

// Restriction of s to a subset of its domain; every function table must stay
// inside the subset.
FiniteStructure restrict_structure(const FiniteStructure &s, const std::vector<ElemId> &sub);

}  // namespace fw
