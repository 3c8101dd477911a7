#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fw/fulfil.hpp"
#include "fw/structure.hpp"

namespace fw {

// One Skolem obligation: a quantified subformula Qx theta with its function
// symbol, rank, and quantifier-free S-translations.
struct SkolemObligation {
  FormulaPtr source;               // Qx theta
  std::string symbol;
  std::vector<std::string> args;   // listing of the free variables
  std::string bound_var;
  int rank = 0;
  bool existential = false;
  bool h_member = false;           // carries condition (i)
  FormulaPtr s_body;               // S(theta)
};

struct CriticalPair {
  std::string symbol;
  Tuple args;
  ElemId old_value;
  ElemId new_value;
  int step = 0;   // 1-based step index
  int rank = 0;   // rank of the new state
};

struct TraceEntry {
  int state_rank = 0;                // rank of sigma^i (state 0 has rank 0)
  std::vector<ElemId> top_tuple;     // the A_n listing of this state's chain
  std::optional<CriticalPair> pair;  // absent for the initial state
};

struct SubstitutionState {
  FiniteStructure base;       // structure extended with the top element
  ElemId infinity = -1;       // designated fresh element (valid iff use_infinity)
  bool use_infinity = true;
  ElemId default_value = -1;  // f^0's constant value
  int q = 1;                  // top rank
  int n = 1;                  // chain parameter: tiers A_0..A_n
  std::vector<ElemId> a0;
  std::vector<SkolemObligation> obligations;
  std::map<std::string, std::map<Tuple, ElemId>> tables;
  // partial extra closure functions (used by the Gamma machine)
  std::map<std::string, std::pair<int, std::map<Tuple, ElemId>>> extra_closure;
  std::set<std::pair<ElemId, ElemId>> prec;  // strict order, transitively closed
  int step_count = 0;
  int current_rank = 0;
  bool track_tuples = true;       // record chain listings for index bookkeeping
  std::vector<TraceEntry> trace;  // states 0..step_count

  bool prec_plus(ElemId x, ElemId y) const;  // x strictly below y, top on top
  std::vector<std::vector<ElemId>> chain() const;
  std::vector<ElemId> top_tuple() const;
  // the structure with the current Skolem tables totalized, for evaluation
  FiniteStructure eval_structure() const;
};

// Skolemizes the members and subformulas of H (a finite set of existential
// formulas read as Foundation instances), assigns ranks, sets every table to
// the constant-infinity function, and derives the initial chain.
SubstitutionState init_state(const FiniteStructure &s,
                             const std::vector<FormulaPtr> &H,
                             const std::vector<std::pair<ElemId, ElemId>> &precedence,
                             int n, const std::vector<ElemId> &A0);

struct StepResult {
  bool halted = false;
  std::optional<CriticalPair> pair;
};

// One repair step: checks the premises against the current chain, picks the
// least violated occurrence, updates the table, resets higher ranks.
StepResult step(SubstitutionState &state);

struct RunResult {
  bool halted = false;
  std::vector<CriticalPair> trace;
};

RunResult run(SubstitutionState &state, int step_cap);

struct VerifyReport {
  bool ok = false;
  std::string violation;
};

// Rechecks premises (i)-(iii), condition (iv) at every tier, and V2
// fulfilment of each Foundation instance of H.
VerifyReport verify_lemma32(const SubstitutionState &state);

// The Foundation instance displayed for an existential formula:
// Ex theta -> Ex (theta & Ay (theta(y) -> ~prec(y,x))).
FormulaPtr foundation_instance(const FormulaPtr &ex_formula);

// ---------- computation indices ----------

struct ComputationIndex {
  int q = 1;
  std::vector<int> ranks;              // state ranks of the prefix
  std::vector<std::vector<ElemId>> tops;
  std::set<std::pair<ElemId, ElemId>> prec;  // for (prec_+)^w comparisons
  // a_s per rank level 0..ranks.back(): a completed subroutine span [j,l] or
  // absent for the top element at that level
  std::vector<std::optional<std::pair<int, int>>> components;
};

// r-subroutine spans [j, l) over the recorded state ranks.
std::vector<std::pair<int, int>> subroutine_decompose(const std::vector<int> &ranks,
                                                      int r);

ComputationIndex compute_index(const SubstitutionState &state, int prefix_len);

// Lexicographic comparison with missing components reading as top elements;
// spans compare through the nested subroutine orders down to (prec_+)^w on
// the recorded chain tuples. Returns -1, 0, 1.
int compare_indices(const ComputationIndex &a, const ComputationIndex &b);

std::string index_to_string(const ComputationIndex &idx);

// JSON-lines trace rendering: {step, symbol, args, old, new, rank, index}.
std::string trace_to_jsonl(const SubstitutionState &state);

// ---------- the Gamma-strengthening front end ----------

// Explicit halting bound for the Gamma machine on (s, Gamma): the number of
// repair steps is at most the product over ranks of (1 + table cells).
long long gamma_iteration_bound(const FiniteStructure &s,
                                const std::vector<FormulaPtr> &gamma);

long long gamma_required_length(const FiniteStructure &s, const FormulaPtr &phi,
                                const std::vector<FormulaPtr> &gamma, int n);

// From a sigma fulfilling phi with enough tiers, produce a length-n sequence
// fulfilling phi and the universal closures of g | ~g for every g in Gamma.
FulfilSequence gamma_strengthen(const FiniteStructure &s, const FormulaPtr &phi,
                                const std::vector<FormulaPtr> &gamma, int n,
                                const FulfilSequence &sigma);

}  // namespace fw
