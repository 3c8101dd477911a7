#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fw/structure.hpp"

namespace fw {

// An indexed increasing chain of domain subsets. Indices 0..size()-1 form
// |sigma|; the non-top indices form lambda(sigma). A chain of length one
// vacuously fulfils any statement (provided the constants lie in its tier).
struct FulfilSequence {
  enum Kind { Plain, InitialSegment };
  std::vector<std::vector<ElemId>> tiers;  // each sorted, non-empty
  Kind kind = Plain;

  int size() const { return (int)tiers.size(); }        // |sigma|
  int lambda_size() const { return size() - 1; }        // |lambda(sigma)|
  int top_index() const { return size() - 1; }
};

// V1: the base clauses; V2 differs only in the existential clause (witness
// body evaluated one tier later, true at the top index) and lets indices
// range over all of |sigma|.
enum class FulfilVariant { V1, V2 };

FulfilSequence sequence_from_json(const std::string &json_text);
std::string sequence_to_json(const FulfilSequence &seq);

// increasing: A_i subset of A_{i+1}; closed: f''A_i subset of A_{i+1} for
// every function, every constant in A_0. For InitialSegment kind each tier
// must also be downward closed under the integer order.
bool check_increasing_closed(const FiniteStructure &s, const FulfilSequence &seq);

// The clause-by-clause evaluation of (f)^sigma_i.
bool eval_fulfil_at(const FiniteStructure &s, const FulfilSequence &seq,
                    const FormulaPtr &f, const Valuation &v, int i,
                    FulfilVariant variant);

bool fulfils(const FiniteStructure &s, const FulfilSequence &seq,
             const FormulaPtr &sentence, FulfilVariant variant,
             const Valuation &v = {});

// First falsified clause path, for diagnostics; nullopt when it fulfils.
std::optional<std::string> explain_failure(const FiniteStructure &s,
                                           const FulfilSequence &seq,
                                           const FormulaPtr &sentence,
                                           FulfilVariant variant,
                                           const Valuation &v = {});

// sigma restricted to an index subset J (non-empty, keeps J's order).
FulfilSequence restrict_sequence(const FulfilSequence &seq, const std::vector<int> &J);

// Restriction of s to the union of the tiers.
FiniteStructure extract_submodel(const FiniteStructure &s, const FulfilSequence &seq);

bool is_saturated(const FulfilSequence &seq);  // A_top == A_top-1

// Skolem-style construction: pick least-witness satisfaction functions for
// the existential subformulas of a sentence true in s, then close the seed
// under signature and satisfaction functions for n tiers total.
FulfilSequence build_fulfilling_sequence(const FiniteStructure &s,
                                         const FormulaPtr &sentence, int n,
                                         const std::vector<ElemId> &seed);

// The thinned subsequence <sigma_{ik}> converting V2 fulfilment into V1,
// where k is the existential count of the formula.
FulfilSequence v1_from_v2(const FulfilSequence &seq, int k);

struct GameMove {
  char player;        // 'E' or 'A'
  std::string position;
  std::string choice;
};

// Backward-induction solver for the bounded sigma-game on an NNF sentence.
// Agrees with eval_fulfil_at(..., 0, V1) by construction of the move rules.
bool game_eval(const FiniteStructure &s, const FulfilSequence &seq,
               const FormulaPtr &sentence_nnf);
std::pair<bool, std::vector<GameMove>> game_eval_trace(const FiniteStructure &s,
                                                       const FulfilSequence &seq,
                                                       const FormulaPtr &sentence_nnf);

// No-counterexample witnesses for a true sentence Ex Ay Eu Av psi with psi
// quantifier-free: builds a 5-fulfilling chain closed under f and g and
// returns the least pair (x,u) from sigma_1 x sigma_3 with
// psi(x, f x, u, g x u).
std::pair<ElemId, ElemId> no_counterexample(const FiniteStructure &s,
                                            const FormulaPtr &sentence,
                                            const std::map<Tuple, ElemId> &f,
                                            const std::map<Tuple, ElemId> &g);

}  // namespace fw
