#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fw/fulfil.hpp"
#include "fw/structure.hpp"

namespace fw {

// Increasing tiers of fresh constants together with a structure built along
// the way. Tiers are prefixes of 0..universe-1 (fresh constants are
// interchangeable, so the prefix form loses nothing); functions are partial
// maps, defined wherever the evaluation needed them.
struct StarSequence {
  std::vector<int> tier_sizes;  // non-decreasing, >= 1
  std::map<std::string, ElemId> constants;  // signature constants, in tier 0
  std::map<std::pair<std::string, Tuple>, ElemId> func_cells;
  std::map<std::pair<std::string, Tuple>, bool> pred_cells;  // absent = false
  std::map<ElemId, std::int64_t> int_values;  // the half-star integer part

  int tiers() const { return (int)tier_sizes.size(); }
  int universe() const { return tier_sizes.empty() ? 0 : tier_sizes.back(); }
  int tier_of(ElemId e) const;  // least i with e < tier_sizes[i]
};

std::string star_to_json(const Signature &sig, const StarSequence &seq);

// Explicit upper bound B(n) on the n-th tier of a minimal star-fulfilling
// sequence: B(0) = #constants + 1, B(i+1) = B(i) + Q*B(i)^V + sum_f B(i)^ar(f)
// with Q the existential-subformula count and V their largest free-variable
// count. Saturates rather than overflowing.
long long cardinality_bound(const Signature &sig, const FormulaPtr &sentence, int n);

struct StarStats {
  long long nodes = 0;
  long long size_vectors = 0;
};

// Decides the existence of an n-tier star-fulfilling sequence exactly by
// canonical depth-first search over tier sizes, constant identifications,
// function cells and existential witnesses. The returned witness is the
// first one in that canonical order.
std::optional<StarSequence> star_search(const Signature &sig,
                                        const FormulaPtr &sentence, int n,
                                        long long node_limit = 20'000'000,
                                        StarStats *stats = nullptr);

struct RefutationOutcome {
  enum Kind { Refuted, SatStable, Unknown } kind = Unknown;
  int n = 0;  // refutation depth / depth reached
  std::optional<FiniteStructure> model;  // SatStable
  std::string certificate_json;          // per-depth search statistics
};

// Iterates star_search for n = 2..max_n: the first depth with no witness
// refutes; a witness that stabilizes into a total structure satisfying the
// sentence settles satisfiability; otherwise the cap is reported as Unknown.
RefutationOutcome refute(const Signature &sig, const FormulaPtr &sentence, int max_n,
                         long long node_limit = 20'000'000);

// Half-star evaluation over a star sequence with an integer part. The
// reserved symbols i0, i1 (constants) and iplus, itimes (binary functions)
// are interpreted standardly on the integer-tagged elements; declaring them
// in the signature with non-standard cells is an error.
bool eval_half_star(const Signature &sig, const StarSequence &seq,
                    const FormulaPtr &sentence);

}  // namespace fw
