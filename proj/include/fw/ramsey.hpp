#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fw/logic.hpp"  // error types

namespace fw {

// A total coloring of the increasing e-tuples of a finite ground set.
struct Coloring {
  std::vector<int> ground;  // sorted, distinct
  int e = 0;
  int c = 1;
  std::vector<int> table;  // one entry per e-subset, combinadic order

  static Coloring make(std::vector<int> ground, int e, int c);
  int color_of(const std::vector<int> &tuple) const;      // increasing values
  void set_color(const std::vector<int> &tuple, int col);
  long long tuple_count() const { return (long long)table.size(); }
};

std::string coloring_to_json(const Coloring &f);
Coloring coloring_from_json(const std::string &text);

// |Y| >= min Y; the empty set is large by convention.
bool is_large(const std::vector<int> &Y);

// f constant on [Y]^e. Requires |Y| >= e.
bool is_homogeneous(const Coloring &f, const std::vector<int> &Y);

// Whether every subset of Y of cardinality e+1 is homogeneous; equals
// is_homogeneous(f, Y) for |Y| >= e+1.
bool homog_iff_small_sets(const Coloring &f, const std::vector<int> &Y);

// No homogeneous subset of the given cardinality anywhere in the ground set.
bool verify_unarrow(const Coloring &f, int set_size);

struct ArrowQuery {
  std::vector<int> ground;
  int k = 0, e = 0, c = 1;
  bool starred = false;
  long long node_limit = 50'000'000;

  static ArrowQuery of_n(int n, int k, int e, int c, bool starred);
  // the paper's interval forms: (m,N) = {m+1..N-1}, [k,n] = {k..n}
  static ArrowQuery open_interval(int m, int N, int k, int e, int c, bool starred);
  static ArrowQuery closed_interval(int lo, int hi, int k, int e, int c, bool starred);
};

struct ArrowCertificate {
  bool holds = false;
  long long colorings_checked = 0;
  std::optional<Coloring> counterexample;        // when !holds
  std::optional<std::vector<int>> witness_set;   // a qualifying Y for one coloring
  std::string note;
};

// Exhaustive decision of X ->(*) (k)^e_c with canonical color symmetry
// breaking. The returned counterexample is the first one in canonical DFS
// order (lexicographically least under the first-use color rule).
ArrowCertificate arrow_check(const ArrowQuery &q);

// Least n <= n_cap with {0..n-1} ->* (e+1)^e_c.
std::optional<int> sigma_star(int e, int c, int n_cap,
                              long long node_limit = 50'000'000);

// The three case tables of the step-down construction: builds G on [N]^m from
// F on [N]^e (c colors) and g on [2m+6]^m (2 colors, no homogeneous m+1 set).
enum class Case76 { I, II, III };
Coloring build_76_G(Case76 which, int m, int e, int c, int N, const Coloring &F,
                    const Coloring &g);

// Parity coloring on [2k+6]^k built from green/red/blue blocks and a
// 12-point 3-tuple coloring with no homogeneous 4-set; the result has no
// homogeneous (k+1)-set, which is verified before returning.
Coloring footnote_coloring(int k, const Coloring &isbell_f);

// Backtracking search for a 2-coloring of [12]^3 with no homogeneous 4-set.
// Tries a rotation-symmetric orbit space first, then the general
// triple-by-triple search with unit propagation; results are verified.
std::optional<Coloring> search_isbell(long long budget);
std::optional<Coloring> search_isbell_general(long long budget);

// Formula-encoding coloring: odd colors 2*v0+1 below the 2^b threshold, sums
// of predicate bits above it. Colors live in {0..2^(b+2)-1}.
Coloring lemma72_coloring(int n, int e, int b,
                          const std::vector<std::function<bool(const std::vector<int> &)>>
                              &predicates);

}  // namespace fw
