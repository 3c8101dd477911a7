#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fw/logic.hpp"  // error types

namespace fw {

// Cantor normal form below epsilon_0: sorted sum of w^exponent * coefficient
// with strictly decreasing exponents and positive coefficients. Empty = 0.
struct OrdinalCNF {
  std::vector<std::pair<OrdinalCNF, std::uint64_t>> terms;

  bool is_zero() const { return terms.empty(); }
  bool is_finite() const;
  std::uint64_t finite_value() const;  // requires is_finite()

  static OrdinalCNF zero();
  static OrdinalCNF finite(std::uint64_t n);
  static OrdinalCNF omega();

  bool operator==(const OrdinalCNF &o) const { return terms == o.terms; }
};

int ord_cmp(const OrdinalCNF &a, const OrdinalCNF &b);  // -1, 0, 1
OrdinalCNF ord_add(const OrdinalCNF &a, const OrdinalCNF &b);
// left subtraction: the unique c with b + c = a; requires b <= a
OrdinalCNF ord_sub(const OrdinalCNF &a, const OrdinalCNF &b);
OrdinalCNF ord_mul(const OrdinalCNF &a, const OrdinalCNF &b);
OrdinalCNF ord_pow(const OrdinalCNF &a, const OrdinalCNF &b);
OrdinalCNF ord_exp_omega(const OrdinalCNF &a);  // w^a
OrdinalCNF ord_exp_two(const OrdinalCNF &a);    // 2^a

// Literals: `w^(w+1)*2 + w*3 + 5`; ^ > * > +, ^ right-associative.
OrdinalCNF parse_ordinal(const std::string &text);
std::string print_ordinal(const OrdinalCNF &a);

// ---------- Order constructors ----------

// Element representations: Leaf(id) for base elements, Seq for the sequence
// constructors, Tag(n, x) for the disjoint union.
struct OrdElem {
  enum Kind { Leaf, Seq, Tag } kind = Leaf;
  int leaf = 0;
  std::vector<OrdElem> kids;
  int tag = 0;

  static OrdElem mk_leaf(int id);
  static OrdElem mk_seq(std::vector<OrdElem> kids);
  static OrdElem mk_tag(int n, OrdElem x);
  bool operator==(const OrdElem &o) const;
};

enum class OrderCmp { Less, Equal, Greater, Incomparable };

struct OrderSpec;
using OrderSpecPtr = std::shared_ptr<const OrderSpec>;

struct OrderSpec {
  enum Kind {
    Finite,            // strict relation on ids (transitively closed here)
    Lex,               // nonempty finite sequences over the base
    OmegaPower,        // equal-length sequences, lex within a length
    DescendingPower,   // lex restricted to strictly descending sequences
    PlusPoint,         // base plus a designated top element
    Tower,             // (<=_n): (<=_+)^w under n iterations of 2^(.)
    EpsilonUnion       // tagged pairs (n, x), comparable only at equal n
  } kind;
  OrderSpecPtr base;                        // all but Finite
  std::vector<int> elements;                // Finite
  std::vector<std::vector<bool>> lt;        // Finite: closed strict relation
  int inf_id = -1;                          // PlusPoint
  int tower_n = 0;                          // Tower

  static OrderSpecPtr finite_order(const std::vector<int> &elements,
                                   const std::vector<std::pair<int, int>> &strict_pairs);
  static OrderSpecPtr finite_chain(int k);  // 0 < 1 < ... < k-1
  static OrderSpecPtr lex(OrderSpecPtr base);
  static OrderSpecPtr omega_power(OrderSpecPtr base);
  static OrderSpecPtr descending_power(OrderSpecPtr base);
  static OrderSpecPtr plus_point(OrderSpecPtr base, int inf_id);
  static OrderSpecPtr tower(OrderSpecPtr base, int n);
  static OrderSpecPtr epsilon_union(OrderSpecPtr base);
};

OrderCmp order_cmp(const OrderSpecPtr &spec, const OrdElem &x, const OrdElem &y);

// Order type as a CNF ordinal, for finite enumerable cases. Length-bounded
// constructors take the bound L; DescendingPower needs none (descending
// sequences over a finite base are finitely many, the empty one included).
OrdinalCNF order_type(const OrderSpecPtr &spec, int L = -1);

// ---------- Partition games ----------

// Player II's reply in the Lemma-4.8 game: given the adversary head eta of
// the partition delta_i = eta + nu, pick mu < eta.
OrdinalCNF game48_strategy(const OrdinalCNF &alpha, std::uint64_t N,
                           const OrdinalCNF &eta);

using HeadChooser = std::function<OrdinalCNF(int round, const OrdinalCNF &delta_i)>;

// Plays N rounds; returns delta_N. Requires delta >= w^(alpha+1); the winning
// contract delta_N >= w^alpha is the caller's check (tests enforce it).
OrdinalCNF game48_play(const OrdinalCNF &delta, const OrdinalCNF &alpha,
                       std::uint64_t N, const HeadChooser &adversary);

struct Partition410 {
  std::vector<OrdinalCNF> etas;  // beta summands
  OrdinalCNF nu;
};
using PartitionChooser = std::function<Partition410(int round, const OrdinalCNF &delta_i)>;

// Finite-beta variant of the Lemma-4.10 game; returns delta_N. Requires
// delta >= beta^((alpha+1)w); contract: delta_N >= beta^(alpha w).
OrdinalCNF game410_play(const OrdinalCNF &delta, std::uint64_t beta,
                        const OrdinalCNF &alpha, std::uint64_t N,
                        const PartitionChooser &adversary);

}  // namespace fw
