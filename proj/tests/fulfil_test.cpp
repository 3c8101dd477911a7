#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace fw;
using namespace fwtest;

namespace {

FiniteStructure neq_structure() {
  FiniteStructure s;
  s.sig.predicates = {{"neq", 2}};
  s.domain = {0, 1};
  s.predicates["neq"] = {{{0, 1}, true}, {{1, 0}, true}};
  return s;
}

FulfilSequence chain(std::vector<std::vector<ElemId>> tiers) {
  FulfilSequence seq;
  seq.tiers = std::move(tiers);
  return seq;
}

}  // namespace

TEST_CASE("check_increasing_closed") {
  FiniteStructure s;
  s.sig.constants = {"c"};
  s.sig.functions = {{"f", 1}};
  s.domain = {0, 1};
  s.constants["c"] = 0;
  s.functions["f"] = {{{0}, 1}, {{1}, 1}};

  CHECK(check_increasing_closed(s, chain({{0, 1}, {0, 1}, {0, 1}})));
  CHECK_FALSE(check_increasing_closed(s, chain({{0}, {0}})));      // f(0)=1 escapes
  CHECK_FALSE(check_increasing_closed(s, chain({{0, 1}, {0}})));   // not increasing
  CHECK_FALSE(check_increasing_closed(s, chain({{1}, {0, 1}})));   // constant not in A0
  CHECK_THROWS_AS(check_increasing_closed(s, chain({{0, 2}})), InputError);
}

TEST_CASE("quantifier-free evaluation matches tarski at any index") {
  auto structures = all_corpus_structures(2, true);
  FormulaPtr lit = Formula::lor(
      Formula::atom("P", {Term::var("x")}),
      Formula::lnot(Formula::atom("R", {Term::var("x"), Term::var("x")})));
  for (size_t k = 0; k < structures.size(); k += 11) {
    const auto &s = structures[k];
    for (auto &seq : all_chains(2, 3)) {
      for (ElemId e : s.domain) {
        Valuation v{{"x", e}};
        for (int i = 0; i < 2; ++i) {
          CHECK(eval_fulfil_at(s, seq, lit, v, i, FulfilVariant::V1) ==
                eval_tarski(s, lit, v));
        }
      }
    }
  }
}

TEST_CASE("direct expansion example from the prenex shape") {
  // (Ax Ey Au Ev theta)_0 against the independent expander, |sigma|=4, domain 3
  FiniteStructure s;
  s.sig.predicates = {{"R", 2}};
  s.domain = {0, 1, 2};
  s.predicates["R"] = {{{0, 1}, true}, {{1, 2}, true}, {{2, 0}, true}, {{0, 0}, true}};
  FormulaPtr f =
      parse_formula(s.sig, "forall x. exists y. forall u. exists v. R(x,y) & R(u,v)");
  FormulaPtr nf = to_nnf(f);
  int agree = 0, total = 0;
  for (auto &seq : all_chains(3, 4)) {
    if (total > 4000) break;
    ++total;
    bool a = eval_fulfil_at(s, seq, nf, {}, 0, FulfilVariant::V1);
    bool b = oracle_fulfil_at(s, seq, nf, {}, 0);
    if (a == b) ++agree;
  }
  CHECK(agree == total);
}

TEST_CASE("kernel agrees with expander and game on sampled corpus") {
  auto structures = all_corpus_structures(2, true);
  auto sents = sample_nnf_sentences(21, 40, 3);
  std::mt19937 rng(5);
  auto chains = all_chains(2, 3);
  for (auto &f : sents) {
    const auto &s = structures[rng() % structures.size()];
    for (int t = 0; t < 6; ++t) {
      const auto &seq = chains[rng() % chains.size()];
      bool kernel = eval_fulfil_at(s, seq, f, {}, 0, FulfilVariant::V1);
      CHECK(kernel == oracle_fulfil_at(s, seq, f, {}, 0));
      CHECK(kernel == game_eval(s, seq, f));
    }
  }
}

TEST_CASE("V2 existential clause at the top index") {
  FiniteStructure s = neq_structure();
  FormulaPtr ex = parse_formula(s.sig, "exists y. neq(y,y)");  // unsatisfiable body
  auto seq = chain({{0}, {0, 1}});
  // V2 at the top index: no successor, so true
  CHECK(eval_fulfil_at(s, seq, ex, {}, 1, FulfilVariant::V2));
  // V2 below the top: body evaluated one tier later
  CHECK_FALSE(eval_fulfil_at(s, seq, ex, {}, 0, FulfilVariant::V2));
  // V1 refuses the top index
  CHECK_THROWS_AS(eval_fulfil_at(s, seq, ex, {}, 1, FulfilVariant::V1), InputError);
}

TEST_CASE("fulfils worked examples") {
  FiniteStructure s = neq_structure();
  FormulaPtr f = parse_formula(s.sig, "forall x. exists y. neq(x,y)");

  CHECK(fulfils(s, chain({{0}, {0, 1}}), f, FulfilVariant::V1));
  CHECK_FALSE(fulfils(s, chain({{0}, {0}}), f, FulfilVariant::V1));
  // trivial sequence over the whole domain
  CHECK(fulfils(s, chain({{0, 1}, {0, 1}, {0, 1}}), f, FulfilVariant::V1));
  // length-one sequences vacuously fulfil anything
  FormulaPtr bad = parse_formula(s.sig, "exists x. neq(x,x)");
  CHECK(fulfils(s, chain({{0}}), bad, FulfilVariant::V1));
}

TEST_CASE("implication clause agrees with the NNF route") {
  auto structures = all_corpus_structures(2, true);
  auto sents = sample_nnf_sentences(31, 30, 2);
  std::mt19937 rng(9);
  auto chains = all_chains(2, 3);
  for (size_t i = 0; i + 1 < sents.size(); i += 2) {
    FormulaPtr imp = Formula::implies(sents[i], sents[i + 1]);
    FormulaPtr neg = Formula::lnot(Formula::land(sents[i], Formula::lnot(sents[i + 1])));
    const auto &s = structures[rng() % structures.size()];
    for (int t = 0; t < 5; ++t) {
      const auto &seq = chains[rng() % chains.size()];
      bool direct = eval_fulfil_at(s, seq, imp, {}, 0, FulfilVariant::V1);
      bool via_nnf = eval_fulfil_at(s, seq, to_nnf(imp), {}, 0, FulfilVariant::V1);
      CHECK(direct == via_nnf);
      bool neg_direct = eval_fulfil_at(s, seq, neg, {}, 0, FulfilVariant::V1);
      CHECK(neg_direct == eval_fulfil_at(s, seq, to_nnf(neg), {}, 0, FulfilVariant::V1));
    }
  }
}

TEST_CASE("restriction lemma behaviour") {
  FiniteStructure s = neq_structure();
  FormulaPtr f = parse_formula(s.sig, "forall x. exists y. neq(x,y)");
  auto seq = chain({{0}, {0, 1}, {0, 1}, {0, 1}, {0, 1}});

  SUBCASE("identity restriction") {
    auto r = restrict_sequence(seq, {0, 1, 2, 3, 4});
    CHECK(r.tiers == seq.tiers);
  }
  SUBCASE("single index vacuously fulfils") {
    auto r = restrict_sequence(seq, {3});
    FormulaPtr bad = parse_formula(s.sig, "exists x. neq(x,x)");
    CHECK(fulfils(s, r, bad, FulfilVariant::V1));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(restrict_sequence(seq, {}), InputError);
    CHECK_THROWS_AS(restrict_sequence(seq, {2, 1}), InputError);
    CHECK_THROWS_AS(restrict_sequence(seq, {0, 9}), InputError);
  }
  (void)f;
}

TEST_CASE("monotone restriction property, sampled corpus") {
  auto structures = all_corpus_structures(2, false);
  auto sents = sample_nnf_sentences(41, 12, 2, false);
  auto chains5 = all_chains(2, 5);
  std::vector<std::vector<int>> subsets;
  for (int m = 1; m < 32; ++m) {
    std::vector<int> J;
    for (int i = 0; i < 5; ++i)
      if ((m >> i) & 1) J.push_back(i);
    subsets.push_back(J);
  }
  std::mt19937 rng(17);
  int checked = 0;
  for (auto &f : sents)
    for (int t = 0; t < 30; ++t) {
      const auto &s = structures[rng() % structures.size()];
      const auto &seq = chains5[rng() % chains5.size()];
      if (!fulfils(s, seq, f, FulfilVariant::V1)) continue;
      for (auto &J : subsets) {
        auto r = restrict_sequence(seq, J);
        CHECK(fulfils(s, r, f, FulfilVariant::V1));
        ++checked;
      }
    }
  CHECK(checked > 0);
}

TEST_CASE("prefix-limit property at small scale") {
  // finite rendering: the full chain fulfils iff every prefix (the full one
  // included) fulfils; the forward direction is the restriction lemma
  auto structures = all_corpus_structures(2, false);
  auto sents = sample_nnf_sentences(43, 12, 2, false);
  auto chains4 = all_chains(2, 4);
  std::mt19937 rng(19);
  for (auto &f : sents)
    for (int t = 0; t < 40; ++t) {
      const auto &s = structures[rng() % structures.size()];
      const auto &seq = chains4[rng() % chains4.size()];
      bool all_prefixes = true;
      for (int n = 0; n < seq.size(); ++n) {
        std::vector<int> J;
        for (int i = 0; i <= n; ++i) J.push_back(i);
        if (!fulfils(s, restrict_sequence(seq, J), f, FulfilVariant::V1))
          all_prefixes = false;
      }
      CHECK(all_prefixes == fulfils(s, seq, f, FulfilVariant::V1));
    }
}

TEST_CASE("NNF invariance of fulfilment") {
  auto structures = all_corpus_structures(2, true);
  auto sents = sample_nnf_sentences(47, 15, 2);
  std::mt19937 rng(23);
  auto chains = all_chains(2, 3);
  for (size_t i = 0; i + 1 < sents.size(); i += 2) {
    FormulaPtr f = Formula::implies(sents[i], Formula::lnot(sents[i + 1]));
    const auto &s = structures[rng() % structures.size()];
    for (int t = 0; t < 5; ++t) {
      const auto &seq = chains[rng() % chains.size()];
      CHECK(fulfils(s, seq, f, FulfilVariant::V1) ==
            fulfils(s, seq, to_nnf(f), FulfilVariant::V1));
    }
  }
}

TEST_CASE("extract_submodel") {
  FiniteStructure s = neq_structure();

  SUBCASE("trivial sequence extracts the whole structure") {
    auto m = extract_submodel(s, chain({{0, 1}, {0, 1}}));
    CHECK(m.domain == s.domain);
  }
  SUBCASE("union computation") {
    FiniteStructure s3;
    s3.sig.predicates = {{"neq", 2}};
    s3.domain = {0, 1, 2};
    s3.predicates["neq"] = {{{0, 1}, true}, {{1, 0}, true}};
    auto m = extract_submodel(s3, chain({{0}, {0, 1}, {0, 1}}));
    CHECK(m.domain == std::vector<ElemId>{0, 1});
  }
  SUBCASE("stabilized fulfilling chain is truth-extracting") {
    auto structures = all_corpus_structures(2, false);
    auto sents = sample_nnf_sentences(53, 15, 2, false);
    std::mt19937 rng(29);
    auto chains4 = all_chains(2, 4);
    for (auto &g : sents)
      for (int t = 0; t < 25; ++t) {
        const auto &st = structures[rng() % structures.size()];
        const auto &seq = chains4[rng() % chains4.size()];
        if (!is_saturated(seq)) continue;
        if (!fulfils(st, seq, g, FulfilVariant::V1)) continue;
        auto m = extract_submodel(st, seq);
        CHECK(eval_tarski(m, g, {}));
      }
  }
}

TEST_CASE("build_fulfilling_sequence") {
  SUBCASE("linear order witness") {
    FiniteStructure s;
    s.sig.predicates = {{"le", 2}};
    s.domain = {0, 1, 2};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) s.predicates["le"][{i, j}] = true;
    FormulaPtr f = parse_formula(s.sig, "forall x. exists y. le(x,y)");
    auto seq = build_fulfilling_sequence(s, f, 3, {0});
    CHECK(seq.size() == 3);
    CHECK(seq.tiers[0] == std::vector<ElemId>{0});
    CHECK(fulfils(s, seq, f, FulfilVariant::V1));
  }
  SUBCASE("true quantifier-free sentence") {
    FiniteStructure s = neq_structure();
    FormulaPtr f = parse_formula(s.sig, "forall x. neq(x,x) | ~neq(x,x)");
    auto seq = build_fulfilling_sequence(s, f, 2, {0});
    CHECK(fulfils(s, seq, f, FulfilVariant::V1));
  }
  SUBCASE("missing constant in seed") {
    FiniteStructure s;
    s.sig.constants = {"c"};
    s.sig.predicates = {{"P", 1}};
    s.domain = {0, 1};
    s.constants["c"] = 1;
    s.predicates["P"] = {{{0}, true}, {{1}, true}};
    FormulaPtr f = parse_formula(s.sig, "exists x. P(x)");
    CHECK_THROWS_AS(build_fulfilling_sequence(s, f, 2, {0}), InputError);
  }
  SUBCASE("false sentence") {
    FiniteStructure s = neq_structure();
    FormulaPtr f = parse_formula(s.sig, "exists x. neq(x,x)");
    CHECK_THROWS_AS(build_fulfilling_sequence(s, f, 2, {0}), InputError);
  }
  SUBCASE("construction fulfils on sampled corpus") {
    auto structures = all_corpus_structures(2, true);
    auto sents = sample_nnf_sentences(59, 20, 2);
    std::mt19937 rng(31);
    for (auto &f : sents) {
      const auto &s = structures[rng() % structures.size()];
      if (!eval_tarski(s, f, {})) continue;
      auto seq = build_fulfilling_sequence(s, f, 4, {s.domain.front()});
      CHECK(fulfils(s, seq, f, FulfilVariant::V1));
    }
  }
}

TEST_CASE("v1_from_v2 thinning") {
  SUBCASE("index arithmetic") {
    FulfilSequence seq = chain({{0}, {0}, {0}, {0}, {0}, {0}, {0}});
    auto t1 = v1_from_v2(seq, 1);
    CHECK(t1.size() == 7);
    auto t2 = v1_from_v2(seq, 2);
    REQUIRE(t2.size() == 4);  // indices 0,2,4,6
    CHECK_THROWS_AS(v1_from_v2(seq, 0), InputError);
  }
  SUBCASE("thinned V2-fulfilment becomes V1, sampled corpus") {
    auto structures = all_corpus_structures(2, false);
    auto sents = sample_nnf_sentences(61, 25, 2, false);
    std::mt19937 rng(37);
    auto chains6 = all_chains(2, 6);
    int hits = 0;
    for (auto &f : sents) {
      int k = count_existentials(f);
      if (k < 1 || k > 2) continue;
      for (int t = 0; t < 60; ++t) {
        const auto &s = structures[rng() % structures.size()];
        const auto &seq = chains6[rng() % chains6.size()];
        if (!fulfils(s, seq, f, FulfilVariant::V2)) continue;
        auto thin = v1_from_v2(seq, k);
        CHECK(fulfils(s, thin, f, FulfilVariant::V1));
        ++hits;
      }
    }
    CHECK(hits > 0);
  }
}

TEST_CASE("game agrees with the clause evaluation everywhere sampled") {
  auto structures = all_corpus_structures(2, true);
  auto sents = sample_nnf_sentences(67, 30, 3);
  std::mt19937 rng(41);
  auto chains = all_chains(2, 4);
  for (auto &f : sents) {
    const auto &s = structures[rng() % structures.size()];
    for (int t = 0; t < 8; ++t) {
      const auto &seq = chains[rng() % chains.size()];
      CHECK(game_eval(s, seq, f) ==
            eval_fulfil_at(s, seq, f, {}, 0, FulfilVariant::V1));
    }
  }
  // quantifier-free true sentence: empty game
  FiniteStructure s = neq_structure();
  FormulaPtr qf = to_nnf(parse_formula(s.sig, "neq(x,x) | ~neq(x,x)"));
  CHECK(game_eval(s, chain({{0}, {0, 1}}), universal_closure(qf)));
  // non-NNF input refused
  FormulaPtr imp = parse_formula(s.sig, "neq(x,x) -> neq(x,x)");
  CHECK_THROWS_AS(game_eval(s, chain({{0}, {0}}), universal_closure(imp)), InputError);
}

TEST_CASE("game trace records a winning line") {
  FiniteStructure s = neq_structure();
  FormulaPtr f = to_nnf(parse_formula(s.sig, "forall x. exists y. neq(x,y)"));
  auto [won, moves] = game_eval_trace(s, chain({{0}, {0, 1}}), f);
  CHECK(won);
  CHECK(!moves.empty());
}

TEST_CASE("rank-1 contradiction is never fulfilled over 3-tier chains") {
  FiniteStructure s = neq_structure();
  FormulaPtr theta = parse_formula(s.sig, "forall x. neq(x,x)");
  FormulaPtr contra = Formula::land(theta, Formula::lnot(theta));
  for (auto &seq : all_chains(2, 3)) {
    CHECK_FALSE(fulfils(s, seq, contra, FulfilVariant::V1));
    CHECK_FALSE(game_eval(s, seq, to_nnf(contra)));
  }
}

TEST_CASE("no_counterexample") {
  FiniteStructure s;
  s.sig.predicates = {{"le", 2}};
  s.domain = {0, 1, 2, 3, 4, 5};
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) s.predicates["le"][{i, j}] = true;
  FormulaPtr f = parse_formula(
      s.sig, "exists x. forall y. exists u. forall v. le(x,u) | le(v,y)");
  std::map<Tuple, ElemId> fn, gn;
  for (int i = 0; i < 6; ++i) {
    fn[{i}] = (i + 1) % 6;
    for (int j = 0; j < 6; ++j) gn[{i, j}] = std::max(i, j);
  }
  auto [x, u] = no_counterexample(s, f, fn, gn);
  Valuation v{{"x", x}, {"y", fn.at({x})}, {"u", u}, {"v", gn.at({x, u})}};
  FormulaPtr psi = parse_formula(s.sig, "le(x,u) | le(v,y)");
  CHECK(eval_tarski(s, psi, v));

  SUBCASE("vacuous matrix returns least elements") {
    FormulaPtr triv = parse_formula(
        s.sig, "exists x. forall y. exists u. forall v. le(x,x)");
    auto [x2, u2] = no_counterexample(s, triv, fn, gn);
    CHECK(x2 == 0);
    CHECK(u2 == 0);
  }
  SUBCASE("invariant under adding unused elements") {
    FiniteStructure s2 = s;
    s2.domain.push_back(6);
    for (int i = 0; i <= 6; ++i) s2.predicates["le"][{i, 6}] = true;
    std::map<Tuple, ElemId> fn2 = fn, gn2 = gn;
    fn2[{6}] = 6;
    for (int i = 0; i <= 6; ++i) {
      gn2[{i, 6}] = 6;
      gn2[{6, i}] = 6;
    }
    auto [x3, u3] = no_counterexample(s2, f, fn2, gn2);
    CHECK(x3 == x);
    CHECK(u3 == u);
  }
  SUBCASE("false sentence is an error") {
    FormulaPtr bad = parse_formula(
        s.sig, "exists x. forall y. exists u. forall v. le(v,u) & ~le(v,u)");
    CHECK_THROWS_AS(no_counterexample(s, bad, fn, gn), InputError);
  }
}

TEST_CASE("sequence JSON round trip") {
  auto seq = chain({{0}, {0, 1}});
  auto txt = sequence_to_json(seq);
  auto back = sequence_from_json(txt);
  CHECK(back.tiers == seq.tiers);
  CHECK_THROWS_AS(sequence_from_json("[]"), InputError);
}

TEST_CASE("explain_failure names the first falsified clause") {
  FiniteStructure s = neq_structure();
  FormulaPtr f = parse_formula(s.sig, "forall x. exists y. neq(x,y)");
  auto why = explain_failure(s, chain({{0}, {0}}), f, FulfilVariant::V1);
  REQUIRE(why.has_value());
  CHECK(why->find("no witness") != std::string::npos);
  CHECK_FALSE(explain_failure(s, chain({{0}, {0, 1}}), f, FulfilVariant::V1).has_value());
}
