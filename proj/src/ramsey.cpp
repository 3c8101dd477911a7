#include "fw/ramsey.hpp"

#include <algorithm>
#include <array>
#include <map>

#include <json.hpp>

namespace fw {

// ---------- combinadic indexing ----------

namespace {

long long comb(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// rank of an increasing position tuple among all k-subsets of {0..n-1}
long long tuple_rank(const std::vector<int> &pos, int n) {
  int k = (int)pos.size();
  long long r = 0;
  int prev = -1;
  for (int i = 0; i < k; ++i) {
    for (int v = prev + 1; v < pos[i]; ++v) r += comb(n - 1 - v, k - 1 - i);
    prev = pos[i];
  }
  return r;
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int> &)> &fn) {
  if (k > n || k < 0) return;
  std::vector<int> pos(k);
  for (int i = 0; i < k; ++i) pos[i] = i;
  for (;;) {
    fn(pos);
    int i = k - 1;
    while (i >= 0 && pos[i] == n - k + i) --i;
    if (i < 0) break;
    ++pos[i];
    for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace

Coloring Coloring::make(std::vector<int> ground, int e, int c) {
  Coloring f;
  std::sort(ground.begin(), ground.end());
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
  f.ground = std::move(ground);
  f.e = e;
  f.c = c;
  if (e < 0 || e > (int)f.ground.size())
    throw InputError("coloring exponent must satisfy 0 <= e <= |X|");
  if (c < 1) throw InputError("coloring needs at least one color");
  f.table.assign(comb((int)f.ground.size(), e), 0);
  return f;
}

static std::vector<int> positions_of(const Coloring &f, const std::vector<int> &tuple) {
  std::vector<int> pos;
  pos.reserve(tuple.size());
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (i > 0 && tuple[i] <= tuple[i - 1])
      throw InputError("coloring tuples must be strictly increasing");
    auto it = std::lower_bound(f.ground.begin(), f.ground.end(), tuple[i]);
    if (it == f.ground.end() || *it != tuple[i])
      throw InputError("tuple value outside the ground set");
    pos.push_back((int)(it - f.ground.begin()));
  }
  return pos;
}

int Coloring::color_of(const std::vector<int> &tuple) const {
  if ((int)tuple.size() != e) throw InputError("tuple arity mismatch");
  return table[tuple_rank(positions_of(*this, tuple), (int)ground.size())];
}

void Coloring::set_color(const std::vector<int> &tuple, int col) {
  if ((int)tuple.size() != e) throw InputError("tuple arity mismatch");
  if (col < 0 || col >= c) throw InputError("color out of range");
  table[tuple_rank(positions_of(*this, tuple), (int)ground.size())] = col;
}

std::string coloring_to_json(const Coloring &f) {
  nlohmann::json j;
  bool contiguous = !f.ground.empty() && f.ground.front() == 0 &&
                    f.ground.back() == (int)f.ground.size() - 1;
  if (contiguous) j["n"] = (int)f.ground.size();
  j["ground"] = f.ground;
  j["e"] = f.e;
  j["c"] = f.c;
  nlohmann::json rows = nlohmann::json::array();
  for_each_subset((int)f.ground.size(), f.e, [&](const std::vector<int> &pos) {
    std::vector<int> tuple;
    for (int p : pos) tuple.push_back(f.ground[p]);
    rows.push_back(nlohmann::json::array(
        {tuple, f.table[tuple_rank(pos, (int)f.ground.size())]}));
  });
  j["table"] = rows;
  return j.dump();
}

Coloring coloring_from_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw InputError(std::string("bad coloring JSON: ") + e.what());
  }
  std::vector<int> ground;
  if (j.contains("ground"))
    for (auto &v : j["ground"]) ground.push_back(v.get<int>());
  else if (j.contains("n"))
    for (int i = 0; i < j["n"].get<int>(); ++i) ground.push_back(i);
  else
    throw InputError("coloring JSON needs 'ground' or 'n'");
  Coloring f = Coloring::make(ground, j["e"].get<int>(), j["c"].get<int>());
  for (auto &row : j["table"]) {
    std::vector<int> tuple;
    for (auto &v : row[0]) tuple.push_back(v.get<int>());
    f.set_color(tuple, row[1].get<int>());
  }
  return f;
}

// ---------- largeness and homogeneity ----------

bool is_large(const std::vector<int> &Y) {
  if (Y.empty()) return true;  // vacuous |Y| >= min Y
  return (int)Y.size() >= *std::min_element(Y.begin(), Y.end());
}

bool is_homogeneous(const Coloring &f, const std::vector<int> &Y) {
  if ((int)Y.size() < f.e) throw InputError("set too small for the exponent");
  std::vector<int> ys = Y;
  std::sort(ys.begin(), ys.end());
  int first = -1;
  bool ok = true;
  for_each_subset((int)ys.size(), f.e, [&](const std::vector<int> &pos) {
    if (!ok) return;
    std::vector<int> tuple;
    for (int p : pos) tuple.push_back(ys[p]);
    int col = f.color_of(tuple);
    if (first < 0)
      first = col;
    else if (col != first)
      ok = false;
  });
  return ok;
}

bool homog_iff_small_sets(const Coloring &f, const std::vector<int> &Y) {
  if ((int)Y.size() < f.e + 1) throw InputError("set too small for e+1 subsets");
  std::vector<int> ys = Y;
  std::sort(ys.begin(), ys.end());
  bool all = true;
  for_each_subset((int)ys.size(), f.e + 1, [&](const std::vector<int> &pos) {
    if (!all) return;
    std::vector<int> sub;
    for (int p : pos) sub.push_back(ys[p]);
    if (!is_homogeneous(f, sub)) all = false;
  });
  return all;
}

bool verify_unarrow(const Coloring &f, int set_size) {
  bool none = true;
  for_each_subset((int)f.ground.size(), set_size, [&](const std::vector<int> &pos) {
    if (!none) return;
    std::vector<int> Y;
    for (int p : pos) Y.push_back(f.ground[p]);
    if (is_homogeneous(f, Y)) none = false;
  });
  return none;
}

// ---------- the arrow decision ----------

ArrowQuery ArrowQuery::of_n(int n, int k, int e, int c, bool starred) {
  ArrowQuery q;
  for (int i = 0; i < n; ++i) q.ground.push_back(i);
  q.k = k;
  q.e = e;
  q.c = c;
  q.starred = starred;
  return q;
}

ArrowQuery ArrowQuery::open_interval(int m, int N, int k, int e, int c, bool starred) {
  ArrowQuery q;
  for (int i = m + 1; i < N; ++i) q.ground.push_back(i);
  q.k = k;
  q.e = e;
  q.c = c;
  q.starred = starred;
  return q;
}

ArrowQuery ArrowQuery::closed_interval(int lo, int hi, int k, int e, int c,
                                       bool starred) {
  ArrowQuery q;
  for (int i = lo; i <= hi; ++i) q.ground.push_back(i);
  q.k = k;
  q.e = e;
  q.c = c;
  q.starred = starred;
  return q;
}

namespace {

// first qualifying homogeneous set, scanning subsets in canonical order
std::optional<std::vector<int>> find_qualifying(const Coloring &f, int k, bool starred) {
  int n = (int)f.ground.size();
  int need = std::max(k, f.e);
  std::optional<std::vector<int>> found;
  for (int size = need; size <= n && !found; ++size) {
    for_each_subset(n, size, [&](const std::vector<int> &pos) {
      if (found) return;
      std::vector<int> Y;
      for (int p : pos) Y.push_back(f.ground[p]);
      if (starred && !is_large(Y)) return;
      if (is_homogeneous(f, Y)) found = Y;
    });
  }
  return found;
}

}  // namespace

ArrowCertificate arrow_check(const ArrowQuery &q) {
  ArrowCertificate cert;
  if (q.k < 1) throw InputError("arrow query needs k >= 1");
  if ((int)q.ground.size() < q.e) {
    cert.holds = false;
    cert.note = "ground set smaller than the exponent";
    return cert;
  }
  Coloring f = Coloring::make(q.ground, q.e, q.c);
  long long T = f.tuple_count();
  long long visited = 0;

  // DFS over tuple colors with the first-use color rule: tuple t may take a
  // color in 0..min(max_used+1, c-1).
  std::optional<Coloring> counterexample;
  std::function<void(long long, int)> dfs = [&](long long t, int max_used) {
    if (counterexample) return;
    if (++visited > q.node_limit)
      throw LimitError("arrow search limit exceeded");
    if (t == T) {
      if (!find_qualifying(f, q.k, q.starred)) counterexample = f;
      return;
    }
    int top = std::min(max_used + 1, q.c - 1);
    for (int col = 0; col <= top && !counterexample; ++col) {
      f.table[t] = col;
      dfs(t + 1, std::max(max_used, col));
    }
    f.table[t] = 0;
  };
  dfs(0, -1);
  cert.colorings_checked = visited;
  if (counterexample) {
    cert.holds = false;
    cert.counterexample = counterexample;
    cert.note = "counterexample coloring verified to admit no qualifying set";
  } else {
    cert.holds = true;
    // attach one re-checkable witness for the all-zero coloring
    Coloring zero = Coloring::make(q.ground, q.e, q.c);
    cert.witness_set = find_qualifying(zero, q.k, q.starred);
    cert.note = "exhausted all colorings up to color permutation";
  }
  return cert;
}

std::optional<int> sigma_star(int e, int c, int n_cap, long long node_limit) {
  for (int n = std::max(e, 1); n <= n_cap; ++n) {
    ArrowQuery q = ArrowQuery::of_n(n, e + 1, e, c, true);
    q.node_limit = node_limit;
    if (arrow_check(q).holds) return n;
  }
  return std::nullopt;
}

// ---------- the step-down construction ----------

Coloring build_76_G(Case76 which, int m, int e, int c, int N, const Coloring &F,
                    const Coloring &g) {
  if (m < 3) throw InputError("construction needs m >= 3");
  if (e < 2 || c < 2) throw InputError("construction needs e, c >= 2");
  int s = m - e - 1;
  int t = 2 * m + 6;
  if (s < 0) throw InputError("construction needs m >= e + 1");
  if ((int)g.ground.size() != t || g.e != m || g.c != 2)
    throw InputError("g must color [2m+6]^m with two colors");
  if (!verify_unarrow(g, m + 1))
    throw InputError("g has a homogeneous set of cardinality m+1");
  if (F.e != e || F.c > c) throw InputError("F must be an e-exponent coloring");
  if ((int)F.ground.size() != N) throw InputError("F must live on [N]");

  // f(v) = 1 iff {v_0..v_e} is homogeneous for F
  auto f_of = [&](const std::vector<int> &v) -> int {
    return is_homogeneous(F, v) ? 1 : 0;
  };

  int out_colors = which == Case76::I ? 3 : 2;
  Coloring G = Coloring::make(F.ground, m, out_colors);
  int n = (int)G.ground.size();
  for_each_subset(n, m, [&](const std::vector<int> &pos) {
    std::vector<int> v;
    for (int p : pos) v.push_back(G.ground[p]);
    int i = m;
    for (int idx = 0; idx < m; ++idx)
      if (v[idx] >= t) {
        i = idx;
        break;
      }
    int col = 0;
    switch (which) {
      case Case76::I: {
        if (i == m)
          col = g.color_of(v);
        else if (i == 1 || i == m - 1)
          col = 2;
        else if (1 < i && i < m - 1)
          col = i % 2;
        else {  // i == 0
          std::vector<int> w(v.begin(), v.begin() + e + 1);
          for (auto &x : w) x -= s;
          col = f_of(w);
        }
        break;
      }
      case Case76::II: {
        if (i == m)
          col = g.color_of(v);
        else if (i >= m - e)
          col = i % 2;
        else {
          std::vector<int> w(v.begin() + i, v.begin() + i + e + 1);
          for (auto &x : w) x -= s;
          col = (i + f_of(w)) % 2;
        }
        break;
      }
      case Case76::III: {
        if (i + e < m) {
          std::vector<int> w(v.begin() + i, v.begin() + i + e + 1);
          for (auto &x : w) x -= s;
          col = (i + f_of(w)) % 2;
        } else {
          col = 0;  // the table leaves these free; fix the least color
        }
        break;
      }
    }
    G.table[tuple_rank(pos, n)] = col;
  });
  return G;
}

// ---------- the 2k+6 parity coloring ----------

Coloring footnote_coloring(int k, const Coloring &isbell_f) {
  if (k < 4) throw InputError("the block construction needs k >= 4");
  std::vector<int> twelve;
  for (int i = 0; i < 12; ++i) twelve.push_back(i);
  if (isbell_f.ground != twelve || isbell_f.e != 3 || isbell_f.c != 2)
    throw InputError("witness must color [12]^3 with two colors");
  if (!verify_unarrow(isbell_f, 4))
    throw InputError("witness has a homogeneous 4-set");

  int n = 2 * k + 6;
  int blue_lo = k - 3 + 12;
  int blue_hi = 2 * (k - 3) + 12;  // exclusive
  Coloring F = Coloring::make(ArrowQuery::of_n(n, 1, 1, 1, false).ground, k, 2);
  for_each_subset(n, k, [&](const std::vector<int> &pos) {
    // ground is {0..n-1}, so positions are values
    int D = k;
    for (int idx = 0; idx < k; ++idx)
      if (pos[idx] >= blue_lo && pos[idx] < blue_hi) {
        D = idx;
        break;
      }
    int E = 0;
    int greens = 0;
    for (int idx = 0; idx < k; ++idx)
      if (pos[idx] < 12) ++greens;
    if (greens >= 3) E = isbell_f.color_of({pos[0], pos[1], pos[2]});
    F.table[tuple_rank(pos, n)] = (D + E) % 2;
  });
  if (!verify_unarrow(F, k + 1))
    throw InputError("block construction failed its own verification");
  return F;
}

// ---------- the 12-point search ----------

namespace {

// Phase-1 heuristic for the 12-point search: branch on whole orbits of
// triples under the rotation x -> x+2 (mod 12). The orbit space is small and
// contains witnesses; anything found is verified before being returned.
std::optional<Coloring> isbell_orbit_phase(long long budget, long long &nodes) {
  const int n = 12;
  std::vector<std::array<int, 3>> triples;
  for (int c0 = 0; c0 < n; ++c0)
    for (int c1 = c0 + 1; c1 < n; ++c1)
      for (int c2 = c1 + 1; c2 < n; ++c2) triples.push_back({c0, c1, c2});
  std::map<std::array<int, 3>, int> tri_index;
  for (size_t i = 0; i < triples.size(); ++i) tri_index[triples[i]] = (int)i;

  std::vector<int> orbit_of(triples.size(), -1);
  int orbit_count = 0;
  for (size_t i = 0; i < triples.size(); ++i) {
    if (orbit_of[i] >= 0) continue;
    int oid = orbit_count++;
    std::array<int, 3> t = triples[i];
    for (int s = 0; s < n; s += 2) {
      std::array<int, 3> u;
      for (int j = 0; j < 3; ++j) u[j] = (t[j] + s) % n;
      std::sort(u.begin(), u.end());
      orbit_of[tri_index[u]] = oid;
    }
  }

  std::vector<std::array<int, 4>> fs_orbits;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d)
          fs_orbits.push_back({orbit_of[tri_index[{a, b, c}]],
                               orbit_of[tri_index[{a, b, d}]],
                               orbit_of[tri_index[{a, c, d}]],
                               orbit_of[tri_index[{b, c, d}]]});

  std::vector<int> color(orbit_count, -1);
  std::function<bool(int)> dfs = [&](int i) -> bool {
    if (i == orbit_count) return true;
    if (++nodes > budget) return false;
    int top = i == 0 ? 0 : 1;
    for (int col = 0; col <= top; ++col) {
      color[i] = col;
      bool bad = false;
      for (auto &fo : fs_orbits) {
        int c0 = color[fo[0]], c1 = color[fo[1]], c2 = color[fo[2]], c3 = color[fo[3]];
        if (c0 >= 0 && c0 == c1 && c1 == c2 && c2 == c3) {
          bad = true;
          break;
        }
      }
      if (!bad && dfs(i + 1)) return true;
      if (nodes > budget) return false;
    }
    color[i] = -1;
    return false;
  };
  if (!dfs(0)) return std::nullopt;

  Coloring f = Coloring::make(ArrowQuery::of_n(n, 1, 1, 1, false).ground, 3, 2);
  for (size_t i = 0; i < triples.size(); ++i)
    f.set_color({triples[i][0], triples[i][1], triples[i][2]}, color[orbit_of[i]]);
  return f;
}

}  // namespace

std::optional<Coloring> search_isbell(long long budget) {
  long long nodes = 0;
  if (auto f = isbell_orbit_phase(budget, nodes))
    if (verify_unarrow(*f, 4)) return f;
  return search_isbell_general(budget - std::min(budget, nodes));
}

std::optional<Coloring> search_isbell_general(long long budget) {
  const int n = 12;
  // triples ordered by (max, mid, min) so four-sets complete early
  std::vector<std::array<int, 3>> triples;
  for (int c2 = 2; c2 < n; ++c2)
    for (int c1 = 1; c1 < c2; ++c1)
      for (int c0 = 0; c0 < c1; ++c0) triples.push_back({c0, c1, c2});
  const int T = (int)triples.size();
  std::map<std::array<int, 3>, int> index_of;
  for (int i = 0; i < T; ++i) index_of[triples[i]] = i;

  std::vector<std::array<int, 4>> foursets;
  for (int d = 3; d < n; ++d)
    for (int c = 2; c < d; ++c)
      for (int b = 1; b < c; ++b)
        for (int a = 0; a < b; ++a)
          foursets.push_back({index_of[{a, b, c}], index_of[{a, b, d}],
                              index_of[{a, c, d}], index_of[{b, c, d}]});
  std::vector<std::vector<int>> member_of(T);
  for (size_t q = 0; q < foursets.size(); ++q)
    for (int t : foursets[q]) member_of[t].push_back((int)q);

  std::vector<int> color(T, -1);
  std::vector<std::array<int, 2>> count(foursets.size(), {0, 0});
  std::vector<int> trail;
  long long nodes = 0;

  // assign + unit propagation: a 4-set with three triples of one color and
  // one open triple forces the opposite color there. Counts are updated for
  // every queued assignment so the undo stays symmetrical.
  auto assign = [&](int t, int col) -> bool {
    std::vector<int> queue{t};
    color[t] = col;
    trail.push_back(t);
    bool conflict = false;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      int u = queue[qi];
      int uc = color[u];
      for (int q : member_of[u]) {
        if (++count[q][uc] == 4) conflict = true;
        if (!conflict && count[q][uc] == 3 && count[q][1 - uc] == 0) {
          int open = -1;
          for (int v : foursets[q])
            if (color[v] < 0) open = v;
          if (open >= 0) {
            color[open] = 1 - uc;
            trail.push_back(open);
            queue.push_back(open);
          }
        }
      }
    }
    return !conflict;
  };
  auto undo_to = [&](size_t mark) {
    while (trail.size() > mark) {
      int t = trail.back();
      trail.pop_back();
      for (int q : member_of[t]) --count[q][color[t]];
      color[t] = -1;
    }
  };

  std::function<bool()> dfs = [&]() -> bool {
    int t = -1;
    for (int i = 0; i < T; ++i)
      if (color[i] < 0) {
        t = i;
        break;
      }
    if (t < 0) return true;
    if (++nodes > budget) return false;
    int top = t == 0 ? 0 : 1;  // symmetry: fix the first triple's color
    for (int col = 0; col <= top; ++col) {
      size_t mark = trail.size();
      if (assign(t, col) && dfs()) return true;
      undo_to(mark);
      if (nodes > budget) return false;
    }
    return false;
  };
  if (!dfs()) return std::nullopt;

  Coloring f = Coloring::make(ArrowQuery::of_n(n, 1, 1, 1, false).ground, 3, 2);
  for (int i = 0; i < T; ++i)
    f.set_color({triples[i][0], triples[i][1], triples[i][2]}, color[i]);
  return f;
}

// ---------- the formula-encoding coloring ----------

Coloring lemma72_coloring(int n, int e, int b,
                          const std::vector<std::function<bool(const std::vector<int> &)>>
                              &predicates) {
  if ((int)predicates.size() > b + 1)
    throw InputError("too many predicates for the bit budget");
  if (b < 0 || b > 20) throw InputError("bit budget out of range");
  int c = 1 << (b + 2);
  int threshold = 1 << b;
  Coloring F = Coloring::make(ArrowQuery::of_n(n, 1, 1, 1, false).ground, e + 1, c);
  for_each_subset(n, e + 1, [&](const std::vector<int> &pos) {
    std::vector<int> v(pos.begin(), pos.end());  // ground = {0..n-1}
    int col;
    if (v[0] < threshold) {
      col = 2 * v[0] + 1;
    } else {
      col = 0;
      for (size_t i = 0; i < predicates.size(); ++i)
        if (predicates[i](v)) col += 1 << (i + 1);
    }
    F.table[tuple_rank(pos, n)] = col;
  });
  return F;
}

}  // namespace fw
