#include "fw/ordinal.hpp"

#include <algorithm>
#include <cctype>

namespace fw {

// ---------- CNF basics ----------

bool OrdinalCNF::is_finite() const {
  return terms.empty() || (terms.size() == 1 && terms[0].first.is_zero());
}

std::uint64_t OrdinalCNF::finite_value() const {
  if (terms.empty()) return 0;
  if (!is_finite()) throw InputError("ordinal is not finite");
  return terms[0].second;
}

OrdinalCNF OrdinalCNF::zero() { return {}; }

OrdinalCNF OrdinalCNF::finite(std::uint64_t n) {
  OrdinalCNF a;
  if (n > 0) a.terms.push_back({zero(), n});
  return a;
}

OrdinalCNF OrdinalCNF::omega() {
  OrdinalCNF a;
  a.terms.push_back({finite(1), 1});
  return a;
}

int ord_cmp(const OrdinalCNF &a, const OrdinalCNF &b) {
  size_t n = std::min(a.terms.size(), b.terms.size());
  for (size_t i = 0; i < n; ++i) {
    int c = ord_cmp(a.terms[i].first, b.terms[i].first);
    if (c != 0) return c;
    if (a.terms[i].second != b.terms[i].second)
      return a.terms[i].second < b.terms[i].second ? -1 : 1;
  }
  if (a.terms.size() == b.terms.size()) return 0;
  return a.terms.size() < b.terms.size() ? -1 : 1;
}

OrdinalCNF ord_add(const OrdinalCNF &a, const OrdinalCNF &b) {
  if (b.is_zero()) return a;
  const OrdinalCNF &e = b.terms[0].first;
  OrdinalCNF out;
  for (auto &t : a.terms) {
    if (ord_cmp(t.first, e) > 0)
      out.terms.push_back(t);
    else
      break;
  }
  size_t kept = out.terms.size();
  bool merged = false;
  if (kept < a.terms.size() && ord_cmp(a.terms[kept].first, e) == 0) {
    out.terms.push_back({e, a.terms[kept].second + b.terms[0].second});
    merged = true;
  }
  if (!merged) out.terms.push_back(b.terms[0]);
  for (size_t i = 1; i < b.terms.size(); ++i) out.terms.push_back(b.terms[i]);
  return out;
}

OrdinalCNF ord_sub(const OrdinalCNF &a, const OrdinalCNF &b) {
  int c = ord_cmp(a, b);
  if (c < 0) throw InputError("ordinal subtraction requires b <= a");
  if (c == 0) return OrdinalCNF::zero();
  size_t i = 0;
  while (i < b.terms.size() && i < a.terms.size() &&
         ord_cmp(a.terms[i].first, b.terms[i].first) == 0 &&
         a.terms[i].second == b.terms[i].second)
    ++i;
  OrdinalCNF out;
  if (i == b.terms.size()) {
    for (size_t k = i; k < a.terms.size(); ++k) out.terms.push_back(a.terms[k]);
    return out;
  }
  int ec = ord_cmp(a.terms[i].first, b.terms[i].first);
  if (ec > 0) {
    for (size_t k = i; k < a.terms.size(); ++k) out.terms.push_back(a.terms[k]);
    return out;
  }
  if (ec == 0 && a.terms[i].second > b.terms[i].second) {
    out.terms.push_back({a.terms[i].first, a.terms[i].second - b.terms[i].second});
    for (size_t k = i + 1; k < a.terms.size(); ++k) out.terms.push_back(a.terms[k]);
    return out;
  }
  throw InputError("ordinal subtraction: inconsistent comparison");
}

OrdinalCNF ord_mul(const OrdinalCNF &a, const OrdinalCNF &b) {
  if (a.is_zero() || b.is_zero()) return OrdinalCNF::zero();
  OrdinalCNF out;
  const OrdinalCNF &alead = a.terms[0].first;
  for (auto &[beta, k] : b.terms) {
    OrdinalCNF part;
    if (beta.is_zero()) {
      // a * k: multiply the leading coefficient, keep the tail
      part.terms.push_back({alead, a.terms[0].second * k});
      for (size_t i = 1; i < a.terms.size(); ++i) part.terms.push_back(a.terms[i]);
    } else {
      part.terms.push_back({ord_add(alead, beta), k});
    }
    out = ord_add(out, part);
  }
  return out;
}

namespace {

// exponent shift for finite-base powers: w^beta contributes w^(beta-1) when
// beta is finite, w^beta otherwise (1 + beta = beta for infinite beta)
OrdinalCNF pred_exponent(const OrdinalCNF &beta) {
  if (beta.is_finite()) {
    std::uint64_t m = beta.finite_value();
    if (m == 0) throw InputError("pred_exponent expects beta >= 1");
    return OrdinalCNF::finite(m - 1);
  }
  return beta;
}

// a^lambda for lambda with all exponents >= 1
OrdinalCNF pow_limit(const OrdinalCNF &a, const OrdinalCNF &lambda) {
  if (lambda.is_zero()) return OrdinalCNF::finite(1);
  if (a.is_finite()) {
    std::uint64_t n = a.finite_value();
    if (n == 0) return OrdinalCNF::zero();
    if (n == 1) return OrdinalCNF::finite(1);
    OrdinalCNF shifted;
    for (auto &[beta, c] : lambda.terms)
      shifted.terms.push_back({pred_exponent(beta), c});
    return ord_exp_omega(shifted);
  }
  return ord_exp_omega(ord_mul(a.terms[0].first, lambda));
}

}  // namespace

OrdinalCNF ord_pow(const OrdinalCNF &a, const OrdinalCNF &b) {
  if (b.is_zero()) return OrdinalCNF::finite(1);
  if (a.is_zero()) return OrdinalCNF::zero();
  if (a.is_finite() && a.finite_value() == 1) return OrdinalCNF::finite(1);
  OrdinalCNF limit_part = b;
  std::uint64_t m = 0;
  if (!b.terms.empty() && b.terms.back().first.is_zero()) {
    m = b.terms.back().second;
    limit_part.terms.pop_back();
  }
  OrdinalCNF out = pow_limit(a, limit_part);
  OrdinalCNF pw = OrdinalCNF::finite(1);
  OrdinalCNF sq = a;
  std::uint64_t e = m;
  if (e > 4096) throw LimitError("finite exponent too large");
  while (e > 0) {
    if (e & 1) pw = ord_mul(pw, sq);
    e >>= 1;
    if (e) sq = ord_mul(sq, sq);
  }
  return ord_mul(out, pw);
}

OrdinalCNF ord_exp_omega(const OrdinalCNF &a) {
  OrdinalCNF out;
  out.terms.push_back({a, 1});
  return out;
}

OrdinalCNF ord_exp_two(const OrdinalCNF &a) { return ord_pow(OrdinalCNF::finite(2), a); }

// ---------- Literals ----------

namespace {

struct OrdParser {
  const std::string &src;
  size_t pos = 0;

  explicit OrdParser(const std::string &s) : src(s) {}

  void skip() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &what) {
    throw ParseError(1, (int)pos + 1, what);
  }

  OrdinalCNF parse_atom() {
    skip();
    if (pos >= src.size()) fail("expected an ordinal");
    char c = src[pos];
    if (c == 'w') {
      ++pos;
      return OrdinalCNF::omega();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t n = 0;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        n = n * 10 + (src[pos] - '0');
        ++pos;
      }
      return OrdinalCNF::finite(n);
    }
    if (c == '(') {
      ++pos;
      OrdinalCNF e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  OrdinalCNF parse_power() {  // right associative
    OrdinalCNF base = parse_atom();
    if (eat('^')) {
      OrdinalCNF exp = parse_power();
      return ord_pow(base, exp);
    }
    return base;
  }

  OrdinalCNF parse_product() {
    OrdinalCNF a = parse_power();
    while (eat('*')) a = ord_mul(a, parse_power());
    return a;
  }

  OrdinalCNF parse_sum() {
    OrdinalCNF a = parse_product();
    while (eat('+')) a = ord_add(a, parse_product());
    return a;
  }

  OrdinalCNF run() {
    OrdinalCNF a = parse_sum();
    skip();
    if (pos != src.size()) fail("trailing input");
    return a;
  }
};

}  // namespace

OrdinalCNF parse_ordinal(const std::string &text) { return OrdParser(text).run(); }

std::string print_ordinal(const OrdinalCNF &a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto &[e, c] : a.terms) {
    if (!first) out += " + ";
    first = false;
    if (e.is_zero()) {
      out += std::to_string(c);
      continue;
    }
    if (e.is_finite() && e.finite_value() == 1)
      out += "w";
    else if (e.is_finite())
      out += "w^" + std::to_string(e.finite_value());
    else if (e.terms.size() == 1 && e.terms[0].second == 1 &&
             e.terms[0].first.is_finite() && e.terms[0].first.finite_value() == 1)
      out += "w^w";
    else
      out += "w^(" + print_ordinal(e) + ")";
    if (c > 1) out += "*" + std::to_string(c);
  }
  return out;
}

// ---------- Order constructors ----------

OrdElem OrdElem::mk_leaf(int id) {
  OrdElem e;
  e.kind = Leaf;
  e.leaf = id;
  return e;
}
OrdElem OrdElem::mk_seq(std::vector<OrdElem> kids) {
  OrdElem e;
  e.kind = Seq;
  e.kids = std::move(kids);
  return e;
}
OrdElem OrdElem::mk_tag(int n, OrdElem x) {
  OrdElem e;
  e.kind = Tag;
  e.tag = n;
  e.kids.push_back(std::move(x));
  return e;
}
bool OrdElem::operator==(const OrdElem &o) const {
  return kind == o.kind && leaf == o.leaf && tag == o.tag && kids == o.kids;
}

OrderSpecPtr OrderSpec::finite_order(const std::vector<int> &elements,
                                     const std::vector<std::pair<int, int>> &strict_pairs) {
  auto s = std::make_shared<OrderSpec>();
  s->kind = Finite;
  s->elements = elements;
  int n = (int)elements.size();
  auto idx = [&](int id) {
    for (int i = 0; i < n; ++i)
      if (elements[i] == id) return i;
    throw InputError("finite order: unknown element id");
  };
  s->lt.assign(n, std::vector<bool>(n, false));
  for (auto &[a, b] : strict_pairs) s->lt[idx(a)][idx(b)] = true;
  for (int k = 0; k < n; ++k)  // transitive closure
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (s->lt[i][k] && s->lt[k][j]) s->lt[i][j] = true;
  for (int i = 0; i < n; ++i)
    if (s->lt[i][i]) throw InputError("finite order contains a cycle");
  return s;
}

OrderSpecPtr OrderSpec::finite_chain(int k) {
  std::vector<int> elems;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < k; ++i) {
    elems.push_back(i);
    for (int j = i + 1; j < k; ++j) pairs.push_back({i, j});
  }
  return finite_order(elems, pairs);
}

static OrderSpecPtr mk(OrderSpec::Kind k, OrderSpecPtr base) {
  auto s = std::make_shared<OrderSpec>();
  s->kind = k;
  s->base = std::move(base);
  return s;
}

OrderSpecPtr OrderSpec::lex(OrderSpecPtr base) { return mk(Lex, std::move(base)); }
OrderSpecPtr OrderSpec::omega_power(OrderSpecPtr base) {
  return mk(OmegaPower, std::move(base));
}
OrderSpecPtr OrderSpec::descending_power(OrderSpecPtr base) {
  return mk(DescendingPower, std::move(base));
}
OrderSpecPtr OrderSpec::plus_point(OrderSpecPtr base, int inf_id) {
  auto s = std::make_shared<OrderSpec>();
  s->kind = PlusPoint;
  s->base = std::move(base);
  s->inf_id = inf_id;
  return s;
}
OrderSpecPtr OrderSpec::tower(OrderSpecPtr base, int n) {
  auto s = std::make_shared<OrderSpec>();
  s->kind = Tower;
  s->base = std::move(base);
  s->tower_n = n;
  return s;
}
OrderSpecPtr OrderSpec::epsilon_union(OrderSpecPtr base) {
  return mk(EpsilonUnion, std::move(base));
}

namespace {

// the two lex clauses: common-prefix drop, or proper prefix
OrderCmp lex_cmp(const std::vector<OrdElem> &a, const std::vector<OrdElem> &b,
                 const std::function<OrderCmp(const OrdElem &, const OrdElem &)> &cmp) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    OrderCmp c = cmp(a[i], b[i]);
    if (c != OrderCmp::Equal) return c;
  }
  if (a.size() == b.size()) return OrderCmp::Equal;
  return a.size() < b.size() ? OrderCmp::Less : OrderCmp::Greater;
}

const std::vector<OrdElem> &seq_of(const OrdElem &x) {
  if (x.kind != OrdElem::Seq) throw InputError("malformed element: expected a sequence");
  return x.kids;
}

OrderCmp cmp_rec(const OrderSpec &spec, const OrdElem &x, const OrdElem &y);

OrderCmp cmp_base(const OrderSpecPtr &base, const OrdElem &x, const OrdElem &y) {
  return cmp_rec(*base, x, y);
}

bool is_descending(const OrderSpecPtr &base, const std::vector<OrdElem> &xs) {
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    if (cmp_base(base, xs[i + 1], xs[i]) != OrderCmp::Less) return false;
  return true;
}

OrderCmp cmp_tower(const OrderSpecPtr &plus_base, int n, const OrdElem &x,
                   const OrdElem &y);

OrderCmp cmp_rec(const OrderSpec &spec, const OrdElem &x, const OrdElem &y) {
  switch (spec.kind) {
    case OrderSpec::Finite: {
      if (x.kind != OrdElem::Leaf || y.kind != OrdElem::Leaf)
        throw InputError("malformed element: expected a base id");
      int i = -1, j = -1;
      for (size_t k = 0; k < spec.elements.size(); ++k) {
        if (spec.elements[k] == x.leaf) i = (int)k;
        if (spec.elements[k] == y.leaf) j = (int)k;
      }
      if (i < 0 || j < 0) throw InputError("element id outside the finite order");
      if (i == j) return OrderCmp::Equal;
      if (spec.lt[i][j]) return OrderCmp::Less;
      if (spec.lt[j][i]) return OrderCmp::Greater;
      return OrderCmp::Incomparable;
    }
    case OrderSpec::Lex: {
      const auto &a = seq_of(x);
      const auto &b = seq_of(y);
      if (a.empty() || b.empty())
        throw InputError("malformed element: lex sequences are non-empty");
      return lex_cmp(a, b, [&](const OrdElem &u, const OrdElem &v) {
        return cmp_base(spec.base, u, v);
      });
    }
    case OrderSpec::OmegaPower: {
      const auto &a = seq_of(x);
      const auto &b = seq_of(y);
      if (a.size() != b.size())
        return a == b ? OrderCmp::Equal : OrderCmp::Incomparable;
      return lex_cmp(a, b, [&](const OrdElem &u, const OrdElem &v) {
        return cmp_base(spec.base, u, v);
      });
    }
    case OrderSpec::DescendingPower: {
      const auto &a = seq_of(x);
      const auto &b = seq_of(y);
      if (!is_descending(spec.base, a) || !is_descending(spec.base, b))
        throw InputError("malformed element: sequence not descending");
      return lex_cmp(a, b, [&](const OrdElem &u, const OrdElem &v) {
        return cmp_base(spec.base, u, v);
      });
    }
    case OrderSpec::PlusPoint: {
      bool xi = x.kind == OrdElem::Leaf && x.leaf == spec.inf_id;
      bool yi = y.kind == OrdElem::Leaf && y.leaf == spec.inf_id;
      if (xi && yi) return OrderCmp::Equal;
      if (yi) return OrderCmp::Less;
      if (xi) return OrderCmp::Greater;
      return cmp_base(spec.base, x, y);
    }
    case OrderSpec::Tower:
      return cmp_tower(spec.base, spec.tower_n, x, y);
    case OrderSpec::EpsilonUnion: {
      if (x.kind != OrdElem::Tag || y.kind != OrdElem::Tag)
        throw InputError("malformed element: expected a tagged pair");
      if (x.tag != y.tag) return OrderCmp::Incomparable;
      return cmp_tower(spec.base, x.tag, x.kids[0], y.kids[0]);
    }
  }
  throw InputError("bad order spec");
}

// level 0 is (<=_+)^w over the base; level n+1 is 2^(level n)
OrderCmp cmp_tower(const OrderSpecPtr &plus_base, int n, const OrdElem &x,
                   const OrdElem &y) {
  const auto &a = seq_of(x);
  const auto &b = seq_of(y);
  if (n == 0) {
    if (a.size() != b.size()) return x == y ? OrderCmp::Equal : OrderCmp::Incomparable;
    return lex_cmp(a, b, [&](const OrdElem &u, const OrdElem &v) {
      return cmp_rec(*plus_base, u, v);
    });
  }
  auto inner = [&](const OrdElem &u, const OrdElem &v) {
    return cmp_tower(plus_base, n - 1, u, v);
  };
  for (size_t i = 0; i + 1 < a.size(); ++i)
    if (inner(a[i + 1], a[i]) != OrderCmp::Less)
      throw InputError("malformed element: sequence not descending");
  for (size_t i = 0; i + 1 < b.size(); ++i)
    if (inner(b[i + 1], b[i]) != OrderCmp::Less)
      throw InputError("malformed element: sequence not descending");
  return lex_cmp(a, b, inner);
}

}  // namespace

OrderCmp order_cmp(const OrderSpecPtr &spec, const OrdElem &x, const OrdElem &y) {
  return cmp_rec(*spec, x, y);
}

namespace {

void enumerate_elements(const OrderSpecPtr &spec, int L, std::vector<OrdElem> &out) {
  switch (spec->kind) {
    case OrderSpec::Finite: {
      for (int id : spec->elements) out.push_back(OrdElem::mk_leaf(id));
      return;
    }
    case OrderSpec::Lex:
    case OrderSpec::OmegaPower: {
      if (L < 1) throw InputError("unbounded order spec: a length bound is required");
      std::vector<OrdElem> base;
      enumerate_elements(spec->base, L, base);
      std::vector<std::vector<OrdElem>> cur;
      for (auto &e : base) cur.push_back({e});
      for (int len = 1; len <= L && !cur.empty(); ++len) {
        for (auto &s : cur) out.push_back(OrdElem::mk_seq(s));
        if (len == L) break;
        std::vector<std::vector<OrdElem>> next;
        for (auto &s : cur)
          for (auto &e : base) {
            auto t = s;
            t.push_back(e);
            next.push_back(std::move(t));
          }
        cur = std::move(next);
      }
      return;
    }
    case OrderSpec::DescendingPower: {
      std::vector<OrdElem> base;
      enumerate_elements(spec->base, L, base);
      // all strictly descending sequences, the empty one included
      std::vector<std::vector<OrdElem>> stack{{}};
      while (!stack.empty()) {
        auto s = stack.back();
        stack.pop_back();
        out.push_back(OrdElem::mk_seq(s));
        for (auto &e : base) {
          if (!s.empty() && cmp_rec(*spec->base, e, s.back()) != OrderCmp::Less)
            continue;
          auto t = s;
          t.push_back(e);
          stack.push_back(std::move(t));
        }
      }
      return;
    }
    case OrderSpec::PlusPoint: {
      enumerate_elements(spec->base, L, out);
      out.push_back(OrdElem::mk_leaf(spec->inf_id));
      return;
    }
    default:
      throw InputError("order type enumeration unsupported for this constructor");
  }
}

}  // namespace

OrdinalCNF order_type(const OrderSpecPtr &spec, int L) {
  std::vector<OrdElem> elems;
  enumerate_elements(spec, L, elems);
  for (size_t i = 0; i < elems.size(); ++i)
    for (size_t j = i + 1; j < elems.size(); ++j) {
      OrderCmp c = order_cmp(spec, elems[i], elems[j]);
      if (c == OrderCmp::Incomparable) {
        if (spec->kind == OrderSpec::OmegaPower) continue;  // graded by length
        throw InputError("order is not linear on the enumerated elements");
      }
    }
  return OrdinalCNF::finite(elems.size());
}

// ---------- Partition games ----------

OrdinalCNF game48_strategy(const OrdinalCNF &alpha, std::uint64_t N,
                           const OrdinalCNF &eta) {
  if (eta.is_zero())
    throw InputError("adversary move illegal: eta = 0 leaves no mu < eta");
  OrdinalCNF wa = ord_exp_omega(alpha);
  OrdinalCNF wa1 = ord_exp_omega(ord_add(alpha, OrdinalCNF::finite(1)));
  if (ord_cmp(eta, wa1) >= 0) return ord_mul(wa, OrdinalCNF::finite(N));
  // eta = w^alpha * j + rho with rho < w^alpha and j finite
  std::uint64_t j = 0;
  OrdinalCNF rho = eta;
  if (!eta.terms.empty() && ord_cmp(eta.terms[0].first, alpha) == 0) {
    j = eta.terms[0].second;
    rho.terms.erase(rho.terms.begin());
  }
  if (!rho.is_zero()) return ord_mul(wa, OrdinalCNF::finite(j));
  // boundary: eta = w^alpha * j exactly; mu < eta forces dropping one block
  if (j >= 1) return ord_mul(wa, OrdinalCNF::finite(j - 1));
  return OrdinalCNF::zero();
}

OrdinalCNF game48_play(const OrdinalCNF &delta, const OrdinalCNF &alpha,
                       std::uint64_t N, const HeadChooser &adversary) {
  OrdinalCNF wa1 = ord_exp_omega(ord_add(alpha, OrdinalCNF::finite(1)));
  if (ord_cmp(delta, wa1) < 0)
    throw InputError("game requires delta >= w^(alpha+1)");
  OrdinalCNF d = delta;
  for (std::uint64_t i = 0; i < N; ++i) {
    OrdinalCNF eta = adversary((int)i, d);
    if (ord_cmp(eta, d) > 0)
      throw InputError("illegal adversary partition: eta > delta_i");
    OrdinalCNF nu = ord_sub(d, eta);
    OrdinalCNF mu = game48_strategy(alpha, N, eta);
    if (ord_cmp(mu, eta) >= 0)
      throw InputError("strategy produced mu >= eta");
    d = ord_add(mu, nu);
  }
  return d;
}

OrdinalCNF game410_play(const OrdinalCNF &delta, std::uint64_t beta,
                        const OrdinalCNF &alpha, std::uint64_t N,
                        const PartitionChooser &adversary) {
  if (beta == 0) throw InputError("beta must be >= 1");
  OrdinalCNF b = OrdinalCNF::finite(beta);
  OrdinalCNF need =
      ord_pow(b, ord_mul(ord_add(alpha, OrdinalCNF::finite(1)), OrdinalCNF::omega()));
  if (ord_cmp(delta, need) < 0)
    throw InputError("game requires delta >= beta^((alpha+1)w)");
  OrdinalCNF d = delta;
  for (std::uint64_t i = 0; i < N; ++i) {
    Partition410 part = adversary((int)i, d);
    if (part.etas.size() != beta)
      throw InputError("illegal adversary partition: expected beta summands");
    OrdinalCNF sum = OrdinalCNF::zero();
    for (auto &eta : part.etas) sum = ord_add(sum, eta);
    sum = ord_add(sum, part.nu);
    if (ord_cmp(sum, d) != 0)
      throw InputError("illegal adversary partition: summands do not recompose delta_i");
    // take the largest eta_gamma + nu (least index on ties)
    OrdinalCNF best = ord_add(part.etas[0], part.nu);
    for (size_t gamma = 1; gamma < part.etas.size(); ++gamma) {
      OrdinalCNF cand = ord_add(part.etas[gamma], part.nu);
      if (ord_cmp(cand, best) > 0) best = cand;
    }
    d = best;
  }
  return d;
}

}  // namespace fw
