#pragma once

// Independent flat-vector arithmetic for ordinals below w^9: an ordinal is a
// coefficient vector over the powers w^0..w^8 (lex-coded order embedding).
// Sum and product are computed directly from the order definitions for flat
// vectors: the right summand's leading power absorbs everything smaller, and
// the product distributes over the right factor term by term. Shares no code
// with the CNF implementation.

#include <array>
#include <cstdint>
#include <stdexcept>

#include "fw/ordinal.hpp"

namespace fwtest {

constexpr int kFlatDeg = 9;
using Flat = std::array<std::uint64_t, kFlatDeg>;

inline int flat_deg(const Flat &a) {
  for (int d = kFlatDeg - 1; d >= 0; --d)
    if (a[d]) return d;
  return -1;  // zero
}

inline int flat_cmp(const Flat &a, const Flat &b) {
  for (int d = kFlatDeg - 1; d >= 0; --d) {
    if (a[d] != b[d]) return a[d] < b[d] ? -1 : 1;
  }
  return 0;
}

inline Flat flat_add(const Flat &a, const Flat &b) {
  int db = flat_deg(b);
  if (db < 0) return a;
  Flat out{};
  for (int d = kFlatDeg - 1; d > db; --d) out[d] = a[d];
  out[db] = a[db] + b[db];
  for (int d = db - 1; d >= 0; --d) out[d] = b[d];
  return out;
}

inline Flat flat_mul(const Flat &a, const Flat &b) {
  Flat out{};
  int da = flat_deg(a);
  if (da < 0 || flat_deg(b) < 0) return out;
  for (int e = kFlatDeg - 1; e >= 1; --e) {
    if (!b[e]) continue;
    if (da + e >= kFlatDeg) throw std::runtime_error("flat oracle overflow");
    Flat part{};
    part[da + e] = b[e];
    out = flat_add(out, part);
  }
  if (b[0]) {
    Flat part{};
    part[da] = a[da] * b[0];
    for (int d = da - 1; d >= 0; --d) part[d] = a[d];
    out = flat_add(out, part);
  }
  return out;
}

inline Flat to_flat(const fw::OrdinalCNF &a) {
  Flat out{};
  for (auto &[e, c] : a.terms) {
    if (!e.is_finite()) throw std::runtime_error("flat oracle: exponent not finite");
    std::uint64_t d = e.finite_value();
    if (d >= kFlatDeg) throw std::runtime_error("flat oracle: degree too large");
    out[d] = c;
  }
  return out;
}

inline fw::OrdinalCNF from_flat(const Flat &a) {
  fw::OrdinalCNF out;
  for (int d = kFlatDeg - 1; d >= 0; --d)
    if (a[d]) out.terms.push_back({fw::OrdinalCNF::finite((std::uint64_t)d), a[d]});
  return out;
}

}  // namespace fwtest
