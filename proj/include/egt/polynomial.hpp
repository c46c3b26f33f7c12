#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace egt {

// Univariate polynomial with ascending coefficients, evaluated in long
// double: the Sturm cascade loses digits, and the extra mantissa keeps the
// d <= 10 cases certified.
struct Poly {
  std::vector<long double> c;  // c[k] multiplies y^k

  int degree() const { return static_cast<int>(c.size()) - 1; }

  long double eval(long double y) const {
    long double acc = 0.0L;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * y + c[k];
    return acc;
  }

  Poly derivative() const {
    Poly d;
    if (c.size() <= 1) {
      d.c = {0.0L};
      return d;
    }
    d.c.resize(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * static_cast<long double>(k);
    return d;
  }

  long double max_abs_coeff() const {
    long double m = 0.0L;
    for (long double v : c) m = std::max(m, std::fabs(v));
    return m;
  }

  // drop exact-zero leading coefficients
  void trim() {
    while (c.size() > 1 && c.back() == 0.0L) c.pop_back();
  }

  // divide by max |coeff|; positive scaling, so signs (and roots) survive
  void normalize() {
    const long double m = max_abs_coeff();
    if (m > 0.0L)
      for (long double& v : c) v /= m;
  }
};

namespace detail {

// remainder of a / b (degrees small; classical long division)
inline Poly poly_rem(Poly a, const Poly& b) {
  a.trim();
  const int db = b.degree();
  if (db == 0) {  // division by a constant never leaves a remainder
    Poly z;
    z.c = {0.0L};
    return z;
  }
  Poly r = a;
  while (r.degree() >= db && !(r.c.size() == 1 && r.c[0] == 0.0L)) {
    const long double f = r.c.back() / b.c.back();
    const int shift = r.degree() - db;
    for (int k = 0; k <= db; ++k) r.c[k + shift] -= f * b.c[k];
    r.c.pop_back();
    // strip the tiny residue the subtraction may leave at the new top
    while (r.c.size() > 1 && std::fabs(r.c.back()) <= 1e-18L * b.max_abs_coeff())
      r.c.pop_back();
  }
  if (r.c.empty()) r.c = {0.0L};
  return r;
}

inline int sign_of(long double v) { return v > 0.0L ? 1 : (v < 0.0L ? -1 : 0); }

}  // namespace detail

// Sturm chain of p. `complete` reports whether the cascade reached a
// constant; an early (numerically) vanishing remainder signals a repeated
// root and the sample must be treated as degenerate.
struct SturmChain {
  std::vector<Poly> chain;
  bool complete = false;

  static SturmChain build(const Poly& p) {
    SturmChain s;
    Poly p0 = p;
    p0.trim();
    p0.normalize();
    if (p0.degree() == 0) {
      s.chain.push_back(p0);
      s.complete = true;
      return s;
    }
    s.chain.push_back(p0);
    Poly p1 = p0.derivative();
    p1.normalize();
    s.chain.push_back(p1);
    if (p1.degree() == 0) {  // linear p: the chain is already complete
      s.complete = true;
      return s;
    }
    while (true) {
      const Poly& a = s.chain[s.chain.size() - 2];
      const Poly& b = s.chain.back();
      Poly r = detail::poly_rem(a, b);
      // the chain ends legitimately at a nonzero constant
      const long double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
      if (r.degree() == 0) {
        if (std::fabs(r.c[0]) <= 1e-14L * scale) return s;  // gcd of degree >= 1
        for (long double& v : r.c) v = -v;
        s.chain.push_back(r);
        s.complete = true;
        return s;
      }
      if (r.max_abs_coeff() <= 1e-14L * scale) return s;  // repeated root
      for (long double& v : r.c) v = -v;
      r.normalize();
      s.chain.push_back(r);
      if (static_cast<int>(s.chain.size()) > p0.degree() + 2) return s;  // safety net
    }
  }

  // sign variations of the chain at y (right-limit convention at exact zeros
  // is irrelevant for the interior points we query; zeros are skipped)
  int variations_at(long double y) const {
    int v = 0, prev = 0;
    for (const Poly& q : chain) {
      const int s = detail::sign_of(q.eval(y));
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++v;
      prev = s;
    }
    return v;
  }

  // variations as y -> 0+ : sign of the lowest nonzero coefficient
  int variations_at_zero_plus() const {
    int v = 0, prev = 0;
    for (const Poly& q : chain) {
      int s = 0;
      for (long double cv : q.c) {
        if (cv != 0.0L) {
          s = detail::sign_of(cv);
          break;
        }
      }
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++v;
      prev = s;
    }
    return v;
  }

  // variations as y -> +inf : sign of the leading coefficient
  int variations_at_infinity() const {
    int v = 0, prev = 0;
    for (const Poly& q : chain) {
      const int s = detail::sign_of(q.c.back());
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++v;
      prev = s;
    }
    return v;
  }

  // distinct real roots in (a, b]
  int roots_in(long double a, long double b) const {
    return variations_at(a) - variations_at(b);
  }
};

// upper bound on every positive real root (Cauchy bound)
inline long double positive_root_bound(const Poly& p) {
  const long double lead = std::fabs(p.c.back());
  long double m = 0.0L;
  for (std::size_t k = 0; k + 1 < p.c.size(); ++k) m = std::max(m, std::fabs(p.c[k]));
  if (lead == 0.0L) return 1.0L;
  return 1.0L + m / lead;
}

struct RootFindResult {
  std::vector<double> roots;  // ascending, strictly positive, simple
  bool degenerate = false;
};

// All distinct roots in (0, inf), certified by Sturm counts, refined by
// bisection plus a few Newton steps. Repeated/near-repeated roots mark the
// result degenerate instead of guessing.
inline RootFindResult find_positive_roots(Poly p) {
  RootFindResult out;
  p.trim();
  if (p.degree() == 0) {
    if (p.c[0] == 0.0L) out.degenerate = true;  // identically zero input
    return out;
  }
  p.normalize();
  const SturmChain sturm = SturmChain::build(p);
  if (!sturm.complete) {
    out.degenerate = true;
    return out;
  }
  const int total = sturm.variations_at_zero_plus() - sturm.variations_at_infinity();
  if (total <= 0) return out;

  // isolate: split (0, U] until each piece certifies exactly one root
  const long double U = positive_root_bound(p);
  std::vector<std::pair<long double, long double>> work{{0.0L, U}}, isolated;
  auto count_in = [&](long double a, long double b) {
    const int va = (a == 0.0L) ? sturm.variations_at_zero_plus() : sturm.variations_at(a);
    return va - sturm.variations_at(b);
  };
  int guard = 0;
  while (!work.empty()) {
    if (++guard > 4000) {
      out.degenerate = true;  // clustered roots resisting isolation
      return out;
    }
    auto [a, b] = work.back();
    work.pop_back();
    const int k = count_in(a, b);
    if (k == 0) continue;
    if (k == 1) {
      isolated.emplace_back(a, b);
      continue;
    }
    const long double mid = (a + b) / 2;
    if (!(mid > a && mid < b)) {
      out.degenerate = true;  // interval collapsed before separation
      return out;
    }
    work.emplace_back(a, mid);
    work.emplace_back(mid, b);
  }

  const Poly dp = p.derivative();
  const long double coeff_scale = p.max_abs_coeff();
  for (auto [a, b] : isolated) {
    // the root is simple, so the interval (possibly after trimming the open
    // left end) brackets a sign change
    long double lo = a, hi = b;
    long double flo = (lo == 0.0L) ? p.c[0] : p.eval(lo);
    if (flo == 0.0L) {  // exact boundary hit; nudge inward
      lo = (lo + hi) / 2;
      flo = p.eval(lo);
    }
    long double fhi = p.eval(hi);
    if (detail::sign_of(flo) == detail::sign_of(fhi)) {
      out.degenerate = true;  // Sturm says one root but no sign change: even-order contact
      return out;
    }
    for (int it = 0; it < 120; ++it) {
      const long double mid = (lo + hi) / 2;
      if (mid == lo || mid == hi) break;
      const long double fm = p.eval(mid);
      if (fm == 0.0L) {
        lo = hi = mid;
        break;
      }
      if (detail::sign_of(fm) == detail::sign_of(flo)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    long double y = (lo + hi) / 2;
    for (int it = 0; it < 4; ++it) {  // polish
      const long double f = p.eval(y), df = dp.eval(y);
      if (df == 0.0L) break;
      const long double step = f / df;
      const long double yn = y - step;
      if (yn > lo - (hi - lo) && yn < hi + (hi - lo) && yn > 0.0L) y = yn;
    }
    const long double yscale = std::max(1.0L, std::fabs(y));
    long double pow = 1.0L;
    for (int k = 0; k < p.degree(); ++k) pow *= yscale;
    if (std::fabs(p.eval(y)) > 1e-12L * coeff_scale * pow * p.degree()) {
      out.degenerate = true;
      return out;
    }
    if (std::fabs(dp.eval(y)) <= 1e-12L * coeff_scale) {
      out.degenerate = true;  // vanishing derivative: not a simple crossing
      return out;
    }
    out.roots.push_back(static_cast<double>(y));
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

}  // namespace egt
