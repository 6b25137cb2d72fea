#pragma once

// Integer-coefficient polynomial kernels used on the hot doubling path over
// Q(t). A ZPoly is a coefficient vector (constant term first, no trailing
// zeros) interpreted up to a nonzero rational scalar wherever it stands for
// an element of Q[t].

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "canheight/errors.hpp"
#include "canheight/poly.hpp"
#include "canheight/rational.hpp"

namespace canheight::zpoly {

using ZPoly = std::vector<Integer>;

inline void trim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline bool is_zero(const ZPoly& p) { return p.empty(); }

inline std::size_t degree(const ZPoly& p) {
  if (p.empty()) throw Error(ErrorKind::invalid_input, "degree of the zero polynomial has no integer value");
  return p.size() - 1;
}

inline ZPoly mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  trim(out);
  return out;
}

/// Sum of c_k * p_k.
inline ZPoly linear_combination(const std::vector<std::pair<Integer, const ZPoly*>>& terms) {
  std::size_t n = 0;
  for (const auto& [c, p] : terms) n = std::max(n, p->size());
  ZPoly out(n);
  for (const auto& [c, p] : terms) {
    if (c == 0) continue;
    for (std::size_t k = 0; k < p->size(); ++k) {
      mpz_addmul(out[k].get_mpz_t(), c.get_mpz_t(), (*p)[k].get_mpz_t());
    }
  }
  trim(out);
  return out;
}

inline Integer content(const ZPoly& p) {
  Integer g(0);
  for (const auto& c : p) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

inline void divide_all(ZPoly& p, const Integer& d) {
  if (d == 1) return;
  for (auto& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
}

inline ZPoly primitive(ZPoly p) {
  trim(p);
  if (p.empty()) return p;
  Integer g = content(p);
  if (p.back() < 0) g = -g;
  divide_all(p, g);
  return p;
}

inline ZPoly from_poly(const Poly& p) {
  return p.scaled_integer_coeffs(p.denominator_lcm());
}

inline Poly to_poly(const ZPoly& p) { return Poly::from_integers(p); }

/// Quotient a / b over Z when b divides a in Q[t] and b is primitive (so the
/// quotient is integral by Gauss's lemma); nullopt when b does not divide a.
inline std::optional<ZPoly> exact_divide(const ZPoly& a, const ZPoly& b) {
  if (b.empty()) throw Error(ErrorKind::zero_denominator, "polynomial division by zero");
  if (a.empty()) return ZPoly{};
  if (a.size() < b.size()) return std::nullopt;
  ZPoly rem = a;
  const std::size_t db = b.size() - 1;
  ZPoly quot(a.size() - db);
  Integer r;
  for (std::size_t k = a.size(); k-- > db;) {
    if (rem[k] == 0) continue;
    mpz_tdiv_qr(quot[k - db].get_mpz_t(), r.get_mpz_t(), rem[k].get_mpz_t(), b.back().get_mpz_t());
    if (r != 0) return std::nullopt;
    for (std::size_t j = 0; j <= db; ++j) {
      mpz_submul(rem[k - db + j].get_mpz_t(), quot[k - db].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  for (std::size_t k = 0; k < db; ++k) {
    if (rem[k] != 0) return std::nullopt;
  }
  trim(quot);
  return quot;
}

/// Homogeneous evaluation p(num/den) * den^deg as an integer, for a chosen
/// homogenizing degree deg >= degree(p).
inline Integer eval_homogeneous(const ZPoly& p, const Integer& num, const Integer& den, std::size_t deg) {
  if (p.empty()) return Integer(0);
  Integer acc(0);
  Integer den_pow(1);
  // Horner on the reversed coefficients: sum c_k num^k den^(deg-k).
  for (std::size_t k = p.size(); k-- > 0;) {
    acc *= num;
    acc += p[k] * den_pow;
    if (k > 0) den_pow *= den;
  }
  // acc now holds sum c_k num^k den^(top-k) with top = degree(p); lift to deg.
  for (std::size_t k = p.size() - 1; k < deg; ++k) acc *= den;
  return acc;
}

// ---------------------------------------------------------------------------
// Arithmetic modulo a word-size prime.

namespace modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using PolyP = std::vector<u64>;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<u128>(a) * b) % p); }

inline u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  while (e) {
    if (e & 1U) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1U;
  }
  return r;
}

inline u64 inverse(u64 a, u64 p) { return powmod(a, p - 2, p); }

inline void trim(PolyP& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline PolyP reduce(const ZPoly& f, u64 p) {
  PolyP out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    out[k] = mpz_fdiv_ui(f[k].get_mpz_t(), p);
  }
  trim(out);
  return out;
}

inline PolyP rem(PolyP a, const PolyP& b, u64 p) {
  const std::size_t db = b.size() - 1;
  const u64 inv = inverse(b.back(), p);
  while (a.size() >= b.size()) {
    u64 f = mulmod(a.back(), inv, p);
    std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j <= db; ++j) {
      a[shift + j] = (a[shift + j] + p - mulmod(f, b[j], p)) % p;
    }
    trim(a);
  }
  return a;
}

inline PolyP monic(PolyP f, u64 p) {
  if (f.empty()) return f;
  u64 inv = inverse(f.back(), p);
  for (auto& c : f) c = mulmod(c, inv, p);
  return f;
}

inline PolyP gcd(PolyP a, PolyP b, u64 p) {
  while (!b.empty()) {
    PolyP r = rem(std::move(a), b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(std::move(a), p);
}

}  // namespace modp

/// Rational reconstruction of r mod m with |num|, den <= sqrt(m/2).
inline std::optional<Rational> rational_reconstruct(const Integer& r, const Integer& m) {
  Integer bound;
  mpz_sqrt(bound.get_mpz_t(), Integer(m / 2).get_mpz_t());
  Integer r0 = m, r1 = r, s0 = 0, s1 = 1;
  while (r1 > bound) {
    Integer q = r0 / r1;
    Integer r2 = r0 - q * r1;
    Integer s2 = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (s1 == 0 || abs(s1) > bound) return std::nullopt;
  return Rational(r1, s1);
}

/// gcd(a, b) in Q[t] as a primitive integer polynomial, where b is a small
/// polynomial and a may be huge. Uses images modulo word-size primes and
/// certifies every answer: a trivial image at a prime not dividing lc(a)
/// proves the gcd is 1, and a nontrivial candidate is accepted only after
/// exact division of both inputs.
inline ZPoly gcd_with_small(const ZPoly& a, const ZPoly& b) {
  if (b.empty()) return primitive(a);
  if (a.empty()) return primitive(b);
  if (b.size() == 1 || a.size() == 1) return ZPoly{Integer(1)};

  std::vector<Integer> residues;  // CRT accumulation of the monic image
  Integer modulus(1);
  std::size_t image_degree = 0;
  Integer prime_seed = Integer(1) << 62;
  for (int attempt = 0; attempt < 40; ++attempt) {
    mpz_nextprime(prime_seed.get_mpz_t(), prime_seed.get_mpz_t());
    const modp::u64 p = mpz_get_ui(prime_seed.get_mpz_t());
    if (mpz_fdiv_ui(a.back().get_mpz_t(), p) == 0 || mpz_fdiv_ui(b.back().get_mpz_t(), p) == 0) continue;
    modp::PolyP g = modp::gcd(modp::reduce(b, p), modp::reduce(a, p), p);
    if (g.size() == 1) return ZPoly{Integer(1)};
    if (residues.empty() || g.size() - 1 < image_degree) {
      residues.assign(g.size(), Integer(0));
      for (std::size_t k = 0; k < g.size(); ++k) residues[k] = g[k];
      modulus = p;
      image_degree = g.size() - 1;
    } else if (g.size() - 1 == image_degree) {
      // CRT: x = r mod M, x = g mod p.
      Integer pz(static_cast<unsigned long>(p));
      Integer m_inv;
      mpz_invert(m_inv.get_mpz_t(), modulus.get_mpz_t(), pz.get_mpz_t());
      for (std::size_t k = 0; k < g.size(); ++k) {
        Integer diff = Integer(static_cast<unsigned long>(g[k])) - residues[k];
        Integer t = diff * m_inv;
        mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), pz.get_mpz_t());
        residues[k] += modulus * t;
      }
      modulus *= pz;
    } else {
      continue;  // unlucky prime with a too-large image
    }
    std::vector<Rational> coeffs;
    bool ok = true;
    for (const auto& r : residues) {
      auto q = rational_reconstruct(r, modulus);
      if (!q) {
        ok = false;
        break;
      }
      coeffs.push_back(*q);
    }
    if (!ok) continue;
    ZPoly candidate = primitive(from_poly(Poly(coeffs)));
    if (exact_divide(a, candidate) && exact_divide(b, candidate)) return candidate;
  }
  // Fall back to Euclid over Q; correct but slow for large inputs.
  return primitive(from_poly(poly_gcd(to_poly(a), to_poly(b))));
}

}  // namespace canheight::zpoly
