#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "lll/error.hpp"

namespace lll {

// All probability arithmetic is exact. GMP rationals are kept canonical
// (coprime, positive denominator) at every step.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Renders "p/q", or just "p" for integers. This is the wire format used by
// instance files and reports.
inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Accepts "p" or "p/q" with optional sign; rejects anything else, including
// zero denominators.
inline std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  try {
    Rational q;
    if (slash == std::string::npos) {
      Integer n(text, 10);
      q = Rational(n);
    } else {
      std::string num = text.substr(0, slash);
      std::string den = text.substr(slash + 1);
      if (num.empty() || den.empty() || den.find('/') != std::string::npos)
        return std::nullopt;
      Integer n(num, 10), d(den, 10);
      if (d == 0) return std::nullopt;
      q = Rational(n, d);
    }
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

inline bool is_probability(const Rational& q) { return q >= 0 && q <= 1; }

// Smallest k >= 0 with 2^k >= x, for rational x >= 1. Exact.
inline long ceil_log2(const Rational& x) {
  if (x < 1) throw InvariantViolation("ceil_log2 requires x >= 1");
  const Integer& a = x.get_num();
  const Integer& b = x.get_den();
  // 2^k * b >= a; start from the bit-length gap and adjust.
  long k = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 2));
  if (k < 0) k = 0;
  Integer lhs;
  mpz_mul_2exp(lhs.get_mpz_t(), b.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
  while (lhs < a) {
    lhs <<= 1;
    ++k;
  }
  while (k > 0) {
    Integer half = lhs >> 1;
    if (half >= a) {
      lhs = half;
      --k;
    } else {
      break;
    }
  }
  return k;
}

// True iff x is an exact power of two (x = 2^k, k may be negative). When so,
// *k receives the exponent.
inline bool exact_log2(const Rational& x, long* k) {
  if (x <= 0) return false;
  const Integer& a = x.get_num();
  const Integer& b = x.get_den();
  auto pow2_exp = [](const Integer& n, long* e) {
    if (n <= 0) return false;
    mp_bitcnt_t low = mpz_scan1(n.get_mpz_t(), 0);
    size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    if (low != bits - 1) return false;
    *e = static_cast<long>(low);
    return true;
  };
  long ea = 0, eb = 0;
  if (!pow2_exp(a, &ea) || !pow2_exp(b, &eb)) return false;
  *k = ea - eb;
  return true;
}

// x^k for rational x and nonnegative integer k.
inline Rational pow_rational(const Rational& x, unsigned long k) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), x.get_num().get_mpz_t(), k);
  mpz_pow_ui(r.get_den_mpz_t(), x.get_den().get_mpz_t(), k);
  r.canonicalize();
  return r;
}

}  // namespace lll
