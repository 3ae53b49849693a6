#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fiberdim {

// All construction geometry runs on arbitrary-precision rationals; estimators
// convert to double at the boundary.
using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline BigInt pow_big(const BigInt& base, unsigned long exp) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline BigInt pow_u(unsigned long base, unsigned long exp) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

inline Rational pow_rat(const Rational& q, unsigned long exp) {
  Rational r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(q.get_mpq_t()), exp);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(q.get_mpq_t()), exp);
  return r;
}

// 2^{-k} as an exact rational.
inline Rational dyadic(long num, unsigned long k) {
  return make_rational(BigInt(num), pow_u(2, k));
}

inline BigInt floor_rat(const Rational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), mpq_numref(q.get_mpq_t()), mpq_denref(q.get_mpq_t()));
  return r;
}

inline BigInt ceil_rat(const Rational& q) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), mpq_numref(q.get_mpq_t()), mpq_denref(q.get_mpq_t()));
  return r;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Smallest non-negative integer r with r^n >= x.
inline BigInt ceil_nth_root(const BigInt& x, unsigned long n) {
  if (x <= 0) return 0;
  BigInt r = x;
  int exact = mpz_root(r.get_mpz_t(), x.get_mpz_t(), n);
  if (!exact) r += 1;
  return r;
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(const BigInt& z) { return z.get_d(); }

// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

// "p/q" with canonical sign on the numerator; integers drop the "/q".
std::string fraction_string(const Rational& q);
std::string fraction_string(const BigInt& z);

// "k/2^n" when the denominator is a power of two, else fraction_string.
std::string dyadic_string(const Rational& q);

// Accepts "p/q", plain integers, decimals ("0.25"), and "k/2^n".
Rational parse_rational(const std::string& s);

uint64_t to_u64_checked(const BigInt& z, const char* what);

}  // namespace fiberdim
