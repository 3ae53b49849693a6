#include "fiberdim/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace fiberdim {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite value");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

std::string fraction_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string fraction_string(const BigInt& z) { return z.get_str(); }

std::string dyadic_string(const Rational& q) {
  const BigInt& den = q.get_den();
  if (den == 1) return q.get_num().get_str();
  // power of two <=> scan_1 finds the only set bit at the top
  mp_bitcnt_t low = mpz_scan1(den.get_mpz_t(), 0);
  if (low > 0 && mpz_sizeinbase(den.get_mpz_t(), 2) == low + 1) {
    return q.get_num().get_str() + "/2^" + std::to_string(low);
  }
  return fraction_string(q);
}

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    BigInt d;
    auto caret = den.find('^');
    if (caret != std::string::npos) {
      BigInt base(den.substr(0, caret));
      unsigned long exp = std::stoul(den.substr(caret + 1));
      d = pow_big(base, exp);
    } else {
      d = BigInt(den);
    }
    return make_rational(BigInt(num), d);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    unsigned long frac_len = s.size() - dot - 1;
    return make_rational(BigInt(digits), pow_u(10, frac_len));
  }
  return Rational(BigInt(s));
}

uint64_t to_u64_checked(const BigInt& z, const char* what) {
  if (z < 0 || !z.fits_ulong_p()) {
    if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64) {
      throw std::overflow_error(std::string(what) + ": value does not fit in 64 bits");
    }
  }
  uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, z.get_mpz_t());
  return out;
}

}  // namespace fiberdim
