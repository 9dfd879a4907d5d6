#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

namespace dhsp {

using BigInt = mpz_class;
using Rational = mpq_class;

inline BigInt pow2(std::size_t e) {
  BigInt r;
  mpz_setbit(r.get_mpz_t(), e);
  return r;
}

// Nonnegative remainder of v modulo 2^e.
inline BigInt mod_pow2(const BigInt& v, std::size_t e) {
  BigInt r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), e);
  return r;
}

// Number of bits needed to write |v|; zero for v == 0.
inline std::size_t bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

inline BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

// Nearest integer to num/den (den > 0), ties rounded up.
inline BigInt round_div(const BigInt& num, const BigInt& den) {
  return floor_div(2 * num + den, 2 * den);
}

inline BigInt from_u64(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
  return r;
}

inline std::uint64_t to_u64(const BigInt& v) {
  std::uint64_t out = 0;
  std::size_t count = 0;
  mpz_export(&out, &count, -1, sizeof out, 0, 0, v.get_mpz_t());
  return out;
}

// log2(v) for v > 0, accurate for values far beyond double range.
inline double log2_big(const BigInt& v) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

inline std::string to_string(const BigInt& v) { return v.get_str(); }

}  // namespace dhsp
