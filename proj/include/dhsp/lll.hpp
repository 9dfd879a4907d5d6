#pragma once

// Exact LLL reduction in all-integer arithmetic (integral Gram-Schmidt
// data d_i and lambda_ij, Cohen's formulation), plus an independent
// rational verifier for the reduced-basis conditions.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "dhsp/bigint.hpp"
#include "dhsp/errors.hpp"

namespace dhsp {

template <class Int>
using IntMatrix = std::vector<std::vector<Int>>;

namespace detail {

template <class Int>
Int dot(const std::vector<Int>& x, const std::vector<Int>& y) {
  Int acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

inline void submul(std::vector<BigInt>& row, const BigInt& q, const std::vector<BigInt>& other) {
  for (std::size_t i = 0; i < row.size(); ++i)
    mpz_submul(row[i].get_mpz_t(), q.get_mpz_t(), other[i].get_mpz_t());
}

// Exact quotient; the integral LLL recurrences guarantee divisibility.
inline BigInt exact_div(const BigInt& num, const BigInt& den) {
  BigInt q;
  mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

}  // namespace detail

struct LllStats {
  std::size_t swaps = 0;
  std::size_t reductions = 0;
};

// Reduces rows in place with parameter delta in (1/4, 1). Rows must be
// linearly independent.
inline LllStats lll_reduce_rows(IntMatrix<BigInt>& b, const Rational& delta) {
  if (delta <= Rational(1, 4) || delta >= 1) {
    throw InvalidArgument("LLL parameter must lie in (1/4, 1)");
  }
  const std::size_t n = b.size();
  LllStats stats;
  if (n == 0) return stats;
  const BigInt p = delta.get_num();
  const BigInt q = delta.get_den();

  // 1-based indexing in d and lambda to follow the recurrences; d[0] = 1.
  std::vector<BigInt> d(n + 1, BigInt(0));
  IntMatrix<BigInt> lam(n + 1, std::vector<BigInt>(n + 1, BigInt(0)));
  d[0] = 1;
  d[1] = detail::dot(b[0], b[0]);
  if (d[1] == 0) throw DependentRows("zero row in basis");

  auto row = [&b](std::size_t k) -> std::vector<BigInt>& { return b[k - 1]; };

  auto reduce = [&](std::size_t k, std::size_t l) {
    BigInt twice = 2 * lam[k][l];
    if (abs(twice) <= d[l]) return;
    const BigInt r = round_div(lam[k][l], d[l]);
    detail::submul(row(k), r, row(l));
    lam[k][l] -= r * d[l];
    for (std::size_t i = 1; i < l; ++i) lam[k][i] -= r * lam[l][i];
    ++stats.reductions;
  };

  std::size_t kmax = 1;
  auto swap_rows = [&](std::size_t k) {
    std::swap(row(k), row(k - 1));
    for (std::size_t j = 1; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
    const BigInt mu = lam[k][k - 1];
    const BigInt bnew = detail::exact_div(d[k - 2] * d[k] + mu * mu, d[k - 1]);
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      const BigInt t = lam[i][k];
      lam[i][k] = detail::exact_div(d[k] * lam[i][k - 1] - mu * t, d[k - 1]);
      lam[i][k - 1] = detail::exact_div(bnew * t + mu * lam[i][k], d[k]);
    }
    d[k - 1] = bnew;
    ++stats.swaps;
  };

  std::size_t k = 2;
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        BigInt u = detail::dot(row(k), row(j));
        for (std::size_t i = 1; i < j; ++i)
          u = detail::exact_div(d[i] * u - lam[k][i] * lam[j][i], d[i - 1]);
        if (j < k)
          lam[k][j] = u;
        else
          d[k] = u;
      }
      if (d[k] == 0) throw DependentRows("rows are linearly dependent");
    }
    reduce(k, k - 1);
    // Lovasz: q d_k d_{k-2} >= p d_{k-1}^2 - q lambda^2
    if (q * d[k] * d[k - 2] < p * d[k - 1] * d[k - 1] - q * lam[k][k - 1] * lam[k][k - 1]) {
      swap_rows(k);
      if (k > 2) --k;
    } else {
      for (std::size_t l = k - 1; l-- > 1;) reduce(k, l);
      ++k;
    }
  }
  return stats;
}

struct LllCheck {
  bool size_reduced = true;
  bool lovasz = true;
  Rational max_abs_mu = 0;

  bool ok() const { return size_reduced && lovasz; }
};

// Recomputes Gram-Schmidt from scratch in exact rationals and checks
// |mu_ij| <= 1/2 and ||b*_k||^2 >= (delta - mu_{k,k-1}^2) ||b*_{k-1}||^2.
inline LllCheck verify_lll(const IntMatrix<BigInt>& b, const Rational& delta) {
  const std::size_t n = b.size();
  LllCheck check;
  if (n == 0) return check;
  const std::size_t dim = b[0].size();
  std::vector<std::vector<Rational>> star(n, std::vector<Rational>(dim));
  std::vector<Rational> norm2(n);
  std::vector<std::vector<Rational>> mu(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dim; ++c) star[i][c] = b[i][c];
    for (std::size_t j = 0; j < i; ++j) {
      Rational num = 0;
      for (std::size_t c = 0; c < dim; ++c) num += Rational(b[i][c]) * star[j][c];
      mu[i][j] = num / norm2[j];
      for (std::size_t c = 0; c < dim; ++c) star[i][c] -= mu[i][j] * star[j][c];
      Rational a = abs(mu[i][j]);
      if (a > check.max_abs_mu) check.max_abs_mu = a;
      if (a > Rational(1, 2)) check.size_reduced = false;
    }
    norm2[i] = 0;
    for (std::size_t c = 0; c < dim; ++c) norm2[i] += star[i][c] * star[i][c];
    if (norm2[i] == 0) throw DependentRows("rows are linearly dependent");
    if (i > 0 && norm2[i] < (delta - mu[i][i - 1] * mu[i][i - 1]) * norm2[i - 1])
      check.lovasz = false;
  }
  return check;
}

// Determinant of the Gram matrix B B^T by fraction-free (Bareiss) elimination.
inline BigInt gram_determinant(const IntMatrix<BigInt>& b) {
  const std::size_t n = b.size();
  IntMatrix<BigInt> g(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = detail::dot(b[i], b[j]);
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (g[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && g[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(g[k], g[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        g[i][j] = detail::exact_div(g[i][j] * g[k][k] - g[i][k] * g[k][j], prev);
    }
    prev = g[k][k];
  }
  return n == 0 ? BigInt(1) : sign * g[n - 1][n - 1];
}

// True when every row of `candidate` is an integral combination of the rows
// of `reference` (full row rank) and both have the same Gram determinant.
inline bool same_lattice(const IntMatrix<BigInt>& reference, const IntMatrix<BigInt>& candidate) {
  const std::size_t n = reference.size();
  if (candidate.size() != n || n == 0) return false;
  const std::size_t cols = reference[0].size();
  if (gram_determinant(reference) != gram_determinant(candidate)) return false;
  for (const auto& v : candidate) {
    if (v.size() != cols) return false;
    // Solve y * reference = v over the rationals: cols equations, n unknowns.
    std::vector<std::vector<Rational>> a(cols, std::vector<Rational>(n + 1));
    for (std::size_t r = 0; r < cols; ++r) {
      for (std::size_t c = 0; c < n; ++c) a[r][c] = reference[c][r];
      a[r][n] = v[r];
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      while (piv < cols && a[piv][col] == 0) ++piv;
      if (piv == cols) return false;
      std::swap(a[col], a[piv]);
      for (std::size_t r = 0; r < cols; ++r) {
        if (r == col || a[r][col] == 0) continue;
        const Rational f = a[r][col] / a[col][col];
        for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
      }
    }
    for (std::size_t r = n; r < cols; ++r)
      if (a[r][n] != 0) return false;
    for (std::size_t r = 0; r < n; ++r) {
      const Rational y = a[r][n] / a[r][r];
      if (y.get_den() != 1) return false;
    }
  }
  return true;
}

}  // namespace dhsp
