#pragma once

// Low-density subset sum: the Lagarias-Odlyzko lattice embedding, the SV
// procedure (LLL + pattern scan, on the instance and its complement), the
// modular congruence loop over shift indices, and a brute-force oracle.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "dhsp/bigint.hpp"
#include "dhsp/errors.hpp"
#include "dhsp/lll.hpp"

namespace dhsp {

using Bits = std::vector<std::uint8_t>;

struct SubsetSumInstance {
  std::vector<BigInt> weights;
  BigInt target;

  std::size_t size() const { return weights.size(); }

  void validate() const {
    if (weights.empty()) throw InvalidArgument("subset sum needs at least one weight");
    for (const BigInt& w : weights)
      if (w <= 0) throw InvalidArgument("weights must be positive");
    if (target < 0) throw InvalidArgument("target must be nonnegative");
  }

  BigInt total() const {
    BigInt t = 0;
    for (const BigInt& w : weights) t += w;
    return t;
  }
};

struct SvSolution {
  Bits x;
  std::optional<std::size_t> shift_index;

  friend bool operator==(const SvSolution&, const SvSolution&) = default;
};

inline BigInt subset_value(std::span<const BigInt> weights, const Bits& x) {
  BigInt v = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (x[i]) v += weights[i];
  return v;
}

inline bool verifies(const SubsetSumInstance& inst, const Bits& x) {
  return x.size() == inst.size() && subset_value(inst.weights, x) == inst.target;
}

inline Bits complement(const Bits& x) {
  Bits out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] ? 0 : 1;
  return out;
}

inline std::uint32_t to_label(const Bits& x) {
  std::uint32_t label = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) label |= 1u << i;
  return label;
}

inline Bits from_label(std::uint64_t label, std::size_t m) {
  Bits x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = static_cast<std::uint8_t>((label >> i) & 1u);
  return x;
}

// d = m / log2(max a_i).
inline double density(const SubsetSumInstance& inst) {
  if (inst.weights.empty()) throw InvalidArgument("empty instance");
  const BigInt& top = *std::max_element(inst.weights.begin(), inst.weights.end());
  if (top < 2) throw DegenerateWeights("density needs max weight >= 2");
  return static_cast<double>(inst.size()) / log2_big(top);
}

struct LatticeBasis {
  IntMatrix<BigInt> rows;
  BigInt scale;
};

// Rows e_i | scale*a_i for i <= m, then 0 | scale*M. A solution x gives
// sum x_i b_i - b_{m+1} = (x, 0).
inline LatticeBasis build_lo_lattice(const SubsetSumInstance& inst, const BigInt& scale) {
  if (scale <= 0) throw InvalidArgument("lattice scale must be positive");
  const std::size_t m = inst.size();
  LatticeBasis basis;
  basis.scale = scale;
  basis.rows.assign(m + 1, std::vector<BigInt>(m + 1, BigInt(0)));
  for (std::size_t i = 0; i < m; ++i) {
    basis.rows[i][i] = 1;
    basis.rows[i][m] = scale * inst.weights[i];
  }
  basis.rows[m][m] = scale * inst.target;
  return basis;
}

inline LatticeBasis lll_reduce(LatticeBasis basis, const Rational& delta = Rational(3, 4)) {
  lll_reduce_rows(basis.rows, delta);
  return basis;
}

enum class LambdaPolicy {
  // Smallest power of two above sqrt(m+1) * 2^b, b the bit length of the
  // largest weight.
  Standard,
  // Smallest power of two above sqrt(m+1).
  Minimal,
};

inline BigInt choose_lambda(const SubsetSumInstance& inst, LambdaPolicy policy) {
  // 2^r > sqrt(m+1)  <=>  4^r > m+1
  std::size_t r = 0;
  while ((std::size_t{1} << (2 * r)) <= inst.size() + 1) ++r;
  if (policy == LambdaPolicy::Minimal) return pow2(r);
  std::size_t bits = 0;
  for (const BigInt& w : inst.weights) bits = std::max(bits, bit_length(w));
  return pow2(bits + r);
}

struct SvOptions {
  Rational delta{3, 4};
  LambdaPolicy lambda_policy = LambdaPolicy::Standard;
};

// One Lagarias-Odlyzko pass: reduce the embedding of (weights, target) and
// scan each reduced row and its negation for a verified 0/1 pattern.
inline std::vector<Bits> sv_pass(const SubsetSumInstance& inst, const SvOptions& options = {}) {
  inst.validate();
  const std::size_t m = inst.size();
  if (inst.target == 0) return {Bits(m, 0)};
  if (inst.target > inst.total()) return {};

  const LatticeBasis reduced =
      lll_reduce(build_lo_lattice(inst, choose_lambda(inst, options.lambda_policy)), options.delta);
  std::vector<Bits> found;
  for (const auto& v : reduced.rows) {
    if (v[m] != 0) continue;
    for (int sign : {1, -1}) {
      Bits x(m);
      bool pattern = true;
      for (std::size_t i = 0; i < m && pattern; ++i) {
        const BigInt c = sign * v[i];
        if (c == 0 || c == 1)
          x[i] = static_cast<std::uint8_t>(c == 1);
        else
          pattern = false;
      }
      if (pattern && verifies(inst, x) &&
          std::find(found.begin(), found.end(), x) == found.end()) {
        found.push_back(std::move(x));
      }
    }
  }
  return found;
}

// Every verified solution from the primary pass and the complementary pass
// (target sum(a) - M, bits complemented), primary first, no duplicates.
inline std::vector<Bits> sv_solve_all(const SubsetSumInstance& inst, const SvOptions& options = {}) {
  inst.validate();
  std::vector<Bits> out = sv_pass(inst, options);
  const BigInt total = inst.total();
  if (inst.target <= total) {
    const SubsetSumInstance comp{inst.weights, total - inst.target};
    for (const Bits& y : sv_pass(comp, options)) {
      Bits x = complement(y);
      if (verifies(inst, x) && std::find(out.begin(), out.end(), x) == out.end())
        out.push_back(std::move(x));
    }
  }
  return out;
}

inline std::optional<SvSolution> sv_solve(const SubsetSumInstance& inst,
                                          const SvOptions& options = {}) {
  std::vector<Bits> all = sv_solve_all(inst, options);
  if (all.empty()) return std::nullopt;
  return SvSolution{std::move(all.front()), std::nullopt};
}

inline constexpr std::size_t kMaxBruteForceWeights = 24;

inline std::vector<Bits> brute_force_subset_sum(const SubsetSumInstance& inst) {
  const std::size_t m = inst.size();
  if (m > kMaxBruteForceWeights) throw TooLarge("brute force limited to m <= 24");
  std::vector<BigInt> sums(std::size_t{1} << m);
  std::vector<Bits> out;
  sums[0] = 0;
  for (std::uint64_t x = 1; x < sums.size(); ++x) {
    const int low = std::countr_zero(x);
    sums[x] = sums[x & (x - 1)] + inst.weights[low];
  }
  for (std::uint64_t x = 0; x < sums.size(); ++x)
    if (sums[x] == inst.target) out.push_back(from_label(x, m));
  return out;
}

enum class CongruenceSolver { SV, BruteForce };

// Solutions x of sum a_i x_i = c mod 2^(n-1), found by solving
// sum a_i x_i = c + t 2^(n-1) for t = 0 .. 2m-1. Zero weights leave their
// bit free; both values are emitted. Results are ordered by t, then x.
inline std::vector<SvSolution> solve_congruence(std::span<const BigInt> weights, const BigInt& c,
                                                unsigned n, const SvOptions& options = {},
                                                CongruenceSolver solver = CongruenceSolver::SV) {
  if (n < 2) throw InvalidArgument("width must be at least 2");
  const std::size_t m = weights.size();
  const BigInt modulus = pow2(n - 1);
  const BigInt residue = mod_pow2(c, n - 1);
  std::vector<SvSolution> out;

  if (solver == CongruenceSolver::BruteForce) {
    if (m > kMaxBruteForceWeights) throw TooLarge("brute force limited to m <= 24");
    for (std::uint64_t label = 0; label < (std::uint64_t{1} << m); ++label) {
      Bits x = from_label(label, m);
      const BigInt v = subset_value(weights, x);
      if (mod_pow2(v, n - 1) == residue) {
        const BigInt t = (v - residue) / modulus;
        out.push_back({std::move(x), static_cast<std::size_t>(t.get_ui())});
      }
    }
    std::sort(out.begin(), out.end(), [](const SvSolution& a, const SvSolution& b) {
      return std::tie(a.shift_index, a.x) < std::tie(b.shift_index, b.x);
    });
    return out;
  }

  std::vector<std::size_t> live;
  std::vector<std::size_t> free;
  SubsetSumInstance reduced;
  for (std::size_t i = 0; i < m; ++i) {
    if (weights[i] < 0) throw InvalidArgument("weights must be nonnegative");
    if (weights[i] == 0) {
      free.push_back(i);
    } else {
      live.push_back(i);
      reduced.weights.push_back(weights[i]);
    }
  }
  if (free.size() > 20) throw TooLarge("more than 20 zero weights");
  const BigInt total = reduced.total();

  for (std::size_t t = 0; t < 2 * m; ++t) {
    reduced.target = residue + modulus * static_cast<unsigned long>(t);
    if (reduced.target > total) break;
    std::vector<Bits> partial;
    if (live.empty()) {
      if (reduced.target == 0) partial.emplace_back();
    } else {
      partial = sv_solve_all(reduced, options);
    }
    std::set<Bits> batch;
    for (const Bits& y : partial) {
      for (std::uint64_t extra = 0; extra < (std::uint64_t{1} << free.size()); ++extra) {
        Bits x(m, 0);
        for (std::size_t j = 0; j < live.size(); ++j) x[live[j]] = y[j];
        for (std::size_t j = 0; j < free.size(); ++j)
          x[free[j]] = static_cast<std::uint8_t>((extra >> j) & 1u);
        // Substitution check against the original equation.
        if (subset_value(weights, x) == reduced.target) batch.insert(std::move(x));
      }
    }
    for (const Bits& x : batch) {
      const bool seen = std::any_of(out.begin(), out.end(),
                                    [&](const SvSolution& s) { return s.x == x; });
      if (!seen) out.push_back({x, t});
    }
  }
  return out;
}

}  // namespace dhsp
