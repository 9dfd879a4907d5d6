#pragma once

// Transition-state generation: per-group phase filter g_i(x_i) = a_i(x_i)
// mod 2^(n-1), simulated target-register measurement, and the collapsed
// sparse superposition with exact phase exponents.
//
// The simulator stores exponents a(x) only; s never enters this module.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dhsp/bigint.hpp"
#include "dhsp/errors.hpp"
#include "dhsp/phase_sampler.hpp"
#include "dhsp/rng.hpp"

namespace dhsp {

inline constexpr unsigned kMaxGroupWidth = 26;
inline constexpr std::size_t kDefaultSupportCap = std::size_t{1} << 24;

struct GroupSurvivor {
  std::uint32_t label = 0;  // bit j is x_ij
  BigInt value;             // a_i(x_i), exact
};

struct GroupSupport {
  std::size_t index = 0;
  std::vector<GroupSurvivor> survivors;  // sorted by label
  BigInt measured;                       // c_i, residue mod 2^(n-1)
};

using FullLabel = std::vector<std::uint32_t>;  // one m-bit label per group

struct TransitionSurvivor {
  FullLabel label;
  BigInt exponent;  // a(x) mod 2^n
  BigInt relative;  // exponent minus the reference, mod 2^n; 0 or 2^(n-1)
};

struct TransitionState {
  unsigned n = 0;
  std::vector<TransitionSurvivor> survivors;  // lexicographic in label
  BigInt c;                                   // sum of c_i mod 2^(n-1)
  BigInt reference_exponent;                  // eliminated global phase
};

namespace detail {

// Visits every m-bit label in Gray-code order with its exact a_i(x_i).
template <class Visit>
void for_each_label(const GroupState& group, Visit&& visit) {
  const std::size_t m = group.coefficients.size();
  if (m > kMaxGroupWidth) {
    throw InfeasibleWidth("group of " + std::to_string(m) + " labels exceeds 2^26 enumeration");
  }
  BigInt value = 0;
  std::uint32_t label = 0;
  visit(label, value);
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int j = std::countr_zero(step);
    label ^= (1u << j);
    if ((label >> j) & 1u)
      value += group.coefficients[j];
    else
      value -= group.coefficients[j];
    visit(label, value);
  }
}

}  // namespace detail

// Survivors of group i for a given measured outcome c_i.
inline GroupSupport filter_with_outcome(const GroupState& group, unsigned n, const BigInt& c) {
  GroupSupport support;
  support.index = group.index;
  support.measured = mod_pow2(c, n - 1);
  detail::for_each_label(group, [&](std::uint32_t label, const BigInt& value) {
    if (mpz_congruent_2exp_p(value.get_mpz_t(), support.measured.get_mpz_t(), n - 1)) {
      support.survivors.push_back({label, value});
    }
  });
  std::sort(support.survivors.begin(), support.survivors.end(),
            [](const GroupSurvivor& x, const GroupSurvivor& y) { return x.label < y.label; });
  return support;
}

// Measuring the target register of a uniform superposition yields c_i with
// probability (#labels mapping to c_i) / 2^m, which is the residue of a
// uniformly drawn label.
template <class Engine>
GroupSupport apply_phase_filter(const GroupState& group, unsigned n, Engine& rng) {
  const std::size_t m = group.coefficients.size();
  if (m > kMaxGroupWidth) throw InfeasibleWidth("group width above 26");
  const auto drawn = static_cast<std::uint32_t>(uniform_index(rng, std::uint64_t{1} << m));
  return filter_with_outcome(group, n, mod_pow2(group_phase(group, drawn), n - 1));
}

// Per-group streams are split from one draw of the run generator, so any
// evaluation order gives the same transcript.
inline std::vector<GroupSupport> apply_phase_filters(std::span<const GroupState> groups,
                                                     unsigned n, Rng& rng) {
  const std::uint64_t base = rng();
  std::vector<GroupSupport> supports;
  supports.reserve(groups.size());
  for (const GroupState& g : groups) {
    SplitMix64 local(stream_key(base, {g.index}));
    supports.push_back(apply_phase_filter(g, n, local));
  }
  return supports;
}

inline std::size_t support_product(std::span<const GroupSupport> supports) {
  std::size_t total = 1;
  for (const GroupSupport& s : supports) {
    const std::size_t k = s.survivors.size();
    if (k != 0 && total > std::numeric_limits<std::size_t>::max() / k)
      return std::numeric_limits<std::size_t>::max();
    total *= k;
  }
  return total;
}

inline TransitionState assemble_transition(std::span<const GroupSupport> supports, unsigned n,
                                           std::size_t cap = kDefaultSupportCap) {
  if (supports.empty()) throw InvalidArgument("no group supports");
  for (const GroupSupport& s : supports)
    if (s.survivors.empty()) throw InvalidArgument("empty group support");
  const std::size_t total = support_product(supports);
  if (total > cap) {
    throw SupportTooLarge("survivor product exceeds cap of " + std::to_string(cap));
  }

  TransitionState state;
  state.n = n;
  BigInt c = 0;
  for (const GroupSupport& s : supports) c += s.measured;
  state.c = mod_pow2(c, n - 1);

  const std::size_t groups = supports.size();
  std::vector<std::size_t> digit(groups, 0);
  state.survivors.reserve(total);
  for (std::size_t count = 0; count < total; ++count) {
    TransitionSurvivor sv;
    sv.label.resize(groups);
    BigInt a = 0;
    for (std::size_t i = 0; i < groups; ++i) {
      const GroupSurvivor& g = supports[i].survivors[digit[i]];
      sv.label[i] = g.label;
      a += g.value;
    }
    sv.exponent = mod_pow2(a, n);
    state.survivors.push_back(std::move(sv));
    // Mixed-radix increment, last group fastest.
    for (std::size_t i = groups; i-- > 0;) {
      if (++digit[i] < supports[i].survivors.size()) break;
      digit[i] = 0;
    }
  }

  state.reference_exponent = state.survivors.front().exponent;
  for (const TransitionSurvivor& sv : state.survivors)
    if (sv.exponent < state.reference_exponent) state.reference_exponent = sv.exponent;
  for (TransitionSurvivor& sv : state.survivors)
    sv.relative = mod_pow2(sv.exponent - state.reference_exponent, n);
  return state;
}

inline std::size_t survivor_tau(const TransitionState& state) { return state.survivors.size(); }

// Exhaustive oracle: every full label with a_i(x_i) = c_i mod 2^(n-1) for all
// i, scanning all 2^(m^2) labels. Same order as assemble_transition.
inline std::vector<FullLabel> exhaustive_survivors(std::span<const GroupState> groups, unsigned n,
                                                   std::span<const BigInt> measured) {
  const std::size_t m = groups.size();
  std::size_t bits = 0;
  for (const GroupState& g : groups) bits += g.coefficients.size();
  if (bits > 24) throw TooLarge("exhaustive survivor scan limited to 24 label bits");
  std::vector<FullLabel> out;
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t x = 0; x < total; ++x) {
    FullLabel label(m);
    std::size_t offset = 0;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      const std::size_t w = groups[i].coefficients.size();
      label[i] = static_cast<std::uint32_t>((x >> offset) & ((std::uint64_t{1} << w) - 1));
      offset += w;
      const BigInt r = mod_pow2(group_phase(groups[i], label[i]), n - 1);
      ok = r == measured[i];
    }
    if (ok) out.push_back(std::move(label));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dhsp
