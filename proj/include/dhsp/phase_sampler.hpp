#pragma once

// Phase states |0> + e^(2 pi i k s / 2^n)|1>, held classically by their
// index k, and their packing into m = ceil(sqrt(n)) groups of m states.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "dhsp/bigint.hpp"
#include "dhsp/dihedral.hpp"
#include "dhsp/errors.hpp"
#include "dhsp/rng.hpp"

namespace dhsp {

struct PhaseState {
  unsigned n = 0;
  BigInt k;
};

struct GroupState {
  std::size_t index = 0;
  std::vector<BigInt> coefficients;  // a_i1 .. a_im, each in [0, 2^n)
};

enum class SamplerPath { Shortcut, FullSimulation };

// m = ceil(sqrt(n)).
inline unsigned group_count(unsigned n) {
  unsigned m = 0;
  while (m * m < n) ++m;
  return m;
}

// The Fourier-sampled index is uniform and independent of s, so the
// shortcut draws it directly. coset_fourier_sample is the reference.
inline PhaseState sample_phase_state(const HiddenInstance& inst, Rng& rng) {
  return {inst.width(), uniform_bits(rng, inst.width())};
}

inline PhaseState sample_phase_state(const HiddenInstance& inst, Rng& rng, SamplerPath path) {
  if (path == SamplerPath::Shortcut) return sample_phase_state(inst, rng);
  const FourierSample fs = coset_fourier_sample(inst, rng);
  return {inst.width(), from_u64(fs.k)};
}

inline std::vector<GroupState> build_groups(std::span<const PhaseState> states, unsigned n) {
  const unsigned m = group_count(n);
  if (states.size() != static_cast<std::size_t>(m) * m) {
    throw ArityMismatch("expected " + std::to_string(m * m) + " phase states, got " +
                        std::to_string(states.size()));
  }
  std::vector<GroupState> groups(m);
  for (unsigned i = 0; i < m; ++i) {
    groups[i].index = i;
    groups[i].coefficients.reserve(m);
    for (unsigned j = 0; j < m; ++j) {
      const PhaseState& st = states[static_cast<std::size_t>(i) * m + j];
      if (st.n != n || st.k < 0 || st.k >= pow2(n)) {
        throw InvalidArgument("phase state index outside [0, 2^n)");
      }
      groups[i].coefficients.push_back(st.k);
    }
  }
  return groups;
}

inline std::vector<GroupState> sample_groups(const HiddenInstance& inst, Rng& rng,
                                             SamplerPath path = SamplerPath::Shortcut) {
  const unsigned m = group_count(inst.width());
  std::vector<PhaseState> states;
  states.reserve(static_cast<std::size_t>(m) * m);
  for (unsigned q = 0; q < m * m; ++q) states.push_back(sample_phase_state(inst, rng, path));
  return build_groups(states, inst.width());
}

// a_i(x_i) for the label whose bit j selects a_ij.
inline BigInt group_phase(const GroupState& group, std::uint32_t label) {
  BigInt v = 0;
  for (std::size_t j = 0; j < group.coefficients.size(); ++j)
    if ((label >> j) & 1u) v += group.coefficients[j];
  return v;
}

// e^(2 pi i exponent * s / 2^n), reduced exactly before going to floating point.
inline std::complex<double> phase_factor(const BigInt& exponent, const BigInt& s, unsigned n) {
  const BigInt r = mod_pow2(exponent * s, n);
  const double frac = std::ldexp(r.get_d(), -static_cast<int>(n));
  return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

// Amplitude vector of the joint state sum_x e^(2 pi i a(x) s/2^n)|x>, where
// qubit q = i*m + j holds x_ij. Validation only (m^2 <= 20).
inline std::vector<std::complex<double>> materialize_joint_state(
    std::span<const GroupState> groups, unsigned n, const BigInt& s) {
  const unsigned m = static_cast<unsigned>(groups.size());
  const unsigned qubits = m * m;
  if (qubits > 20) throw TooLarge("joint state materialisation limited to 20 qubits");
  const std::size_t dim = std::size_t{1} << qubits;
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<std::complex<double>> amps(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    BigInt exponent = 0;
    for (unsigned i = 0; i < m; ++i) {
      const auto label = static_cast<std::uint32_t>((x >> (i * m)) & ((1u << m) - 1));
      exponent += group_phase(groups[i], label);
    }
    amps[x] = norm * phase_factor(exponent, s, n);
  }
  return amps;
}

// Explicit Kronecker product of the two-amplitude states, qubit q in bit q.
inline std::vector<std::complex<double>> tensor_product_state(std::span<const PhaseState> states,
                                                              const BigInt& s) {
  std::vector<std::complex<double>> amps{1.0};
  const double h = 1.0 / std::numbers::sqrt2;
  for (std::size_t q = 0; q < states.size(); ++q) {
    const std::complex<double> one = h * phase_factor(states[q].k, s, states[q].n);
    std::vector<std::complex<double>> next(amps.size() * 2);
    for (std::size_t x = 0; x < amps.size(); ++x) {
      next[x] = amps[x] * h;
      next[x + amps.size()] = amps[x] * one;
    }
    amps = std::move(next);
  }
  return amps;
}

}  // namespace dhsp
