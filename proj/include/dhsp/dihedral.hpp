#pragma once

// Dihedral group D_N with N = 2^n, the hidden-reflection oracle, and a
// full state-vector simulation of quantum Fourier sampling used to validate
// the shortcut phase-state sampler.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "dhsp/bigint.hpp"
#include "dhsp/errors.hpp"
#include "dhsp/rng.hpp"

namespace dhsp {

namespace audit {

inline std::atomic<bool>& enabled_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

inline int& scope_depth() {
  thread_local int depth = 0;
  return depth;
}

inline void set_enabled(bool on) { enabled_flag().store(on); }
inline bool enabled() { return enabled_flag().load(); }

// Marks code that models the quantum device (or the referee scoring a run).
// Only inside such a scope may the hidden slope be read when auditing.
class QuantumScope {
 public:
  QuantumScope() { ++scope_depth(); }
  ~QuantumScope() { --scope_depth(); }
  QuantumScope(const QuantumScope&) = delete;
  QuantumScope& operator=(const QuantumScope&) = delete;
};

}  // namespace audit

struct DihedralElement {
  std::uint64_t a = 0;  // rotation part, mod N
  std::uint8_t b = 0;   // reflection flag

  friend bool operator==(const DihedralElement&, const DihedralElement&) = default;
};

class HiddenInstance {
 public:
  HiddenInstance(unsigned n, BigInt s) : n_(n), s_(std::move(s)) {
    if (n_ < 2) throw InvalidArgument("register width must be at least 2");
    if (s_ < 0 || s_ >= pow2(n_)) throw InvalidArgument("slope must lie in [0, 2^n)");
  }

  unsigned width() const { return n_; }

  const BigInt& slope() const {
    if (audit::enabled() && audit::scope_depth() == 0) {
      throw InformationLeak("hidden slope read outside a quantum scope");
    }
    return s_;
  }

  static HiddenInstance random(unsigned n, Rng& rng) { return {n, uniform_bits(rng, n)}; }

 private:
  unsigned n_;
  BigInt s_;
};

inline bool valid_element(const DihedralElement& g, std::uint64_t modulus) {
  return g.a < modulus && g.b <= 1;
}

// (a1, b1)(a2, b2) = (a1 + (-1)^b1 a2, b1 + b2)
inline DihedralElement compose(const DihedralElement& g, const DihedralElement& h,
                               std::uint64_t modulus) {
  const std::uint64_t twisted = g.b ? (modulus - h.a) % modulus : h.a;
  return {(g.a + twisted) % modulus, static_cast<std::uint8_t>(g.b ^ h.b)};
}

inline DihedralElement inverse(const DihedralElement& g, std::uint64_t modulus) {
  if (g.b) return g;
  return {(modulus - g.a) % modulus, 0};
}

inline std::uint64_t group_modulus(const HiddenInstance& inst) {
  if (inst.width() > 63) throw WidthTooLarge("group elements are limited to n <= 63");
  return std::uint64_t{1} << inst.width();
}

// Coset label of g. f(a,0) = a and f(a,1) = s - a, so f is constant exactly
// on the cosets {(v,0), (s-v,1)} of H = {e, y x^s}.
inline std::uint64_t hidden_f(const DihedralElement& g, const HiddenInstance& inst) {
  const std::uint64_t modulus = group_modulus(inst);
  if (!g.b) return g.a;
  audit::QuantumScope oracle;
  const std::uint64_t s = to_u64(inst.slope());
  return (s + modulus - g.a) % modulus;
}

struct FourierSample {
  std::uint64_t k = 0;
  // Residual qubit, normalised so amp0 is real and positive.
  std::complex<double> amp0;
  std::complex<double> amp1;

  std::complex<double> relative_phase() const { return amp1 / amp0; }
};

inline constexpr unsigned kMaxFullSimulationWidth = 10;

// Full state-vector simulation of one round of Fourier sampling:
// uniform superposition over D_N, oracle into a function register, measure
// it, map g -> g^{-1} so the surviving coset is a left coset of H, apply the
// Z_N Fourier transform to the rotation coordinate and measure k.
inline FourierSample coset_fourier_sample(const HiddenInstance& inst, Rng& rng) {
  const unsigned n = inst.width();
  if (n > kMaxFullSimulationWidth) {
    throw WidthTooLarge("full Fourier sampling needs n <= 10, got " + std::to_string(n));
  }
  using cd = std::complex<double>;
  const std::uint64_t N = std::uint64_t{1} << n;
  const auto idx = [N](std::uint64_t a, std::uint64_t b, std::uint64_t y) {
    return (b * N + a) * N + y;
  };

  // |g>|0>  ->  |g>|f(g)> over the uniform superposition of 2N elements.
  std::vector<cd> state(2 * N * N, cd{0.0, 0.0});
  const double amp = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
  for (std::uint64_t b = 0; b < 2; ++b) {
    for (std::uint64_t a = 0; a < N; ++a) {
      const DihedralElement g{a, static_cast<std::uint8_t>(b)};
      state[idx(a, b, hidden_f(g, inst))] += amp;
    }
  }

  // Measure the function register.
  std::vector<double> py(N, 0.0);
  for (std::uint64_t b = 0; b < 2; ++b)
    for (std::uint64_t a = 0; a < N; ++a)
      for (std::uint64_t y = 0; y < N; ++y) py[y] += std::norm(state[idx(a, b, y)]);
  const std::uint64_t y =
      std::discrete_distribution<std::uint64_t>(py.begin(), py.end())(rng);
  std::vector<cd> reg(2 * N, cd{0.0, 0.0});
  const double renorm = 1.0 / std::sqrt(py[y]);
  for (std::uint64_t b = 0; b < 2; ++b)
    for (std::uint64_t a = 0; a < N; ++a) reg[b * N + a] = state[idx(a, b, y)] * renorm;
  state.clear();
  state.shrink_to_fit();

  // Group inversion (a permutation of basis states).
  std::vector<cd> inv(2 * N, cd{0.0, 0.0});
  for (std::uint64_t b = 0; b < 2; ++b) {
    for (std::uint64_t a = 0; a < N; ++a) {
      const DihedralElement g = inverse({a, static_cast<std::uint8_t>(b)}, N);
      inv[g.b * N + g.a] = reg[b * N + a];
    }
  }

  // Fourier transform over Z_N on the rotation coordinate.
  std::vector<cd> out(2 * N, cd{0.0, 0.0});
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (std::uint64_t b = 0; b < 2; ++b) {
    for (std::uint64_t k = 0; k < N; ++k) {
      cd acc{0.0, 0.0};
      for (std::uint64_t a = 0; a < N; ++a) {
        if (inv[b * N + a] == cd{0.0, 0.0}) continue;
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>((a * k) % N) / static_cast<double>(N);
        acc += inv[b * N + a] * std::polar(1.0, angle);
      }
      out[b * N + k] = acc * scale;
    }
  }

  std::vector<double> pk(N);
  for (std::uint64_t k = 0; k < N; ++k) pk[k] = std::norm(out[k]) + std::norm(out[N + k]);
  const std::uint64_t k = std::discrete_distribution<std::uint64_t>(pk.begin(), pk.end())(rng);

  cd amp0 = out[k];
  cd amp1 = out[N + k];
  const double norm = std::sqrt(std::norm(amp0) + std::norm(amp1));
  const cd unphase = std::conj(amp0) / std::abs(amp0);
  return {k, amp0 * unphase / norm, amp1 * unphase / norm};
}

}  // namespace dhsp
