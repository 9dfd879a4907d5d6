#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dhsp/dihedral.hpp"
#include "dhsp/stats.hpp"

namespace dhsp {
namespace {

TEST(Compose, WorkedExamples) {
  EXPECT_EQ(compose({1, 0}, {1, 0}, 8), (DihedralElement{2, 0}));
  EXPECT_EQ(compose({0, 1}, {3, 0}, 8), (DihedralElement{5, 1}));
  EXPECT_EQ(compose({2, 1}, {3, 1}, 8), (DihedralElement{7, 0}));
}

TEST(Compose, GroupAxiomsExhaustiveSmall) {
  for (std::uint64_t N : {4u, 8u, 16u}) {
    std::vector<DihedralElement> all;
    for (std::uint8_t b = 0; b < 2; ++b)
      for (std::uint64_t a = 0; a < N; ++a) all.push_back({a, b});
    for (const auto& g : all) {
      EXPECT_EQ(compose({0, 0}, g, N), g);
      EXPECT_EQ(compose(g, {0, 0}, N), g);
      EXPECT_EQ(compose(g, inverse(g, N), N), (DihedralElement{0, 0}));
      EXPECT_EQ(compose(inverse(g, N), g, N), (DihedralElement{0, 0}));
      for (const auto& h : all)
        for (const auto& u : all)
          ASSERT_EQ(compose(compose(g, h, N), u, N), compose(g, compose(h, u, N), N));
    }
  }
}

TEST(Compose, AssociativityRandomLargeModulus) {
  Rng rng = make_stream(11);
  const std::uint64_t N = std::uint64_t{1} << 40;
  for (int i = 0; i < 2000; ++i) {
    DihedralElement g{rng() % N, static_cast<std::uint8_t>(rng() & 1)};
    DihedralElement h{rng() % N, static_cast<std::uint8_t>(rng() & 1)};
    DihedralElement u{rng() % N, static_cast<std::uint8_t>(rng() & 1)};
    ASSERT_EQ(compose(compose(g, h, N), u, N), compose(g, compose(h, u, N), N));
  }
}

TEST(HiddenF, WorkedExamples) {
  const HiddenInstance s3(3, 3);
  EXPECT_EQ(hidden_f({2, 0}, s3), 2u);
  EXPECT_EQ(hidden_f({1, 1}, s3), 2u);
  EXPECT_EQ(hidden_f({0, 1}, s3), 3u);
  const HiddenInstance s0(3, 0);
  for (std::uint64_t a = 0; a < 8; ++a) EXPECT_EQ(hidden_f({a, 1}, s0), (8 - a) % 8);
}

// f(g) == f(g') exactly when g' is in H g, H = {e, (s,1)}.
TEST(HiddenF, ConstantExactlyOnCosets) {
  for (unsigned n = 2; n <= 8; ++n) {
    const std::uint64_t N = std::uint64_t{1} << n;
    for (std::uint64_t s : {std::uint64_t{0}, std::uint64_t{1}, N / 2 + 1, N - 1}) {
      const HiddenInstance inst(n, from_u64(s));
      const DihedralElement h{s, 1};
      for (std::uint8_t b = 0; b < 2; ++b) {
        for (std::uint64_t a = 0; a < N; ++a) {
          const DihedralElement g{a, b};
          const DihedralElement partner = compose(h, g, N);
          for (std::uint8_t b2 = 0; b2 < 2; ++b2) {
            for (std::uint64_t a2 = 0; a2 < N; ++a2) {
              const DihedralElement g2{a2, b2};
              const bool same_coset = g2 == g || g2 == partner;
              ASSERT_EQ(hidden_f(g, inst) == hidden_f(g2, inst), same_coset)
                  << "n=" << n << " s=" << s;
            }
          }
        }
      }
    }
  }
}

TEST(HiddenInstanceTest, RejectsInvalid) {
  EXPECT_THROW(HiddenInstance(1, 0), InvalidArgument);
  EXPECT_THROW(HiddenInstance(4, 16), InvalidArgument);
  EXPECT_THROW(HiddenInstance(4, -1), InvalidArgument);
}

TEST(Audit, SlopeReadOutsideScopeThrows) {
  const HiddenInstance inst(4, 5);
  audit::set_enabled(true);
  EXPECT_THROW((void)inst.slope(), InformationLeak);
  {
    audit::QuantumScope scope;
    EXPECT_EQ(inst.slope(), 5);
  }
  audit::set_enabled(false);
  EXPECT_EQ(inst.slope(), 5);
}

std::complex<double> expected_phase(std::uint64_t k, std::uint64_t s, unsigned n) {
  const std::uint64_t N = std::uint64_t{1} << n;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((k * s) % N) /
                             static_cast<double>(N));
}

TEST(CosetFourierSample, KZeroGivesUnitPhase) {
  const HiddenInstance inst(4, 7);
  Rng rng = make_stream(5);
  int seen = 0;
  for (int i = 0; i < 2000 && seen < 3; ++i) {
    const FourierSample fs = coset_fourier_sample(inst, rng);
    if (fs.k != 0) continue;
    ++seen;
    EXPECT_NEAR(std::abs(fs.relative_phase() - 1.0), 0.0, 1e-9);
    EXPECT_NEAR(fs.amp0.real(), 1.0 / std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(fs.amp0.imag(), 0.0, 1e-12);
  }
  EXPECT_GT(seen, 0);
}

TEST(CosetFourierSample, SlopeThreeKFourPhase) {
  const HiddenInstance inst(4, 3);
  Rng rng = make_stream(6);
  bool seen = false;
  for (int i = 0; i < 5000 && !seen; ++i) {
    const FourierSample fs = coset_fourier_sample(inst, rng);
    if (fs.k != 4) continue;
    seen = true;
    // e^(2 pi i 12/16) = e^(3 pi i / 2) = -i
    EXPECT_NEAR(std::abs(fs.relative_phase() - std::complex<double>(0, -1)), 0.0, 1e-9);
  }
  EXPECT_TRUE(seen);
}

TEST(CosetFourierSample, PhaseMatchesForEverySampleUpToEightQubits) {
  Rng rng = make_stream(7);
  for (unsigned n = 2; n <= 8; ++n) {
    for (int rep = 0; rep < 40; ++rep) {
      const HiddenInstance inst = HiddenInstance::random(n, rng);
      const FourierSample fs = coset_fourier_sample(inst, rng);
      const std::uint64_t s = to_u64(inst.slope());
      ASSERT_NEAR(std::abs(fs.relative_phase() - expected_phase(fs.k, s, n)), 0.0, 1e-9)
          << "n=" << n << " s=" << s << " k=" << fs.k;
      ASSERT_NEAR(std::norm(fs.amp0) + std::norm(fs.amp1), 1.0, 1e-9);
    }
  }
}

TEST(CosetFourierSample, UniformIndexDistribution) {
  const HiddenInstance inst(4, 1);
  Rng rng = make_stream(8);
  std::vector<std::size_t> counts(16, 0);
  for (int i = 0; i < 16000; ++i) ++counts[coset_fourier_sample(inst, rng).k];
  EXPECT_GT(stats::chi_square_uniform(counts).p_value, 0.01);
}

TEST(CosetFourierSample, WidthCap) {
  Rng rng = make_stream(9);
  EXPECT_THROW(coset_fourier_sample(HiddenInstance(11, 0), rng), WidthTooLarge);
  EXPECT_NO_THROW(coset_fourier_sample(HiddenInstance(10, 3), rng));
}

}  // namespace
}  // namespace dhsp
