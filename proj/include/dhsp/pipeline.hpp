#pragma once

// End-to-end parity recovery: sample phase states, collapse to a
// transition state, recover survivor labels classically with SV, pick a
// pair whose exponents differ by 2^(n-1), project onto it and measure in
// the +/- basis.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dhsp/bigint.hpp"
#include "dhsp/dihedral.hpp"
#include "dhsp/errors.hpp"
#include "dhsp/phase_sampler.hpp"
#include "dhsp/rng.hpp"
#include "dhsp/subset_sum.hpp"
#include "dhsp/transition.hpp"

namespace dhsp {

// Everything the classical side is allowed to know about a run.
struct ClassicalTranscript {
  unsigned n = 0;
  unsigned m = 0;
  std::vector<std::vector<BigInt>> coefficients;
  std::vector<BigInt> measured;
  BigInt c;

  static ClassicalTranscript record(std::span<const GroupState> groups,
                                    std::span<const GroupSupport> supports, unsigned n) {
    ClassicalTranscript t;
    t.n = n;
    t.m = static_cast<unsigned>(groups.size());
    BigInt sum = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      t.coefficients.push_back(groups[i].coefficients);
      t.measured.push_back(supports[i].measured);
      sum += supports[i].measured;
    }
    t.c = mod_pow2(sum, n - 1);
    return t;
  }
};

enum class FailureReason { TooFewSurvivors, NoValidPair, ProjectionMissed, SvNotFound };

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::TooFewSurvivors: return "TooFewSurvivors";
    case FailureReason::NoValidPair: return "NoValidPair";
    case FailureReason::ProjectionMissed: return "ProjectionMissed";
    case FailureReason::SvNotFound: return "SVNotFound";
  }
  return "?";
}

class PipelineFailure : public Error {
 public:
  explicit PipelineFailure(FailureReason reason)
      : Error(std::string("pipeline failure: ") + to_string(reason)), reason_(reason) {}
  FailureReason reason() const { return reason_; }

 private:
  FailureReason reason_;
};

struct Candidate {
  FullLabel label;
  BigInt exponent;  // a(x) mod 2^n

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct RecoveryOptions {
  CongruenceSolver solver = CongruenceSolver::SV;
  SvOptions sv;
  std::size_t cap = kDefaultSupportCap;
};

// Solves a_i(x_i) = c_i mod 2^(n-1) per group and combines the solutions.
// Exact values follow from the shift index: a_i(x_i) = c_i + t 2^(n-1).
inline std::vector<Candidate> recover_candidates(const ClassicalTranscript& transcript,
                                                 const RecoveryOptions& options = {}) {
  const unsigned n = transcript.n;
  const BigInt modulus = pow2(n - 1);
  struct Part {
    std::uint32_t label;
    BigInt value;
  };
  std::vector<std::vector<Part>> per_group;
  std::size_t total = 1;
  for (std::size_t i = 0; i < transcript.coefficients.size(); ++i) {
    const auto sols = solve_congruence(transcript.coefficients[i], transcript.measured[i], n,
                                       options.sv, options.solver);
    if (sols.empty()) throw PipelineFailure(FailureReason::SvNotFound);
    std::vector<Part> parts;
    for (const SvSolution& s : sols) {
      parts.push_back({to_label(s.x),
                       transcript.measured[i] + modulus * static_cast<unsigned long>(*s.shift_index)});
    }
    std::sort(parts.begin(), parts.end(),
              [](const Part& a, const Part& b) { return a.label < b.label; });
    if (total > options.cap / parts.size()) throw SupportTooLarge("candidate product too large");
    total *= parts.size();
    per_group.push_back(std::move(parts));
  }

  std::vector<Candidate> out;
  out.reserve(total);
  std::vector<std::size_t> digit(per_group.size(), 0);
  for (std::size_t count = 0; count < total; ++count) {
    Candidate cand;
    BigInt a = 0;
    for (std::size_t i = 0; i < per_group.size(); ++i) {
      cand.label.push_back(per_group[i][digit[i]].label);
      a += per_group[i][digit[i]].value;
    }
    cand.exponent = mod_pow2(a, n);
    out.push_back(std::move(cand));
    for (std::size_t i = per_group.size(); i-- > 0;) {
      if (++digit[i] < per_group[i].size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

// First pair, in candidate order, whose exponents differ by 2^(n-1) mod 2^n.
inline std::pair<Candidate, Candidate> select_pair(std::span<const Candidate> candidates,
                                                   unsigned n) {
  const BigInt half = pow2(n - 1);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (mod_pow2(candidates[j].exponent - candidates[i].exponent, n) == half)
        return {candidates[i], candidates[j]};
    }
  }
  throw PipelineFailure(FailureReason::NoValidPair);
}

struct TwoLevelState {
  std::complex<double> zero;
  std::complex<double> one;

  std::complex<double> relative_phase() const { return one / zero; }
};

// Projective measurement onto span{|x1>, |x2>} of the uniform-magnitude
// transition state: succeeds with probability 2/tau. The retained pair is
// relabelled |0>, |1> with |0> real positive.
inline TwoLevelState project_pair(const TransitionState& state,
                                  const std::pair<Candidate, Candidate>& pair,
                                  const HiddenInstance& inst, Rng& rng) {
  auto find = [&](const FullLabel& label) -> const TransitionSurvivor& {
    auto it = std::lower_bound(
        state.survivors.begin(), state.survivors.end(), label,
        [](const TransitionSurvivor& s, const FullLabel& l) { return s.label < l; });
    if (it == state.survivors.end() || it->label != label)
      throw InvalidArgument("pair member is not a survivor of the transition state");
    return *it;
  };
  const TransitionSurvivor& first = find(pair.first.label);
  const TransitionSurvivor& second = find(pair.second.label);
  if (first.label == second.label) throw InvalidArgument("pair members must differ");

  const std::size_t tau = survivor_tau(state);
  if (uniform_index(rng, tau) >= 2) throw PipelineFailure(FailureReason::ProjectionMissed);

  audit::QuantumScope device;
  const BigInt& s = inst.slope();
  const double h = 1.0 / std::sqrt(2.0);
  return {h, h * phase_factor(second.exponent - first.exponent, s, state.n)};
}

// Measurement of |0> + e(phi)|1> in the +/- basis. Only phases of +1 or -1
// are meaningful here; anything else means the pair was not a valid one.
inline int measure_pm(const TwoLevelState& qubit) {
  const std::complex<double> rel = qubit.relative_phase();
  if (std::abs(rel - 1.0) < 1e-9) return 0;
  if (std::abs(rel + 1.0) < 1e-9) return 1;
  throw NonRealPhase("relative phase is not +/-1");
}

struct FailureBreakdown {
  std::size_t too_few_survivors = 0;
  std::size_t no_valid_pair = 0;
  std::size_t projection_missed = 0;
  std::size_t sv_not_found = 0;

  void add(FailureReason r) {
    switch (r) {
      case FailureReason::TooFewSurvivors: ++too_few_survivors; break;
      case FailureReason::NoValidPair: ++no_valid_pair; break;
      case FailureReason::ProjectionMissed: ++projection_missed; break;
      case FailureReason::SvNotFound: ++sv_not_found; break;
    }
  }
  std::size_t total() const {
    return too_few_survivors + no_valid_pair + projection_missed + sv_not_found;
  }
  friend bool operator==(const FailureBreakdown&, const FailureBreakdown&) = default;
};

struct StageTimings {
  double sampling_us = 0;
  double filtering_us = 0;
  double recovery_us = 0;
  double measurement_us = 0;
};

struct PipelineResult {
  std::optional<int> parity;
  FailureBreakdown failures;
  unsigned attempts = 0;
  StageTimings timings;

  bool exhausted() const { return !parity.has_value(); }
  unsigned retries() const { return static_cast<unsigned>(failures.total()); }
};

using GroupSource = std::function<std::vector<GroupState>(const HiddenInstance&, Rng&)>;

struct PipelineOptions {
  unsigned max_retries = 32;
  SamplerPath sampler = SamplerPath::Shortcut;
  RecoveryOptions recovery;
  // On NoValidPair, re-run recovery with delta = 99/100 and the minimal
  // lambda before giving up on the attempt.
  bool exhaustive_pair_search = false;
  // Cross-check every transition state against the exhaustive filter.
  bool brute_force_check = false;
  std::size_t support_cap = kDefaultSupportCap;
  // Replaces sampling and grouping when set (used to force specific coefficient matrices).
  GroupSource group_source;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap_us() {
    const auto now = std::chrono::steady_clock::now();
    const double us = std::chrono::duration<double, std::micro>(now - start_).count();
    start_ = now;
    return us;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline bool has_valid_pair(const TransitionState& state) {
  const BigInt half = pow2(state.n - 1);
  bool zero = false;
  bool flip = false;
  for (const TransitionSurvivor& s : state.survivors) {
    if (s.relative == 0) zero = true;
    if (s.relative == half) flip = true;
  }
  return zero && flip;
}

// Attribution of a classical-side failure to one of the three analysed
// situations. Uses the simulator's view of the state; the decision to fail
// was already made from classical data alone.
inline FailureReason attribute(const TransitionState& state) {
  if (survivor_tau(state) < 2) return FailureReason::TooFewSurvivors;
  if (has_valid_pair(state)) return FailureReason::SvNotFound;
  return FailureReason::NoValidPair;
}

inline void merge_candidates(std::vector<Candidate>& into, std::vector<Candidate> more) {
  for (Candidate& c : more)
    if (std::find(into.begin(), into.end(), c) == into.end()) into.push_back(std::move(c));
  std::sort(into.begin(), into.end(),
            [](const Candidate& a, const Candidate& b) { return a.label < b.label; });
}

}  // namespace detail

inline PipelineResult run_pipeline(const HiddenInstance& inst, std::uint64_t seed,
                                   const PipelineOptions& options = {}) {
  if (inst.width() < 4) throw InvalidArgument("pipeline needs n >= 4");
  if (options.max_retries < 1) throw InvalidArgument("max_retries must be at least 1");
  const unsigned n = inst.width();
  PipelineResult result;

  for (unsigned attempt = 0; attempt < options.max_retries; ++attempt) {
    ++result.attempts;
    Rng rng = make_stream(seed, {attempt});
    detail::Stopwatch watch;

    // sample and group
    const std::vector<GroupState> groups = options.group_source
                                               ? options.group_source(inst, rng)
                                               : sample_groups(inst, rng, options.sampler);
    result.timings.sampling_us += watch.lap_us();

    // phase filter
    const std::vector<GroupSupport> supports = apply_phase_filters(groups, n, rng);
    const TransitionState state = assemble_transition(supports, n, options.support_cap);
    if (options.brute_force_check) {
      std::vector<FullLabel> labels;
      for (const auto& s : state.survivors) labels.push_back(s.label);
      const ClassicalTranscript t = ClassicalTranscript::record(groups, supports, n);
      if (exhaustive_survivors(groups, n, t.measured) != labels)
        throw CrossCheckFailure("transition survivors differ from exhaustive filter");
    }
    result.timings.filtering_us += watch.lap_us();

    // classical recovery
    const ClassicalTranscript transcript = ClassicalTranscript::record(groups, supports, n);
    std::optional<std::pair<Candidate, Candidate>> pair;
    try {
      std::vector<Candidate> candidates = recover_candidates(transcript, options.recovery);
      try {
        pair = select_pair(candidates, n);
      } catch (const PipelineFailure&) {
        if (!options.exhaustive_pair_search) throw;
        RecoveryOptions alt = options.recovery;
        alt.sv.delta = Rational(99, 100);
        alt.sv.lambda_policy = alt.sv.lambda_policy == LambdaPolicy::Standard
                                   ? LambdaPolicy::Minimal
                                   : LambdaPolicy::Standard;
        detail::merge_candidates(candidates, recover_candidates(transcript, alt));
        pair = select_pair(candidates, n);
      }
    } catch (const PipelineFailure&) {
      result.timings.recovery_us += watch.lap_us();
      result.failures.add(detail::attribute(state));
      continue;
    }
    result.timings.recovery_us += watch.lap_us();

    // project and measure
    try {
      const TwoLevelState qubit = project_pair(state, *pair, inst, rng);
      result.parity = measure_pm(qubit);
      result.timings.measurement_us += watch.lap_us();
      return result;
    } catch (const PipelineFailure& f) {
      result.timings.measurement_us += watch.lap_us();
      result.failures.add(f.reason());
    }
  }
  return result;
}

inline PipelineResult run_pipeline(unsigned n, std::uint64_t seed,
                                   const PipelineOptions& options = {}) {
  Rng rng = make_stream(seed, {0x736c6f7065ULL});
  return run_pipeline(HiddenInstance::random(n, rng), seed, options);
}

}  // namespace dhsp
