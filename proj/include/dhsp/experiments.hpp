#pragma once

// Seeded Monte Carlo experiments and their JSON/CSV reports.
//
// Per-trial records depend only on the configuration: every trial draws from
// its own stream keyed by (seed, experiment, cell, trial), and records are
// stored by index, so serial and parallel runs serialise identically.
// Wall-clock data lives in the separate "timings" section.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dhsp/bigint.hpp"
#include "dhsp/dihedral.hpp"
#include "dhsp/errors.hpp"
#include "dhsp/parallel.hpp"
#include "dhsp/phase_sampler.hpp"
#include "dhsp/pipeline.hpp"
#include "dhsp/rng.hpp"
#include "dhsp/stats.hpp"
#include "dhsp/subset_sum.hpp"
#include "dhsp/transition.hpp"

namespace dhsp {

using json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "dhsp-report/1";

enum class ExperimentKind { PTau, PhaseFlip, SvSweep, SvBench, EndToEnd };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::PTau: return "ptau";
    case ExperimentKind::PhaseFlip: return "phase-flip";
    case ExperimentKind::SvSweep: return "sv-sweep";
    case ExperimentKind::SvBench: return "sv-bench";
    case ExperimentKind::EndToEnd: return "run";
  }
  return "?";
}

inline const char* to_string(LambdaPolicy p) {
  return p == LambdaPolicy::Standard ? "standard" : "minimal";
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PTau;
  std::vector<unsigned> n_values;
  std::vector<unsigned> m_values;
  std::vector<unsigned> bit_sizes;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  Rational lll_delta{3, 4};
  LambdaPolicy lambda_policy = LambdaPolicy::Standard;
  unsigned max_retries = 32;
  bool brute_force_check = false;
  bool exhaustive_pair_search = false;
  unsigned parallel = 1;

  SvOptions sv_options() const { return {lll_delta, lambda_policy}; }

  // Echoed into reports. `parallel` is left out: it must not change results.
  json to_json() const {
    json j;
    j["experiment"] = to_string(kind);
    if (!n_values.empty()) j["n"] = n_values;
    if (!m_values.empty()) j["m"] = m_values;
    if (!bit_sizes.empty()) j["bits"] = bit_sizes;
    j["trials"] = trials;
    j["seed"] = seed;
    j["lll_delta"] = lll_delta.get_str();
    j["lambda_policy"] = to_string(lambda_policy);
    j["max_retries"] = max_retries;
    j["brute_force_check"] = brute_force_check;
    j["exhaustive_pair_search"] = exhaustive_pair_search;
    return j;
  }
};

struct ExperimentReport {
  json config;
  json records = json::array();
  json aggregate = json::object();
  json timings = json::object();

  json to_json() const {
    json j;
    j["schema"] = kReportSchema;
    j["config"] = config;
    j["records"] = records;
    j["aggregate"] = aggregate;
    j["timings"] = timings;
    return j;
  }

  // One CSV row per aggregate cell, scalar columns only.
  std::string to_csv() const {
    std::ostringstream out;
    const json& cells = aggregate.at("cells");
    if (cells.empty()) return {};
    std::vector<std::string> columns;
    for (auto it = cells.front().begin(); it != cells.front().end(); ++it)
      if (it.value().is_primitive()) columns.push_back(it.key());
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const json& cell : cells) {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "");
        const json& v = cell.at(columns[i]);
        if (v.is_string())
          out << v.get<std::string>();
        else
          out << v.dump();
      }
      out << "\n";
    }
    return out.str();
  }
};

namespace detail {

enum : std::uint64_t {
  kTagPTau = 0x7074,
  kTagFlip = 0x666c,
  kTagSweep = 0x7377,
  kTagBench = 0x6265,
  kTagRun = 0x7275,
};

inline json interval_json(std::size_t hits, std::size_t total) {
  const stats::Interval ci = stats::wilson_interval(hits, total);
  return json::array({ci.lo, ci.hi});
}

inline double elapsed_us(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - since)
      .count();
}

// Referee view of the planted slope, used only to score completed runs.
inline int true_parity(const HiddenInstance& inst) {
  audit::QuantumScope referee;
  return mpz_odd_p(inst.slope().get_mpz_t()) ? 1 : 0;
}

}  // namespace detail

inline constexpr unsigned kMaxGlobalCountWidth = 40;
inline constexpr unsigned kMaxBruteForceWidth = 20;

// Number of x in {0,1}^w with sum a_j x_j = c mod 2^(n-1), counted by
// meet-in-the-middle over the two halves of the coefficient list.
inline std::uint64_t count_global_solutions(std::span<const std::uint64_t> coeffs, unsigned n,
                                            std::uint64_t c) {
  const std::uint64_t mask = (std::uint64_t{1} << (n - 1)) - 1;
  const std::size_t half = coeffs.size() / 2;
  auto sums = [&](std::size_t from, std::size_t to) {
    std::vector<std::uint64_t> out(std::size_t{1} << (to - from));
    out[0] = 0;
    for (std::size_t x = 1; x < out.size(); ++x)
      out[x] = (out[x & (x - 1)] + coeffs[from + std::countr_zero(x)]) & mask;
    return out;
  };
  std::vector<std::uint64_t> low = sums(0, half);
  std::sort(low.begin(), low.end());
  std::uint64_t count = 0;
  for (std::uint64_t u : sums(half, coeffs.size())) {
    const std::uint64_t want = (c - u) & mask;
    const auto range = std::equal_range(low.begin(), low.end(), want);
    count += static_cast<std::uint64_t>(range.second - range.first);
  }
  return count;
}

inline std::uint64_t count_global_solutions_brute(std::span<const std::uint64_t> coeffs,
                                                  unsigned n, std::uint64_t c) {
  const std::uint64_t mask = (std::uint64_t{1} << (n - 1)) - 1;
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << coeffs.size()); ++x) {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if ((x >> j) & 1u) v += coeffs[j];
    if (((v - c) & mask) == 0) ++count;
  }
  return count;
}

// Closed form for P(tau >= 2) when each of 2^n labels hits a fixed residue
// independently with probability 2^-(n-1).
inline double ptau_binomial(unsigned n) {
  const double q = std::ldexp(1.0, -static_cast<int>(n - 1));
  const double labels = std::ldexp(1.0, static_cast<int>(n));
  const double p0 = std::exp(labels * std::log1p(-q));
  const double p1 = labels * q * std::exp((labels - 1) * std::log1p(-q));
  return 1.0 - p0 - p1;
}

inline const double kPTauLimit = 1.0 - 3.0 * std::exp(-2.0);

// Two estimates per trial:
//  * tau: solutions of the single equation a(x) = c mod 2^(n-1) over
//    x in {0,1}^n with random coefficients and a uniform residue c;
//  * collapse_tau: survivors of the per-group filter measurement the
//    pipeline performs (m^2 coefficients, measured c_i).
inline ExperimentReport estimate_ptau(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.config = cfg.to_json();
  for (unsigned n : cfg.n_values) {
    if (n < 2 || n > kMaxGlobalCountWidth)
      throw InfeasibleWidth("ptau needs 2 <= n <= 40, got " + std::to_string(n));
    if (group_count(n) > kMaxGroupWidth) throw InfeasibleWidth("m exceeds 26");
    if (cfg.brute_force_check && n > kMaxBruteForceWidth)
      throw InfeasibleWidth("brute-force check needs n <= 20");
  }
  const auto start = std::chrono::steady_clock::now();
  for (unsigned n : cfg.n_values) {
    const unsigned m = group_count(n);
    std::vector<json> records(cfg.trials);
    parallel_for(cfg.trials, cfg.parallel, [&](std::size_t t) {
      Rng rng = make_stream(cfg.seed, {detail::kTagPTau, n, t});
      // Fourier-sampled indices are uniform on [0, 2^n) and independent of s.
      std::vector<std::uint64_t> coeffs(n);
      for (auto& a : coeffs) a = to_u64(uniform_bits(rng, n));
      const std::uint64_t c = to_u64(uniform_bits(rng, n - 1));
      const std::uint64_t tau = count_global_solutions(coeffs, n, c);

      const HiddenInstance placeholder(n, 0);
      const std::vector<GroupState> groups = sample_groups(placeholder, rng);
      const std::vector<GroupSupport> supports = apply_phase_filters(groups, n, rng);
      const std::size_t collapse = support_product(supports);

      json r;
      r["n"] = n;
      r["trial"] = t;
      r["tau"] = tau;
      r["tau_ge_2"] = tau >= 2;
      r["collapse_tau"] = collapse;
      r["collapse_tau_ge_2"] = collapse >= 2;
      if (cfg.brute_force_check) {
        const std::uint64_t bf = count_global_solutions_brute(coeffs, n, c);
        if (bf != tau) throw CrossCheckFailure("global solution count mismatch");
        r["tau_brute_force"] = bf;
        if (static_cast<std::size_t>(m) * m <= 24) {
          std::vector<BigInt> measured;
          for (const auto& s : supports) measured.push_back(s.measured);
          const std::size_t bfc = exhaustive_survivors(groups, n, measured).size();
          if (bfc != collapse) throw CrossCheckFailure("collapse survivor count mismatch");
          r["collapse_tau_brute_force"] = bfc;
        }
      }
      records[t] = std::move(r);
    });
    std::size_t hits = 0, collapse_hits = 0;
    for (const json& r : records) {
      hits += r["tau_ge_2"].get<bool>();
      collapse_hits += r["collapse_tau_ge_2"].get<bool>();
      report.records.push_back(r);
    }
    json cell;
    cell["n"] = n;
    cell["m"] = m;
    cell["trials"] = cfg.trials;
    cell["p_tau"] = static_cast<double>(hits) / static_cast<double>(cfg.trials);
    const auto ci = stats::wilson_interval(hits, cfg.trials);
    cell["p_tau_ci_lo"] = ci.lo;
    cell["p_tau_ci_hi"] = ci.hi;
    cell["p_tau_binomial"] = ptau_binomial(n);
    cell["p_tau_limit"] = kPTauLimit;
    cell["p_tau_collapse"] = static_cast<double>(collapse_hits) / static_cast<double>(cfg.trials);
    const auto cci = stats::wilson_interval(collapse_hits, cfg.trials);
    cell["p_tau_collapse_ci_lo"] = cci.lo;
    cell["p_tau_collapse_ci_hi"] = cci.hi;
    report.aggregate["cells"].push_back(cell);
  }
  report.timings["total_us"] = detail::elapsed_us(start);
  return report;
}

inline constexpr std::uint64_t kMaxFlipAttempts = std::uint64_t{1} << 22;

// Among collapsed transition states with tau >= 2 (all-zero coefficient
// matrices excluded), the fraction of uniformly drawn survivor pairs whose
// exponents differ by 2^(n-1). `trials` counts qualifying states.
inline ExperimentReport estimate_phase_flip(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.config = cfg.to_json();
  for (unsigned n : cfg.n_values) {
    if (n < 2 || n > kMaxBruteForceWidth)
      throw InfeasibleWidth("phase-flip needs 2 <= n <= 20, got " + std::to_string(n));
  }
  const auto start = std::chrono::steady_clock::now();
  for (unsigned n : cfg.n_values) {
    const unsigned m = group_count(n);
    const BigInt half = pow2(n - 1);
    std::vector<json> records(cfg.trials);
    parallel_for(cfg.trials, cfg.parallel, [&](std::size_t t) {
      Rng rng = make_stream(cfg.seed, {detail::kTagFlip, n, t});
      const HiddenInstance placeholder(n, 0);
      json r;
      r["n"] = n;
      r["trial"] = t;
      for (std::uint64_t attempt = 1; attempt <= kMaxFlipAttempts; ++attempt) {
        const std::vector<GroupState> groups = sample_groups(placeholder, rng);
        const bool all_zero = std::all_of(groups.begin(), groups.end(), [](const GroupState& g) {
          return std::all_of(g.coefficients.begin(), g.coefficients.end(),
                             [](const BigInt& a) { return a == 0; });
        });
        const std::vector<GroupSupport> supports = apply_phase_filters(groups, n, rng);
        if (all_zero || support_product(supports) < 2) continue;
        const TransitionState state = assemble_transition(supports, n);
        const std::size_t tau = survivor_tau(state);
        const std::size_t i = uniform_index(rng, tau);
        std::size_t j = uniform_index(rng, tau - 1);
        if (j >= i) ++j;
        const bool flip =
            mod_pow2(state.survivors[j].exponent - state.survivors[i].exponent, n) == half;
        r["qualified"] = true;
        r["attempts"] = attempt;
        r["tau"] = tau;
        r["flip"] = flip;
        if (cfg.brute_force_check && static_cast<std::size_t>(m) * m <= 24) {
          std::vector<BigInt> measured;
          for (const auto& s : supports) measured.push_back(s.measured);
          const auto labels = exhaustive_survivors(groups, n, measured);
          if (labels.size() != tau || labels[i] != state.survivors[i].label ||
              labels[j] != state.survivors[j].label)
            throw CrossCheckFailure("phase-flip survivor mismatch");
          BigInt ai = 0, aj = 0;
          for (std::size_t g = 0; g < groups.size(); ++g) {
            ai += group_phase(groups[g], labels[i][g]);
            aj += group_phase(groups[g], labels[j][g]);
          }
          const bool bf_flip = mod_pow2(aj - ai, n) == half;
          if (bf_flip != flip) throw CrossCheckFailure("phase-flip gap mismatch");
          r["flip_brute_force"] = bf_flip;
        }
        records[t] = std::move(r);
        return;
      }
      r["qualified"] = false;
      r["attempts"] = kMaxFlipAttempts;
      records[t] = std::move(r);
    });
    std::size_t qualified = 0, flips = 0, attempts = 0;
    for (const json& r : records) {
      attempts += r["attempts"].get<std::size_t>();
      if (r["qualified"].get<bool>()) {
        ++qualified;
        flips += r["flip"].get<bool>();
      }
      report.records.push_back(r);
    }
    json cell;
    cell["n"] = n;
    cell["m"] = m;
    cell["qualifying_trials"] = qualified;
    cell["total_attempts"] = attempts;
    cell["p_flip"] = qualified ? static_cast<double>(flips) / static_cast<double>(qualified) : 0.0;
    const auto ci = stats::wilson_interval(flips, qualified);
    cell["p_flip_ci_lo"] = ci.lo;
    cell["p_flip_ci_hi"] = ci.hi;
    cell["p_collapse_tau_ge_2"] =
        attempts ? static_cast<double>(qualified) / static_cast<double>(attempts) : 0.0;
    report.aggregate["cells"].push_back(cell);
  }
  report.timings["total_us"] = detail::elapsed_us(start);
  return report;
}

struct PlantedInstance {
  SubsetSumInstance instance;
  Bits planted;
};

// Weights uniform on [1, 2^bits), a nonzero planted 0/1 vector, target its sum.
inline PlantedInstance planted_instance(unsigned m, unsigned bits, Rng& rng) {
  PlantedInstance p;
  for (unsigned i = 0; i < m; ++i) {
    BigInt w;
    do {
      w = uniform_bits(rng, bits);
    } while (w == 0);
    p.instance.weights.push_back(w);
  }
  do {
    p.planted = from_label(0, m);
    for (auto& b : p.planted) b = coin(rng) ? 1 : 0;
  } while (std::all_of(p.planted.begin(), p.planted.end(), [](auto b) { return b == 0; }));
  p.instance.target = subset_value(p.instance.weights, p.planted);
  return p;
}

inline ExperimentReport sv_success_sweep(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.config = cfg.to_json();
  const SvOptions options = cfg.sv_options();
  const auto start = std::chrono::steady_clock::now();
  for (unsigned m : cfg.m_values) {
    for (unsigned bits : cfg.bit_sizes) {
      if (m < 1 || bits < 1) throw InvalidArgument("m and bits must be positive");
      if (cfg.brute_force_check && m > kMaxBruteForceWeights)
        throw InfeasibleWidth("brute-force check needs m <= 24");
      std::vector<json> records(cfg.trials);
      parallel_for(cfg.trials, cfg.parallel, [&](std::size_t t) {
        Rng rng = make_stream(cfg.seed, {detail::kTagSweep, m, bits, t});
        const PlantedInstance p = planted_instance(m, bits, rng);
        const std::vector<Bits> found = sv_solve_all(p.instance, options);
        json r;
        r["m"] = m;
        r["bits"] = bits;
        r["trial"] = t;
        try {
          r["density"] = density(p.instance);
        } catch (const DegenerateWeights&) {
          r["density"] = nullptr;
        }
        r["success"] = !found.empty();
        r["planted_recovered"] =
            std::find(found.begin(), found.end(), p.planted) != found.end();
        if (cfg.brute_force_check) {
          const auto all = brute_force_subset_sum(p.instance);
          for (const Bits& x : found)
            if (std::find(all.begin(), all.end(), x) == all.end())
              throw CrossCheckFailure("SV returned a solution outside the oracle set");
          r["oracle_solutions"] = all.size();
        }
        records[t] = std::move(r);
      });
      std::size_t ok = 0, dcount = 0;
      double dsum = 0;
      for (const json& r : records) {
        ok += r["success"].get<bool>();
        if (r["density"].is_number()) {
          dsum += r["density"].get<double>();
          ++dcount;
        }
        report.records.push_back(r);
      }
      json cell;
      cell["m"] = m;
      cell["bits"] = bits;
      cell["trials"] = cfg.trials;
      cell["mean_density"] = dcount ? json(dsum / static_cast<double>(dcount)) : json(nullptr);
      cell["success_rate"] = static_cast<double>(ok) / static_cast<double>(cfg.trials);
      const auto ci = stats::wilson_interval(ok, cfg.trials);
      cell["success_ci_lo"] = ci.lo;
      cell["success_ci_hi"] = ci.hi;
      cell["low_density"] = dcount > 0 && dsum / static_cast<double>(dcount) < 1.0;
      report.aggregate["cells"].push_back(cell);
    }
  }
  report.timings["total_us"] = detail::elapsed_us(start);
  return report;
}

// Wall-clock of sv_solve_all per planted instance, fitted as
// log(time) = slope * log(m (log2 max a)^3) + intercept.
inline ExperimentReport sv_timing_bench(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.config = cfg.to_json();
  const SvOptions options = cfg.sv_options();
  std::vector<double> xs, ys;
  json per_trial = json::array();
  const auto start = std::chrono::steady_clock::now();
  for (unsigned m : cfg.m_values) {
    for (unsigned bits : cfg.bit_sizes) {
      if (m < 1 || bits < 2) throw InvalidArgument("sv-bench needs m >= 1 and bits >= 2");
      std::vector<json> records(cfg.trials);
      std::vector<double> micros(cfg.trials);
      std::vector<double> logsize(cfg.trials);
      // Timed serially regardless of --parallel so runs do not contend.
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        Rng rng = make_stream(cfg.seed, {detail::kTagBench, m, bits, t});
        const PlantedInstance p = planted_instance(m, bits, rng);
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<Bits> found = sv_solve_all(p.instance, options);
        micros[t] = std::max(detail::elapsed_us(t0), 1.0);
        const BigInt& top = *std::max_element(p.instance.weights.begin(), p.instance.weights.end());
        const double lg = std::max(log2_big(top), 1.0);
        logsize[t] = std::log(static_cast<double>(m) * lg * lg * lg);
        json r;
        r["m"] = m;
        r["bits"] = bits;
        r["trial"] = t;
        r["success"] = !found.empty();
        records[t] = std::move(r);
      }
      std::vector<double> sorted = micros;
      std::sort(sorted.begin(), sorted.end());
      json cell;
      cell["m"] = m;
      cell["bits"] = bits;
      cell["trials"] = cfg.trials;
      cell["median_us"] = sorted[sorted.size() / 2];
      cell["log_m_bits3"] = std::log(static_cast<double>(m) * bits * bits * bits);
      report.aggregate["cells"].push_back(cell);
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        report.records.push_back(records[t]);
        per_trial.push_back({{"m", m}, {"bits", bits}, {"trial", t}, {"us", micros[t]}});
        xs.push_back(logsize[t]);
        ys.push_back(std::log(micros[t]));
      }
    }
  }
  json fit;
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() >= 2) {
    const stats::LinearFit lf = stats::least_squares(xs, ys);
    fit["slope"] = lf.slope;
    fit["intercept"] = lf.intercept;
    fit["r2"] = lf.r2;
    fit["residuals"] = lf.residuals;
    fit["predicted_slope"] = 1.0;
    fit["slope_in_0.5_1.5"] = lf.slope >= 0.5 && lf.slope <= 1.5;
  } else {
    fit["slope"] = nullptr;
  }
  report.aggregate["fit"] = fit;
  report.timings["per_trial"] = per_trial;
  report.timings["total_us"] = detail::elapsed_us(start);
  return report;
}

inline ExperimentReport end_to_end(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.config = cfg.to_json();
  for (unsigned n : cfg.n_values) {
    if (n < 4) throw InvalidArgument("end-to-end runs need n >= 4");
    if (group_count(n) > kMaxGroupWidth) throw InfeasibleWidth("m exceeds 26");
  }
  PipelineOptions options;
  options.max_retries = cfg.max_retries;
  options.recovery.sv = cfg.sv_options();
  options.exhaustive_pair_search = cfg.exhaustive_pair_search;
  json per_trial = json::array();
  const auto start = std::chrono::steady_clock::now();
  for (unsigned n : cfg.n_values) {
    PipelineOptions local = options;
    local.brute_force_check = cfg.brute_force_check && group_count(n) * group_count(n) <= 24;
    std::vector<json> records(cfg.trials);
    std::vector<StageTimings> timing(cfg.trials);
    parallel_for(cfg.trials, cfg.parallel, [&](std::size_t t) {
      const std::uint64_t run_seed = stream_key(cfg.seed, {detail::kTagRun, n, t});
      Rng rng = make_stream(run_seed, {0x736c6f7065ULL});
      const HiddenInstance inst = HiddenInstance::random(n, rng);
      const PipelineResult res = run_pipeline(inst, run_seed, local);
      const int truth = detail::true_parity(inst);
      json r;
      r["n"] = n;
      r["trial"] = t;
      r["completed"] = !res.exhausted();
      r["parity"] = res.parity ? json(*res.parity) : json(nullptr);
      r["true_parity"] = truth;
      r["correct"] = res.parity ? json(*res.parity == truth) : json(nullptr);
      r["attempts"] = res.attempts;
      r["failures"] = {{"TooFewSurvivors", res.failures.too_few_survivors},
                       {"NoValidPair", res.failures.no_valid_pair},
                       {"ProjectionMissed", res.failures.projection_missed},
                       {"SVNotFound", res.failures.sv_not_found}};
      records[t] = std::move(r);
      timing[t] = res.timings;
    });
    std::size_t completed = 0, correct = 0, attempts = 0;
    FailureBreakdown total;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const json& r = records[t];
      if (r["completed"].get<bool>()) {
        ++completed;
        correct += r["correct"].get<bool>();
      }
      attempts += r["attempts"].get<std::size_t>();
      total.too_few_survivors += r["failures"]["TooFewSurvivors"].get<std::size_t>();
      total.no_valid_pair += r["failures"]["NoValidPair"].get<std::size_t>();
      total.projection_missed += r["failures"]["ProjectionMissed"].get<std::size_t>();
      total.sv_not_found += r["failures"]["SVNotFound"].get<std::size_t>();
      report.records.push_back(r);
      per_trial.push_back({{"n", n},
                           {"trial", t},
                           {"sampling_us", timing[t].sampling_us},
                           {"filtering_us", timing[t].filtering_us},
                           {"recovery_us", timing[t].recovery_us},
                           {"measurement_us", timing[t].measurement_us}});
    }
    json cell;
    cell["n"] = n;
    cell["m"] = group_count(n);
    cell["trials"] = cfg.trials;
    cell["completed"] = completed;
    cell["correct"] = correct;
    cell["wrong"] = completed - correct;
    cell["completion_rate"] = static_cast<double>(completed) / static_cast<double>(cfg.trials);
    cell["attempts"] = attempts;
    const double a = static_cast<double>(attempts);
    cell["frac_too_few_survivors"] = static_cast<double>(total.too_few_survivors) / a;
    cell["frac_no_valid_pair"] = static_cast<double>(total.no_valid_pair) / a;
    cell["frac_projection_missed"] = static_cast<double>(total.projection_missed) / a;
    cell["frac_sv_not_found"] = static_cast<double>(total.sv_not_found) / a;
    report.aggregate["cells"].push_back(cell);
  }
  report.timings["per_trial"] = per_trial;
  report.timings["total_us"] = detail::elapsed_us(start);
  return report;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw InvalidArgument("trials must be at least 1");
  switch (cfg.kind) {
    case ExperimentKind::PTau: return estimate_ptau(cfg);
    case ExperimentKind::PhaseFlip: return estimate_phase_flip(cfg);
    case ExperimentKind::SvSweep: return sv_success_sweep(cfg);
    case ExperimentKind::SvBench: return sv_timing_bench(cfg);
    case ExperimentKind::EndToEnd: return end_to_end(cfg);
  }
  throw InvalidArgument("unknown experiment");
}

// Instance file: "m", then m decimal weights, then the decimal target,
// whitespace separated.
inline SubsetSumInstance parse_instance(std::istream& in) {
  std::size_t m = 0;
  if (!(in >> m) || m == 0) throw InvalidArgument("instance file: bad weight count");
  SubsetSumInstance inst;
  std::string tok;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(in >> tok)) throw InvalidArgument("instance file: missing weight");
    BigInt w;
    if (w.set_str(tok, 10) != 0) throw InvalidArgument("instance file: bad weight " + tok);
    inst.weights.push_back(w);
  }
  if (!(in >> tok) || inst.target.set_str(tok, 10) != 0)
    throw InvalidArgument("instance file: bad target");
  if (in >> tok) throw InvalidArgument("instance file: trailing data");
  inst.validate();
  return inst;
}

}  // namespace dhsp
