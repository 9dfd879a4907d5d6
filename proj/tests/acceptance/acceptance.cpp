// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "dhsp/experiments.hpp"
#include "dhsp/lll.hpp"
#include "dhsp/phase_sampler.hpp"
#include "dhsp/stats.hpp"

#ifndef DHSP_CLI_PATH
#error "DHSP_CLI_PATH must name the dhsp executable"
#endif

namespace fs = std::filesystem;
using namespace dhsp;

namespace {

// C1
constexpr double kPTauLo = 0.55, kPTauHi = 0.65;
constexpr double kPTauSeconds = 60;
// C2
constexpr double kFlipTarget = 0.50, kFlipTol = 0.05;
constexpr double kFlipSeconds = 60;
// C3
constexpr std::size_t kMinCompleted = 500;
constexpr double kRunSeconds = 30 * 60;
constexpr double kSingleRunSeconds = 10;
// C4
constexpr std::size_t kSoundnessInstances = 1000;
constexpr unsigned kSoundnessMaxM = 12;
// C5
constexpr double kLowDensitySuccess = 0.90;
// C6
constexpr std::size_t kLllBases = 500;
// C7
constexpr std::size_t kSamplerDraws = 16000;
constexpr double kChiSquareAlpha = 0.01;
constexpr double kPhaseTol = 1e-9;

const std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass;
  std::string detail;
};

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("dhsp-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs the CLI, writing the JSON report to `out`. Returns the exit code.
int cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + DHSP_CLI_PATH + "\" " + args + " --out \"" +
                          out.string() + "\" > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << v;
  return s.str();
}

Outcome c1_ptau() {
  const fs::path out = workdir() / "c1.json";
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli("ptau --n 16 --trials 5000 --seed " + std::to_string(kSeed), out);
  const double secs = seconds_since(t0);
  if (code != 0) return {false, "exit code " + std::to_string(code)};
  const json cell = load(out)["aggregate"]["cells"][0];
  const double p = cell["p_tau"].get<double>();
  const bool ok = p >= kPTauLo && p <= kPTauHi && secs < kPTauSeconds;
  return {ok, "p_tau=" + fmt(p) + " CI=[" + fmt(cell["p_tau_ci_lo"].get<double>()) + "," +
                  fmt(cell["p_tau_ci_hi"].get<double>()) + "] limit=" + fmt(kPTauLimit) +
                  " collapse=" + fmt(cell["p_tau_collapse"].get<double>()) + " (reported) " +
                  fmt(secs, 1) + "s"};
}

Outcome c2_phase_flip() {
  const fs::path out = workdir() / "c2.json";
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli("phase-flip --n 16 --trials 2000 --seed " + std::to_string(kSeed), out);
  const double secs = seconds_since(t0);
  if (code != 0) return {false, "exit code " + std::to_string(code)};
  const json cell = load(out)["aggregate"]["cells"][0];
  const double p = cell["p_flip"].get<double>();
  const bool ok = std::abs(p - kFlipTarget) <= kFlipTol && secs < kFlipSeconds &&
                  cell["qualifying_trials"].get<std::size_t>() == 2000;
  return {ok, "p_flip=" + fmt(p) + " CI=[" + fmt(cell["p_flip_ci_lo"].get<double>()) + "," +
                  fmt(cell["p_flip_ci_hi"].get<double>()) + "] " + fmt(secs, 1) + "s"};
}

Outcome c3_zero_false_parity() {
  struct Leg {
    unsigned n, trials, retries;
  };
  const Leg legs[] = {{4, 200, 32}, {9, 250, 128}, {16, 100, 3000}};
  std::size_t completed = 0, correct = 0, wrong = 0;
  double slowest16 = 0;
  std::string per_n;
  const auto t0 = std::chrono::steady_clock::now();
  for (const Leg& leg : legs) {
    const fs::path out = workdir() / ("c3-" + std::to_string(leg.n) + ".json");
    const int code = cli("run --n " + std::to_string(leg.n) + " --trials " +
                             std::to_string(leg.trials) + " --max-retries " +
                             std::to_string(leg.retries) + " --seed " + std::to_string(kSeed),
                         out);
    if (code != 0) return {false, "exit code " + std::to_string(code) + " at n=" +
                                      std::to_string(leg.n)};
    const json report = load(out);
    const json cell = report["aggregate"]["cells"][0];
    completed += cell["completed"].get<std::size_t>();
    correct += cell["correct"].get<std::size_t>();
    wrong += cell["wrong"].get<std::size_t>();
    per_n += " n=" + std::to_string(leg.n) + ":" + cell["correct"].dump() + "/" +
             cell["completed"].dump();
    if (leg.n == 16) {
      for (const json& t : report["timings"]["per_trial"]) {
        const double us = t["sampling_us"].get<double>() + t["filtering_us"].get<double>() +
                          t["recovery_us"].get<double>() + t["measurement_us"].get<double>();
        slowest16 = std::max(slowest16, us / 1e6);
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = completed >= kMinCompleted && wrong == 0 && correct == completed &&
                  secs < kRunSeconds;
  return {ok, "completed=" + std::to_string(completed) + " wrong=" + std::to_string(wrong) +
                  per_n + " slowest n=16 run=" + fmt(slowest16, 2) + "s" +
                  (slowest16 < kSingleRunSeconds ? "" : " (over 10s)") + " " + fmt(secs, 1) +
                  "s"};
}

Outcome c4_sv_soundness() {
  Rng rng = make_stream(kSeed, {4});
  std::size_t violations = 0, outputs = 0, solved = 0;
  for (std::size_t i = 0; i < kSoundnessInstances; ++i) {
    const unsigned m = 1 + static_cast<unsigned>(uniform_index(rng, kSoundnessMaxM));
    const unsigned bits = 2 + static_cast<unsigned>(uniform_index(rng, 40));
    SubsetSumInstance inst;
    for (unsigned j = 0; j < m; ++j) inst.weights.push_back(uniform_bits(rng, bits) + 1);
    if (coin(rng)) {
      Bits x(m);
      for (auto& b : x) b = coin(rng);
      inst.target = subset_value(inst.weights, x);
    } else {
      inst.target = uniform_below(rng, inst.total() + 1);
    }
    const std::vector<Bits> oracle = brute_force_subset_sum(inst);
    const std::vector<Bits> found = sv_solve_all(inst);
    solved += !found.empty();
    for (const Bits& x : found) {
      ++outputs;
      if (!verifies(inst, x) || std::find(oracle.begin(), oracle.end(), x) == oracle.end())
        ++violations;
    }
  }
  return {violations == 0, "instances=" + std::to_string(kSoundnessInstances) +
                               " outputs=" + std::to_string(outputs) +
                               " solved=" + std::to_string(solved) +
                               " violations=" + std::to_string(violations)};
}

Outcome c5_low_density() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::SvSweep;
  cfg.m_values = {10};
  cfg.bit_sizes = {100};
  cfg.trials = 200;
  cfg.seed = kSeed;
  const json cell = run_experiment(cfg).aggregate["cells"][0];
  const double rate = cell["success_rate"].get<double>();
  return {rate >= kLowDensitySuccess, "success=" + fmt(rate, 3) + " mean density=" +
                                          fmt(cell["mean_density"].get<double>(), 3)};
}

Outcome c6_lll() {
  Rng rng = make_stream(kSeed, {6});
  std::size_t violations = 0;
  for (std::size_t i = 0; i < kLllBases; ++i) {
    const std::size_t dim = 2 + uniform_index(rng, 11);
    const std::size_t cols = dim + uniform_index(rng, 3);
    const unsigned bits = 1 + static_cast<unsigned>(uniform_index(rng, 40));
    IntMatrix<BigInt> b;
    do {
      b.assign(dim, std::vector<BigInt>(cols));
      for (auto& row : b)
        for (auto& v : row) v = uniform_bits(rng, bits + 1) - pow2(bits);
    } while (gram_determinant(b) == 0);
    const IntMatrix<BigInt> original = b;
    lll_reduce_rows(b, Rational(3, 4));
    if (!verify_lll(b, Rational(3, 4)).ok() || gram_determinant(b) != gram_determinant(original) ||
        !same_lattice(original, b))
      ++violations;
  }
  return {violations == 0,
          "bases=" + std::to_string(kLllBases) + " violations=" + std::to_string(violations)};
}

Outcome c7_sampler() {
  const unsigned n = 6;
  const std::size_t bins = std::size_t{1} << n;
  Rng rng = make_stream(kSeed, {7});
  const HiddenInstance inst = HiddenInstance::random(n, rng);
  audit::QuantumScope referee;
  const double s = inst.slope().get_d();
  std::vector<std::size_t> full(bins, 0), shortcut(bins, 0);
  double worst = 0;
  for (std::size_t i = 0; i < kSamplerDraws; ++i) {
    const FourierSample fs = coset_fourier_sample(inst, rng);
    ++full[fs.k];
    const std::complex<double> expect =
        std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(fs.k) * s / bins);
    worst = std::max(worst, std::abs(fs.relative_phase() - expect));
    worst = std::max(worst, std::abs(std::abs(fs.amp0) - std::sqrt(0.5)));
    const PhaseState ps = sample_phase_state(inst, rng);
    ++shortcut[to_u64(ps.k)];
    const std::complex<double> expect_short =
        std::polar(1.0, 2 * std::numbers::pi * ps.k.get_d() * s / bins);
    worst = std::max(worst, std::abs(phase_factor(ps.k, inst.slope(), n) - expect_short));
  }
  const auto cf = stats::chi_square_uniform(full);
  const auto cs = stats::chi_square_uniform(shortcut);
  const bool ok = cf.p_value > kChiSquareAlpha && cs.p_value > kChiSquareAlpha && worst <= kPhaseTol;
  return {ok, "full p=" + fmt(cf.p_value) + " shortcut p=" + fmt(cs.p_value) +
                  " max phase error=" + [&] {
                    std::ostringstream o;
                    o << worst;
                    return o.str();
                  }()};
}

Outcome c8_timing_law() {
  const fs::path out = workdir() / "c8.json";
  const int code = cli("sv-bench --m 10,20,40,80 --bits 32,64,128 --trials 3 --seed " +
                           std::to_string(kSeed),
                       out);
  if (code != 0) return {false, "exit code " + std::to_string(code)};
  const json fit = load(out)["aggregate"]["fit"];
  if (!fit.contains("slope") || !fit["slope"].is_number()) return {false, "no slope reported"};
  const double slope = fit["slope"].get<double>();
  return {true, "slope=" + fmt(slope, 3) + " r2=" + fmt(fit["r2"].get<double>(), 3) +
                    " predicted~1 " +
                    (fit["slope_in_0.5_1.5"].get<bool>() ? "[in 0.5..1.5]"
                                                         : "[FLAG: outside 0.5..1.5]")};
}

Outcome c9_determinism() {
  struct Case {
    std::string name, body;
  };
  const Case cases[] = {
      {"ptau", "[ptau]\nn = [9, 16]\ntrials = 300\nseed = 91\n"},
      {"phase-flip", "[phase-flip]\nn = [9]\ntrials = 200\nseed = 92\n"},
      {"sv-sweep", "[sv-sweep]\nm = [6, 10]\nbits = [20, 100]\ntrials = 40\nseed = 93\n"},
      {"run", "[run]\nn = [4, 9]\ntrials = 60\nseed = 94\nmax-retries = 64\n"},
  };
  std::string mismatches;
  for (const Case& c : cases) {
    const fs::path cfg = workdir() / ("c9-" + c.name + ".toml");
    std::ofstream(cfg) << c.body;
    std::vector<std::string> dumps;
    for (const char* extra : {"", "", " --parallel 4"}) {
      const fs::path out = workdir() / ("c9-" + c.name + std::to_string(dumps.size()) + ".json");
      const int code = cli("--config \"" + cfg.string() + "\" " + c.name + extra, out);
      if (code != 0) return {false, c.name + " exit code " + std::to_string(code)};
      dumps.push_back(load(out)["records"].dump());
    }
    if (dumps[0] != dumps[1] || dumps[0] != dumps[2]) mismatches += " " + c.name;
  }
  return {mismatches.empty(), mismatches.empty()
                                  ? "ptau, phase-flip, sv-sweep, run: serial x2 and --parallel 4 identical"
                                  : "records differ:" + mismatches};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 P_tau reproduction", c1_ptau},
      {"C2 phase-flip probability", c2_phase_flip},
      {"C3 zero false parity", c3_zero_false_parity},
      {"C4 SV soundness and oracle containment", c4_sv_soundness},
      {"C5 SV low-density success", c5_low_density},
      {"C6 LLL postconditions", c6_lll},
      {"C7 sampler equivalence", c7_sampler},
      {"C8 timing law report", c8_timing_law},
      {"C9 determinism", c9_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
  }
  fs::remove_all(workdir());
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed")
            << std::endl;
  return failed ? 1 : 0;
}
