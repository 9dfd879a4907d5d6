// Command-line driver for the experiments and for single subset-sum solves.
//
// Exit codes: 0 success, 1 assertion failure, 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "dhsp/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::vector<unsigned> n;
  std::vector<unsigned> m;
  std::vector<unsigned> bits;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string lll_delta = "3/4";
  std::string lambda_policy = "standard";
  unsigned max_retries = 32;
  std::string out;
  std::string format = "json";
  bool brute_force_check = false;
  bool exhaustive_pair_search = false;
  unsigned parallel = 1;
};

dhsp::Rational parse_delta(const std::string& text) {
  dhsp::Rational q;
  if (q.set_str(text, 10) != 0) throw dhsp::InvalidArgument("bad --lll-delta: " + text);
  q.canonicalize();
  if (q <= dhsp::Rational(1, 4) || q >= 1)
    throw dhsp::InvalidArgument("--lll-delta must lie in (1/4, 1)");
  return q;
}

dhsp::LambdaPolicy parse_policy(const std::string& text) {
  if (text == "standard") return dhsp::LambdaPolicy::Standard;
  if (text == "minimal") return dhsp::LambdaPolicy::Minimal;
  throw dhsp::InvalidArgument("bad --lambda-policy: " + text);
}

void write_output(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path);
  if (!out) throw dhsp::InvalidArgument("cannot open output file " + path);
  out << body;
}

void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--lll-delta", f.lll_delta, "LLL parameter as a rational, e.g. 3/4")
      ->capture_default_str();
  cmd->add_option("--lambda-policy", f.lambda_policy, "Embedding scale policy")
      ->check(CLI::IsMember({"standard", "minimal"}))
      ->capture_default_str();
  cmd->add_option("--out", f.out, "Output path (default stdout)");
  cmd->add_option("--format", f.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_flag("--brute-force-check", f.brute_force_check,
                "Cross-check against exhaustive enumeration (small sizes only)");
}

CLI::App* add_experiment(CLI::App& app, const std::string& name, const std::string& help,
                         CommonFlags& f, std::map<CLI::App*, dhsp::ExperimentKind>& kinds,
                         dhsp::ExperimentKind kind) {
  CLI::App* cmd = app.add_subcommand(name, help);
  cmd->add_option("--trials", f.trials, "Number of trials")->required();
  cmd->add_option("--seed", f.seed, "Master seed")->required();
  cmd->add_option("--parallel", f.parallel, "Worker threads")->capture_default_str();
  add_solver_flags(cmd, f);
  kinds[cmd] = kind;
  return cmd;
}

int solve_command(const std::string& path, const CommonFlags& f) {
  std::ifstream in(path);
  if (!in) throw dhsp::InvalidArgument("cannot open instance file " + path);
  const dhsp::SubsetSumInstance inst = dhsp::parse_instance(in);
  const dhsp::SvOptions options{parse_delta(f.lll_delta), parse_policy(f.lambda_policy)};
  const std::vector<dhsp::Bits> found = dhsp::sv_solve_all(inst, options);

  dhsp::json j;
  j["schema"] = dhsp::kReportSchema;
  j["m"] = inst.size();
  try {
    j["density"] = dhsp::density(inst);
  } catch (const dhsp::DegenerateWeights&) {
    j["density"] = nullptr;
  }
  j["found"] = !found.empty();
  j["solutions"] = dhsp::json::array();
  for (const auto& x : found) j["solutions"].push_back(x);
  int code = kExitOk;
  if (f.brute_force_check) {
    const auto all = dhsp::brute_force_subset_sum(inst);
    bool contained = true;
    for (const auto& x : found)
      contained = contained && std::find(all.begin(), all.end(), x) != all.end();
    j["oracle_solutions"] = all.size();
    j["oracle_contains_all"] = contained;
    if (!contained) code = kExitAssertion;
  }
  if (f.format == "csv") {
    std::string body = "solution\n";
    for (const auto& x : found) {
      for (auto b : x) body += b ? '1' : '0';
      body += "\n";
    }
    write_output(f.out, body);
  } else {
    write_output(f.out, j.dump(2) + "\n");
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dihedral hidden subgroup parity recovery via low-density subset sum"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  CommonFlags f;
  std::map<CLI::App*, dhsp::ExperimentKind> kinds;
  using K = dhsp::ExperimentKind;

  auto* ptau = add_experiment(app, "ptau", "Estimate P(tau >= 2)", f, kinds, K::PTau);
  ptau->add_option("--n", f.n, "Register widths")->delimiter(',')->required();

  auto* flip = add_experiment(app, "phase-flip", "Estimate the phase-flip probability", f, kinds,
                              K::PhaseFlip);
  flip->add_option("--n", f.n, "Register widths")->delimiter(',')->required();

  auto* sweep =
      add_experiment(app, "sv-sweep", "SV success rate per (m, bits) cell", f, kinds, K::SvSweep);
  sweep->add_option("--m", f.m, "Instance sizes")->delimiter(',')->required();
  sweep->add_option("--bits", f.bits, "Weight bit sizes")->delimiter(',')->required();

  auto* bench =
      add_experiment(app, "sv-bench", "SV wall-clock and timing-law fit", f, kinds, K::SvBench);
  bench->add_option("--m", f.m, "Instance sizes")->delimiter(',')->required();
  bench->add_option("--bits", f.bits, "Weight bit sizes")->delimiter(',')->required();

  auto* run = add_experiment(app, "run", "End-to-end parity recovery", f, kinds, K::EndToEnd);
  run->add_option("--n", f.n, "Register widths")->delimiter(',')->required();
  run->add_option("--max-retries", f.max_retries, "Attempts per run")->capture_default_str();
  run->add_flag("--exhaustive-pair-search", f.exhaustive_pair_search,
                "Re-run recovery with other SV settings before giving up an attempt");

  std::string instance_path;
  auto* solve = app.add_subcommand("solve", "Solve one subset-sum instance file with SV");
  solve->add_option("instance", instance_path, "Instance file")->required();
  add_solver_flags(solve, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return solve_command(instance_path, f);

    dhsp::ExperimentConfig cfg;
    for (const auto& [cmd, kind] : kinds)
      if (cmd->parsed()) cfg.kind = kind;
    cfg.n_values = f.n;
    cfg.m_values = f.m;
    cfg.bit_sizes = f.bits;
    cfg.trials = f.trials;
    cfg.seed = f.seed;
    cfg.lll_delta = parse_delta(f.lll_delta);
    cfg.lambda_policy = parse_policy(f.lambda_policy);
    cfg.max_retries = f.max_retries;
    cfg.brute_force_check = f.brute_force_check;
    cfg.exhaustive_pair_search = f.exhaustive_pair_search;
    cfg.parallel = std::max(1u, f.parallel);
    if (cfg.trials < 1) throw dhsp::InvalidArgument("--trials must be at least 1");
    if (cfg.max_retries < 1) throw dhsp::InvalidArgument("--max-retries must be at least 1");

    const dhsp::ExperimentReport report = dhsp::run_experiment(cfg);
    write_output(f.out, f.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n");
    return kExitOk;
  } catch (const dhsp::CrossCheckFailure& e) {
    std::cerr << e.what() << "\n";
    return kExitAssertion;
  } catch (const dhsp::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
}
