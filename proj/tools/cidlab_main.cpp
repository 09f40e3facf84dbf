#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "cidlab/driver.hpp"
#include "cidlab/run_config.hpp"

namespace {

cidlab::RunConfig load_with_overrides(const std::string& config_path,
                                      const std::string& seed_str, const std::string& out,
                                      const std::string& baseline_file, double tol, int bond_cap,
                                      int threads) {
  cidlab::RunConfig cfg =
      config_path.empty() ? cidlab::RunConfig{} : cidlab::load_config(config_path);
  if (!seed_str.empty()) cfg.sampler.seed = std::stoull(seed_str);
  if (!out.empty()) cfg.output.dir = out;
  if (!baseline_file.empty()) cfg.estimator.baseline_file = baseline_file;
  if (tol > 0.0) cfg.estimator.tol = tol;
  if (bond_cap > 0) cfg.estimator.bond_cap = bond_cap;
  if (threads > 0) cfg.threads = threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snapshot entropy estimation via LZ77 compression"};
  app.require_subcommand(1);

  std::string config_path, seed_str, out_path, baseline_file;
  double tol = -1.0;
  int bond_cap = -1, threads = -1;
  app.add_option("--config", config_path, "run configuration file");
  app.add_option("--seed", seed_str, "master seed (overrides config)");
  app.add_option("--out", out_path, "output directory or file");
  app.add_option("--baseline-file", baseline_file, "shuffle baseline table");
  app.add_option("--tol", tol, "contraction truncation tolerance");
  app.add_option("--bond-cap", bond_cap, "boundary-MPS bond-dimension cap");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* base = app.add_subcommand("baseline", "build the shuffle-baseline table");
  std::vector<std::size_t> lengths;
  int baseline_k = 64;
  base->add_option("--lengths", lengths, "sequence lengths")->required();
  base->add_option("--k", baseline_k, "random sequences per length");

  auto* sample = app.add_subcommand("sample", "generate snapshot files");
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep to a CSV table");

  auto* analyze = app.add_subcommand("analyze", "post-process a sweep table");
  cidlab::AnalyzeArgs aargs;
  analyze->add_option("--table", aargs.table_path, "input sweep CSV")->required();
  analyze->add_option("--op", aargs.op, "derive | gamma | collapse");
  analyze->add_option("--column", aargs.column, "s_d | cid | obs");
  analyze->add_option("--smooth", aargs.smooth_rounds, "rounds of three-point smoothing");
  analyze->add_option("--derivative", aargs.derivative, "derivative order 1..3");
  analyze->add_option("--window-lo", aargs.window_lo, "collapse window lower edge");
  analyze->add_option("--window-hi", aargs.window_hi, "collapse window upper edge");
  analyze->add_option("--critical-start", aargs.critical_start, "collapse fit start p_c");
  analyze->add_option("--exponent-start", aargs.exponent_start, "collapse fit start nu");

  auto* budget = app.add_subcommand("budget", "minimum samples with sigma_CID <= alpha * epsilon");
  cidlab::BudgetArgs bargs;
  budget->add_option("--alpha", bargs.alpha, "target ratio");
  budget->add_option("--cap", bargs.cap, "sample cap for the doubling search");

  CLI11_PARSE(app, argc, argv);

  try {
    if (base->parsed()) {
      cidlab::BaselineArgs args;
      args.lengths = lengths;
      args.k = baseline_k;
      if (seed_str.empty()) throw std::invalid_argument("baseline: --seed is required");
      args.seed = std::stoull(seed_str);
      if (out_path.empty() && !baseline_file.empty()) out_path = baseline_file;
      if (out_path.empty()) throw std::invalid_argument("baseline: --out is required");
      args.out_path = out_path;
      cidlab::cmd_baseline(args);
      std::printf("baseline written to %s\n", args.out_path.c_str());
    } else if (sample->parsed()) {
      auto cfg = load_with_overrides(config_path, seed_str, out_path, baseline_file, tol,
                                     bond_cap, threads);
      cidlab::cmd_sample(cfg);
    } else if (sweep->parsed()) {
      auto cfg = load_with_overrides(config_path, seed_str, out_path, baseline_file, tol,
                                     bond_cap, threads);
      std::string path = cidlab::cmd_sweep(cfg);
      std::printf("sweep written to %s\n", path.c_str());
    } else if (analyze->parsed()) {
      if (out_path.empty()) throw std::invalid_argument("analyze: --out is required");
      aargs.out_path = out_path;
      cidlab::cmd_analyze(aargs);
      std::printf("analysis written to %s\n", aargs.out_path.c_str());
    } else if (budget->parsed()) {
      auto cfg = load_with_overrides(config_path, seed_str, out_path, baseline_file, tol,
                                     bond_cap, threads);
      long n = cidlab::cmd_budget(cfg, bargs);
      std::printf("N_s^alpha = %ld\n", n);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
