// Benchmark CLI.
//
//   bench run    run an algorithm x instance matrix and write results.csv
//   bench solve  run one algorithm on one instance
//   bench gen    write a synthetic instance as a CSV pair
//
// Exit code 0 iff every run converged.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ialm/ialm.hpp"

namespace {

using namespace ialm;

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, bool traces, int jobs) {
  bench::BenchConfig cfg =
      config_path.empty() ? bench::default_suite() : bench::load_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed) cfg.seed = *seed;
  if (traces) cfg.emit_traces = true;
  if (jobs > 0) cfg.jobs = jobs;

  const bench::MatrixResult result = bench::run_matrix(cfg);
  bench::write_outputs(cfg, result);

  bool all_converged = true;
  for (const auto& row : result.rows) {
    std::printf("%-16s %-16s outer=%-7ld inner=%-7ld residual=%-11.3e %s\n",
                row.instance.c_str(), row.algorithm.c_str(), row.outer,
                row.inner, row.residual, row.status.c_str());
    if (row.status != "converged" && row.status != "exact_optimum")
      all_converged = false;
  }
  std::printf("results written to %s/results.csv\n", cfg.output_dir.c_str());
  return all_converged ? 0 : 1;
}

int cmd_solve(const std::string& instance, const std::string& algorithm,
              const bench::AlgorithmSpec& spec, std::uint64_t seed, bool trace,
              const std::string& out_dir) {
  bench::InstanceSource src;
  src.name = std::filesystem::path(instance).filename().string();
  if (std::filesystem::exists(instance + ".A.csv")) {
    src.file_base = instance;
  } else {
    // fall back to a default-suite instance name (e.g. pixel-like-0)
    bench::BenchConfig suite = bench::default_suite();
    bool found = false;
    for (const auto& candidate : suite.instances) {
      if (candidate.name == instance) {
        src = candidate;
        found = true;
        break;
      }
    }
    if (!found) {
      std::fprintf(stderr,
                   "no such instance: %s (expected %s.A.csv/%s.b.csv or a "
                   "default-suite name)\n",
                   instance.c_str(), instance.c_str(), instance.c_str());
      return 2;
    }
  }

  bench::AlgorithmSpec resolved_spec = spec;
  resolved_spec.algorithm = parse_algorithm(algorithm);

  const bench::PreparedInstance prep = bench::prepare_instance(src, seed);
  const AlgorithmConfig cfg = bench::resolve(resolved_spec, prep.category);
  const RunRecord rec = run(prep.instance, cfg);

  std::printf("instance   %s (%ld x %ld, category %s, nu=%.6g)\n",
              prep.name.c_str(), static_cast<long>(prep.instance.obs()),
              static_cast<long>(prep.instance.n()),
              bench::to_string(prep.category), prep.instance.nu);
  std::printf("algorithm  %s (c=%.6g epsilon=%.3g", to_string(cfg.algorithm),
              cfg.c, cfg.epsilon);
  if (uses_fista(cfg.algorithm)) std::printf(" a=%.3g", cfg.a);
  if (is_adaptive(cfg.algorithm)) std::printf(" J1=%ld", cfg.J1);
  if (is_alm(cfg.algorithm) && cfg.Jr != kNoReset) std::printf(" Jr=%ld", cfg.Jr);
  std::printf(")\n");
  std::printf("status     %s\n", to_string(rec.status));
  std::printf("outer      %ld\n", rec.outer_iterations);
  std::printf("inner      %ld\n", rec.inner_iterations_cumulative);
  std::printf("residual   %.6e\n", rec.final_residual);
  std::printf("objective  %.12g\n", rec.final_objective);

  if (trace) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) /
                      (prep.name + "__" + to_string(cfg.algorithm) + ".trace.csv");
    std::ofstream out(path);
    bench::write_trace_csv(rec, out);
    std::printf("trace      %s\n", path.string().c_str());
  }
  return rec.status == RunStatus::converged ||
                 rec.status == RunStatus::exact_optimum
             ? 0
             : 1;
}

int cmd_gen(long obs, long n, double sparsity, double noise, std::uint64_t seed,
            const std::string& out_base) {
  GeneratorSpec spec;
  spec.obs = obs;
  spec.n = n;
  spec.sparsity = sparsity;
  spec.noise_sigma = noise;
  const GeneratedInstance gen = generate_instance(spec, seed);
  save_csv_instance(out_base, gen.A, gen.b);
  std::printf("wrote %s.A.csv (%ld x %ld) and %s.b.csv\n", out_base.c_str(), obs,
              n, out_base.c_str());
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"LASSO benchmark for inexact augmented Lagrangian solvers"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  std::string run_out;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  bool run_traces = false;
  int run_jobs = 0;
  auto* run_cmd = app.add_subcommand("run", "run a benchmark matrix");
  run_cmd->add_option("--config", config_path, "config file (default: built-in suite)");
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_option("--seed", run_seed, "master seed")->each([&](const std::string&) {
    run_seed_set = true;
  });
  run_cmd->add_flag("--trace", run_traces, "emit per-run trace files");
  run_cmd->add_option("--jobs", run_jobs, "worker pool size");

  // solve
  std::string solve_instance;
  std::string solve_algorithm;
  bench::AlgorithmSpec solve_spec;
  double solve_c = 0.0;
  long solve_j1 = -1, solve_jr = -1;
  std::uint64_t solve_seed = 42;
  bool solve_trace = false;
  std::string solve_out = "bench_out";
  auto* solve_cmd = app.add_subcommand("solve", "run one algorithm on one instance");
  solve_cmd->add_option("--instance", solve_instance,
                        "CSV base path or default-suite name")->required();
  solve_cmd->add_option("--algorithm", solve_algorithm,
                        "admm | alm_adss | alm_ar_adss | alm_fista_cd | alm_ar_fista_cd")
      ->required();
  solve_cmd->add_option("--c", solve_c, "penalty c (default: category table)");
  solve_cmd->add_option("--epsilon", solve_spec.epsilon, "relative-error constant");
  solve_cmd->add_option("--a", solve_spec.a, "momentum constant (> 2)");
  solve_cmd->add_option("--j1", solve_j1, "strengthened-acceptance horizon");
  solve_cmd->add_option("--jr", solve_jr, "w-reset threshold");
  solve_cmd->add_option("--delta", solve_spec.delta, "termination tolerance");
  solve_cmd->add_option("--max-outer", solve_spec.max_outer, "outer iteration cap");
  solve_cmd->add_option("--max-inner", solve_spec.max_inner, "inner iteration cap");
  solve_cmd->add_option("--gamma-rule", solve_spec.gamma_rule,
                        "max | midpoint | fixed:<v>");
  solve_cmd->add_option("--seed", solve_seed, "seed for generated instances");
  solve_cmd->add_flag("--trace", solve_trace, "write a trace file");
  solve_cmd->add_option("--out", solve_out, "output directory for traces");

  // gen
  long gen_obs = 0, gen_n = 0;
  double gen_sparsity = 0.1, gen_noise = 0.0;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic instance");
  gen_cmd->add_option("--obs", gen_obs, "observation count")->required();
  gen_cmd->add_option("--n", gen_n, "feature count")->required();
  gen_cmd->add_option("--sparsity", gen_sparsity, "truth sparsity in (0,1]");
  gen_cmd->add_option("--noise", gen_noise, "noise standard deviation");
  gen_cmd->add_option("--seed", gen_seed, "seed");
  gen_cmd->add_option("--out", gen_out, "output base path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    return cmd_run(config_path, run_out,
                   run_seed_set ? std::optional<std::uint64_t>(run_seed)
                                : std::nullopt,
                   run_traces, run_jobs);
  }
  if (solve_cmd->parsed()) {
    if (solve_c > 0.0) solve_spec.c = solve_c;
    if (solve_j1 >= 0) solve_spec.J1 = solve_j1;
    if (solve_jr >= 0) solve_spec.Jr = solve_jr;
    return cmd_solve(solve_instance, solve_algorithm, solve_spec, solve_seed,
                     solve_trace, solve_out);
  }
  if (gen_cmd->parsed()) {
    return cmd_gen(gen_obs, gen_n, gen_sparsity, gen_noise, gen_seed, gen_out);
  }
  return 2;
}

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
