#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ialm/csv.hpp"
#include "ialm/generate.hpp"
#include "ialm/outer_loop.hpp"

// Benchmark harness: instance ingestion and generation, per-category
// default parameter bindings, the algorithm x instance run matrix, and
// CSV result/trace export.

namespace ialm::bench {

/// Instance categories mirroring the three dataset shapes the default
/// parameter tables were tuned for: "pixel" (moderately wide), "gene"
/// (very wide, few observations), "engine" (tall, few features).
enum class Category { pixel, gene, engine };

inline const char* to_string(Category c) {
  switch (c) {
    case Category::pixel: return "pixel";
    case Category::gene: return "gene";
    case Category::engine: return "engine";
  }
  return "?";
}

inline Category parse_category(const std::string& id) {
  if (id == "pixel") return Category::pixel;
  if (id == "gene") return Category::gene;
  if (id == "engine") return Category::engine;
  throw std::invalid_argument("unknown category: " + id);
}

/// Shape rule used when no category is declared: tall matrices
/// (obs >= 4n) are engine-like, very wide ones (n >= 8 obs) gene-like,
/// everything else pixel-like.
inline Category category_for_shape(Index obs, Index n) {
  if (obs >= 4 * n) return Category::engine;
  if (n >= 8 * obs) return Category::gene;
  return Category::pixel;
}

/// Per-category stepsize c for each algorithm.
inline double default_c(Category cat, Algorithm alg) {
  switch (cat) {
    case Category::pixel:
      switch (alg) {
        case Algorithm::admm: return 2.0;
        case Algorithm::alm_fista_cd: return 3.0;
        case Algorithm::alm_ar_fista_cd: return 3.0;
        case Algorithm::alm_adss: return 2.0;
        case Algorithm::alm_ar_adss: return 2.0;
      }
      break;
    case Category::gene:
      switch (alg) {
        case Algorithm::admm: return 2.0;
        case Algorithm::alm_fista_cd: return 4.0;
        case Algorithm::alm_ar_fista_cd: return 4.0;
        case Algorithm::alm_adss: return 3.0;
        case Algorithm::alm_ar_adss: return 7.0;
      }
      break;
    case Category::engine:
      switch (alg) {
        case Algorithm::admm: return 0.01;
        case Algorithm::alm_fista_cd: return 0.007;
        case Algorithm::alm_ar_fista_cd: return 0.009;
        case Algorithm::alm_adss: return 0.0007;
        case Algorithm::alm_ar_adss: return 0.0006;
      }
      break;
  }
  return 1.0;
}

/// Per-category strengthened-acceptance horizon J1 (adaptive variants).
inline long default_j1(Category cat, Algorithm alg) {
  if (alg == Algorithm::alm_ar_fista_cd)
    return cat == Category::pixel ? 2 : 6;
  if (alg == Algorithm::alm_ar_adss) return 1;
  return 0;
}

/// Per-category w-reset threshold Jr.
inline long default_jr(Category cat, Algorithm alg) {
  switch (alg) {
    case Algorithm::alm_fista_cd:
      return cat == Category::engine ? 10 : 3;
    case Algorithm::alm_ar_fista_cd:
      return cat == Category::pixel ? 4 : (cat == Category::gene ? 2 : 7);
    case Algorithm::alm_adss:
      return cat == Category::pixel ? 4 : 10;
    case Algorithm::alm_ar_adss:
      return 1;
    default:
      return kNoReset;
  }
}

/// An instance to run on: either a CSV pair on disk or a generator spec.
struct InstanceSource {
  std::string name;
  std::optional<std::string> file_base;
  std::optional<GeneratorSpec> generator;
  std::optional<Category> category;  // overrides the shape rule
};

/// Algorithm selection whose c / J1 / Jr fall back to the per-category
/// tables when left unset.
struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::alm_ar_fista_cd;
  std::optional<double> c;
  std::optional<long> J1;
  std::optional<long> Jr;
  double epsilon = 0.1;
  double a = 3.0;
  double delta = 1e-6;
  long max_outer = 100000;
  long max_inner = 10000;
  std::string gamma_rule = "max";
};

inline AlgorithmConfig resolve(const AlgorithmSpec& spec, Category cat) {
  AlgorithmConfig cfg;
  cfg.algorithm = spec.algorithm;
  cfg.c = spec.c.value_or(default_c(cat, spec.algorithm));
  cfg.epsilon = spec.epsilon;
  cfg.a = spec.a;
  cfg.J1 = spec.J1.value_or(default_j1(cat, spec.algorithm));
  cfg.Jr = spec.Jr.value_or(default_jr(cat, spec.algorithm));
  cfg.delta = spec.delta;
  cfg.max_outer = spec.max_outer;
  cfg.max_inner = spec.max_inner;
  cfg.gamma_rule = spec.gamma_rule;
  return cfg;
}

struct BenchConfig {
  std::vector<InstanceSource> instances;
  std::vector<AlgorithmSpec> algorithms;
  std::uint64_t seed = 42;
  std::string output_dir = "bench_out";
  bool emit_traces = false;
  int jobs = 1;
};

inline std::vector<AlgorithmSpec> all_algorithms() {
  std::vector<AlgorithmSpec> specs;
  for (Algorithm alg : {Algorithm::admm, Algorithm::alm_fista_cd,
                        Algorithm::alm_ar_fista_cd, Algorithm::alm_adss,
                        Algorithm::alm_ar_adss}) {
    AlgorithmSpec s;
    s.algorithm = alg;
    specs.push_back(s);
  }
  return specs;
}

/// The nine-instance desk-scale suite: three seeds each of a 100x400
/// pixel-like, 40x800 gene-like, and 2000x24 engine-like shape, run
/// against all five algorithms with the per-category parameter tables.
inline BenchConfig default_suite() {
  BenchConfig cfg;
  cfg.algorithms = all_algorithms();
  for (int i = 0; i < 3; ++i) {
    InstanceSource pixel;
    pixel.name = "pixel-like-" + std::to_string(i);
    pixel.generator = GeneratorSpec{100, 400, 0.05, 0.01, i};
    cfg.instances.push_back(pixel);
  }
  for (int i = 0; i < 3; ++i) {
    InstanceSource gene;
    gene.name = "gene-like-" + std::to_string(i);
    gene.generator = GeneratorSpec{40, 800, 0.025, 0.01, 10 + i};
    cfg.instances.push_back(gene);
  }
  for (int i = 0; i < 3; ++i) {
    InstanceSource engine;
    engine.name = "engine-like-" + std::to_string(i);
    // dense truth: every feature active, as in tall sensor regressions
    engine.generator = GeneratorSpec{2000, 24, 1.0, 0.1, 20 + i};
    cfg.instances.push_back(engine);
  }
  return cfg;
}

inline double geometric_mean(const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("geometric_mean: empty list");
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0))
      throw std::invalid_argument("geometric_mean: values must be positive");
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

/// One line of the results table.
struct RunRow {
  std::string instance;
  std::string algorithm;
  long outer = 0;
  long inner = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::string status;
  double wall_ms = 0.0;
  RunRecord record;  // full record, for traces and downstream checks
};

struct MatrixResult {
  std::vector<RunRow> rows;  // sorted by (instance, algorithm)
};

/// Loads or generates the instance behind a source and resolves its
/// category.
struct PreparedInstance {
  std::string name;
  Category category = Category::pixel;
  ProblemInstance instance;
};

inline PreparedInstance prepare_instance(const InstanceSource& src,
                                         std::uint64_t seed) {
  RawInstance raw;
  if (src.file_base) {
    raw = load_csv_instance(*src.file_base);
  } else if (src.generator) {
    GeneratedInstance gen = generate_instance(*src.generator, seed);
    raw.A = std::move(gen.A);
    raw.b = std::move(gen.b);
  } else {
    throw std::invalid_argument("instance '" + src.name +
                                "' has neither a file nor a generator");
  }
  PreparedInstance out;
  out.name = src.name;
  out.category =
      src.category.value_or(category_for_shape(raw.A.rows(), raw.A.cols()));
  out.instance = make_instance(raw.A, raw.b);
  return out;
}

inline RunRow run_one(const PreparedInstance& prep, const AlgorithmSpec& spec) {
  RunRow row;
  row.instance = prep.name;
  row.algorithm = to_string(spec.algorithm);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const AlgorithmConfig cfg = resolve(spec, prep.category);
    row.record = run(prep.instance, cfg);
    row.outer = row.record.outer_iterations;
    row.inner = row.record.inner_iterations_cumulative;
    row.residual = row.record.final_residual;
    row.objective = row.record.final_objective;
    row.status = to_string(row.record.status);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  row.wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 -
                                                                            t0)
          .count();
  return row;
}

/// Runs every (instance, algorithm) pair.  Individual failures become
/// rows with an error status; they never abort the matrix.  Rows come
/// back sorted by (instance, algorithm) regardless of the worker count.
inline MatrixResult run_matrix(const BenchConfig& cfg) {
  MatrixResult result;
  std::vector<PreparedInstance> prepared;
  prepared.reserve(cfg.instances.size());
  for (const InstanceSource& src : cfg.instances) {
    try {
      prepared.push_back(prepare_instance(src, cfg.seed));
    } catch (const std::exception& e) {
      // an unloadable instance contributes error rows, not an abort
      for (const AlgorithmSpec& s : cfg.algorithms) {
        RunRow row;
        row.instance = src.name;
        row.algorithm = to_string(s.algorithm);
        row.status = std::string("error: ") + e.what();
        result.rows.push_back(std::move(row));
      }
    }
  }

  struct Job {
    const PreparedInstance* inst;
    const AlgorithmSpec* spec;
  };
  std::vector<Job> jobs;
  for (const PreparedInstance& p : prepared)
    for (const AlgorithmSpec& s : cfg.algorithms) jobs.push_back(Job{&p, &s});

  const std::size_t error_rows = result.rows.size();
  result.rows.resize(error_rows + jobs.size());
  const int workers = std::max(1, cfg.jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      result.rows[error_rows + i] = run_one(*jobs[i].inst, *jobs[i].spec);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) break;
        result.rows[error_rows + i] = run_one(*jobs[i].inst, *jobs[i].spec);
      }
    };
    std::vector<std::future<void>> pool;
    for (int w = 0; w < workers; ++w)
      pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const RunRow& a, const RunRow& b) {
              return std::tie(a.instance, a.algorithm) <
                     std::tie(b.instance, b.algorithm);
            });
  return result;
}

inline std::string format_number(double v) { return detail::format_cell(v); }

/// Data rows followed by one geometric-mean summary row per algorithm
/// (over the outer and cumulative inner counts of its non-error rows).
inline void write_results_csv(const MatrixResult& result, std::ostream& out) {
  out << "instance,algorithm,outer_iters,inner_iters,residual,objective,"
         "status,wall_time_ms\n";
  for (const RunRow& r : result.rows) {
    out << r.instance << ',' << r.algorithm << ',' << r.outer << ',' << r.inner
        << ',' << format_number(r.residual) << ',' << format_number(r.objective)
        << ',' << r.status << ',' << format_number(r.wall_ms) << '\n';
  }
  std::vector<std::string> algs;
  for (const RunRow& r : result.rows)
    if (std::find(algs.begin(), algs.end(), r.algorithm) == algs.end())
      algs.push_back(r.algorithm);
  std::sort(algs.begin(), algs.end());
  for (const std::string& alg : algs) {
    std::vector<double> outers;
    std::vector<double> inners;
    for (const RunRow& r : result.rows) {
      // summarize successful runs only; failures stay visible as rows
      if (r.algorithm != alg) continue;
      if (r.status != "converged" && r.status != "exact_optimum") continue;
      if (r.outer <= 0 || r.inner <= 0) continue;
      outers.push_back(static_cast<double>(r.outer));
      inners.push_back(static_cast<double>(r.inner));
    }
    if (outers.empty()) continue;
    out << "(geomean)," << alg << ',' << format_number(geometric_mean(outers))
        << ',' << format_number(geometric_mean(inners)) << ",,,geomean,\n";
  }
}

inline std::string results_csv_string(const MatrixResult& result) {
  std::ostringstream ss;
  write_results_csv(result, ss);
  return ss.str();
}

/// Per-outer-iteration trace: k, inner iterations used, the accepted
/// statistics, the relaxation factor, and the KKT residual.
inline void write_trace_csv(const RunRecord& rec, std::ostream& out) {
  out << "k,j,U,S,A,Delta,rho,residual\n";
  for (const OuterTraceRow& t : rec.trace) {
    out << t.k << ',' << t.inner_iters << ',' << format_number(t.U) << ','
        << format_number(t.S) << ',' << format_number(t.A) << ','
        << format_number(t.Delta) << ',' << format_number(t.rho) << ','
        << format_number(t.residual) << '\n';
  }
}

/// Writes results.csv (and per-run trace files when requested) under
/// cfg.output_dir.
inline void write_outputs(const BenchConfig& cfg, const MatrixResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  {
    std::ofstream out(fs::path(cfg.output_dir) / "results.csv");
    if (!out) throw std::runtime_error("cannot write results.csv");
    write_results_csv(result, out);
  }
  if (cfg.emit_traces) {
    for (const RunRow& r : result.rows) {
      if (r.status.rfind("error", 0) == 0) continue;
      std::ofstream out(fs::path(cfg.output_dir) /
                        (r.instance + "__" + r.algorithm + ".trace.csv"));
      if (!out) throw std::runtime_error("cannot write trace file");
      write_trace_csv(r.record, out);
    }
  }
}

// --- configuration file -------------------------------------------------
//
// Flat key = value lines plus [instance <name>] and [algorithm <id>]
// sections; '#' starts a comment.  Top-level keys: seed, output_dir,
// emit_traces, jobs.  Instance keys: file OR obs/n/sparsity/noise/offset,
// plus an optional category. Algorithm keys: c, j1, jr, epsilon, a,
// delta, max_outer, max_inner, gamma_rule.

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: bad boolean for " + key + ": " + v);
}

}  // namespace detail

inline BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);

  BenchConfig cfg;
  InstanceSource* inst = nullptr;
  AlgorithmSpec* alg = nullptr;
  GeneratorSpec gen_scratch;

  auto finish_instance = [&]() {
    if (inst != nullptr && !inst->file_base && !inst->generator)
      inst->generator = gen_scratch;
  };

  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": unterminated section header");
      finish_instance();
      inst = nullptr;
      alg = nullptr;
      const std::string header = detail::trim(line.substr(1, line.size() - 2));
      const std::size_t space = header.find(' ');
      const std::string kind =
          space == std::string::npos ? header : header.substr(0, space);
      const std::string arg =
          space == std::string::npos ? "" : detail::trim(header.substr(space + 1));
      if (kind == "instance") {
        if (arg.empty())
          throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                   ": instance section needs a name");
        cfg.instances.push_back(InstanceSource{arg, {}, {}, {}});
        inst = &cfg.instances.back();
        gen_scratch = GeneratorSpec{};
      } else if (kind == "algorithm") {
        AlgorithmSpec spec;
        spec.algorithm = parse_algorithm(arg);
        cfg.algorithms.push_back(spec);
        alg = &cfg.algorithms.back();
      } else {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": unknown section '" + kind + "'");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    try {
      if (inst != nullptr) {
        if (key == "file") inst->file_base = value;
        else if (key == "category") inst->category = parse_category(value);
        else if (key == "obs") gen_scratch.obs = std::stol(value);
        else if (key == "n") gen_scratch.n = std::stol(value);
        else if (key == "sparsity") gen_scratch.sparsity = std::stod(value);
        else if (key == "noise") gen_scratch.noise_sigma = std::stod(value);
        else if (key == "offset") gen_scratch.seed_offset = std::stol(value);
        else throw std::runtime_error("unknown instance key '" + key + "'");
      } else if (alg != nullptr) {
        if (key == "c") alg->c = std::stod(value);
        else if (key == "j1") alg->J1 = std::stol(value);
        else if (key == "jr") alg->Jr = std::stol(value);
        else if (key == "epsilon") alg->epsilon = std::stod(value);
        else if (key == "a") alg->a = std::stod(value);
        else if (key == "delta") alg->delta = std::stod(value);
        else if (key == "max_outer") alg->max_outer = std::stol(value);
        else if (key == "max_inner") alg->max_inner = std::stol(value);
        else if (key == "gamma_rule") alg->gamma_rule = value;
        else throw std::runtime_error("unknown algorithm key '" + key + "'");
      } else {
        if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "emit_traces") cfg.emit_traces = detail::parse_bool(value, key);
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else throw std::runtime_error("unknown key '" + key + "'");
      }
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  finish_instance();

  if (cfg.algorithms.empty()) cfg.algorithms = all_algorithms();
  if (cfg.instances.empty())
    throw std::runtime_error(path + ": no instances configured");
  return cfg;
}

}  // namespace ialm::bench
