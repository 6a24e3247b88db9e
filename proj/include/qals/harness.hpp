#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qals/core.hpp"
#include "qals/detail/enumerate.hpp"
#include "qals/errors.hpp"
#include "qals/qals.hpp"
#include "qals/remote.hpp"
#include "qals/rng.hpp"
#include "qals/samplers.hpp"
#include "qals/topology.hpp"

namespace qals {

inline constexpr std::size_t oracle_max_variables = 24;

// Symmetric Q: diagonal uniform in [lo, hi]; each unordered off-diagonal
// pair is nonzero with probability `density` and then uniform in [lo, hi].
inline QuboProblem random_qubo(std::size_t n, double density, double lo, double hi, Rng& rng) {
  if (n == 0) throw validation_error("random_qubo: n must be at least 1");
  if (!(density >= 0.0 && density <= 1.0)) throw validation_error("random_qubo: density must lie in [0, 1]");
  if (!(lo <= hi)) throw validation_error("random_qubo: empty coefficient range");
  SquareMatrix<double> q(n);
  const auto draw = [&] { return lo + (hi - lo) * uniform01(rng); };
  for (std::size_t i = 0; i < n; ++i) {
    q(i, i) = draw();
    for (std::size_t j = i + 1; j < n; ++j)
      if (bernoulli(rng, density)) q(i, j) = q(j, i) = draw();
  }
  return QuboProblem(std::move(q));
}

struct OracleResult {
  SpinVector z;
  double value = 0.0;
};

// Exhaustive minimum of z^T Q z; ties go to the lexicographically smallest
// vector with -1 < +1.
inline OracleResult brute_force_min(const QuboProblem& problem) {
  const std::size_t n = problem.size();
  if (n > oracle_max_variables) {
    throw capacity_error("brute-force oracle handles at most " + std::to_string(oracle_max_variables) +
                         " variables, got " + std::to_string(n));
  }
  OracleResult best{SpinVector(n), std::numeric_limits<double>::infinity()};
  detail::scan_near_minima<detail::ObjectiveTracker>(
      n, problem, detail::ObjectiveTracker::magnitude(problem), [&](const SpinVector& z) {
        const double f = objective(problem, z);
        if (f < best.value || (f == best.value && z < best.z)) best = {z, f};
      });
  return best;
}

// Objective values closer than this count as the same optimum; distinct
// degenerate minimizers can differ in the last bits of their sums.
inline double optimum_tolerance(const QuboProblem& problem) {
  return 1e-9 * (1.0 + detail::ObjectiveTracker::magnitude(problem));
}

// "exact" | "sa" | "random" | "remote:<url>"
struct SamplerSelector {
  std::string kind = "sa";
  std::string url;
  SaScheduleParams schedule;
};

inline SamplerSelector parse_sampler_selector(const std::string& text, SaScheduleParams schedule = {}) {
  SamplerSelector sel;
  sel.schedule = schedule;
  if (text == "exact" || text == "sa" || text == "random") {
    sel.kind = text;
  } else if (text.rfind("remote:", 0) == 0 && text.size() > 7) {
    sel.kind = "remote";
    sel.url = text.substr(7);
  } else {
    throw validation_error("unknown sampler '" + text + "' (exact|sa|random|remote:<url>)");
  }
  return sel;
}

inline std::string to_string(const SamplerSelector& sel) {
  return sel.kind == "remote" ? "remote:" + sel.url : sel.kind;
}

inline std::unique_ptr<Sampler> make_sampler(const SamplerSelector& sel) {
  if (sel.kind == "exact") return std::make_unique<ExactSampler>();
  if (sel.kind == "sa") return std::make_unique<MetropolisSampler>(sel.schedule);
  if (sel.kind == "random") return std::make_unique<RandomSampler>();
  if (sel.kind == "remote") return std::make_unique<RemoteSampler>(sel.url);
  throw validation_error("unknown sampler kind '" + sel.kind + "'");
}

// "complete" | "chimera:<m>" | "file:<path>"
struct GraphSelector {
  std::string kind = "complete";
  std::size_t m = 1;
  std::string path;
};

inline GraphSelector parse_graph_selector(const std::string& text) {
  GraphSelector sel;
  if (text == "complete") return sel;
  if (text.rfind("chimera:", 0) == 0) {
    sel.kind = "chimera";
    const auto digits = text.substr(8);
    std::size_t pos = 0;
    try {
      sel.m = std::stoul(digits, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (digits.empty() || pos != digits.size() || sel.m == 0) {
      throw validation_error("invalid chimera size in '" + text + "'");
    }
    return sel;
  }
  if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    sel.kind = "file";
    sel.path = text.substr(5);
    return sel;
  }
  throw validation_error("unknown graph '" + text + "' (complete|chimera:<m>|file:<path>)");
}

inline std::string to_string(const GraphSelector& sel) {
  if (sel.kind == "chimera") return "chimera:" + std::to_string(sel.m);
  if (sel.kind == "file") return "file:" + sel.path;
  return "complete";
}

// Builds the graph for an n-variable problem; its node count must equal n.
inline TopologyGraph make_graph(const GraphSelector& sel, std::size_t n) {
  TopologyGraph graph = sel.kind == "chimera" ? chimera_graph({sel.m})
                        : sel.kind == "file"  ? load_edge_list(sel.path)
                                              : complete_graph(n);
  if (graph.size() != n) {
    throw validation_error("graph " + to_string(sel) + " has " + std::to_string(graph.size()) +
                           " nodes but the problem has " + std::to_string(n) + " variables");
  }
  return graph;
}

struct ExperimentSpec {
  std::size_t n = 10;
  double density = 0.5;
  double coeff_lo = -1.0;
  double coeff_hi = 1.0;
  std::size_t replicas = 10;
  QalsParams params;  // params.seed is the experiment's root seed
  SamplerSelector sampler;
  GraphSelector graph;
  // When set, every replica solves this instance instead of a fresh one.
  std::optional<QuboProblem> problem;
  std::string problem_path;
  bool success_statistics = true;
  std::size_t threads = 1;  // 0: one per hardware thread
};

struct ReplicaRecord {
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  double f_best = 0.0;
  std::optional<double> oracle_min;
  bool success = false;
  std::optional<std::size_t> iters_to_opt;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double millis = 0.0;
};

struct ExperimentAggregates {
  std::size_t replicas = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_f_best = 0.0;
  // Nearest-rank quantiles of iters_to_opt over successful replicas.
  std::optional<std::size_t> iters_min, iters_median, iters_p90, iters_max;
  double total_millis = 0.0;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<ReplicaRecord> records;
  ExperimentAggregates aggregates;
};

inline std::uint64_t replica_seed(std::uint64_t root, std::size_t replica) {
  return SeedSplitter(root).derive(static_cast<std::uint64_t>(replica));
}

inline ExperimentAggregates aggregate(const std::vector<ReplicaRecord>& records) {
  ExperimentAggregates agg;
  agg.replicas = records.size();
  std::vector<std::size_t> iters;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.success) ++agg.successes;
    sum += r.f_best;
    agg.total_millis += r.millis;
    if (r.iters_to_opt) iters.push_back(*r.iters_to_opt);
  }
  if (!records.empty()) {
    agg.success_rate = static_cast<double>(agg.successes) / static_cast<double>(records.size());
    agg.mean_f_best = sum / static_cast<double>(records.size());
  }
  if (!iters.empty()) {
    std::sort(iters.begin(), iters.end());
    const auto rank = [&](double q) {
      const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(iters.size())));
      return iters[std::max<std::size_t>(r, 1) - 1];
    };
    agg.iters_min = iters.front();
    agg.iters_median = rank(0.5);
    agg.iters_p90 = rank(0.9);
    agg.iters_max = iters.back();
  }
  return agg;
}

inline ReplicaRecord run_replica(const ExperimentSpec& spec, const Sampler& sampler, std::size_t replica) {
  ReplicaRecord rec;
  rec.replica = replica;
  rec.seed = replica_seed(spec.params.seed, replica);

  std::optional<QuboProblem> generated;
  if (!spec.problem) {
    Rng instance_rng = SeedSplitter(rec.seed).stream("instance");
    generated = random_qubo(spec.n, spec.density, spec.coeff_lo, spec.coeff_hi, instance_rng);
  }
  const QuboProblem& problem = spec.problem ? *spec.problem : *generated;
  const auto graph = make_graph(spec.graph, problem.size());

  QalsParams params = spec.params;
  params.seed = rec.seed;
  const auto start = std::chrono::steady_clock::now();
  const auto result = solve(problem, graph, sampler, params);
  rec.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  rec.f_best = result.f_best;
  rec.iterations = result.iterations;
  rec.evaluations = result.evaluations;
  if (spec.success_statistics) {
    const auto oracle = brute_force_min(problem);
    rec.oracle_min = oracle.value;
    rec.success = result.f_best - oracle.value <= optimum_tolerance(problem);
    if (rec.success) rec.iters_to_opt = result.best_iteration;
  }
  return rec;
}

// Replicas run on worker threads; records are stored by replica index so
// the report does not depend on completion order.
inline ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.replicas == 0) throw validation_error("experiment: replicas must be at least 1");
  if (!(spec.density > 0.0 && spec.density <= 1.0) && !spec.problem) {
    throw validation_error("experiment: density must lie in (0, 1]");
  }
  validate(spec.params);
  const std::size_t n = spec.problem ? spec.problem->size() : spec.n;
  if (spec.success_statistics && n > oracle_max_variables) {
    throw capacity_error("experiment: success statistics need the brute-force oracle, which handles at most " +
                         std::to_string(oracle_max_variables) + " variables (n = " + std::to_string(n) + ")");
  }
  const auto sampler = make_sampler(spec.sampler);

  ExperimentReport report;
  report.spec = spec;
  report.records.resize(spec.replicas);
  std::vector<std::exception_ptr> failures(spec.replicas);

  std::size_t workers = spec.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : spec.threads;
  workers = std::min(workers, spec.replicas);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < spec.replicas;) {
      try {
        report.records[r] = run_replica(spec, *sampler, r);
      } catch (...) {
        failures[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t r = 0; r < failures.size(); ++r) {
    if (!failures[r]) continue;
    try {
      std::rethrow_exception(failures[r]);
    } catch (const error&) {
      rethrow_with_context("replica " + std::to_string(r));
    }
  }
  report.aggregates = aggregate(report.records);
  return report;
}

}  // namespace qals
