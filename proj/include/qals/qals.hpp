#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qals/core.hpp"
#include "qals/errors.hpp"
#include "qals/rng.hpp"
#include "qals/samplers.hpp"

namespace qals {

struct QalsParams {
  double p_delta = 0.1;       // floor of the shuffle/perturbation probability
  double eta = 0.01;          // decrease rate of p
  double q = 0.5;             // probability of perturbing a candidate
  std::size_t N = 10;         // iterations per p level
  double lambda0 = 2.0;       // initial tabu balancing factor
  std::size_t k = 10;         // annealer reads per estimate
  std::size_t i_max = 1000;
  std::size_t N_max = 100;
  std::size_t d_min = 20;
  std::uint64_t seed = 0;
};

inline void validate(const QalsParams& p) {
  if (!(p.p_delta > 0.0 && p.p_delta < 0.5)) throw validation_error("p_delta must lie in (0, 0.5)");
  if (!(p.eta > 0.0 && p.eta < 1.0)) throw validation_error("eta must lie in (0, 1)");
  if (!(p.q > 0.0 && p.q <= 1.0)) throw validation_error("q must lie in (0, 1]");
  if (!(p.lambda0 > 0.0) || !std::isfinite(p.lambda0)) throw validation_error("lambda0 must be positive");
  if (p.N == 0 || p.k == 0 || p.i_max == 0 || p.N_max == 0 || p.d_min == 0) {
    throw validation_error("N, k, i_max, N_max and d_min must be at least 1");
  }
}

// Marks each position with probability pr and shuffles the images of the
// marked positions among themselves.
inline Permutation modify_permutation(const Permutation& sigma, double pr, Rng& rng) {
  std::vector<std::size_t> marked;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (bernoulli(rng, pr)) marked.push_back(i);
  std::vector<std::size_t> source = marked;
  shuffle(source.begin(), source.end(), rng);
  std::vector<std::size_t> image(sigma.image().begin(), sigma.image().end());
  for (std::size_t m = 0; m < marked.size(); ++m) image[marked[m]] = sigma[source[m]];
  return Permutation(std::move(image));
}

// Flips each spin independently with probability pr.
inline SpinVector perturb_candidate(SpinVector z, double pr, Rng& rng) {
  for (std::size_t i = 0; i < z.size(); ++i)
    if (bernoulli(rng, pr)) z.flip(i);
  return z;
}

// True with probability p^(f_prime - f_star).
inline bool accept_suboptimal(double p, double f_prime, double f_star, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw contract_error("accept_suboptimal: p must lie in (0, 1]");
  if (f_prime < f_star) throw contract_error("accept_suboptimal: candidate is an improvement");
  return uniform01(rng) < std::pow(p, f_prime - f_star);
}

inline double update_p(double p, double p_delta, double eta) { return p - (p - p_delta) * eta; }

// 2 + i - e counts the rejected candidates so far.
inline double update_lambda(double lambda0, std::size_t i, std::size_t e) {
  const auto rejected = 2 + static_cast<std::int64_t>(i) - static_cast<std::int64_t>(e);
  if (rejected < 1) throw contract_error("update_lambda: 2 + i - e must be at least 1");
  return std::min(lambda0, lambda0 / static_cast<double>(rejected));
}

using LambdaSchedule = std::function<double(double lambda0, std::size_t i, std::size_t e)>;

enum class Outcome { improved, accepted, rejected, repeated };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::improved: return "improved";
    case Outcome::accepted: return "accepted";
    case Outcome::rejected: return "rejected";
    case Outcome::repeated: return "repeated";
  }
  return "?";
}

// State after one loop iteration.
struct TraceRecord {
  std::size_t iteration = 0;
  double p = 1.0;
  double lambda = 0.0;
  std::optional<double> f_prime;  // empty when the candidate equals z*
  Outcome outcome = Outcome::repeated;
  std::size_t e = 0;
  std::size_t d = 0;
  double f_star = 0.0;
  double f_best = 0.0;
  std::int64_t tabu_count = 0;

  // Simulated-annealing temperature with p = exp(-1/T).
  double temperature() const { return p < 1.0 ? -1.0 / std::log(p) : INFINITY; }
};

enum class Termination { iteration_limit, stalled };

inline const char* to_string(Termination t) {
  return t == Termination::iteration_limit ? "iteration_limit" : "stalled";
}

struct SolveReport {
  SpinVector z_returned;
  double f_returned = 0.0;
  SpinVector z_best;
  double f_best = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  // Loop iterations completed when z_best was first found (0: initialization).
  std::size_t best_iteration = 0;
  Termination termination = Termination::iteration_limit;
  double final_p = 1.0;
  double final_lambda = 0.0;
  TabuMatrix tabu;
  std::vector<TraceRecord> trace;
};

struct SolveOptions {
  bool trace = false;
  // Replaces the default lambda update; results are capped at lambda0.
  LambdaSchedule lambda_schedule;
};

// Quantum annealing learning search for z^T Q z. The sampler plays the
// annealer; its rng stream is separate from the loop's own draws, so
// swapping backends leaves the permutation, perturbation and acceptance
// draws untouched.
inline SolveReport solve(const QuboProblem& problem, const TopologyGraph& graph,
                         const Sampler& sampler, const QalsParams& params,
                         const SolveOptions& options = {}) {
  validate(params);
  const std::size_t n = problem.size();
  if (graph.size() != n) {
    throw contract_error("solve: problem has " + std::to_string(n) + " variables but the graph has " +
                         std::to_string(graph.size()) + " nodes");
  }

  const SeedSplitter seeds(params.seed);
  Rng permutation_rng = seeds.stream("permutation");
  Rng perturbation_rng = seeds.stream("perturbation");
  Rng acceptance_rng = seeds.stream("acceptance");
  Rng sampler_rng = seeds.stream("sampler");

  SolveReport report;
  const auto& q = problem.matrix();
  std::size_t i = 0;

  const auto evaluate = [&](const SpinVector& z) {
    ++report.evaluations;
    const double f = objective(problem, z);
    if (report.z_best.size() == 0 || f < report.f_best) {
      report.z_best = z;
      report.f_best = f;
      report.best_iteration = report.evaluations <= 2 ? 0 : i + 1;
    }
    return f;
  };
  const auto anneal = [&](const SquareMatrix<double>& weights, const Permutation& sigma,
                          const std::string& context) {
    try {
      const auto theta = encode(weights, sigma, graph);
      return decode(estimate_argmin(sampler, theta, params.k, sampler_rng), sigma);
    } catch (const error&) {
      rethrow_with_context(context);
    }
  };

  // Initialization: two fully random encodings of Q.
  const auto identity = Permutation::identity(n);
  const auto sigma1 = modify_permutation(identity, 1.0, permutation_rng);
  const auto sigma2 = modify_permutation(identity, 1.0, permutation_rng);
  const auto z1 = anneal(q, sigma1, "initialization");
  const auto z2 = anneal(q, sigma2, "initialization");
  const double f1 = evaluate(z1);
  const double f2 = evaluate(z2);

  SpinVector z_star, z_prime;
  double f_star;
  Permutation sigma_star;
  if (f1 < f2) {
    z_star = z1, f_star = f1, sigma_star = sigma1, z_prime = z2;
  } else {
    z_star = z2, f_star = f2, sigma_star = sigma2, z_prime = z1;
  }
  TabuMatrix tabu = f1 != f2 ? tabu_init(z_prime) : TabuMatrix(n);

  std::size_t e = 0, d = 0;
  double p = 1.0;
  double lambda = params.lambda0;

  for (;;) {
    SquareMatrix<double> deformed = q;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) deformed(r, c) += lambda * static_cast<double>(tabu(r, c));

    if (i % params.N == 0) p = update_p(p, params.p_delta, params.eta);
    const auto sigma = modify_permutation(sigma_star, p, permutation_rng);
    z_prime = anneal(deformed, sigma, "iteration " + std::to_string(i));
    if (bernoulli(perturbation_rng, params.q)) z_prime = perturb_candidate(std::move(z_prime), p, perturbation_rng);

    TraceRecord record;
    if (z_prime != z_star) {
      const double f_prime = evaluate(z_prime);
      record.f_prime = f_prime;
      if (f_prime < f_star) {
        std::swap(z_prime, z_star);
        f_star = f_prime;
        sigma_star = sigma;
        e = 0;
        d = 0;
        tabu.add(z_prime);  // the displaced former current solution
        record.outcome = Outcome::improved;
      } else {
        ++d;
        if (accept_suboptimal(p, f_prime, f_star, acceptance_rng)) {
          std::swap(z_prime, z_star);
          f_star = f_prime;
          sigma_star = sigma;
          e = 0;
          record.outcome = Outcome::accepted;
        } else {
          record.outcome = Outcome::rejected;
        }
      }
      const double next = options.lambda_schedule ? options.lambda_schedule(params.lambda0, i, e)
                                                  : update_lambda(params.lambda0, i, e);
      lambda = std::min(params.lambda0, next);
    } else {
      ++e;
      record.outcome = Outcome::repeated;
    }
    ++i;

    if (options.trace) {
      record.iteration = i - 1;
      record.p = p;
      record.lambda = lambda;
      record.e = e;
      record.d = d;
      record.f_star = f_star;
      record.f_best = report.f_best;
      record.tabu_count = tabu.count();
      report.trace.push_back(record);
    }

    if (i == params.i_max) {
      report.termination = Termination::iteration_limit;
      break;
    }
    if (e + d >= params.N_max && d < params.d_min) {
      report.termination = Termination::stalled;
      break;
    }
  }

  report.z_returned = std::move(z_star);
  report.f_returned = f_star;
  report.iterations = i;
  report.final_p = p;
  report.final_lambda = lambda;
  report.tabu = std::move(tabu);
  return report;
}

}  // namespace qals
