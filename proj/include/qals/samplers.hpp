#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qals/core.hpp"
#include "qals/detail/enumerate.hpp"
#include "qals/errors.hpp"
#include "qals/rng.hpp"

namespace qals {

// Stand-in for the annealer: returns k low-energy spin vectors for the
// given weights. Implementations must be deterministic in the state of
// `rng` and callable concurrently on distinct rng objects.
class Sampler {
public:
  virtual ~Sampler() = default;

  virtual std::string name() const = 0;

  virtual std::vector<SpinVector> sample(const WeightMatrix& theta, std::size_t k,
                                         Rng& rng) const = 0;
};

inline constexpr std::size_t exact_sampler_max_nodes = 24;

// k independent uniform draws from the exact minimizer set of energy(theta, .).
inline std::vector<SpinVector> exact_sample(const WeightMatrix& theta, std::size_t k, Rng& rng,
                                            std::size_t max_nodes = exact_sampler_max_nodes) {
  const std::size_t n = theta.size();
  if (n > max_nodes) {
    throw capacity_error("exact sampler enumerates at most " + std::to_string(max_nodes) +
                         " spins, got " + std::to_string(n) + "; use the sa or remote backend");
  }
  if (k == 0) return {};
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t ties = 0;
  std::vector<SpinVector> picks(k, SpinVector(n));
  detail::scan_near_minima<detail::EnergyTracker>(
      n, theta, detail::EnergyTracker::magnitude(theta), [&](const SpinVector& z) {
        const double e = energy(theta, z);
        if (e < best) {
          best = e;
          ties = 0;
        }
        if (e == best) {
          ++ties;
          // reservoir sampling, one reservoir per read
          for (auto& pick : picks)
            if (ties == 1 || uniform_index(rng, ties) == 0) pick = z;
        }
      });
  return picks;
}

struct SaScheduleParams {
  std::size_t sweeps = 100;
  double beta_start = 0.1;
  double beta_end = 10.0;
};

inline void validate(const SaScheduleParams& s) {
  if (s.sweeps == 0) throw validation_error("sa schedule: sweeps must be at least 1");
  if (!(s.beta_start > 0.0) || !(s.beta_end >= s.beta_start)) {
    throw validation_error("sa schedule: need 0 < beta_start <= beta_end");
  }
}

// Single-spin Metropolis annealing. Inverse temperatures are in units of
// the largest absolute weight, so the schedule is independent of the
// overall scale of theta.
inline std::vector<SpinVector> metropolis_sample(const WeightMatrix& theta, std::size_t k,
                                                 const SaScheduleParams& schedule, Rng& rng) {
  validate(schedule);
  const std::size_t n = theta.size();
  const auto& graph = theta.graph();
  double scale = 0.0;
  for (double v : theta.matrix().values()) scale = std::max(scale, std::abs(v));
  const double unit = scale > 0.0 ? 1.0 / scale : 1.0;

  std::vector<double> betas(schedule.sweeps);
  const double ratio = schedule.beta_end / schedule.beta_start;
  for (std::size_t s = 0; s < schedule.sweeps; ++s) {
    const double t = schedule.sweeps > 1 ? static_cast<double>(s) / static_cast<double>(schedule.sweeps - 1) : 0.0;
    betas[s] = schedule.beta_start * std::pow(ratio, t) * unit;
  }

  std::vector<SpinVector> reads;
  reads.reserve(k);
  std::vector<double> field(n);
  for (std::size_t r = 0; r < k; ++r) {
    SpinVector z(n);
    for (std::size_t i = 0; i < n; ++i)
      if (rng() >> 63) z.flip(i);
    for (std::size_t i = 0; i < n; ++i) {
      double h = 0.0;
      for (auto j : graph.neighbors(i)) h += theta.coupling(i, j) * z[j];
      field[i] = h;
    }
    // Each read reports the lowest-energy state it visited, tracked by the
    // running energy offset from the start state.
    SpinVector best = z;
    double offset = 0.0, best_offset = 0.0;
    for (double beta : betas) {
      for (std::size_t i = 0; i < n; ++i) {
        const double zi = z[i];
        const double delta = -2.0 * zi * (theta.bias(i) + field[i]);
        if (delta <= 0.0 || uniform01(rng) < std::exp(-beta * delta)) {
          z.flip(i);
          offset += delta;
          for (auto j : graph.neighbors(i)) field[j] -= 2.0 * zi * theta.coupling(i, j);
          if (offset < best_offset) {
            best_offset = offset;
            best = z;
          }
        }
      }
    }
    reads.push_back(std::move(best));
  }
  return reads;
}

inline std::vector<SpinVector> random_sample(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<SpinVector> reads;
  reads.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    SpinVector z(n);
    for (std::size_t i = 0; i < n; ++i)
      if (rng() >> 63) z.flip(i);
    reads.push_back(std::move(z));
  }
  return reads;
}

class ExactSampler final : public Sampler {
public:
  explicit ExactSampler(std::size_t max_nodes = exact_sampler_max_nodes) : max_nodes_(max_nodes) {}

  std::string name() const override { return "exact"; }

  std::vector<SpinVector> sample(const WeightMatrix& theta, std::size_t k, Rng& rng) const override {
    return exact_sample(theta, k, rng, max_nodes_);
  }

private:
  std::size_t max_nodes_;
};

class MetropolisSampler final : public Sampler {
public:
  explicit MetropolisSampler(SaScheduleParams schedule = {}) : schedule_(schedule) {
    validate(schedule_);
  }

  std::string name() const override { return "sa"; }
  const SaScheduleParams& schedule() const noexcept { return schedule_; }

  std::vector<SpinVector> sample(const WeightMatrix& theta, std::size_t k, Rng& rng) const override {
    return metropolis_sample(theta, k, schedule_, rng);
  }

private:
  SaScheduleParams schedule_;
};

// Ignores the weights entirely.
class RandomSampler final : public Sampler {
public:
  std::string name() const override { return "random"; }

  std::vector<SpinVector> sample(const WeightMatrix& theta, std::size_t k, Rng& rng) const override {
    return random_sample(theta.size(), k, rng);
  }
};

// Minimum-energy sample out of k reads; the first one wins ties.
inline SpinVector estimate_argmin(const Sampler& sampler, const WeightMatrix& theta, std::size_t k,
                                  Rng& rng) {
  if (k == 0) throw validation_error("estimate_argmin: k must be at least 1");
  auto reads = sampler.sample(theta, k, rng);
  if (reads.size() != k) {
    throw malformed_response_error(sampler.name() + " sampler returned " +
                                   std::to_string(reads.size()) + " reads, expected " +
                                   std::to_string(k));
  }
  std::size_t best = 0;
  double best_energy = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < reads.size(); ++r) {
    if (reads[r].size() != theta.size()) {
      throw dimension_mismatch_error(sampler.name() + " sampler returned a vector of length " +
                                     std::to_string(reads[r].size()) + ", expected " +
                                     std::to_string(theta.size()));
    }
    const double e = energy(theta, reads[r]);
    if (e < best_energy) {
      best_energy = e;
      best = r;
    }
  }
  return std::move(reads[best]);
}

// Divisor c such that theta / c uses the bias range [-delta, delta] and the
// coupling range [-gamma, gamma] as fully as possible. Zero for zero theta.
inline double range_scale_factor(const WeightMatrix& theta, double delta, double gamma) {
  if (!(delta > 0.0) || !(gamma > 0.0)) {
    throw validation_error("scale_to_ranges: delta and gamma must be positive");
  }
  double c = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) c = std::max(c, std::abs(theta.bias(i)) / delta);
  for (const auto& [i, j] : theta.graph().edges())
    c = std::max(c, std::abs(theta.coupling(i, j)) / gamma);
  return c;
}

inline WeightMatrix scale_to_ranges(const WeightMatrix& theta, double delta, double gamma) {
  const double c = range_scale_factor(theta, delta, gamma);
  if (c == 0.0) return theta;
  SquareMatrix<double> scaled = theta.matrix();
  for (std::size_t i = 0; i < scaled.size(); ++i)
    for (std::size_t j = 0; j < scaled.size(); ++j) scaled(i, j) /= c;
  // Guard the bound against rounding in the division.
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled(i, i) = std::clamp(scaled(i, i), -delta, delta);
    for (std::size_t j = 0; j < scaled.size(); ++j)
      if (i != j) scaled(i, j) = std::clamp(scaled(i, j), -gamma, gamma);
  }
  return WeightMatrix(theta.graph(), std::move(scaled));
}

}  // namespace qals
