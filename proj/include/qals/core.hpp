#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qals/errors.hpp"
#include "qals/matrix.hpp"

namespace qals {

namespace detail {

inline void require_dim(std::size_t got, std::size_t want, const char* where) {
  if (got != want) {
    throw contract_error(std::string(where) + ": dimension " + std::to_string(got) +
                         " does not match " + std::to_string(want));
  }
}

}  // namespace detail

// A candidate solution: every entry is exactly -1 or +1.
class SpinVector {
public:
  using value_type = std::int8_t;

  SpinVector() = default;

  explicit SpinVector(std::size_t n, int fill = -1) : spins_(n, checked(fill)) {}

  SpinVector(std::initializer_list<int> values) {
    spins_.reserve(values.size());
    for (int v : values) spins_.push_back(checked(v));
  }

  explicit SpinVector(std::span<const int> values) {
    spins_.reserve(values.size());
    for (int v : values) spins_.push_back(checked(v));
  }

  // Bit i of `bits` set means spin i is +1.
  static SpinVector from_bits(std::uint64_t bits, std::size_t n) {
    SpinVector z(n);
    for (std::size_t i = 0; i < n; ++i) z.spins_[i] = ((bits >> i) & 1U) ? 1 : -1;
    return z;
  }

  std::size_t size() const noexcept { return spins_.size(); }

  int operator[](std::size_t i) const noexcept { return spins_[i]; }

  void set(std::size_t i, int spin) { spins_[i] = checked(spin); }
  void flip(std::size_t i) noexcept { spins_[i] = static_cast<value_type>(-spins_[i]); }

  SpinVector operator-() const {
    SpinVector out = *this;
    for (auto& s : out.spins_) s = static_cast<value_type>(-s);
    return out;
  }

  std::span<const value_type> values() const noexcept { return spins_; }
  auto begin() const noexcept { return spins_.begin(); }
  auto end() const noexcept { return spins_.end(); }

  friend bool operator==(const SpinVector&, const SpinVector&) = default;
  // Lexicographic with -1 < +1.
  friend auto operator<=>(const SpinVector&, const SpinVector&) = default;

private:
  static value_type checked(int v) {
    if (v != 1 && v != -1) {
      throw validation_error("spin value " + std::to_string(v) + " is not -1 or +1");
    }
    return static_cast<value_type>(v);
  }

  std::vector<value_type> spins_;
};

// f(z) = z^T Q z over spins, with Q real symmetric.
class QuboProblem {
public:
  explicit QuboProblem(SquareMatrix<double> q) : q_(std::move(q)) {
    if (q_.size() == 0) throw validation_error("QuboProblem: dimension must be at least 1");
    if (!q_.is_symmetric()) throw validation_error("QuboProblem: matrix is not symmetric");
  }

  std::size_t size() const noexcept { return q_.size(); }
  const SquareMatrix<double>& matrix() const noexcept { return q_; }

private:
  SquareMatrix<double> q_;
};

// Sum over all ordered pairs in row-major order; the summation order is
// fixed so equal inputs always give bit-identical results.
inline double objective(const QuboProblem& problem, const SpinVector& z) {
  detail::require_dim(z.size(), problem.size(), "objective");
  const auto& q = problem.matrix();
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) row += q(i, j) * z[j];
    total += row * z[i];
  }
  return total;
}

// Annealer topology. Copies share one immutable adjacency structure.
class TopologyGraph {
public:
  using Edge = std::pair<std::size_t, std::size_t>;

  TopologyGraph() : TopologyGraph(0, {}) {}

  // Edges are normalized to i < j and deduplicated; self-loops and
  // out-of-range endpoints are rejected.
  TopologyGraph(std::size_t n, std::vector<Edge> edges) {
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    for (auto& [a, b] : edges) {
      if (a >= n || b >= n) {
        throw validation_error("edge (" + std::to_string(a) + "," + std::to_string(b) +
                               ") out of range for " + std::to_string(n) + " nodes");
      }
      if (a == b) throw validation_error("self-loop on node " + std::to_string(a));
      if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    impl->mask.assign(n * n, 0);
    impl->neighbors.resize(n);
    for (std::size_t i = 0; i < n; ++i) impl->mask[i * n + i] = 1;
    for (const auto& [a, b] : edges) {
      impl->mask[a * n + b] = impl->mask[b * n + a] = 1;
      impl->neighbors[a].push_back(b);
      impl->neighbors[b].push_back(a);
    }
    for (auto& adj : impl->neighbors) std::sort(adj.begin(), adj.end());
    impl->edges = std::move(edges);
    impl_ = std::move(impl);
  }

  std::size_t size() const noexcept { return impl_->n; }
  std::size_t edge_count() const noexcept { return impl_->edges.size(); }
  std::span<const Edge> edges() const noexcept { return impl_->edges; }

  // Adjacency mask with unit diagonal.
  bool mask(std::size_t i, std::size_t j) const noexcept {
    return impl_->mask[i * impl_->n + j] != 0;
  }
  bool has_edge(std::size_t i, std::size_t j) const noexcept { return i != j && mask(i, j); }

  std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
    return impl_->neighbors[i];
  }
  std::size_t degree(std::size_t i) const noexcept { return impl_->neighbors[i].size(); }

  friend bool operator==(const TopologyGraph& a, const TopologyGraph& b) noexcept {
    return a.impl_ == b.impl_ || (a.size() == b.size() && a.impl_->edges == b.impl_->edges);
  }

private:
  struct Impl {
    std::size_t n = 0;
    std::vector<Edge> edges;
    std::vector<std::uint8_t> mask;
    std::vector<std::vector<std::size_t>> neighbors;
  };

  std::shared_ptr<const Impl> impl_;
};

// Annealer weights: diagonal entries are biases, off-diagonal entries are
// couplings and must vanish outside the graph's edge set.
class WeightMatrix {
public:
  explicit WeightMatrix(TopologyGraph graph)
      : graph_(std::move(graph)), theta_(graph_.size()) {}

  WeightMatrix(TopologyGraph graph, SquareMatrix<double> theta)
      : graph_(std::move(graph)), theta_(std::move(theta)) {
    detail::require_dim(theta_.size(), graph_.size(), "WeightMatrix");
    if (!theta_.is_symmetric()) throw validation_error("WeightMatrix: weights not symmetric");
    for (std::size_t i = 0; i < theta_.size(); ++i)
      for (std::size_t j = 0; j < theta_.size(); ++j)
        if (!graph_.mask(i, j) && theta_(i, j) != 0.0) {
          throw validation_error("WeightMatrix: nonzero coupling (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") outside the topology");
        }
  }

  std::size_t size() const noexcept { return theta_.size(); }
  const TopologyGraph& graph() const noexcept { return graph_; }
  const SquareMatrix<double>& matrix() const noexcept { return theta_; }

  double bias(std::size_t i) const noexcept { return theta_(i, i); }
  double coupling(std::size_t i, std::size_t j) const noexcept { return theta_(i, j); }

  void set_bias(std::size_t i, double v) noexcept { theta_(i, i) = v; }
  void set_coupling(std::size_t i, std::size_t j, double v) {
    if (!graph_.has_edge(i, j)) {
      throw validation_error("WeightMatrix: no edge (" + std::to_string(i) + "," +
                             std::to_string(j) + ")");
    }
    theta_(i, j) = theta_(j, i) = v;
  }

  WeightMatrix& operator+=(const WeightMatrix& other) {
    if (!(graph_ == other.graph_)) throw contract_error("WeightMatrix: different topologies");
    theta_ += other.theta_;
    return *this;
  }
  WeightMatrix& operator*=(double scale) noexcept {
    theta_ *= scale;
    return *this;
  }
  friend WeightMatrix operator+(WeightMatrix a, const WeightMatrix& b) { return a += b; }
  friend WeightMatrix operator*(WeightMatrix a, double s) { return a *= s; }
  friend WeightMatrix operator*(double s, WeightMatrix a) { return a *= s; }

private:
  TopologyGraph graph_;
  SquareMatrix<double> theta_;
};

// Annealer cost: sum_i theta_ii z_i + sum over edges {i<j} theta_ij z_i z_j.
// Each edge is counted once.
inline double energy(const WeightMatrix& theta, const SpinVector& z) {
  detail::require_dim(z.size(), theta.size(), "energy");
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) total += theta.bias(i) * z[i];
  for (const auto& [i, j] : theta.graph().edges())
    total += theta.coupling(i, j) * (z[i] * z[j]);
  return total;
}

// sigma[i] is the qubit hosting logical variable i.
class Permutation {
public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (auto v : image_) {
      if (v >= image_.size() || seen[v]) throw validation_error("Permutation: not a bijection");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> image(n);
    std::iota(image.begin(), image.end(), std::size_t{0});
    return Permutation(std::move(image));
  }

  std::size_t size() const noexcept { return image_.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return image_[i]; }
  std::span<const std::size_t> image() const noexcept { return image_; }

  Permutation inverse() const {
    std::vector<std::size_t> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

private:
  std::vector<std::size_t> image_;
};

// Accumulated penalty sum over candidates z of (z z^T - I + diag(z)).
class TabuMatrix {
public:
  using value_type = std::int64_t;

  TabuMatrix() = default;
  explicit TabuMatrix(std::size_t n) : s_(n) {}
  TabuMatrix(SquareMatrix<value_type> s, std::int64_t count) : s_(std::move(s)), count_(count) {}

  std::size_t size() const noexcept { return s_.size(); }
  // Number of candidates folded in.
  std::int64_t count() const noexcept { return count_; }
  const SquareMatrix<value_type>& matrix() const noexcept { return s_; }
  value_type operator()(std::size_t i, std::size_t j) const noexcept { return s_(i, j); }

  void add(const SpinVector& z) {
    detail::require_dim(z.size(), size(), "TabuMatrix::add");
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t j = 0; j < size(); ++j) {
        s_(i, j) += (i == j) ? z[i] : z[i] * z[j];
      }
    }
    ++count_;
  }

  friend bool operator==(const TabuMatrix&, const TabuMatrix&) = default;

private:
  SquareMatrix<value_type> s_;
  std::int64_t count_ = 0;
};

inline TabuMatrix tabu_init(const SpinVector& z) {
  TabuMatrix s(z.size());
  s.add(z);
  return s;
}

inline TabuMatrix tabu_update(TabuMatrix s, const SpinVector& z) {
  s.add(z);
  return s;
}

// P^T S P as an index relabeling: out(sigma[i], sigma[j]) = S(i, j).
inline TabuMatrix conjugate_tabu(const TabuMatrix& s, const Permutation& sigma) {
  detail::require_dim(sigma.size(), s.size(), "conjugate_tabu");
  SquareMatrix<TabuMatrix::value_type> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) out(sigma[i], sigma[j]) = s(i, j);
  return TabuMatrix(std::move(out), s.count());
}

// P^T Q' P masked by the adjacency: theta(sigma[i], sigma[j]) = Q'(i, j)
// wherever the qubits are adjacent (diagonal always kept).
inline WeightMatrix encode(const SquareMatrix<double>& q, const Permutation& sigma,
                           const TopologyGraph& graph) {
  detail::require_dim(q.size(), graph.size(), "encode");
  detail::require_dim(sigma.size(), graph.size(), "encode");
  SquareMatrix<double> theta(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto a = sigma[i];
      const auto b = sigma[j];
      if (graph.mask(a, b)) theta(a, b) = q(i, j);
    }
  }
  return WeightMatrix(graph, std::move(theta));
}

// Reads the annealer's qubit assignment back into variable order.
inline SpinVector decode(const SpinVector& y, const Permutation& sigma) {
  detail::require_dim(y.size(), sigma.size(), "decode");
  SpinVector z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z.set(i, y[sigma[i]]);
  return z;
}

// Inverse of decode: places variable i on qubit sigma[i].
inline SpinVector to_qubits(const SpinVector& z, const Permutation& sigma) {
  detail::require_dim(z.size(), sigma.size(), "to_qubits");
  SpinVector y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y.set(sigma[i], z[i]);
  return y;
}

}  // namespace qals
