#include <random>
#include <set>
#include <vector>

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "qals/core.hpp"
#include "qals/topology.hpp"

using namespace qals;
using qals::testing::naive_minimum;
using qals::testing::spins_of;

namespace {

const TopologyGraph two_nodes = complete_graph(2);

WeightMatrix toy_weights() {
  // theta_1 = 1, theta_2 = -1, theta_12 = -1
  return WeightMatrix(two_nodes, {{1.0, -1.0}, {-1.0, -1.0}});
}

}  // namespace

TEST_CASE("SpinVector only holds +-1") {
  CHECK_THROWS_AS(SpinVector({1, 0}), validation_error);
  CHECK_THROWS_AS(SpinVector(3, 2), validation_error);
  SpinVector z{1, -1, 1};
  z.flip(1);
  CHECK(z == SpinVector{1, 1, 1});
  CHECK(-z == SpinVector{-1, -1, -1});
  CHECK(SpinVector::from_bits(0b101, 3) == SpinVector{1, -1, 1});
  CHECK(SpinVector{-1, 1} < SpinVector{1, -1});
}

TEST_CASE("QuboProblem validates its matrix") {
  CHECK_THROWS_AS(QuboProblem(SquareMatrix<double>{{0, 1}, {2, 0}}), validation_error);
  CHECK_THROWS_AS(QuboProblem(SquareMatrix<double>(0)), validation_error);
  CHECK_NOTHROW(QuboProblem(SquareMatrix<double>{{3}}));
}

TEST_CASE("objective") {
  SECTION("off-diagonal pair counted twice") {
    const QuboProblem p(SquareMatrix<double>{{0, 1}, {1, 0}});
    CHECK(objective(p, SpinVector{1, -1}) == -2.0);
  }
  SECTION("identity gives n for every spin vector") {
    const QuboProblem p(SquareMatrix<double>::identity(2));
    for (std::uint64_t b = 0; b < 4; ++b) CHECK(objective(p, SpinVector::from_bits(b, 2)) == 2.0);
  }
  SECTION("minimum of [[0.5,-1],[-1,0.5]] by enumeration") {
    const SquareMatrix<double> q{{0.5, -1.0}, {-1.0, 0.5}};
    const QuboProblem p(q);
    const auto oracle = naive_minimum(2, [&](const std::vector<int>& z) {
      return qals::testing::naive_objective(q, z);
    });
    CHECK(oracle.value == -1.0);
    CHECK(oracle.minimizers == std::set<std::vector<int>>{{1, 1}, {-1, -1}});
    CHECK(objective(p, SpinVector{1, 1}) == -1.0);
    CHECK(objective(p, SpinVector{-1, -1}) == -1.0);
  }
  SECTION("dimension mismatch") {
    const QuboProblem p(SquareMatrix<double>::identity(2));
    CHECK_THROWS_AS(objective(p, SpinVector{1, 1, 1}), contract_error);
  }
}

TEST_CASE("energy") {
  SECTION("biases cancel") {
    const WeightMatrix theta(complete_graph(2), {{1.0, 0.0}, {0.0, -1.0}});
    CHECK(energy(theta, SpinVector{1, 1}) == 0.0);
  }
  SECTION("toy weights at (1,-1)") { CHECK(energy(toy_weights(), SpinVector{1, -1}) == 3.0); }
  SECTION("toy argmin set") {
    const auto theta = toy_weights();
    const auto oracle = naive_minimum(2, [&](const std::vector<int>& z) {
      return qals::testing::naive_energy(theta.matrix(), theta.graph(), z);
    });
    CHECK(oracle.value == -1.0);
    CHECK(oracle.minimizers == std::set<std::vector<int>>{{1, 1}, {-1, 1}, {-1, -1}});
    for (const auto& z : oracle.minimizers) CHECK(energy(theta, SpinVector(std::span<const int>(z))) == -1.0);
  }
  SECTION("each edge counted once") {
    const WeightMatrix theta(complete_graph(2), {{0.0, 2.5}, {2.5, 0.0}});
    CHECK(energy(theta, SpinVector{1, 1}) == 2.5);
  }
  SECTION("dimension mismatch") { CHECK_THROWS_AS(energy(toy_weights(), SpinVector{1}), contract_error); }
}

TEST_CASE("WeightMatrix rejects couplings off the topology") {
  const auto edgeless = graph_from_edge_list(2, {});
  CHECK_THROWS_AS(WeightMatrix(edgeless, {{0, 1}, {1, 0}}), validation_error);
  WeightMatrix theta(edgeless);
  CHECK_THROWS_AS(theta.set_coupling(0, 1, 1.0), validation_error);
  CHECK_THROWS_AS(WeightMatrix(complete_graph(2), {{0, 1}, {2, 0}}), validation_error);
}

TEST_CASE("tabu_init") {
  const auto s = tabu_init(SpinVector{1, -1});
  CHECK(s.matrix() == SquareMatrix<std::int64_t>{{1, -1}, {-1, -1}});
  CHECK(s.count() == 1);

  CHECK(tabu_init(SpinVector(4, 1)).matrix() == SquareMatrix<std::int64_t>(4, 1));
  CHECK(tabu_init(SpinVector{-1, 1}).matrix() == SquareMatrix<std::int64_t>{{-1, -1}, {-1, 1}});
}

TEST_CASE("tabu_update") {
  SECTION("toy sequence") {
    const auto s = tabu_update(tabu_init(SpinVector{1, -1}), SpinVector{1, 1});
    CHECK(s.matrix() == SquareMatrix<std::int64_t>{{2, 0}, {0, 0}});
    CHECK(s.count() == 2);
  }
  SECTION("from zero equals init") {
    const SpinVector z{1, -1, -1, 1};
    CHECK(tabu_update(TabuMatrix(4), z) == tabu_init(z));
  }
  SECTION("z then -z cancels the diagonal and doubles the couplings") {
    const SpinVector z{1, -1, 1};
    const auto s = tabu_update(tabu_init(z), -z);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(s(i, j) == (i == j ? 0 : 2 * z[i] * z[j]));
      }
    }
  }
  SECTION("dimension mismatch") { CHECK_THROWS_AS(tabu_update(TabuMatrix(2), SpinVector{1}), contract_error); }
}

TEST_CASE("conjugate_tabu") {
  const auto s = tabu_init(SpinVector{1, -1});
  CHECK(conjugate_tabu(s, Permutation::identity(2)) == s);
  const Permutation swap({1, 0});
  const auto swapped = conjugate_tabu(s, swap);
  CHECK(swapped.matrix() == SquareMatrix<std::int64_t>{{-1, -1}, {-1, 1}});
  CHECK(swapped == tabu_init(SpinVector{-1, 1}));

  std::mt19937_64 rng(3);
  const auto sigma = qals::testing::random_permutation(6, rng);
  const auto t = tabu_update(tabu_init(qals::testing::random_spins(6, rng)), qals::testing::random_spins(6, rng));
  CHECK(conjugate_tabu(conjugate_tabu(t, sigma), sigma.inverse()) == t);
}

TEST_CASE("encode") {
  const SquareMatrix<double> q{{1.0, 2.0, 3.0}, {2.0, 4.0, 5.0}, {3.0, 5.0, 6.0}};
  SECTION("complete graph and identity keep everything") {
    CHECK(encode(q, Permutation::identity(3), complete_graph(3)).matrix() == q);
  }
  SECTION("edgeless graph keeps the permuted diagonal only") {
    const Permutation sigma({2, 0, 1});
    const auto theta = encode(q, sigma, graph_from_edge_list(3, {}));
    SquareMatrix<double> expected(3);
    expected(2, 2) = 1.0;
    expected(0, 0) = 4.0;
    expected(1, 1) = 6.0;
    CHECK(theta.matrix() == expected);
  }
  SECTION("missing edge masks the coupling") {
    const SquareMatrix<double> q2{{0.0, 5.0}, {5.0, 0.0}};
    CHECK(encode(q2, Permutation::identity(2), graph_from_edge_list(2, {})).matrix() == SquareMatrix<double>(2));
  }
  SECTION("matches explicit P^T Q P masked by adjacency") {
    std::mt19937_64 rng(11);
    const auto graph = graph_from_edge_list(5, {{0, 1}, {1, 2}, {3, 4}, {0, 4}});
    for (int trial = 0; trial < 20; ++trial) {
      const auto qq = qals::testing::random_symmetric(5, rng);
      const auto sigma = qals::testing::random_permutation(5, rng);
      SquareMatrix<double> p(5);
      for (std::size_t i = 0; i < 5; ++i) p(i, sigma[i]) = 1.0;
      const auto theta = encode(qq, sigma, graph);
      for (std::size_t a = 0; a < 5; ++a) {
        for (std::size_t b = 0; b < 5; ++b) {
          double ptqp = 0.0;
          for (std::size_t c = 0; c < 5; ++c)
            for (std::size_t d = 0; d < 5; ++d) ptqp += p(c, a) * qq(c, d) * p(d, b);
          CHECK(theta.coupling(a, b) == (graph.mask(a, b) ? ptqp : 0.0));
        }
      }
    }
  }
  SECTION("dimension mismatch") { CHECK_THROWS_AS(encode(q, Permutation::identity(2), complete_graph(3)), contract_error); }
}

TEST_CASE("decode") {
  const SpinVector y{1, -1};
  CHECK(decode(y, Permutation::identity(2)) == y);
  CHECK(decode(y, Permutation({1, 0})) == SpinVector{-1, 1});
  CHECK_THROWS_AS(decode(SpinVector{1}, Permutation::identity(2)), contract_error);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const auto z = qals::testing::random_spins(n, rng);
    const auto sigma = qals::testing::random_permutation(n, rng);
    CHECK(decode(to_qubits(z, sigma), sigma) == z);
  }
}

TEST_CASE("Permutation is a bijection") {
  CHECK_THROWS_AS(Permutation({0, 0}), validation_error);
  CHECK_THROWS_AS(Permutation({0, 2}), validation_error);
  const Permutation sigma({2, 0, 1});
  const auto inv = sigma.inverse();
  for (std::size_t i = 0; i < 3; ++i) CHECK(inv[sigma[i]] == i);
}

// ---- properties -----------------------------------------------------------

TEST_CASE("tabu recursion equals the closed-form sum") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 16;
    const std::size_t count = rng() % 51;
    std::vector<SpinVector> zs;
    TabuMatrix s(n);
    for (std::size_t a = 0; a < count; ++a) {
      zs.push_back(qals::testing::random_spins(n, rng));
      s = tabu_update(s, zs.back());
      // parity and bound invariants after every update
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          REQUIRE(s(i, j) == s(j, i));
          REQUIRE(std::abs(s(i, j)) <= s.count());
          REQUIRE((s(i, j) - s.count()) % 2 == 0);
        }
      }
    }
    REQUIRE(s.count() == static_cast<std::int64_t>(count));
    REQUIRE(s.matrix() == qals::testing::tabu_closed_form(zs, n));
  }
}

TEST_CASE("conjugated tabu equals the tabu of the relabeled candidates") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 16;
    const auto sigma = qals::testing::random_permutation(n, rng);
    TabuMatrix s(n), relabeled(n);
    const std::size_t count = 1 + rng() % 20;
    for (std::size_t a = 0; a < count; ++a) {
      const auto z = qals::testing::random_spins(n, rng);
      s.add(z);
      relabeled.add(to_qubits(z, sigma));
    }
    REQUIRE(conjugate_tabu(s, sigma) == relabeled);
    REQUIRE(conjugate_tabu(s, sigma).matrix() == qals::testing::conjugate_by_matrices(s.matrix(), sigma));
  }
}

TEST_CASE("energy is additive in the weights") {
  std::mt19937_64 rng(303);
  const auto graph = chimera_graph({1});
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = qals::testing::random_weights(graph, rng);
    const auto b = qals::testing::random_weights(graph, rng);
    const auto z = qals::testing::random_spins(graph.size(), rng);
    CHECK(energy(a + b, z) == Catch::Approx(energy(a, z) + energy(b, z)).margin(1e-12));
  }
  CHECK_THROWS_AS(WeightMatrix(complete_graph(2)) + WeightMatrix(graph_from_edge_list(2, {})), contract_error);
}

TEST_CASE("complete-graph encoding energy does not depend on the permutation") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const auto graph = complete_graph(n);
    const auto q = qals::testing::random_symmetric(n, rng);
    const auto z = qals::testing::random_spins(n, rng);
    const double reference = energy(encode(q, Permutation::identity(n), graph), z);
    for (int s = 0; s < 5; ++s) {
      const auto sigma = qals::testing::random_permutation(n, rng);
      CHECK(energy(encode(q, sigma, graph), to_qubits(z, sigma)) == Catch::Approx(reference).margin(1e-12));
    }
  }
}

TEST_CASE("positive scaling keeps the minimizer set") {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const auto graph = complete_graph(n);
    const auto theta = qals::testing::random_weights(graph, rng);
    const double c = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
    const auto scaled = theta * c;
    const auto base = naive_minimum(n, [&](const std::vector<int>& z) { return energy(theta, SpinVector(std::span<const int>(z))); });
    const auto after = naive_minimum(n, [&](const std::vector<int>& z) { return energy(scaled, SpinVector(std::span<const int>(z))); }, 1e-9 * c);
    CHECK(base.minimizers == after.minimizers);
  }
}
