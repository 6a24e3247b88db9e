#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "qals/io.hpp"

using namespace qals;
using nlohmann::json;

namespace {

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_qubo_file(text);
  } catch (const parse_error& e) {
    return e.line();
  }
  return 0;
}

std::size_t config_error_line(const std::string& text) {
  try {
    parse_experiment_config(text);
  } catch (const parse_error& e) {
    return e.line();
  }
  return 0;
}

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("qals-io-" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path / name) << text; }
};

}  // namespace

TEST_CASE("parse_qubo_file") {
  SECTION("diagonal entries") {
    CHECK(parse_qubo_file("qubo 2\n0 0 1.0\n1 1 1.0").matrix() == SquareMatrix<double>::identity(2));
  }
  SECTION("symmetric completion") {
    CHECK(parse_qubo_file("qubo 2\n0 1 1.0").matrix() == SquareMatrix<double>{{0.0, 1.0}, {1.0, 0.0}});
  }
  SECTION("comments, blank lines and exponents") {
    const auto q = parse_qubo_file("# a file\n\nqubo 3   # header\n0 2 -2.5e-1\n\n1 1 0.1\n").matrix();
    CHECK(q(0, 2) == -0.25);
    CHECK(q(2, 0) == -0.25);
    CHECK(q(1, 1) == 0.1);
    CHECK(q(0, 0) == 0.0);
  }
  SECTION("round-to-nearest decimal parsing") {
    CHECK(parse_qubo_file("qubo 1\n0 0 0.1").matrix()(0, 0) == 0.1);
    CHECK(parse_qubo_file("qubo 1\n0 0 2.2250738585072014e-308").matrix()(0, 0) == 2.2250738585072014e-308);
  }
  SECTION("errors carry line numbers") {
    CHECK(parse_error_line("qubo 2\n1 0 1.0") == 2);
    CHECK(parse_error_line("qubo 2\n0 1 1\n0 1 2\n") == 3);
    CHECK(parse_error_line("qubo 2\n0 2 1\n") == 2);
    CHECK(parse_error_line("qubit 2\n") == 1);
    CHECK(parse_error_line("# c\nqubo 0\n") == 2);
    CHECK(parse_error_line("qubo 2\n0 1\n") == 2);
    CHECK(parse_error_line("qubo 2\n0 1 abc\n") == 2);
    CHECK(parse_error_line("qubo 2\n0 1 nan\n") == 2);
    CHECK(parse_error_line("qubo 2\n0 1 inf\n") == 2);
    CHECK(parse_error_line("qubo 2\n-1 1 1\n") == 2);
    CHECK(parse_error_line("# nothing\n") > 0);
    CHECK_THROWS_AS(parse_qubo_file(""), parse_error);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_qubo_file("/nonexistent/q.qubo"), error);
  }
}

TEST_CASE("format_qubo_file round trip is bit exact") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 13;
    const auto problem = random_qubo(n, 0.4, -3.0, 7.0, rng);
    const auto text = format_qubo_file(problem);
    CHECK(parse_qubo_file(text).matrix() == problem.matrix());
    CHECK(format_qubo_file(parse_qubo_file(text)) == text);
  }
  CHECK(format_qubo_file(QuboProblem(SquareMatrix<double>{{0.0, 1.0}, {1.0, 0.0}})) ==
        "qubo 2\n0 0 0\n0 1 1\n1 1 0\n");
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(1e-300) == "1e-300");
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int t = 0; t < 1000; ++t) {
    const double v = u(gen);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("solve report JSON") {
  QalsParams params;
  params.i_max = 20;
  params.seed = 3;
  SolveOptions options;
  const QuboProblem problem(SquareMatrix<double>{{0.0, 1.0}, {1.0, 0.0}});

  SECTION("schema without trace") {
    const auto report = solve(problem, complete_graph(2), ExactSampler(), params, options);
    const auto doc = to_json(report, params, {"exact", "complete", "pair.qubo"});
    for (const char* key : {"n", "problem", "sampler", "graph", "params", "z_best", "f_best", "z_returned",
                            "f_returned", "iterations", "evaluations", "best_iteration", "termination",
                            "final_p", "final_lambda", "tabu_count"})
      CHECK(doc.contains(key));
    CHECK_FALSE(doc.contains("trace"));
    CHECK(doc["n"] == 2);
    CHECK(doc["f_best"] == -2.0);
    CHECK(doc["sampler"] == "exact");
    CHECK(doc["params"]["i_max"] == 20);
    CHECK(doc["params"]["seed"] == 3);
    CHECK(doc["z_best"].size() == 2);
    for (const auto& s : doc["z_best"]) CHECK((s == 1 || s == -1));
    CHECK((doc["termination"] == "iteration_limit" || doc["termination"] == "stalled"));
  }
  SECTION("trace records") {
    options.trace = true;
    const auto report = solve(problem, complete_graph(2), ExactSampler(), params, options);
    const auto doc = to_json(report, params);
    REQUIRE(doc["trace"].size() == report.iterations);
    for (const auto& r : doc["trace"]) {
      for (const char* key : {"i", "p", "temperature", "lambda", "f_prime", "outcome", "e", "d", "f_star", "f_best",
                              "tabu_count"})
        CHECK(r.contains(key));
      CHECK(r["temperature"].get<double>() == Catch::Approx(-1.0 / std::log(r["p"].get<double>())));
      if (r["outcome"] == "repeated") CHECK(r["f_prime"].is_null());
      else CHECK(r["f_prime"].is_number());
    }
  }
}

TEST_CASE("experiment report JSON and CSV") {
  ExperimentSpec spec;
  spec.n = 5;
  spec.replicas = 3;
  spec.sampler.kind = "exact";
  spec.params.i_max = 30;
  const auto report = run_experiment(spec);

  const auto doc = to_json(report);
  CHECK(doc["spec"]["n"] == 5);
  CHECK(doc["spec"]["sampler"] == "exact");
  CHECK(doc["spec"]["coeff_range"] == json::array({-1.0, 1.0}));
  REQUIRE(doc["replicas"].size() == 3);
  for (const auto& r : doc["replicas"])
    for (const char* key : {"replica", "seed", "f_best", "oracle_min", "success", "iters_to_opt", "millis"})
      CHECK(r.contains(key));
  CHECK(doc["aggregates"]["replicas"] == 3);
  CHECK(doc["aggregates"].contains("total_millis"));

  const auto untimed = to_json(report, false);
  CHECK_FALSE(untimed["replicas"][0].contains("millis"));
  CHECK_FALSE(untimed["aggregates"].contains("total_millis"));
  CHECK(untimed.dump() == to_json(run_experiment(spec), false).dump());

  std::istringstream csv(to_csv(report));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "replica,seed,f_best,success,iters_to_opt,millis");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
    CHECK(line.starts_with(std::to_string(rows) + "," + std::to_string(report.records[rows].seed) + ","));
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("parse_experiment_config") {
  SECTION("all keys") {
    const auto spec = parse_experiment_config(
        "# bench\n"
        "n = 9\ndensity = 0.25\nrange = -2:3\nreplicas = 4\nseed = 99\nsampler = sa\ngraph = complete\n"
        "k = 5\np_delta = 0.2\neta = 0.05\nq = 0.3\nN = 7\nlambda0 = 2\ni_max = 300\nn_max = 50\nd_min = 9\n"
        "sweeps = 40\nbeta_start = 0.2\nbeta_end = 6  # hot end\nthreads = 2\nsuccess_statistics = false\n");
    CHECK(spec.n == 9);
    CHECK(spec.density == 0.25);
    CHECK(spec.coeff_lo == -2.0);
    CHECK(spec.coeff_hi == 3.0);
    CHECK(spec.replicas == 4);
    CHECK(spec.params.seed == 99);
    CHECK(spec.sampler.kind == "sa");
    CHECK(spec.graph.kind == "complete");
    CHECK(spec.params.k == 5);
    CHECK(spec.params.p_delta == 0.2);
    CHECK(spec.params.eta == 0.05);
    CHECK(spec.params.q == 0.3);
    CHECK(spec.params.N == 7);
    CHECK(spec.params.lambda0 == 2.0);
    CHECK(spec.params.i_max == 300);
    CHECK(spec.params.N_max == 50);
    CHECK(spec.params.d_min == 9);
    CHECK(spec.sampler.schedule.sweeps == 40);
    CHECK(spec.sampler.schedule.beta_start == 0.2);
    CHECK(spec.sampler.schedule.beta_end == 6.0);
    CHECK(spec.threads == 2);
    CHECK_FALSE(spec.success_statistics);
  }
  SECTION("defaults") {
    const auto spec = parse_experiment_config("");
    CHECK(spec.n == 10);
    CHECK(spec.sampler.kind == "sa");
    CHECK(spec.params.i_max == QalsParams{}.i_max);
  }
  SECTION("problem path relative to the config") {
    TempDir dir;
    dir.write("pair.qubo", "qubo 2\n0 1 1\n");
    const auto spec = parse_experiment_config("problem = pair.qubo\nsampler = exact\n", dir.path);
    REQUIRE(spec.problem.has_value());
    CHECK(spec.problem->matrix() == SquareMatrix<double>{{0.0, 1.0}, {1.0, 0.0}});
    CHECK(spec.problem_path == (dir.path / "pair.qubo").string());
    CHECK(to_json(spec)["problem"] == spec.problem_path);
  }
  SECTION("errors") {
    CHECK(config_error_line("n = 3\nbogus = 1\n") == 2);
    CHECK(config_error_line("n = 3\nn = 4\n") == 2);
    CHECK(config_error_line("n 3\n") == 1);
    CHECK(config_error_line("n = three\n") == 1);
    CHECK(config_error_line("\nrange = 1\n") == 2);
    CHECK(config_error_line("graph = torus\n") == 1);
    CHECK(config_error_line("success_statistics = yes\n") == 1);
    CHECK_THROWS_AS(parse_experiment_config("sampler = quantum\n"), parse_error);
  }
}
