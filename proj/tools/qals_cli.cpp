// qals: command-line front end for the learning-search QUBO solver.
//
// Exit status: 0 success, 1 input or validation error, 2 sampler or
// transport error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qals/all.hpp"

namespace {

constexpr int kInputError = 1;
constexpr int kSamplerError = 2;

std::string spins_text(const qals::SpinVector& z) {
  std::string out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) out += ' ';
    out += z[i] > 0 ? "1" : "-1";
  }
  return out;
}

struct SolveArgs {
  std::string file;
  std::string graph = "complete";
  std::string sampler = "sa";
  qals::QalsParams params;
  qals::SaScheduleParams schedule;
  bool trace = false;
  bool json = false;
};

int run_solve(const SolveArgs& args) {
  const auto problem = qals::load_qubo_file(args.file);
  const auto graph = qals::make_graph(qals::parse_graph_selector(args.graph), problem.size());
  const auto selector = qals::parse_sampler_selector(args.sampler, args.schedule);
  const auto sampler = qals::make_sampler(selector);

  qals::SolveOptions options;
  options.trace = args.trace;
  const auto report = qals::solve(problem, graph, *sampler, args.params, options);

  if (args.json) {
    const qals::SolveContext context{qals::to_string(selector), args.graph, args.file};
    std::cout << qals::to_json(report, args.params, context).dump(2) << '\n';
    return 0;
  }
  std::cout << "f_best " << qals::format_double(report.f_best) << '\n'
            << "z_best " << spins_text(report.z_best) << '\n';
  if (args.trace) {
    std::cout << "# i p lambda f_prime outcome e d f_star\n";
    for (const auto& r : report.trace) {
      std::cout << r.iteration << ' ' << qals::format_double(r.p) << ' '
                << qals::format_double(r.lambda) << ' '
                << (r.f_prime ? qals::format_double(*r.f_prime) : std::string("-")) << ' '
                << qals::to_string(r.outcome) << ' ' << r.e << ' ' << r.d << ' '
                << qals::format_double(r.f_star) << '\n';
    }
  }
  return 0;
}

struct GenArgs {
  std::size_t n = 0;
  double density = 0.5;
  std::string range = "-1:1";
  std::uint64_t seed = 0;
};

int run_gen(const GenArgs& args) {
  const auto colon = args.range.find(':', 1);
  if (colon == std::string::npos) throw qals::validation_error("--range must be LO:HI");
  const double lo = qals::detail::parse_number<double>(args.range.substr(0, colon), 0, "range bound");
  const double hi = qals::detail::parse_number<double>(args.range.substr(colon + 1), 0, "range bound");
  qals::Rng rng(args.seed);
  std::cout << qals::format_qubo_file(qals::random_qubo(args.n, args.density, lo, hi, rng));
  return 0;
}

int run_oracle(const std::string& file) {
  const auto result = qals::brute_force_min(qals::load_qubo_file(file));
  std::cout << "min " << qals::format_double(result.value) << '\n'
            << "z " << spins_text(result.z) << '\n';
  return 0;
}

int run_bench(const std::string& config, const std::string& format, int threads) {
  const std::filesystem::path path(config);
  auto spec = qals::parse_experiment_config(qals::detail::read_file(config), path.parent_path());
  if (threads >= 0) spec.threads = static_cast<std::size_t>(threads);
  const auto report = qals::run_experiment(spec);
  if (format == "csv") {
    std::cout << qals::to_csv(report);
  } else {
    std::cout << qals::to_json(report).dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum annealing learning search for QUBO problems over {-1,+1} spins"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "solve a QUBO file");
  solve_cmd->add_option("file", solve.file, "QUBO file")->required();
  solve_cmd->add_option("--graph", solve.graph, "complete | chimera:<m> | file:<path>")
      ->capture_default_str();
  solve_cmd->add_option("--sampler", solve.sampler, "exact | sa | random | remote:<url>")
      ->capture_default_str();
  solve_cmd->add_option("--k", solve.params.k, "annealer reads per estimate")->capture_default_str();
  solve_cmd->add_option("--p-delta", solve.params.p_delta, "probability floor")->capture_default_str();
  solve_cmd->add_option("--eta", solve.params.eta, "probability decrease rate")->capture_default_str();
  solve_cmd->add_option("--q", solve.params.q, "candidate perturbation probability")->capture_default_str();
  solve_cmd->add_option("--N", solve.params.N, "iterations per probability level")->capture_default_str();
  solve_cmd->add_option("--lambda0", solve.params.lambda0, "initial tabu balancing factor")
      ->capture_default_str();
  solve_cmd->add_option("--i-max", solve.params.i_max, "iteration limit")->capture_default_str();
  solve_cmd->add_option("--n-max", solve.params.N_max, "stall window e + d")->capture_default_str();
  solve_cmd->add_option("--d-min", solve.params.d_min, "stall threshold on d")->capture_default_str();
  solve_cmd->add_option("--seed", solve.params.seed, "root seed")->capture_default_str();
  solve_cmd->add_option("--sweeps", solve.schedule.sweeps, "sa sampler sweeps per read")->capture_default_str();
  solve_cmd->add_option("--beta-start", solve.schedule.beta_start, "sa sampler initial inverse temperature")
      ->capture_default_str();
  solve_cmd->add_option("--beta-end", solve.schedule.beta_end, "sa sampler final inverse temperature")
      ->capture_default_str();
  solve_cmd->add_flag("--trace", solve.trace, "record per-iteration state");
  solve_cmd->add_flag("--json", solve.json, "print the full report as JSON");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a random QUBO file on stdout");
  gen_cmd->add_option("--n", gen.n, "dimension")->required();
  gen_cmd->add_option("--density", gen.density, "off-diagonal fill probability")->capture_default_str();
  gen_cmd->add_option("--range", gen.range, "coefficient range LO:HI (use --range=-1:1)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "rng seed")->capture_default_str();

  std::string oracle_file;
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force minimum of a QUBO file");
  oracle_cmd->add_option("file", oracle_file, "QUBO file")->required();

  std::string bench_config;
  std::string bench_format = "json";
  int bench_threads = -1;
  auto* bench_cmd = app.add_subcommand("bench", "run a replicated experiment");
  bench_cmd->add_option("config", bench_config, "experiment config (key = value lines)")->required();
  bench_cmd->add_option("--format", bench_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  bench_cmd->add_option("--threads", bench_threads, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  const bool solving = solve_cmd->parsed();
  try {
    if (solving) return run_solve(solve);
    if (gen_cmd->parsed()) return run_gen(gen);
    if (oracle_cmd->parsed()) return run_oracle(oracle_file);
    return run_bench(bench_config, bench_format, bench_threads);
  } catch (const qals::sampler_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSamplerError;
  } catch (const qals::capacity_error& e) {
    // Only the exact sampler can run out of capacity inside a solve.
    std::cerr << "error: " << e.what() << '\n';
    return solving ? kSamplerError : kInputError;
  } catch (const qals::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}
