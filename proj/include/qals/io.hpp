#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "qals/core.hpp"
#include "qals/errors.hpp"
#include "qals/harness.hpp"
#include "qals/qals.hpp"
#include "qals/topology.hpp"

namespace qals {

// QUBO text format:
//   # comment
//   qubo <n>
//   i j value        (0-based, i <= j; omitted pairs are zero)
inline QuboProblem parse_qubo_file(std::string_view text) {
  std::size_t n = 0;
  bool have_header = false;
  SquareMatrix<double> q;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto tokens = detail::split_tokens(detail::strip_comment(raw));
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() != 2 || tokens[0] != "qubo") throw parse_error(line_no, "expected header 'qubo <n>'");
      n = detail::parse_number<std::size_t>(tokens[1], line_no, "dimension");
      if (n == 0) throw parse_error(line_no, "dimension must be at least 1");
      q = SquareMatrix<double>(n);
      have_header = true;
      continue;
    }
    if (tokens.size() != 3) throw parse_error(line_no, "expected 'i j value'");
    const auto i = detail::parse_number<std::size_t>(tokens[0], line_no, "index");
    const auto j = detail::parse_number<std::size_t>(tokens[1], line_no, "index");
    const auto v = detail::parse_number<double>(tokens[2], line_no, "value");
    if (i >= n || j >= n) throw parse_error(line_no, "index out of range");
    if (i > j) throw parse_error(line_no, "entries must satisfy i <= j");
    if (!std::isfinite(v)) throw parse_error(line_no, "value is not finite");
    if (!seen.emplace(i, j).second) throw parse_error(line_no, "duplicate entry");
    q(i, j) = q(j, i) = v;
  }
  if (!have_header) throw parse_error(line_no, "missing header 'qubo <n>'");
  return QuboProblem(std::move(q));
}

inline QuboProblem load_qubo_file(const std::string& path) {
  return parse_qubo_file(detail::read_file(path));
}

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc{} ? ptr : buf.data());
}

// Upper triangle, diagonal always written, zero off-diagonals skipped.
inline std::string format_qubo_file(const QuboProblem& problem) {
  const auto& q = problem.matrix();
  std::string out = "qubo " + std::to_string(q.size()) + "\n";
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i; j < q.size(); ++j) {
      if (i != j && q(i, j) == 0.0) continue;
      out += std::to_string(i) + " " + std::to_string(j) + " " + format_double(q(i, j)) + "\n";
    }
  }
  return out;
}

inline nlohmann::json to_json(const SpinVector& z) {
  auto arr = nlohmann::json::array();
  for (auto s : z) arr.push_back(static_cast<int>(s));
  return arr;
}

inline nlohmann::json to_json(const QalsParams& p) {
  return {{"p_delta", p.p_delta}, {"eta", p.eta},   {"q", p.q},         {"N", p.N},
          {"lambda0", p.lambda0}, {"k", p.k},       {"i_max", p.i_max}, {"N_max", p.N_max},
          {"d_min", p.d_min},     {"seed", p.seed}};
}

inline nlohmann::json to_json(const TraceRecord& r) {
  const double t = r.temperature();
  return {{"i", r.iteration},
          {"p", r.p},
          {"temperature", std::isfinite(t) ? nlohmann::json(t) : nlohmann::json(nullptr)},
          {"lambda", r.lambda},
          {"f_prime", r.f_prime ? nlohmann::json(*r.f_prime) : nlohmann::json(nullptr)},
          {"outcome", to_string(r.outcome)},
          {"e", r.e},
          {"d", r.d},
          {"f_star", r.f_star},
          {"f_best", r.f_best},
          {"tabu_count", r.tabu_count}};
}

// Context echoed next to a solve result.
struct SolveContext {
  std::string sampler;
  std::string graph;
  std::string problem;
};

inline nlohmann::json to_json(const SolveReport& report, const QalsParams& params,
                              const SolveContext& context = {}) {
  nlohmann::json doc = {{"n", report.z_best.size()},
                        {"problem", context.problem},
                        {"sampler", context.sampler},
                        {"graph", context.graph},
                        {"params", to_json(params)},
                        {"z_best", to_json(report.z_best)},
                        {"f_best", report.f_best},
                        {"z_returned", to_json(report.z_returned)},
                        {"f_returned", report.f_returned},
                        {"iterations", report.iterations},
                        {"evaluations", report.evaluations},
                        {"best_iteration", report.best_iteration},
                        {"termination", to_string(report.termination)},
                        {"final_p", report.final_p},
                        {"final_lambda", report.final_lambda},
                        {"tabu_count", report.tabu.count()}};
  if (!report.trace.empty()) {
    auto trace = nlohmann::json::array();
    for (const auto& r : report.trace) trace.push_back(to_json(r));
    doc["trace"] = std::move(trace);
  }
  return doc;
}

namespace detail {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json doc = {{"n", spec.problem ? spec.problem->size() : spec.n},
                        {"density", spec.density},
                        {"coeff_range", {spec.coeff_lo, spec.coeff_hi}},
                        {"replicas", spec.replicas},
                        {"seed", spec.params.seed},
                        {"sampler", to_string(spec.sampler)},
                        {"graph", to_string(spec.graph)},
                        {"params", to_json(spec.params)},
                        {"success_statistics", spec.success_statistics}};
  if (spec.sampler.kind == "sa") {
    doc["sa_schedule"] = {{"sweeps", spec.sampler.schedule.sweeps},
                          {"beta_start", spec.sampler.schedule.beta_start},
                          {"beta_end", spec.sampler.schedule.beta_end}};
  }
  if (spec.problem) doc["problem"] = spec.problem_path;
  return doc;
}

// Timing is the only nondeterministic content; leave it out to compare
// reports across runs.
inline nlohmann::json to_json(const ExperimentReport& report, bool include_timing = true) {
  auto replicas = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json row = {{"replica", r.replica},
                          {"seed", r.seed},
                          {"f_best", r.f_best},
                          {"oracle_min", detail::optional_json(r.oracle_min)},
                          {"success", r.success},
                          {"iters_to_opt", detail::optional_json(r.iters_to_opt)},
                          {"iterations", r.iterations},
                          {"evaluations", r.evaluations}};
    if (include_timing) row["millis"] = r.millis;
    replicas.push_back(std::move(row));
  }
  const auto& a = report.aggregates;
  nlohmann::json aggregates = {{"replicas", a.replicas},
                               {"successes", a.successes},
                               {"success_rate", a.success_rate},
                               {"mean_f_best", a.mean_f_best},
                               {"iters_to_opt",
                                {{"min", detail::optional_json(a.iters_min)},
                                 {"median", detail::optional_json(a.iters_median)},
                                 {"p90", detail::optional_json(a.iters_p90)},
                                 {"max", detail::optional_json(a.iters_max)}}}};
  if (include_timing) aggregates["total_millis"] = a.total_millis;
  return {{"spec", to_json(report.spec)}, {"replicas", std::move(replicas)},
          {"aggregates", std::move(aggregates)}};
}

// replica,seed,f_best,success,iters_to_opt,millis
inline std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "replica,seed,f_best,success,iters_to_opt,millis\n";
  for (const auto& r : report.records) {
    out << r.replica << ',' << r.seed << ',' << format_double(r.f_best) << ','
        << (r.success ? 1 : 0) << ',';
    if (r.iters_to_opt) out << *r.iters_to_opt;
    out << ',' << format_double(r.millis) << '\n';
  }
  return out.str();
}

// Flat "key = value" lines; '#' starts a comment. A relative `problem`
// path is resolved against `base_dir`.
inline ExperimentSpec parse_experiment_config(std::string_view text,
                                              const std::filesystem::path& base_dir = {}) {
  ExperimentSpec spec;
  std::string sampler_text = "sa";
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::set<std::string> seen;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto content = detail::strip_comment(raw);
    if (detail::split_tokens(content).empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) throw parse_error(line_no, "expected 'key = value'");
    const auto key_tokens = detail::split_tokens(content.substr(0, eq));
    const auto value_tokens = detail::split_tokens(content.substr(eq + 1));
    if (key_tokens.size() != 1 || value_tokens.size() != 1) throw parse_error(line_no, "expected 'key = value'");
    const std::string key(key_tokens[0]);
    const auto value = value_tokens[0];
    if (!seen.insert(key).second) throw parse_error(line_no, "duplicate key '" + key + "'");

    const auto as_size = [&] { return detail::parse_number<std::size_t>(value, line_no, key.c_str()); };
    const auto as_double = [&] { return detail::parse_number<double>(value, line_no, key.c_str()); };

    if (key == "n") spec.n = as_size();
    else if (key == "density") spec.density = as_double();
    else if (key == "range") {
      const auto colon = value.find(':', 1);
      if (colon == std::string_view::npos) throw parse_error(line_no, "range must be LO:HI");
      spec.coeff_lo = detail::parse_number<double>(value.substr(0, colon), line_no, "range");
      spec.coeff_hi = detail::parse_number<double>(value.substr(colon + 1), line_no, "range");
    }
    else if (key == "replicas") spec.replicas = as_size();
    else if (key == "seed") spec.params.seed = detail::parse_number<std::uint64_t>(value, line_no, "seed");
    else if (key == "sampler") sampler_text = std::string(value);
    else if (key == "graph") {
      try {
        spec.graph = parse_graph_selector(std::string(value));
      } catch (const validation_error& e) {
        throw parse_error(line_no, e.what());
      }
    }
    else if (key == "k") spec.params.k = as_size();
    else if (key == "p_delta") spec.params.p_delta = as_double();
    else if (key == "eta") spec.params.eta = as_double();
    else if (key == "q") spec.params.q = as_double();
    else if (key == "N") spec.params.N = as_size();
    else if (key == "lambda0") spec.params.lambda0 = as_double();
    else if (key == "i_max") spec.params.i_max = as_size();
    else if (key == "n_max") spec.params.N_max = as_size();
    else if (key == "d_min") spec.params.d_min = as_size();
    else if (key == "sweeps") spec.sampler.schedule.sweeps = as_size();
    else if (key == "beta_start") spec.sampler.schedule.beta_start = as_double();
    else if (key == "beta_end") spec.sampler.schedule.beta_end = as_double();
    else if (key == "threads") spec.threads = as_size();
    else if (key == "success_statistics") {
      if (value == "true") spec.success_statistics = true;
      else if (value == "false") spec.success_statistics = false;
      else throw parse_error(line_no, "success_statistics must be true or false");
    }
    else if (key == "problem") {
      std::filesystem::path path(std::string{value});
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      spec.problem_path = path.string();
      spec.problem = load_qubo_file(spec.problem_path);
    }
    else throw parse_error(line_no, "unknown key '" + key + "'");
  }
  try {
    const auto schedule = spec.sampler.schedule;
    spec.sampler = parse_sampler_selector(sampler_text, schedule);
  } catch (const validation_error& e) {
    throw parse_error(line_no, e.what());
  }
  return spec;
}

}  // namespace qals
