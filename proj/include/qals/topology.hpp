#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qals/core.hpp"
#include "qals/errors.hpp"

namespace qals {

inline TopologyGraph complete_graph(std::size_t n) {
  if (n == 0) throw validation_error("complete_graph: n must be at least 1");
  std::vector<TopologyGraph::Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return TopologyGraph(n, std::move(edges));
}

// m x m grid of K4,4 cells. Cell (r, c) owns qubits 8 (r m + c) + t with
// t in 0..3 on the left shore and 4..7 on the right shore. Left qubits
// couple vertically, right qubits horizontally.
struct ChimeraSpec {
  std::size_t m = 1;
};

inline TopologyGraph chimera_graph(ChimeraSpec spec) {
  const std::size_t m = spec.m;
  if (m == 0) throw validation_error("chimera_graph: m must be at least 1");
  const auto index = [m](std::size_t r, std::size_t c, std::size_t t) {
    return 8 * (r * m + c) + t;
  };
  std::vector<TopologyGraph::Edge> edges;
  edges.reserve(16 * m * m + 8 * m * (m - 1));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 4; b < 8; ++b) edges.emplace_back(index(r, c, a), index(r, c, b));
      if (r + 1 < m)
        for (std::size_t t = 0; t < 4; ++t) edges.emplace_back(index(r, c, t), index(r + 1, c, t));
      if (c + 1 < m)
        for (std::size_t t = 4; t < 8; ++t) edges.emplace_back(index(r, c, t), index(r, c + 1, t));
    }
  }
  return TopologyGraph(8 * m * m, std::move(edges));
}

inline TopologyGraph graph_from_edge_list(std::size_t n, std::vector<TopologyGraph::Edge> pairs) {
  if (n == 0) throw validation_error("graph_from_edge_list: n must be at least 1");
  return TopologyGraph(n, std::move(pairs));
}

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

inline std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

template <class T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw parse_error(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// Text format: '#' starts a comment; first content line "n <count>";
// then one "i j" pair per line, 0-based.
inline TopologyGraph parse_edge_list(std::string_view text) {
  std::size_t n = 0;
  bool have_header = false;
  std::vector<TopologyGraph::Edge> pairs;
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
      if (tokens.size() != 2 || tokens[0] != "n") throw parse_error(line_no, "expected header 'n <count>'");
      n = detail::parse_number<std::size_t>(tokens[1], line_no, "node count");
      if (n == 0) throw parse_error(line_no, "node count must be at least 1");
      have_header = true;
      continue;
    }
    if (tokens.size() != 2) throw parse_error(line_no, "expected 'i j'");
    const auto i = detail::parse_number<std::size_t>(tokens[0], line_no, "node index");
    const auto j = detail::parse_number<std::size_t>(tokens[1], line_no, "node index");
    if (i >= n || j >= n) throw parse_error(line_no, "node index out of range");
    if (i == j) throw parse_error(line_no, "self-loop");
    pairs.emplace_back(i, j);
  }
  if (!have_header) throw parse_error(line_no, "missing header 'n <count>'");
  return graph_from_edge_list(n, std::move(pairs));
}

inline TopologyGraph load_edge_list(const std::string& path) {
  return parse_edge_list(detail::read_file(path));
}

}  // namespace qals
