#pragma once

// Plain-text graph and labeling formats.
//
//   graph:    "n m\n" followed by m lines "u v\n", 0 <= u < v < n, sorted.
//   labeling: n lines, each "+1" or "-1".

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sbm/core.hpp"

namespace sbm {

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // A final LF terminates the last line rather than opening an empty one.
  return lines;
}

// Parses exactly `count` space-separated nonnegative integers.
inline bool parse_ints(std::string_view line, std::span<long long> out) {
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k > 0) {
      if (p == end || *p != ' ') return false;
      ++p;
    }
    auto [next, ec] = std::from_chars(p, end, out[k]);
    if (ec != std::errc{} || next == p) return false;
    p = next;
  }
  return p == end;
}

}  // namespace detail

inline std::string write_graph(const Graph& g) {
  std::string out = std::to_string(g.n()) + ' ' + std::to_string(g.edge_count()) + '\n';
  for (const auto& [u, v] : g.edges()) {
    out += std::to_string(u);
    out += ' ';
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

inline Graph parse_graph(std::string_view text) {
  const auto lines = detail::split_lines(text);
  require(!lines.empty(), "parse_graph: missing header");
  long long header[2];
  require(detail::parse_ints(lines[0], header), "parse_graph: malformed header '" +
                                                     std::string(lines[0]) + "'");
  const long long n = header[0], m = header[1];
  require(n >= 1 && n <= (1LL << 30), "parse_graph: vertex count out of range");
  require(m >= 0 && m <= n * (n - 1) / 2, "parse_graph: edge count exceeds n(n-1)/2");
  require(lines.size() == static_cast<std::size_t>(m) + 1,
          "parse_graph: header announces " + std::to_string(m) + " edges, found " +
              std::to_string(lines.size() - 1) + " lines");

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (std::size_t k = 1; k < lines.size(); ++k) {
    long long uv[2];
    require(detail::parse_ints(lines[k], uv),
            "parse_graph: malformed edge line " + std::to_string(k + 1));
    require(uv[0] != uv[1], "parse_graph: self-loop on line " + std::to_string(k + 1));
    require(uv[0] < n && uv[1] < n,
            "parse_graph: vertex out of range on line " + std::to_string(k + 1));
    require(uv[0] < uv[1], "parse_graph: edge not in u < v order on line " + std::to_string(k + 1));
    edges.emplace_back(static_cast<Vertex>(uv[0]), static_cast<Vertex>(uv[1]));
  }
  return Graph(static_cast<int>(n), std::move(edges));
}

inline std::string write_labeling(const Labeling& x) {
  std::string out;
  for (int v : x.values()) out += v > 0 ? "+1\n" : "-1\n";
  return out;
}

inline Labeling parse_labeling(std::string_view text) {
  std::vector<int> values;
  for (auto line : detail::split_lines(text)) {
    if (line == "+1" || line == "1")
      values.push_back(1);
    else if (line == "-1")
      values.push_back(-1);
    else
      throw ValidationError("parse_labeling: bad entry '" + std::string(line) + "'");
  }
  require(!values.empty(), "parse_labeling: empty labeling");
  return Labeling(std::move(values));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write '" + path + "'");
  out << contents;
}

}  // namespace sbm
