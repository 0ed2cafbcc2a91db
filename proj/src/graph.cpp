#include "beepsim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace beepsim {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : adjacency_(n) {
  for (auto& e : edges) {
    if (e.u == e.v) {
      throw GraphError("self-loop at vertex " + std::to_string(e.u));
    }
    if (e.u >= n || e.v >= n) {
      throw GraphError("edge endpoint out of range: " + std::to_string(e.u) +
                       " " + std::to_string(e.v) + " with n=" +
                       std::to_string(n));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end());
      dup != edges.end()) {
    throw GraphError("duplicate edge " + std::to_string(dup->u) + " " +
                     std::to_string(dup->v));
  }
  for (const auto& e : edges) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
  edges_ = std::move(edges);
}

std::span<const Vertex> Graph::neighbours(Vertex v) const {
  if (v >= adjacency_.size()) {
    throw GraphError("vertex out of range: " + std::to_string(v));
  }
  return adjacency_[v];
}

bool Graph::adjacent(Vertex a, Vertex b) const {
  auto nb = neighbours(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

bool Graph::connected() const {
  if (order() <= 1) return true;
  std::vector<bool> seen(order(), false);
  std::vector<Vertex> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == order();
}

GraphMetrics metrics(const Graph& g) {
  GraphMetrics m;
  m.n = g.order();
  m.degrees.reserve(m.n);
  for (Vertex v = 0; v < m.n; ++v) {
    m.degrees.push_back(g.degree(v));
    m.max_degree = std::max(m.max_degree, m.degrees.back());
  }
  return m;
}

Graph square_graph(const Graph& g) {
  const auto n = g.order();
  std::vector<Edge> edges;
  std::vector<Vertex> mark(n, static_cast<Vertex>(n));
  for (Vertex v = 0; v < n; ++v) {
    mark[v] = v;
    for (Vertex w : g.neighbours(v)) {
      if (mark[w] != v) {
        mark[w] = v;
        if (v < w) edges.push_back({v, w});
      }
      for (Vertex x : g.neighbours(w)) {
        if (mark[x] != v) {
          mark[x] = v;
          if (v < x) edges.push_back({v, x});
        }
      }
    }
  }
  return Graph(n, std::move(edges));
}

Graph ring_graph(std::size_t n) {
  if (n < 3) throw GraphError("ring needs n >= 3");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n)});
  }
  return Graph(n, std::move(edges));
}

Graph path_graph(std::size_t n) {
  if (n < 1) throw GraphError("path needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(i + 1)});
  }
  return Graph(n, std::move(edges));
}

Graph complete_graph(std::size_t n) {
  if (n < 1) throw GraphError("complete needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
    }
  }
  return Graph(n, std::move(edges));
}

Graph star_graph(std::size_t n) {
  if (n < 2) throw GraphError("star needs n >= 2");
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    edges.push_back({0, static_cast<Vertex>(i)});
  }
  return Graph(n, std::move(edges));
}

Graph gnp_graph(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw GraphError("gnp needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw GraphError("gnp needs 0 <= p <= 1");
  std::mt19937_64 gen(seed);
  for (int attempt = 0; attempt < kGnpRetryCap; ++attempt) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // 53-bit uniform in [0,1); mt19937_64 output is fully specified.
        double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        if (u < p) {
          edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
        }
      }
    }
    Graph g(n, std::move(edges));
    if (g.connected()) return g;
  }
  throw GraphError("gnp:" + std::to_string(n) + ": no connected sample after " +
                   std::to_string(kGnpRetryCap) + " attempts");
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw GraphError("malformed " + std::string(what) + ": '" +
                     std::string(text) + "'");
  }
  return value;
}

// from_chars for double is not available in libstdc++ 11.
double parse_probability(std::string_view text) {
  std::string buf(text);
  std::istringstream in(buf);
  in.imbue(std::locale::classic());
  double p;
  in >> p;
  if (!in || !in.eof()) {
    throw GraphError("malformed probability: '" + buf + "'");
  }
  return p;
}

}  // namespace

Graph build_graph(std::string_view descriptor) {
  auto colon = descriptor.find(':');
  if (colon == std::string_view::npos) {
    throw GraphError("malformed graph descriptor: '" + std::string(descriptor) +
                     "'");
  }
  auto kind = descriptor.substr(0, colon);
  auto rest = descriptor.substr(colon + 1);
  if (kind == "file") {
    if (rest.empty()) throw GraphError("file descriptor needs a path");
    return read_edge_list_file(std::string(rest));
  }
  auto args = split(rest, ':');
  if (kind == "gnp") {
    if (args.size() != 3) {
      throw GraphError("gnp descriptor is gnp:n:p:seed");
    }
    return gnp_graph(parse_number<std::size_t>(args[0], "vertex count"),
                     parse_probability(args[1]),
                     parse_number<std::uint64_t>(args[2], "seed"));
  }
  if (args.size() != 1) {
    throw GraphError("malformed graph descriptor: '" + std::string(descriptor) +
                     "'");
  }
  auto n = parse_number<std::size_t>(args[0], "vertex count");
  if (kind == "ring") return ring_graph(n);
  if (kind == "path") return path_graph(n);
  if (kind == "complete") return complete_graph(n);
  if (kind == "star") return star_graph(n);
  throw GraphError("unknown graph kind: '" + std::string(kind) + "'");
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  auto parse_pair = [&](const char* what) {
    std::istringstream ls(line);
    long long a = -1, b = -1;
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra)) {
      throw GraphError(std::string("malformed ") + what + " line: '" + line +
                       "'");
    }
    return std::pair{a, b};
  };

  if (!next_line()) throw GraphError("edge list: missing header");
  auto [n, m] = parse_pair("header");
  if (n < 0 || m < 0) throw GraphError("edge list: negative header value");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_line()) {
      throw GraphError("edge list: expected " + std::to_string(m) +
                       " edges, found " + std::to_string(i));
    }
    auto [u, v] = parse_pair("edge");
    if (u < 0 || !(u < v) || v >= n) {
      throw GraphError("edge list: need 0 <= u < v < n, got '" + line + "'");
    }
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  if (next_line()) throw GraphError("edge list: trailing data '" + line + "'");
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list: " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace beepsim
