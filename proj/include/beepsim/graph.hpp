#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace beepsim {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u;
  Vertex v;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undirected simple graph on vertices 0..n-1. Immutable once built.
// Edges are stored normalised (u < v) and sorted.
class Graph {
 public:
  Graph() = default;

  // Throws GraphError on self-loops, duplicate edges or out-of-range endpoints.
  // Endpoint order within an edge is irrelevant.
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t order() const { return adjacency_.size(); }
  std::size_t size() const { return edges_.size(); }

  std::span<const Vertex> neighbours(Vertex v) const;
  std::size_t degree(Vertex v) const { return neighbours(v).size(); }
  bool adjacent(Vertex a, Vertex b) const;
  const std::vector<Edge>& edges() const { return edges_; }

  bool connected() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.order() == b.order() && a.edges_ == b.edges_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

struct GraphMetrics {
  std::size_t n = 0;
  std::size_t max_degree = 0;
  std::vector<std::size_t> degrees;
};

GraphMetrics metrics(const Graph& g);

// Edges between every pair at distance 1 or 2 in g.
Graph square_graph(const Graph& g);

// Generator descriptors:
//   ring:n  path:n  complete:n  star:n  gnp:n:p:seed  file:path
// gnp resamples until connected (at most 1000 attempts).
Graph build_graph(std::string_view descriptor);

Graph ring_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph star_graph(std::size_t n);
Graph gnp_graph(std::size_t n, double p, std::uint64_t seed);

inline constexpr int kGnpRetryCap = 1000;

// Edge-list format: "n m" header, then m lines "u v" with u < v < n.
// Lines starting with '#' are comments.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace beepsim
