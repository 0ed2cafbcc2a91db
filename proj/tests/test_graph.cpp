#include <doctest.h>

#include <random>
#include <sstream>

#include "beepsim/graph.hpp"

using namespace beepsim;

namespace {

// All-pairs BFS distances; -1 for unreachable.
std::vector<std::vector<int>> bfs_distances(const Graph& g) {
  const auto n = g.order();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (Vertex s = 0; s < n; ++s) {
    dist[s][s] = 0;
    std::vector<Vertex> queue{s};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex x = queue[head];
      for (Vertex y : g.neighbours(x)) {
        if (dist[s][y] < 0) {
          dist[s][y] = dist[s][x] + 1;
          queue.push_back(y);
        }
      }
    }
  }
  return dist;
}

Graph random_graph(std::size_t n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i + 1; j < n; ++j) {
      if (coin(gen)) edges.push_back({i, j});
    }
  }
  return Graph(n, edges);
}

}  // namespace

TEST_CASE("generators") {
  auto ring = build_graph("ring:5");
  CHECK(ring.order() == 5);
  CHECK(ring.edges() == std::vector<Edge>{{0, 1}, {0, 4}, {1, 2}, {2, 3}, {3, 4}});

  auto star = build_graph("star:4");
  CHECK(star.order() == 4);
  CHECK(star.degree(0) == 3);
  CHECK(metrics(star).max_degree == 3);

  auto single = build_graph("path:1");
  CHECK(single.order() == 1);
  CHECK(single.size() == 0);

  CHECK(build_graph("complete:4").size() == 6);
  CHECK(build_graph("path:4").size() == 3);
}

TEST_CASE("generator preconditions and malformed descriptors") {
  CHECK_THROWS_AS(build_graph("ring:2"), GraphError);
  CHECK_THROWS_AS(build_graph("path:0"), GraphError);
  CHECK_THROWS_AS(build_graph("star:1"), GraphError);
  CHECK_THROWS_AS(build_graph("complete:0"), GraphError);
  CHECK_THROWS_AS(build_graph("ring"), GraphError);
  CHECK_THROWS_AS(build_graph("ring:x"), GraphError);
  CHECK_THROWS_AS(build_graph("ring:5:1"), GraphError);
  CHECK_THROWS_AS(build_graph("hexagon:5"), GraphError);
  CHECK_THROWS_AS(build_graph("gnp:8:0.5"), GraphError);
  CHECK_THROWS_AS(build_graph("gnp:8:1.5:1"), GraphError);
  CHECK_THROWS_AS(build_graph("file:/nonexistent/edges.txt"), GraphError);
  // Two isolated vertices never connect.
  CHECK_THROWS_AS(build_graph("gnp:2:0:1"), GraphError);
}

TEST_CASE("gnp samples are connected and reproducible") {
  auto a = build_graph("gnp:8:0.5:7");
  auto b = build_graph("gnp:8:0.5:7");
  CHECK(a == b);
  CHECK(a.connected());
  auto m = metrics(a);
  std::size_t sum = 0;
  for (auto d : m.degrees) sum += d;
  CHECK(sum == 2 * a.size());

  auto big = build_graph("gnp:64:0.1:3");
  CHECK(big.connected());
  CHECK(big.order() == 64);
}

TEST_CASE("graph rejects bad edges") {
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), GraphError);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), GraphError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), GraphError);
  Graph g(3, {{2, 0}});
  CHECK(g.edges() == std::vector<Edge>{{0, 2}});
  CHECK(g.adjacent(2, 0));
}

TEST_CASE("metrics") {
  auto star = metrics(build_graph("star:4"));
  CHECK(star.n == 4);
  CHECK(star.max_degree == 3);
  CHECK(star.degrees == std::vector<std::size_t>{3, 1, 1, 1});

  auto ring = metrics(build_graph("ring:6"));
  CHECK(ring.max_degree == 2);
  for (auto d : ring.degrees) CHECK(d == 2);
}

TEST_CASE("square graph examples") {
  CHECK(square_graph(build_graph("path:3")) == build_graph("complete:3"));
  CHECK(square_graph(build_graph("complete:1")).size() == 0);
  CHECK(square_graph(build_graph("ring:5")) == build_graph("complete:5"));
  for (std::size_t n = 1; n <= 6; ++n) {
    auto k = complete_graph(n);
    CHECK(square_graph(k) == k);
  }
}

TEST_CASE("square graph agrees with BFS distances on random graphs") {
  std::mt19937_64 gen(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 12;
    const double p = (gen() % 100) / 100.0;
    auto g = random_graph(n, p, gen);
    auto sq = square_graph(g);
    auto dist = bfs_distances(g);
    for (Vertex v = 0; v < n; ++v) {
      for (Vertex w = 0; w < n; ++w) {
        if (v == w) continue;
        const bool expected = dist[v][w] == 1 || dist[v][w] == 2;
        CHECK(sq.adjacent(v, w) == expected);
        if (g.adjacent(v, w)) CHECK(sq.adjacent(v, w));
      }
    }
    auto m = metrics(g);
    for (Vertex v = 0; v < n; ++v) CHECK(m.degrees[v] == g.neighbours(v).size());
  }
}

TEST_CASE("edge list round trip and validation") {
  auto g = build_graph("gnp:10:0.4:2");
  std::stringstream buf;
  write_edge_list(buf, g);
  CHECK(read_edge_list(buf) == g);

  std::istringstream commented("# a comment\n3 2\n0 1\n# another\n1 2\n");
  CHECK(read_edge_list(commented) == build_graph("path:3"));

  auto bad = [](const char* text) {
    std::istringstream in(text);
    return read_edge_list(in);
  };
  CHECK_THROWS_AS(bad(""), GraphError);
  CHECK_THROWS_AS(bad("3 2\n0 1\n"), GraphError);       // too few edges
  CHECK_THROWS_AS(bad("3 1\n1 0\n"), GraphError);       // u > v
  CHECK_THROWS_AS(bad("3 1\n0 3\n"), GraphError);       // v >= n
  CHECK_THROWS_AS(bad("3 1\n0 1 2\n"), GraphError);     // extra token
  CHECK_THROWS_AS(bad("3 2\n0 1\n0 1\n"), GraphError);  // duplicate
  CHECK_THROWS_AS(bad("3 1\n0 1\n1 2\n"), GraphError);  // trailing data
}
