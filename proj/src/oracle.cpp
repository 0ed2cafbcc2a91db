#include "beepsim/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace beepsim::oracle {

namespace {

void require_complete(const Graph& g, std::size_t got) {
  if (got != g.order()) {
    throw std::invalid_argument("expected a value for each of " +
                                std::to_string(g.order()) + " vertices, got " +
                                std::to_string(got));
  }
}

}  // namespace

Verdict is_proper_colouring(const Graph& g, std::span<const std::int64_t> colours) {
  require_complete(g, colours.size());
  Verdict verdict;
  for (const auto& e : g.edges()) {
    if (colours[e.u] == colours[e.v]) {
      verdict.witnesses.push_back({e.u, e.v, colours[e.u], colours[e.v]});
    }
  }
  return verdict;
}

Verdict is_two_hop_colouring(const Graph& g, std::span<const std::int64_t> colours) {
  require_complete(g, colours.size());
  // Pairs at distance 1 or 2, by plain BFS-depth-2 enumeration from each vertex.
  Verdict verdict;
  const auto n = static_cast<Vertex>(g.order());
  std::vector<int> dist(n, -1);
  for (Vertex s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::vector<Vertex> frontier{s};
    for (int depth = 1; depth <= 2; ++depth) {
      std::vector<Vertex> next;
      for (Vertex x : frontier) {
        for (Vertex y : g.neighbours(x)) {
          if (dist[y] < 0) {
            dist[y] = depth;
            next.push_back(y);
          }
        }
      }
      frontier = std::move(next);
    }
    for (Vertex t = s + 1; t < n; ++t) {
      if (dist[t] > 0 && colours[s] == colours[t]) {
        verdict.witnesses.push_back({s, t, colours[s], colours[t]});
      }
    }
  }
  return verdict;
}

Verdict check_degrees(const Graph& g, std::span<const std::int64_t> claimed) {
  require_complete(g, claimed.size());
  std::vector<std::int64_t> actual(g.order(), 0);
  for (const auto& e : g.edges()) {
    ++actual[e.u];
    ++actual[e.v];
  }
  Verdict verdict;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (claimed[v] != actual[v]) verdict.witnesses.push_back({v, v, claimed[v], actual[v]});
  }
  return verdict;
}

Verdict check_flags(std::span<const std::int64_t> claimed, const std::vector<bool>& truth) {
  if (claimed.size() != truth.size()) {
    throw std::invalid_argument("flag vectors differ in length");
  }
  Verdict verdict;
  for (std::size_t v = 0; v < claimed.size(); ++v) {
    const std::int64_t expected = truth[v] ? 1 : 0;
    if (claimed[v] != expected) {
      verdict.witnesses.push_back(
          {static_cast<Vertex>(v), static_cast<Vertex>(v), claimed[v], expected});
    }
  }
  return verdict;
}

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& x : v.witnesses) {
    w.push_back({{"u", x.u}, {"v", x.v}, {"claimed", x.claimed}, {"actual", x.actual}});
  }
  return {{"ok", v.ok()}, {"witnesses", std::move(w)}};
}

}  // namespace beepsim::oracle
