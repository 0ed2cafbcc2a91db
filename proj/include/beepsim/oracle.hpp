#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "beepsim/graph.hpp"

namespace beepsim::oracle {

// A violating edge (u, v), or a vertex with (claimed, actual) values.
struct Witness {
  Vertex u = 0;
  Vertex v = 0;
  std::int64_t claimed = 0;
  std::int64_t actual = 0;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct Verdict {
  std::vector<Witness> witnesses;  // exhaustive, not first-failure

  bool ok() const { return witnesses.empty(); }
};

// Throws std::invalid_argument when colours.size() != n.
Verdict is_proper_colouring(const Graph& g, std::span<const std::int64_t> colours);
Verdict is_two_hop_colouring(const Graph& g, std::span<const std::int64_t> colours);
Verdict check_degrees(const Graph& g, std::span<const std::int64_t> claimed);

// Witnesses are vertices whose flag disagrees with `truth`.
Verdict check_flags(std::span<const std::int64_t> claimed, const std::vector<bool>& truth);

nlohmann::json to_json(const Verdict& v);

}  // namespace beepsim::oracle
