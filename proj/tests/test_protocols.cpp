#include <doctest.h>

#include <algorithm>
#include <set>

#include "beepsim/oracle.hpp"
#include "beepsim/protocols.hpp"

using namespace beepsim;

namespace {

RunOutput traced(const Graph& g, const Protocol& p, std::uint64_t seed,
                 std::vector<VertexInput> inputs = {}, SlotObserver observer = {}) {
  RunOptions opt;
  opt.seed = seed;
  opt.slot_budget = p.default_slot_budget(metrics(g));
  opt.record_trace = true;
  opt.inputs = std::move(inputs);
  opt.observer = std::move(observer);
  return run(g, p, p.required_model(), opt);
}

}  // namespace

TEST_CASE("k policies") {
  CHECK(k_for(KPolicy::PerVertex, 1, 0.05) == 6);
  CHECK(k_for(KPolicy::WhpLocal, 256, 0.5) == 17);
  CHECK(k_for(KPolicy::PerGraph, 8, 0.5) == 5);
  CHECK_THROWS_AS(k_for(KPolicy::PerVertex, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CollisionDetection(0), std::invalid_argument);
}

TEST_CASE("collision detection: a lone wisher never flags") {
  auto g = build_graph("star:6");
  std::vector<Vertex> hub{0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto r = detect_collision_bl(g, hub, 4, seed);
    CHECK(r.result.outcome == Outcome::Terminated);
    CHECK(r.result.slots_used == 8);
    for (bool c : r.collision) CHECK_FALSE(c);
  }
}

TEST_CASE("collision detection with k = 1 flags exactly when bits differ") {
  auto g = build_graph("path:3");
  CollisionDetection p(1);
  std::vector<VertexInput> in(3);
  in[0].wishes_to_beep = in[2].wishes_to_beep = true;
  int flagged = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto out = traced(g, p, seed, in);
    const auto& first = out.trace->records.at(0).intents;
    const bool differ = first[0] != first[2];
    CHECK((out.result.payload[1] != 0) == differ);
    flagged += differ;
  }
  CHECK(flagged > 50);
  CHECK(flagged < 150);
}

TEST_CASE("collision detection is sound against ground truth") {
  // Any flag raised must correspond to a real collision.
  for (const char* desc : {"ring:9", "star:7", "gnp:16:0.3:2", "complete:4"}) {
    auto g = build_graph(desc);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      std::vector<Vertex> wishers;
      std::vector<SlotIntent> as_intents(g.order(), SlotIntent::Listen);
      for (Vertex v = 0; v < g.order(); ++v) {
        if (mix64(seed, v) % 3 == 0) {
          wishers.push_back(v);
          as_intents[v] = SlotIntent::Beep;
        }
      }
      auto r = detect_collision_bl(g, wishers, 8, seed);
      for (Vertex v = 0; v < g.order(); ++v) {
        if (r.collision[v]) CHECK(collision_ground_truth(g, as_intents, v).any());
      }
    }
  }
}

TEST_CASE("colouring: single vertex and a single edge") {
  auto single = build_graph("path:1");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = colour_bcdl(single, seed);
    CHECK(r.outcome == Outcome::Terminated);
    CHECK(r.payload[0] == static_cast<std::int64_t>(r.phases_used));
  }
  auto edge = build_graph("complete:2");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto r = colour_bcdl(edge, seed);
    CHECK(r.outcome == Outcome::Terminated);
    CHECK(r.payload[0] != r.payload[1]);
  }
}

TEST_CASE("colouring invariants along the run") {
  auto g = build_graph("gnp:24:0.2:4");
  Colouring p;
  std::vector<unsigned> last_exp(g.order(), 1);
  std::vector<int> last_state(g.order(), 0);
  auto observer = [&](const SlotRecord&, std::span<const VertexAutomaton* const> autos) {
    for (std::size_t v = 0; v < autos.size(); ++v) {
      const auto& cv = static_cast<const ColouringVertex&>(*autos[v]);
      const int st = static_cast<int>(cv.state());
      CHECK(st >= last_state[v]);
      const unsigned e = cv.probability().exponent;
      CHECK(e >= 1);
      if (cv.state() == ColouringVertex::State::Active) {
        CHECK((e + 1 == last_exp[v] || e == last_exp[v] + 1 || (e == 1 && last_exp[v] == 1)));
      }
      last_exp[v] = e;
      last_state[v] = st;
    }
  };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::fill(last_exp.begin(), last_exp.end(), 1);
    std::fill(last_state.begin(), last_state.end(), 0);
    auto out = traced(g, p, seed, {}, observer);
    CHECK(oracle::is_proper_colouring(g, out.result.payload).ok());
  }
}

TEST_CASE("colouring with local termination") {
  auto g = build_graph("ring:12");
  Colouring p(true);
  CHECK(p.slots_per_phase() == 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto out = traced(g, p, seed);
    CHECK(out.result.outcome == Outcome::Terminated);
    CHECK(oracle::is_proper_colouring(g, out.result.payload).ok());
  }
}

TEST_CASE("bounded colouring examples") {
  auto k3 = build_graph("complete:3");
  for (auto variant : {PaletteVariant::Basic, PaletteVariant::Modified}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto r = colour_bcdl_bounded(k3, 2, variant, seed);
      REQUIRE(r.outcome == Outcome::Terminated);
      auto sorted = r.payload;
      std::sort(sorted.begin(), sorted.end());
      CHECK(sorted == std::vector<std::int64_t>{0, 1, 2});
    }
  }
  auto r = colour_bcdl_bounded(build_graph("path:1"), 0, PaletteVariant::Basic, 1);
  CHECK(r.outcome == Outcome::Terminated);
  CHECK(r.payload == std::vector<std::int64_t>{0});
}

TEST_CASE("bounded colouring palette invariants") {
  auto g = build_graph("gnp:20:0.3:8");
  const std::size_t K = metrics(g).max_degree;
  for (auto variant : {PaletteVariant::Basic, PaletteVariant::Modified}) {
    BoundedColouring p(K, variant);
    std::vector<std::size_t> last_size(g.order(), K + 1);
    auto observer = [&](const SlotRecord& rec, std::span<const VertexAutomaton* const> autos) {
      for (std::size_t v = 0; v < autos.size(); ++v) {
        const auto& bv = static_cast<const BoundedColouringVertex&>(*autos[v]);
        CHECK(bv.palette_size() <= last_size[v]);
        CHECK(bv.palette_size() >= 1);
        std::size_t count = 0;
        for (std::size_t c = 0; c <= K; ++c) count += bv.in_palette(c);
        CHECK(count == bv.palette_size());
        if (rec.label.position == 1 && bv.active()) CHECK(bv.counter() == (rec.label.phase + 1) % (K + 1));
        last_size[v] = bv.palette_size();
      }
    };
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::fill(last_size.begin(), last_size.end(), K + 1);
      auto out = traced(g, p, seed, {}, observer);
      REQUIRE(out.result.outcome == Outcome::Terminated);
      CHECK(oracle::is_proper_colouring(g, out.result.payload).ok());
      for (auto c : out.result.payload) CHECK((c >= 0 && c <= static_cast<std::int64_t>(K)));
    }
  }
}

TEST_CASE("two-hop colouring") {
  auto single = two_hop_colour_bcdlcd(build_graph("path:1"), 3);
  CHECK(single.outcome == Outcome::Terminated);
  auto p3 = build_graph("path:3");
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto r = two_hop_colour_bcdlcd(p3, seed);
    REQUIRE(r.outcome == Outcome::Terminated);
    std::set<std::int64_t> distinct(r.payload.begin(), r.payload.end());
    CHECK(distinct.size() == 3);
    CHECK(r.slots_used == 4 * r.phases_used);
  }
  auto g = build_graph("gnp:20:0.2:6");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto r = two_hop_colour_bcdlcd(g, seed);
    REQUIRE(r.outcome == Outcome::Terminated);
    CHECK(oracle::is_two_hop_colouring(g, r.payload).ok());
  }
}

TEST_CASE("degree computation") {
  auto single = degree_bcdlcd(build_graph("path:1"), 2);
  CHECK(single.outcome == Outcome::Terminated);
  CHECK(single.payload == std::vector<std::int64_t>{0});

  auto star = build_graph("star:5");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = degree_bcdlcd(star, seed);
    REQUIRE(r.outcome == Outcome::Terminated);
    CHECK(r.payload == std::vector<std::int64_t>{4, 1, 1, 1, 1});
  }
}

TEST_CASE("degree announcements are unique per closed neighbourhood") {
  for (const char* desc : {"gnp:24:0.25:1", "complete:6", "ring:10"}) {
    auto g = build_graph(desc);
    DegreeComputation p;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto out = traced(g, p, seed);
      REQUIRE(out.result.outcome == Outcome::Terminated);
      CHECK(oracle::check_degrees(g, out.result.payload).ok());
      for (const auto& rec : out.trace->records) {
        if (rec.label.position != DegreeComputation::kAnnouncePosition) continue;
        for (Vertex v = 0; v < g.order(); ++v) {
          int announcers = rec.intents[v] == SlotIntent::Beep;
          for (Vertex u : g.neighbours(v)) announcers += rec.intents[u] == SlotIntent::Beep;
          CHECK(announcers <= 1);
        }
      }
    }
  }
}

TEST_CASE("degree on BL") {
  auto single = degree_bl(build_graph("path:1"), EmulationParams::fixed(4), 1);
  CHECK(single.correct);
  auto g = build_graph("ring:8");
  auto sigs = distinct_signatures(g, 5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto r = degree_bl(g, EmulationParams::fixed(5), seed, std::nullopt, sigs);
    CHECK(r.correct);
    CHECK(r.result.slots_used == r.result.phases_used * 14);
  }
  std::vector<Signature> wrong(3);
  CHECK_THROWS_AS(degree_bl(g, EmulationParams::fixed(5), 0, std::nullopt, wrong),
                  std::invalid_argument);
}
