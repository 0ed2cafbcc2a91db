#include <doctest.h>

#include "beepsim/emulation.hpp"
#include "beepsim/protocols.hpp"

using namespace beepsim;

namespace {

Signature sig(std::initializer_list<int> bits) {
  Signature s;
  for (int b : bits) s.bits.push_back(static_cast<std::uint8_t>(b));
  return s;
}

struct WindowResult {
  std::vector<bool> beeper_collision;  // per vertex; false for listeners
  std::vector<bool> listener_heard;
  std::vector<bool> listener_collision;
};

// Drives one emulated slot by hand: vertices with a signature beep, the rest listen.
WindowResult emulate(const Graph& g, const std::vector<std::optional<Signature>>& sigs,
                     std::size_t k) {
  std::vector<std::optional<BeepEmulator>> beep(g.order());
  std::vector<std::optional<ListenEmulator>> listen(g.order());
  for (Vertex v = 0; v < g.order(); ++v) {
    if (sigs[v]) {
      beep[v].emplace(*sigs[v]);
    } else {
      listen[v].emplace(k);
    }
  }
  for (std::size_t off = 0; off < 2 * k; ++off) {
    std::vector<SlotIntent> intents(g.order());
    for (Vertex v = 0; v < g.order(); ++v) {
      intents[v] = beep[v] ? beep[v]->intent(off) : listen[v]->intent(off);
    }
    auto fb = resolve_slot(g, intents, ModelSpec::bl());
    for (Vertex v = 0; v < g.order(); ++v) {
      if (beep[v]) {
        beep[v]->observe(off, fb[v]);
      } else {
        listen[v]->observe(off, fb[v]);
      }
    }
  }
  WindowResult r;
  for (Vertex v = 0; v < g.order(); ++v) {
    r.beeper_collision.push_back(beep[v] && beep[v]->collision());
    r.listener_heard.push_back(listen[v] && listen[v]->heard_any());
    r.listener_collision.push_back(listen[v] && listen[v]->collision());
  }
  return r;
}

}  // namespace

TEST_CASE("single phase: two beepers detect each other iff their bits differ") {
  auto k2 = build_graph("complete:2");
  auto p3 = build_graph("path:3");
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      auto r = emulate(k2, {sig({a}), sig({b})}, 1);
      CHECK(r.beeper_collision[0] == (a != b));
      CHECK(r.beeper_collision[1] == (a != b));

      auto l = emulate(p3, {sig({a}), std::nullopt, sig({b})}, 1);
      CHECK(l.listener_heard[1]);
      CHECK(l.listener_collision[1] == (a != b));
    }
  }
}

TEST_CASE("identical signatures are never told apart") {
  auto s = sig({1, 0, 1, 1, 0});
  auto r = emulate(build_graph("complete:3"), {s, s, s}, 5);
  for (Vertex v = 0; v < 3; ++v) CHECK_FALSE(r.beeper_collision[v]);
  auto l = emulate(build_graph("star:3"), {std::nullopt, s, s}, 5);
  CHECK(l.listener_heard[0]);
  CHECK_FALSE(l.listener_collision[0]);
}

TEST_CASE("signatures differing at bit i are detected") {
  for (std::size_t i = 0; i < 4; ++i) {
    auto a = sig({0, 0, 0, 0});
    auto b = a;
    b.bits[i] = 1;
    auto r = emulate(build_graph("complete:2"), {a, b}, 4);
    CHECK(r.beeper_collision[0]);
    CHECK(r.beeper_collision[1]);
  }
}

TEST_CASE("lone beeper: listener hears exactly one, beeper no collision") {
  auto r = emulate(build_graph("path:2"), {sig({1, 0, 1}), std::nullopt}, 3);
  CHECK_FALSE(r.beeper_collision[0]);
  CHECK(r.listener_heard[1]);
  CHECK_FALSE(r.listener_collision[1]);
  auto fb = virtual_listener_feedback(true, false);
  CHECK(fb.heard_exactly_one());
  CHECK(virtual_listener_feedback(true, true).heard_two_or_more());
  CHECK_FALSE(virtual_listener_feedback(false, false).heard_any());
  CHECK(virtual_beeper_feedback(true).internal_collision());
}

TEST_CASE("emulation length derivations") {
  CHECK(EmulationParams::per_graph(8, 0.5).k == 4);
  CHECK(EmulationParams::per_vertex(0.05).k == 5);
  CHECK(EmulationParams::whp(256).k == 16);
  CHECK(EmulationParams::whp(1).k == 1);
  CHECK(EmulationParams::fixed(7).k == 7);
  CHECK_THROWS_AS(EmulationParams::fixed(0), std::invalid_argument);
  CHECK_THROWS_AS(EmulationParams::per_vertex(1.0), std::invalid_argument);
  CHECK_THROWS_AS(EmulationParams::per_graph(8, 0.0), std::invalid_argument);
}

TEST_CASE("adapter shape and labels") {
  auto adapter = make_degree_bl(EmulationParams::fixed(4));
  CHECK(adapter->slots_per_phase() == 12);  // 2k + 4
  CHECK(adapter->required_model() == ModelSpec::bl());

  auto l0 = adapter->label(0);
  REQUIRE(l0.emulation);
  CHECK(l0.emulation->virtual_position == 0);
  CHECK(l0.emulation->round == 0);
  auto l7 = adapter->label(7);
  REQUIRE(l7.emulation);
  CHECK(l7.emulation->round == 3);
  CHECK(l7.emulation->half == 1);
  auto l8 = adapter->label(8);
  CHECK_FALSE(l8.emulation);
  CHECK(l8.position == 8);
  auto l13 = adapter->label(12 + 1);
  CHECK(l13.phase == 1);
  REQUIRE(l13.emulation);
  CHECK(l13.emulation->virtual_slot == 5);

  auto two_hop = VirtualSlotAdapter(std::make_shared<TwoHopColouring>(), EmulationParams::fixed(3));
  CHECK(two_hop.slots_per_phase() == 9);

  VertexInput bad;
  bad.signature = sig({1, 0});
  CHECK_THROWS_AS(adapter->spawn(bad), std::invalid_argument);
}

TEST_CASE("isolated vertex in the adapter hears only silence") {
  auto g = build_graph("path:1");
  auto adapter = make_degree_bl(EmulationParams::fixed(3));
  RunOptions opt;
  opt.seed = 4;
  opt.slot_budget = adapter->default_slot_budget(metrics(g));
  opt.record_trace = true;
  auto out = run(g, *adapter, ModelSpec::bl(), opt);
  CHECK(out.result.outcome == Outcome::Terminated);
  CHECK(out.result.payload == std::vector<std::int64_t>{0});
  for (const auto& rec : out.trace->records) {
    const char c = rec.feedback[0].code();
    CHECK((c == '0' || c == 'b'));
  }
}

TEST_CASE("forced distinct signatures reproduce the native run") {
  for (const char* desc : {"star:6", "ring:10", "complete:4", "gnp:12:0.3:5"}) {
    auto g = build_graph(desc);
    const std::size_t k = 6;
    auto sigs = distinct_signatures(g, k);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto native = degree_bcdlcd(g, seed);
      auto emulated = degree_bl(g, EmulationParams::fixed(k), seed, std::nullopt, sigs);
      CHECK(emulated.correct);
      CHECK(emulated.result.payload == native.payload);
      CHECK(emulated.result.phases_used == native.phases_used);
      CHECK(emulated.result.slots_used == native.phases_used * (2 * k + 4));
    }
  }
}

TEST_CASE("distinct signatures differ within closed 2-neighbourhoods") {
  auto g = build_graph("gnp:20:0.2:3");
  auto sigs = distinct_signatures(g, 8);
  for (Vertex v = 0; v < g.order(); ++v) {
    std::vector<Vertex> hood{v};
    for (Vertex u : g.neighbours(v)) {
      hood.push_back(u);
      for (Vertex w : g.neighbours(u)) hood.push_back(w);
    }
    for (Vertex a : hood) {
      for (Vertex b : hood) {
        if (a != b) CHECK(sigs[a] != sigs[b]);
      }
    }
  }
  CHECK_THROWS_AS(distinct_signatures(build_graph("complete:5"), 2), std::invalid_argument);
}

TEST_CASE("pass-through slots carry only BL information") {
  // An automaton that reads listener-side detail in an unexpanded slot.
  class Greedy final : public Protocol {
    class V final : public VertexAutomaton {
     public:
      SlotIntent act(StreamRng&) override { return SlotIntent::Listen; }
      void observe(const SlotFeedback& fb) override { (void)fb.heard_exactly_one(); }
      bool terminal() const override { return false; }
      std::int64_t payload() const override { return 0; }
      std::uint64_t digest() const override { return 0; }
    };

   public:
    std::string name() const override { return "greedy"; }
    ModelSpec required_model() const override { return ModelSpec::bcdlcd(); }
    std::uint32_t slots_per_phase() const override { return 2; }
    std::unique_ptr<VertexAutomaton> spawn(const VertexInput&) const override {
      return std::make_unique<V>();
    }
    std::uint64_t default_slot_budget(const GraphMetrics&) const override { return 8; }
    bool needs_collision_detection(std::uint32_t pos) const override { return pos == 0; }
  };
  VirtualSlotAdapter adapter(std::make_shared<Greedy>(), EmulationParams::fixed(2));
  RunOptions opt;
  opt.slot_budget = 20;
  auto g = build_graph("path:2");
  CHECK_THROWS_AS(run(g, adapter, ModelSpec::bl(), opt), CapabilityFault);
}
