#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "beepsim/emulation.hpp"
#include "beepsim/engine.hpp"

namespace beepsim {

// Probability p = 2^-p_exponent. Halving increments the exponent; doubling is
// capped at p = 1/2 (exponent 1).
struct BeepProbability {
  unsigned exponent = 1;

  void halve() { ++exponent; }
  void double_capped() {
    if (exponent > 1) --exponent;
  }
};

// ---------------------------------------------------------------------------
// Collision detection in BL: k phases of two slots.

enum class KPolicy : std::uint8_t { PerVertex, WhpLocal, PerGraph };

// ceil(log2(1/eps))+1, ceil(2 log2 n)+1, ceil(log2(n/eps))+1 respectively.
std::size_t k_for(KPolicy policy, std::size_t n, double eps);

class CollisionDetection final : public Protocol {
 public:
  explicit CollisionDetection(std::size_t k);

  std::string name() const override { return "collide"; }
  ModelSpec required_model() const override { return ModelSpec::bl(); }
  std::uint32_t slots_per_phase() const override { return 2; }
  std::unique_ptr<VertexAutomaton> spawn(const VertexInput& input) const override;
  std::uint64_t default_slot_budget(const GraphMetrics&) const override { return 2 * k_; }

  std::size_t k() const { return k_; }

 private:
  std::size_t k_;
};

class CollisionDetectionVertex final : public VertexAutomaton {
 public:
  CollisionDetectionVertex(std::size_t k, bool wishes) : k_(k), wishes_(wishes) {}

  SlotIntent act(StreamRng& rng) override;
  void observe(const SlotFeedback& feedback) override;
  bool terminal() const override { return phase_ >= k_; }
  std::int64_t payload() const override { return collision_ ? 1 : 0; }
  std::uint64_t digest() const override;

  bool collision() const { return collision_; }

 private:
  std::size_t k_;
  bool wishes_;
  std::size_t phase_ = 0;
  unsigned slot_ = 0;
  std::uint8_t bit_ = 0;
  bool heard_first_ = false;
  bool collision_ = false;
};

// ---------------------------------------------------------------------------
// Colouring in B_cd.L without knowledge. One slot per phase; a vertex's colour
// is the phase in which it beeps alone.

class Colouring final : public Protocol {
 public:
  // local_termination adds a second slot per phase in which uncoloured
  // vertices beep, so coloured vertices stay until their neighbourhood is done.
  explicit Colouring(bool local_termination = false)
      : local_termination_(local_termination) {}

  std::string name() const override { return "colour"; }
  ModelSpec required_model() const override { return ModelSpec::bcdl(); }
  std::uint32_t slots_per_phase() const override { return local_termination_ ? 2 : 1; }
  std::unique_ptr<VertexAutomaton> spawn(const VertexInput& input) const override;
  std::uint64_t default_slot_budget(const GraphMetrics& m) const override;

 private:
  bool local_termination_;
};

class ColouringVertex final : public VertexAutomaton {
 public:
  enum class State : std::uint8_t { Active, Coloured, Done };

  explicit ColouringVertex(bool local_termination) : local_termination_(local_termination) {}

  SlotIntent act(StreamRng& rng) override;
  void observe(const SlotFeedback& feedback) override;
  bool terminal() const override {
    return local_termination_ ? state_ == State::Done : state_ != State::Active;
  }
  std::int64_t payload() const override { return colour_; }
  std::uint64_t digest() const override;

  State state() const { return state_; }
  bool candidate() const { return candidate_; }
  BeepProbability probability() const { return p_; }
  std::int64_t colour() const { return colour_; }

 private:
  bool local_termination_;
  State state_ = State::Active;
  unsigned slot_ = 0;
  bool candidate_ = false;
  BeepProbability p_;
  std::int64_t colour_ = 0;
};

// ---------------------------------------------------------------------------
// Colouring in B_cd.L with a known degree bound K; colours in {0..K}.

enum class PaletteVariant : std::uint8_t { Basic, Modified };

class BoundedColouring final : public Protocol {
 public:
  BoundedColouring(std::size_t bound_k, PaletteVariant variant);

  std::string name() const override { return "colour-k"; }
  ModelSpec required_model() const override { return ModelSpec::bcdl(); }
  std::uint32_t slots_per_phase() const override { return 2; }
  std::unique_ptr<VertexAutomaton> spawn(const VertexInput& input) const override;
  std::uint64_t default_slot_budget(const GraphMetrics& m) const override;

  std::size_t bound() const { return bound_k_; }
  PaletteVariant variant() const { return variant_; }
  // One cycle proposes every colour once: K+1 phases.
  std::uint64_t phases_per_cycle() const { return bound_k_ + 1; }

 private:
  std::size_t bound_k_;
  PaletteVariant variant_;
};

// ceil(10 (log2 n + log2^2 K)); the constant 10 is a budget choice.
std::uint64_t bounded_colouring_cycle_budget(std::size_t n, std::size_t bound_k);

class BoundedColouringVertex final : public VertexAutomaton {
 public:
  BoundedColouringVertex(std::size_t bound_k, PaletteVariant variant);

  SlotIntent act(StreamRng& rng) override;
  void observe(const SlotFeedback& feedback) override;
  bool terminal() const override { return !active_; }
  std::int64_t payload() const override { return colour_; }
  std::uint64_t digest() const override;

  bool active() const { return active_; }
  std::size_t palette_size() const { return palette_size_; }
  bool in_palette(std::size_t c) const { return palette_.at(c); }
  std::size_t counter() const { return counter_; }

 private:
  std::size_t bound_k_;
  PaletteVariant variant_;
  bool active_ = true;
  std::vector<bool> palette_;
  std::size_t palette_size_;
  std::size_t cycle_palette_size_;
  std::size_t counter_ = 0;
  std::int64_t colour_ = 0;
  unsigned slot_ = 0;
  bool beeped_ = false;
  bool won_ = false;
};

// ---------------------------------------------------------------------------
// 2-hop-colouring in B_cd.L_cd. Four slots per phase.

class TwoHopColouring final : public Protocol {
 public:
  std::string name() const override { return "two-hop"; }
  ModelSpec required_model() const override { return ModelSpec::bcdlcd(); }
  std::uint32_t slots_per_phase() const override { return 4; }
  std::unique_ptr<VertexAutomaton> spawn(const VertexInput& input) const override;
  std::uint64_t default_slot_budget(const GraphMetrics& m) const override;
  bool needs_collision_detection(std::uint32_t position) const override {
    return position == 0;
  }
};

class TwoHopColouringVertex final : public VertexAutomaton {
 public:
  enum class State : std::uint8_t { Active, Coloured, TurnedOff };

  SlotIntent act(StreamRng& rng) override;
  void observe(const SlotFeedback& feedback) override;
  bool terminal() const override { return state_ == State::TurnedOff; }
  std::int64_t payload() const override { return colour_; }
  std::uint64_t digest() const override;

  State state() const { return state_; }
  BeepProbability probability() const { return p_; }

 private:
  State state_ = State::Active;
  unsigned slot_ = 0;
  bool candidate_ = false;
  BeepProbability p_;
  std::int64_t colour_ = 0;
  bool internal_ = false;
  bool heard1_ = false;
  bool peripheral_ = false;
};

// ---------------------------------------------------------------------------
// Degree computation in B_cd.L_cd. Five slots per phase; only slot 1 needs
// collision detection.

class DegreeComputation final : public Protocol {
 public:
  std::string name() const override { return "degree"; }
  ModelSpec required_model() const override { return ModelSpec::bcdlcd(); }
  std::uint32_t slots_per_phase() const override { return 5; }
  std::unique_ptr<VertexAutomaton> spawn(const VertexInput& input) const override;
  std::uint64_t default_slot_budget(const GraphMetrics& m) const override;
  bool needs_collision_detection(std::uint32_t position) const override {
    return position == 0;
  }

  static constexpr std::uint32_t kAnnouncePosition = 3;
};

class DegreeVertex final : public VertexAutomaton {
 public:
  enum class State : std::uint8_t { Active, Passive, TurnedOff };

  SlotIntent act(StreamRng& rng) override;
  void observe(const SlotFeedback& feedback) override;
  bool terminal() const override { return state_ == State::TurnedOff; }
  std::int64_t payload() const override { return degree_; }
  std::uint64_t digest() const override;

  State state() const { return state_; }
  BeepProbability probability() const { return p_; }
  std::int64_t degree() const { return degree_; }
  std::uint64_t phase() const { return phase_; }

 private:
  State state_ = State::Active;
  unsigned slot_ = 0;
  std::uint64_t phase_ = 0;
  bool candidate_ = false;
  BeepProbability p_;
  std::int64_t degree_ = 0;
  bool internal_ = false;
  bool heard1_ = false;
  bool peripheral_ = false;
  bool heard2_ = false;
  bool heard3_ = false;
  bool announce_ = false;
};

// Degree computation on BL: DegreeComputation behind the emulation adapter.
std::shared_ptr<VirtualSlotAdapter> make_degree_bl(EmulationParams params);

// ---------------------------------------------------------------------------
// Convenience runners. budget == nullopt uses the protocol's default budget.

struct DetectionRun {
  std::vector<bool> collision;
  RunResult result;
};

DetectionRun detect_collision_bl(const Graph& g, std::span<const Vertex> wishers,
                                 std::size_t k, std::uint64_t seed);

RunResult colour_bcdl(const Graph& g, std::uint64_t seed,
                      std::optional<std::uint64_t> budget = std::nullopt);
RunResult colour_bcdl_bounded(const Graph& g, std::size_t bound_k, PaletteVariant variant,
                              std::uint64_t seed,
                              std::optional<std::uint64_t> budget = std::nullopt);
RunResult two_hop_colour_bcdlcd(const Graph& g, std::uint64_t seed,
                                std::optional<std::uint64_t> budget = std::nullopt);
RunResult degree_bcdlcd(const Graph& g, std::uint64_t seed,
                        std::optional<std::uint64_t> budget = std::nullopt);

struct DegreeBlRun {
  RunResult result;
  bool correct = false;  // every vertex's degree matches its neighbour count
};

// signatures: empty for private random signatures, else one per vertex.
DegreeBlRun degree_bl(const Graph& g, EmulationParams params, std::uint64_t seed,
                      std::optional<std::uint64_t> budget = std::nullopt,
                      std::span<const Signature> signatures = {});

// Signatures that differ pairwise within every closed 2-neighbourhood: the
// binary encoding of a greedy colouring of the square graph, k bits each.
// Throws std::invalid_argument when k bits cannot encode the colours.
std::vector<Signature> distinct_signatures(const Graph& g, std::size_t k);

}  // namespace beepsim
