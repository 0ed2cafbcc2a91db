#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "beepsim/engine.hpp"

namespace beepsim {

// Number of emulation phases per virtual slot. Each phase is two BL slots.
struct EmulationParams {
  std::size_t k = 1;
  // Draw a fresh signature for every emulated slot instead of once per run.
  bool regenerate_per_slot = false;

  static EmulationParams fixed(std::size_t k);
  // k = ceil(log2(n / eps)): correct on the whole graph with probability 1-eps.
  static EmulationParams per_graph(std::size_t n, double eps);
  // k = ceil(log2(1 / eps)): correct at any given vertex with probability 1-eps.
  static EmulationParams per_vertex(double eps);
  // k = ceil(2 log2 n).
  static EmulationParams whp(std::size_t n);
};

// Emulates one B_cd beep over 2k BL slots. In phase i the vertex beeps in
// half s[i] and listens in the other half; hearing anything there means
// another vertex in the neighbourhood beeped concurrently.
class BeepEmulator {
 public:
  explicit BeepEmulator(const Signature& signature) : signature_(&signature) {}

  std::size_t length() const { return 2 * signature_->k(); }
  SlotIntent intent(std::size_t offset) const;
  void observe(std::size_t offset, const SlotFeedback& feedback);
  bool collision() const { return collision_; }

 private:
  const Signature* signature_;
  bool collision_ = false;
};

// Emulates one L_cd listen over 2k BL slots: two beeps in the same phase
// reveal two beepers with different signature bits.
class ListenEmulator {
 public:
  explicit ListenEmulator(std::size_t k) : k_(k) {}

  std::size_t length() const { return 2 * k_; }
  SlotIntent intent(std::size_t) const { return SlotIntent::Listen; }
  void observe(std::size_t offset, const SlotFeedback& feedback);
  bool collision() const { return collision_; }
  bool heard_any() const { return heard_any_; }

 private:
  std::size_t k_;
  bool first_half_heard_ = false;
  bool collision_ = false;
  bool heard_any_ = false;
};

// Virtual feedback for an emulated B_cd.L_cd slot.
SlotFeedback virtual_beeper_feedback(bool collision_b);
SlotFeedback virtual_listener_feedback(bool heard_any, bool collision_l);

// Runs a B_cd.L_cd protocol on a BL channel. Each virtual slot position that
// needs detection becomes a 2k-slot window; other positions pass through as a
// single BL slot with BL feedback.
class VirtualSlotAdapter : public Protocol {
 public:
  VirtualSlotAdapter(std::shared_ptr<const Protocol> inner, EmulationParams params);

  std::string name() const override;
  ModelSpec required_model() const override { return ModelSpec::bl(); }
  std::uint32_t slots_per_phase() const override { return physical_per_phase_; }
  std::unique_ptr<VertexAutomaton> spawn(const VertexInput& input) const override;
  std::uint64_t default_slot_budget(const GraphMetrics& m) const override;
  SlotLabel label(std::uint64_t slot) const override;

  const Protocol& inner() const { return *inner_; }
  const EmulationParams& params() const { return params_; }

  // RNG domain separating signature draws from the wrapped automaton's draws.
  static constexpr std::uint64_t kSignatureDomain = 0x5167;

 private:
  std::shared_ptr<const Protocol> inner_;
  EmulationParams params_;
  std::vector<bool> expanded_;      // per virtual position
  std::vector<std::uint32_t> start_;  // physical offset of each virtual position
  std::uint32_t physical_per_phase_ = 0;
};

// The wrapped automaton inside a vertex spawned by VirtualSlotAdapter.
const VertexAutomaton& adapter_inner(const VertexAutomaton& adapted);

}  // namespace beepsim
