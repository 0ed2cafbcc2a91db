#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beepsim/channel.hpp"
#include "beepsim/graph.hpp"
#include "beepsim/rng.hpp"

namespace beepsim {

// Private k-bit word used by the emulation procedures.
struct Signature {
  std::vector<std::uint8_t> bits;

  std::size_t k() const { return bits.size(); }
  static Signature generate(std::size_t k, StreamRng& rng);
  friend bool operator==(const Signature&, const Signature&) = default;
};

// Per-vertex protocol input. Carries nothing that identifies the vertex.
struct VertexInput {
  bool wishes_to_beep = false;         // collision detection
  std::optional<Signature> signature;  // emulation; generated when absent
};

// Per-vertex automaton. The engine calls act() on every live vertex, resolves
// the slot, then calls observe() with that vertex's feedback.
class VertexAutomaton {
 public:
  virtual ~VertexAutomaton() = default;

  virtual SlotIntent act(StreamRng& rng) = 0;
  virtual void observe(const SlotFeedback& feedback) = 0;
  virtual bool terminal() const = 0;

  // Colour, degree or collision flag depending on the protocol.
  virtual std::int64_t payload() const = 0;
  virtual std::uint64_t digest() const = 0;
};

struct EmulationTag {
  std::uint32_t virtual_position = 0;  // slot index within the virtual phase
  std::uint64_t virtual_slot = 0;      // global virtual slot number
  std::uint32_t round = 0;             // emulation phase i in 0..k-1
  std::uint32_t half = 0;              // 0 or 1
};

struct SlotLabel {
  std::uint64_t phase = 0;
  std::uint32_t position = 0;
  std::optional<EmulationTag> emulation;
};

// Shared, immutable description of a protocol: shape, required model and a
// factory producing identical per-vertex automata.
class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual std::string name() const = 0;
  virtual ModelSpec required_model() const = 0;
  virtual std::uint32_t slots_per_phase() const = 0;
  virtual std::unique_ptr<VertexAutomaton> spawn(const VertexInput& input) const = 0;
  virtual std::uint64_t default_slot_budget(const GraphMetrics& m) const = 0;

  // Positions whose feedback needs beeper- or listener-side detection; the
  // emulation adapter expands only these.
  virtual bool needs_collision_detection(std::uint32_t position) const {
    (void)position;
    return true;
  }

  virtual SlotLabel label(std::uint64_t slot) const {
    SlotLabel l;
    l.phase = slot / slots_per_phase();
    l.position = static_cast<std::uint32_t>(slot % slots_per_phase());
    return l;
  }
};

enum class Outcome : std::uint8_t { Terminated, BudgetExhausted };

std::string to_string(Outcome o);

struct RunResult {
  Outcome outcome = Outcome::BudgetExhausted;
  std::uint64_t slots_used = 0;
  std::uint64_t phases_used = 0;
  std::vector<std::int64_t> payload;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct SlotRecord {
  std::uint64_t slot = 0;
  SlotLabel label;
  std::vector<SlotIntent> intents;
  std::vector<SlotFeedback> feedback;
  std::vector<std::uint64_t> digests;
};

struct Trace {
  ModelSpec model;
  std::vector<SlotRecord> records;
  RunResult result;
};

// Called after each slot with the record and every automaton (live or not).
using SlotObserver =
    std::function<void(const SlotRecord&, std::span<const VertexAutomaton* const>)>;

struct RunOptions {
  std::uint64_t seed = 0;
  std::uint64_t slot_budget = 0;     // must be >= 1
  std::vector<VertexInput> inputs;   // empty, or one entry per vertex
  bool record_trace = false;
  SlotObserver observer;
};

struct RunOutput {
  RunResult result;
  std::optional<Trace> trace;
};

// Lockstep execution until every vertex is terminal or the budget runs out.
// A CapabilityFault raised by an automaton is rethrown naming the slot.
RunOutput run(const Graph& g, const Protocol& protocol, ModelSpec model,
              const RunOptions& options);

enum class BudgetKind : std::uint8_t { Colouring, TwoHop, Degree };

// Theoretical phase envelope: ceil(76 log2 n + 112 D) for colouring,
// ceil(76 log2 n + 112 D^2) for 2-hop-colouring and degree computation.
std::uint64_t phase_budget(BudgetKind kind, std::uint64_t n, std::uint64_t max_degree);

// Ceiling that absorbs floating error on exact integers (log2 of powers of 2).
std::uint64_t ceil_count(double x);

}  // namespace beepsim
