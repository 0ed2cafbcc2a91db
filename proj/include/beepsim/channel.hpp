#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "beepsim/graph.hpp"

namespace beepsim {

enum class BeeperSide : std::uint8_t { B, Bcd };
enum class ListenerSide : std::uint8_t { L, Lcd };

// One of the four beeping models: beeper-side {B, B_cd} x listener-side {L, L_cd}.
struct ModelSpec {
  BeeperSide beeper = BeeperSide::B;
  ListenerSide listener = ListenerSide::L;

  static constexpr ModelSpec bl() { return {BeeperSide::B, ListenerSide::L}; }
  static constexpr ModelSpec bcdl() { return {BeeperSide::Bcd, ListenerSide::L}; }
  static constexpr ModelSpec blcd() { return {BeeperSide::B, ListenerSide::Lcd}; }
  static constexpr ModelSpec bcdlcd() {
    return {BeeperSide::Bcd, ListenerSide::Lcd};
  }

  // True when every capability of `required` is present in *this.
  constexpr bool provides(ModelSpec required) const {
    return (required.beeper == BeeperSide::B || beeper == BeeperSide::Bcd) &&
           (required.listener == ListenerSide::L ||
            listener == ListenerSide::Lcd);
  }

  friend constexpr bool operator==(ModelSpec, ModelSpec) = default;
};

// CLI spelling: bl | bcdl | blcd | bcdlcd.
std::string to_string(ModelSpec m);
ModelSpec parse_model(std::string_view name);

enum class SlotIntent : std::uint8_t { Listen = 0, Beep = 1 };

enum class Heard : std::uint8_t { Silence, AtLeastOne, ExactlyOne, TwoOrMore };

// Raised when protocol code reads feedback its model does not provide.
class CapabilityFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// What one vertex learns at the end of a slot. Unavailable information is an
// explicit state; the accessors throw CapabilityFault instead of guessing.
class SlotFeedback {
 public:
  SlotFeedback() = default;

  // internal == nullopt means the model is B (no beeper-side detection).
  static SlotFeedback beeper(std::optional<bool> internal);
  static SlotFeedback listener(ListenerSide side, Heard heard);

  bool beeped() const { return beeped_; }

  bool internal_collision() const;
  bool heard_any() const;
  bool heard_exactly_one() const;
  bool heard_two_or_more() const;

  // Raw view, for traces and oracles. Never faults.
  std::optional<bool> raw_internal() const { return internal_; }
  Heard raw_heard() const { return heard_; }

  // Single-character trace code:
  //   beeper   'b' unavailable, 'a' alone, 'c' internal collision
  //   listener '0' silence, '+' at least one (L), '1' exactly one, '2' two+
  char code() const;

  friend bool operator==(const SlotFeedback&, const SlotFeedback&) = default;

 private:
  bool beeped_ = false;
  std::optional<bool> internal_;
  ListenerSide side_ = ListenerSide::L;
  Heard heard_ = Heard::Silence;
};

// Feedback for every vertex from the exact count of beeping neighbours.
// A vertex's own beep never counts towards what it hears.
std::vector<SlotFeedback> resolve_slot(const Graph& g,
                                       std::span<const SlotIntent> intents,
                                       ModelSpec model);

// Flag pair; both may hold at once.
struct CollisionTruth {
  bool internal = false;    // v beeps and at least one neighbour beeps
  bool peripheral = false;  // at least two distinct neighbours of v beep

  bool any() const { return internal || peripheral; }
  friend bool operator==(const CollisionTruth&, const CollisionTruth&) = default;
};

CollisionTruth collision_ground_truth(const Graph& g,
                                      std::span<const SlotIntent> intents,
                                      Vertex v);

}  // namespace beepsim
