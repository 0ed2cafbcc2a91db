#include "beepsim/channel.hpp"

namespace beepsim {

std::string to_string(ModelSpec m) {
  std::string s = m.beeper == BeeperSide::Bcd ? "bcd" : "b";
  s += m.listener == ListenerSide::Lcd ? "lcd" : "l";
  return s;
}

ModelSpec parse_model(std::string_view name) {
  if (name == "bl") return ModelSpec::bl();
  if (name == "bcdl") return ModelSpec::bcdl();
  if (name == "blcd") return ModelSpec::blcd();
  if (name == "bcdlcd") return ModelSpec::bcdlcd();
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected bl|bcdl|blcd|bcdlcd)");
}

SlotFeedback SlotFeedback::beeper(std::optional<bool> internal) {
  SlotFeedback fb;
  fb.beeped_ = true;
  fb.internal_ = internal;
  return fb;
}

SlotFeedback SlotFeedback::listener(ListenerSide side, Heard heard) {
  if (side == ListenerSide::L &&
      (heard == Heard::ExactlyOne || heard == Heard::TwoOrMore)) {
    throw std::invalid_argument("L feedback cannot carry multiplicity");
  }
  if (side == ListenerSide::Lcd && heard == Heard::AtLeastOne) {
    throw std::invalid_argument("L_cd feedback must resolve multiplicity");
  }
  SlotFeedback fb;
  fb.side_ = side;
  fb.heard_ = heard;
  return fb;
}

bool SlotFeedback::internal_collision() const {
  if (!beeped_) {
    throw CapabilityFault("internal_collision read by a listening vertex");
  }
  if (!internal_) {
    throw CapabilityFault("internal_collision unavailable under B");
  }
  return *internal_;
}

bool SlotFeedback::heard_any() const {
  if (beeped_) throw CapabilityFault("heard read by a beeping vertex");
  return heard_ != Heard::Silence;
}

bool SlotFeedback::heard_exactly_one() const {
  if (beeped_) throw CapabilityFault("heard read by a beeping vertex");
  if (side_ != ListenerSide::Lcd) {
    throw CapabilityFault("beep multiplicity unavailable under L");
  }
  return heard_ == Heard::ExactlyOne;
}

bool SlotFeedback::heard_two_or_more() const {
  if (beeped_) throw CapabilityFault("heard read by a beeping vertex");
  if (side_ != ListenerSide::Lcd) {
    throw CapabilityFault("beep multiplicity unavailable under L");
  }
  return heard_ == Heard::TwoOrMore;
}

char SlotFeedback::code() const {
  if (beeped_) return !internal_ ? 'b' : (*internal_ ? 'c' : 'a');
  switch (heard_) {
    case Heard::Silence: return '0';
    case Heard::AtLeastOne: return '+';
    case Heard::ExactlyOne: return '1';
    case Heard::TwoOrMore: return '2';
  }
  return '?';
}

std::vector<SlotFeedback> resolve_slot(const Graph& g,
                                       std::span<const SlotIntent> intents,
                                       ModelSpec model) {
  if (intents.size() != g.order()) {
    throw std::invalid_argument("intent vector has " +
                                std::to_string(intents.size()) +
                                " entries for " + std::to_string(g.order()) +
                                " vertices");
  }
  std::vector<SlotFeedback> out;
  out.reserve(g.order());
  for (Vertex v = 0; v < g.order(); ++v) {
    std::size_t beeping = 0;
    for (Vertex w : g.neighbours(v)) {
      if (intents[w] == SlotIntent::Beep) ++beeping;
    }
    if (intents[v] == SlotIntent::Beep) {
      out.push_back(SlotFeedback::beeper(
          model.beeper == BeeperSide::Bcd ? std::optional<bool>(beeping > 0)
                                          : std::nullopt));
    } else if (model.listener == ListenerSide::L) {
      out.push_back(SlotFeedback::listener(
          ListenerSide::L, beeping == 0 ? Heard::Silence : Heard::AtLeastOne));
    } else {
      out.push_back(SlotFeedback::listener(
          ListenerSide::Lcd, beeping == 0   ? Heard::Silence
                             : beeping == 1 ? Heard::ExactlyOne
                                            : Heard::TwoOrMore));
    }
  }
  return out;
}

CollisionTruth collision_ground_truth(const Graph& g,
                                      std::span<const SlotIntent> intents,
                                      Vertex v) {
  if (v >= g.order()) {
    throw std::out_of_range("vertex out of range: " + std::to_string(v));
  }
  if (intents.size() != g.order()) {
    throw std::invalid_argument("intent vector length mismatch");
  }
  // Direct edge-list scan; shares nothing with resolve_slot.
  std::size_t beeping_neighbours = 0;
  for (const auto& e : g.edges()) {
    Vertex other;
    if (e.u == v) {
      other = e.v;
    } else if (e.v == v) {
      other = e.u;
    } else {
      continue;
    }
    if (intents[other] == SlotIntent::Beep) ++beeping_neighbours;
  }
  CollisionTruth t;
  t.internal = intents[v] == SlotIntent::Beep && beeping_neighbours >= 1;
  t.peripheral = beeping_neighbours >= 2;
  return t;
}

}  // namespace beepsim
