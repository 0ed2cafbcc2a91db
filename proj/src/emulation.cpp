#include "beepsim/emulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace beepsim {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
}

EmulationParams clamp_k(std::uint64_t k) {
  EmulationParams p;
  p.k = static_cast<std::size_t>(std::max<std::uint64_t>(k, 1));
  return p;
}

}  // namespace

EmulationParams EmulationParams::fixed(std::size_t k) {
  if (k < 1) throw std::invalid_argument("emulation length k must be >= 1");
  return clamp_k(k);
}

EmulationParams EmulationParams::per_graph(std::size_t n, double eps) {
  check_eps(eps);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return clamp_k(ceil_count(std::log2(static_cast<double>(n) / eps)));
}

EmulationParams EmulationParams::per_vertex(double eps) {
  check_eps(eps);
  return clamp_k(ceil_count(std::log2(1.0 / eps)));
}

EmulationParams EmulationParams::whp(std::size_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return clamp_k(ceil_count(2.0 * std::log2(static_cast<double>(n))));
}

SlotIntent BeepEmulator::intent(std::size_t offset) const {
  const std::size_t half = offset % 2;
  const std::uint8_t bit = signature_->bits.at(offset / 2);
  return half == bit ? SlotIntent::Beep : SlotIntent::Listen;
}

void BeepEmulator::observe(std::size_t offset, const SlotFeedback& feedback) {
  if (intent(offset) == SlotIntent::Listen && feedback.heard_any()) {
    collision_ = true;
  }
}

void ListenEmulator::observe(std::size_t offset, const SlotFeedback& feedback) {
  const bool heard = feedback.heard_any();
  heard_any_ = heard_any_ || heard;
  if (offset % 2 == 0) {
    first_half_heard_ = heard;
  } else if (first_half_heard_ && heard) {
    collision_ = true;
  }
}

SlotFeedback virtual_beeper_feedback(bool collision_b) {
  return SlotFeedback::beeper(collision_b);
}

SlotFeedback virtual_listener_feedback(bool heard_any, bool collision_l) {
  return SlotFeedback::listener(ListenerSide::Lcd, !heard_any     ? Heard::Silence
                                                   : collision_l ? Heard::TwoOrMore
                                                                 : Heard::ExactlyOne);
}

namespace {

SlotFeedback coarsen_to_bl(const SlotFeedback& fb) {
  if (fb.beeped()) return SlotFeedback::beeper(std::nullopt);
  return SlotFeedback::listener(
      ListenerSide::L, fb.raw_heard() == Heard::Silence ? Heard::Silence : Heard::AtLeastOne);
}

class AdapterVertex final : public VertexAutomaton {
 public:
  AdapterVertex(std::unique_ptr<VertexAutomaton> inner, std::optional<Signature> signature,
                const std::vector<bool>& expanded, EmulationParams params)
      : inner_(std::move(inner)),
        signature_(std::move(signature)),
        forced_(signature_.has_value()),
        expanded_(expanded),
        params_(params) {}

  SlotIntent act(StreamRng& rng) override {
    if (!window_) {
      if (!forced_ && expanded_[position_] &&
          (!signature_ || params_.regenerate_per_slot)) {
        auto sig_rng = rng.at(VirtualSlotAdapter::kSignatureDomain,
                              params_.regenerate_per_slot ? virtual_slot_ : 0);
        signature_ = Signature::generate(params_.k, sig_rng);
      }
      auto inner_rng = rng.at(0, virtual_slot_);
      const SlotIntent wanted = inner_->act(inner_rng);
      if (!expanded_[position_]) return wanted;
      window_.emplace();
      window_->offset = 0;
      if (wanted == SlotIntent::Beep) {
        window_->beep.emplace(*signature_);
      } else {
        window_->listen.emplace(params_.k);
      }
    }
    return window_->beep ? window_->beep->intent(window_->offset)
                         : window_->listen->intent(window_->offset);
  }

  void observe(const SlotFeedback& feedback) override {
    if (!window_) {
      inner_->observe(coarsen_to_bl(feedback));
      advance();
      return;
    }
    auto& w = *window_;
    if (w.beep) {
      w.beep->observe(w.offset, feedback);
    } else {
      w.listen->observe(w.offset, feedback);
    }
    if (++w.offset < 2 * params_.k) return;
    const SlotFeedback virtual_fb =
        w.beep ? virtual_beeper_feedback(w.beep->collision())
               : virtual_listener_feedback(w.listen->heard_any(), w.listen->collision());
    window_.reset();
    inner_->observe(virtual_fb);
    advance();
  }

  bool terminal() const override { return inner_->terminal(); }
  std::int64_t payload() const override { return inner_->payload(); }

  std::uint64_t digest() const override {
    std::uint64_t h = mix64(inner_->digest(), virtual_slot_);
    if (window_) {
      h = mix64(h, window_->offset);
      h = mix64(h, window_->beep ? (window_->beep->collision() ? 3 : 2)
                                 : (window_->listen->collision() ? 5 : 4) +
                                       (window_->listen->heard_any() ? 8 : 0));
    }
    return h;
  }

  const VertexAutomaton& inner() const { return *inner_; }

 private:
  struct Window {
    std::size_t offset = 0;
    std::optional<BeepEmulator> beep;
    std::optional<ListenEmulator> listen;
  };

  void advance() {
    position_ = (position_ + 1) % static_cast<std::uint32_t>(expanded_.size());
    ++virtual_slot_;
  }

  std::unique_ptr<VertexAutomaton> inner_;
  std::optional<Signature> signature_;
  bool forced_;
  const std::vector<bool>& expanded_;
  EmulationParams params_;
  std::uint32_t position_ = 0;
  std::uint64_t virtual_slot_ = 0;
  std::optional<Window> window_;
};

}  // namespace

VertexAutomaton const& adapter_inner(const VertexAutomaton& v) {
  return static_cast<const AdapterVertex&>(v).inner();
}

VirtualSlotAdapter::VirtualSlotAdapter(std::shared_ptr<const Protocol> inner,
                                       EmulationParams params)
    : inner_(std::move(inner)), params_(params) {
  if (!inner_) throw std::invalid_argument("adapter needs a protocol");
  if (params_.k < 1) throw std::invalid_argument("emulation length k must be >= 1");
  const auto vlen = inner_->slots_per_phase();
  for (std::uint32_t pos = 0; pos < vlen; ++pos) {
    const bool expand = inner_->needs_collision_detection(pos);
    expanded_.push_back(expand);
    start_.push_back(physical_per_phase_);
    physical_per_phase_ += expand ? static_cast<std::uint32_t>(2 * params_.k) : 1;
  }
}

std::string VirtualSlotAdapter::name() const {
  return inner_->name() + "@bl(k=" + std::to_string(params_.k) + ")";
}

std::unique_ptr<VertexAutomaton> VirtualSlotAdapter::spawn(const VertexInput& input) const {
  if (input.signature && input.signature->k() != params_.k) {
    throw std::invalid_argument("forced signature length differs from k");
  }
  VertexInput inner_input = input;
  inner_input.signature.reset();
  return std::make_unique<AdapterVertex>(inner_->spawn(inner_input), input.signature,
                                         expanded_, params_);
}

std::uint64_t VirtualSlotAdapter::default_slot_budget(const GraphMetrics& m) const {
  const std::uint64_t virtual_phases =
      inner_->default_slot_budget(m) / inner_->slots_per_phase();
  return virtual_phases * physical_per_phase_;
}

SlotLabel VirtualSlotAdapter::label(std::uint64_t slot) const {
  SlotLabel l;
  l.phase = slot / physical_per_phase_;
  const auto offset = static_cast<std::uint32_t>(slot % physical_per_phase_);
  l.position = offset;
  auto it = std::upper_bound(start_.begin(), start_.end(), offset);
  const auto vpos = static_cast<std::uint32_t>(std::distance(start_.begin(), it) - 1);
  if (expanded_[vpos]) {
    const std::uint32_t within = offset - start_[vpos];
    l.emulation = EmulationTag{vpos, l.phase * inner_->slots_per_phase() + vpos,
                               within / 2, within % 2};
  }
  return l;
}

}  // namespace beepsim
