#include "beepsim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beepsim/oracle.hpp"

namespace beepsim {

namespace {

std::uint64_t digest_of(std::initializer_list<std::uint64_t> fields) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (auto f : fields) h = mix64(h, f);
  return h;
}

// Phase budgets below this floor would make tiny graphs (n = 1, D = 0) run
// against a zero envelope.
constexpr std::uint64_t kMinBudgetPhases = 64;
constexpr std::uint64_t kBudgetFactor = 20;

}  // namespace

std::size_t k_for(KPolicy policy, std::size_t n, double eps) {
  auto check_eps = [&] {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  };
  auto check_n = [&] {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
  };
  switch (policy) {
    case KPolicy::PerVertex:
      check_eps();
      return ceil_count(std::log2(1.0 / eps)) + 1;
    case KPolicy::WhpLocal:
      check_n();
      return ceil_count(2.0 * std::log2(static_cast<double>(n))) + 1;
    case KPolicy::PerGraph:
      check_eps();
      check_n();
      return ceil_count(std::log2(static_cast<double>(n) / eps)) + 1;
  }
  throw std::invalid_argument("unknown k policy");
}

// ---------------------------------------------------------------------------

CollisionDetection::CollisionDetection(std::size_t k) : k_(k) {
  if (k < 1) throw std::invalid_argument("collision detection needs k >= 1");
}

std::unique_ptr<VertexAutomaton> CollisionDetection::spawn(const VertexInput& input) const {
  return std::make_unique<CollisionDetectionVertex>(k_, input.wishes_to_beep);
}

SlotIntent CollisionDetectionVertex::act(StreamRng& rng) {
  if (slot_ == 0 && wishes_) bit_ = rng.bit() ? 1 : 0;
  return wishes_ && bit_ == slot_ ? SlotIntent::Beep : SlotIntent::Listen;
}

void CollisionDetectionVertex::observe(const SlotFeedback& feedback) {
  if (wishes_) {
    // Beep in one slot, listen in the other.
    if (!feedback.beeped() && feedback.heard_any()) collision_ = true;
  } else if (slot_ == 0) {
    heard_first_ = feedback.heard_any();
  } else if (heard_first_ && feedback.heard_any()) {
    collision_ = true;
  }
  if (++slot_ == 2) {
    slot_ = 0;
    ++phase_;
  }
}

std::uint64_t CollisionDetectionVertex::digest() const {
  return digest_of({phase_, slot_, bit_, heard_first_, collision_});
}

// ---------------------------------------------------------------------------

std::unique_ptr<VertexAutomaton> Colouring::spawn(const VertexInput&) const {
  return std::make_unique<ColouringVertex>(local_termination_);
}

std::uint64_t Colouring::default_slot_budget(const GraphMetrics& m) const {
  return kBudgetFactor *
         std::max(phase_budget(BudgetKind::Colouring, m.n, m.max_degree), kMinBudgetPhases) *
         slots_per_phase();
}

SlotIntent ColouringVertex::act(StreamRng& rng) {
  if (slot_ == 1) return state_ == State::Active ? SlotIntent::Beep : SlotIntent::Listen;
  if (state_ != State::Active) {
    candidate_ = false;
    return SlotIntent::Listen;
  }
  ++colour_;
  candidate_ = rng.coin_pow2(p_.exponent);
  return candidate_ ? SlotIntent::Beep : SlotIntent::Listen;
}

void ColouringVertex::observe(const SlotFeedback& feedback) {
  if (slot_ == 1) {
    if (state_ == State::Coloured && !feedback.heard_any()) state_ = State::Done;
    slot_ = 0;
    return;
  }
  if (state_ == State::Active) {
    if (candidate_ && !feedback.internal_collision()) {
      state_ = State::Coloured;
    } else if (!candidate_ && !feedback.heard_any()) {
      p_.double_capped();
    } else {
      p_.halve();
    }
  }
  if (local_termination_) slot_ = 1;
}

std::uint64_t ColouringVertex::digest() const {
  return digest_of({static_cast<std::uint64_t>(state_), slot_, candidate_, p_.exponent,
                    static_cast<std::uint64_t>(colour_)});
}

// ---------------------------------------------------------------------------

BoundedColouring::BoundedColouring(std::size_t bound_k, PaletteVariant variant)
    : bound_k_(bound_k), variant_(variant) {}

std::unique_ptr<VertexAutomaton> BoundedColouring::spawn(const VertexInput&) const {
  return std::make_unique<BoundedColouringVertex>(bound_k_, variant_);
}

std::uint64_t bounded_colouring_cycle_budget(std::size_t n, std::size_t bound_k) {
  const double log_n = std::log2(static_cast<double>(std::max<std::size_t>(n, 1)));
  const double log_k = std::log2(static_cast<double>(std::max<std::size_t>(bound_k, 1)));
  return ceil_count(10.0 * (log_n + log_k * log_k));
}

std::uint64_t BoundedColouring::default_slot_budget(const GraphMetrics& m) const {
  const std::uint64_t cycles =
      std::max<std::uint64_t>(bounded_colouring_cycle_budget(m.n, bound_k_), 16);
  return kBudgetFactor * cycles * phases_per_cycle() * slots_per_phase();
}

BoundedColouringVertex::BoundedColouringVertex(std::size_t bound_k, PaletteVariant variant)
    : bound_k_(bound_k),
      variant_(variant),
      palette_(bound_k + 1, true),
      palette_size_(bound_k + 1),
      cycle_palette_size_(bound_k + 1) {}

SlotIntent BoundedColouringVertex::act(StreamRng& rng) {
  if (slot_ == 1) return won_ ? SlotIntent::Beep : SlotIntent::Listen;
  if (counter_ == 0) cycle_palette_size_ = palette_size_;
  won_ = false;
  beeped_ = false;
  if (palette_[counter_]) {
    const std::size_t size =
        variant_ == PaletteVariant::Basic ? palette_size_ : cycle_palette_size_;
    beeped_ = rng.below(2 * size) == 0;
  }
  return beeped_ ? SlotIntent::Beep : SlotIntent::Listen;
}

void BoundedColouringVertex::observe(const SlotFeedback& feedback) {
  if (slot_ == 0) {
    if (beeped_) won_ = !feedback.internal_collision();
    slot_ = 1;
    return;
  }
  if (won_) {
    colour_ = static_cast<std::int64_t>(counter_);
    active_ = false;
  } else if (feedback.heard_any() && palette_[counter_]) {
    palette_[counter_] = false;
    --palette_size_;
  }
  counter_ = (counter_ + 1) % (bound_k_ + 1);
  slot_ = 0;
}

std::uint64_t BoundedColouringVertex::digest() const {
  std::uint64_t palette_bits = 0;
  for (std::size_t c = 0; c < palette_.size(); ++c) {
    if (palette_[c]) palette_bits = mix64(palette_bits, c);
  }
  return digest_of({active_, palette_bits, palette_size_, cycle_palette_size_, counter_,
                    static_cast<std::uint64_t>(colour_), slot_, beeped_, won_});
}

// ---------------------------------------------------------------------------

std::unique_ptr<VertexAutomaton> TwoHopColouring::spawn(const VertexInput&) const {
  return std::make_unique<TwoHopColouringVertex>();
}

std::uint64_t TwoHopColouring::default_slot_budget(const GraphMetrics& m) const {
  return kBudgetFactor *
         std::max(phase_budget(BudgetKind::TwoHop, m.n, m.max_degree), kMinBudgetPhases) *
         slots_per_phase();
}

SlotIntent TwoHopColouringVertex::act(StreamRng& rng) {
  switch (slot_) {
    case 0:
      candidate_ = false;
      if (state_ == State::Active) {
        ++colour_;
        candidate_ = rng.coin_pow2(p_.exponent);
      }
      return candidate_ ? SlotIntent::Beep : SlotIntent::Listen;
    case 1:
      return peripheral_ ? SlotIntent::Beep : SlotIntent::Listen;
    case 2:
      return heard1_ ? SlotIntent::Beep : SlotIntent::Listen;
    default:
      return state_ == State::Active ? SlotIntent::Beep : SlotIntent::Listen;
  }
}

void TwoHopColouringVertex::observe(const SlotFeedback& feedback) {
  switch (slot_) {
    case 0:
      if (candidate_) {
        internal_ = feedback.internal_collision();
        heard1_ = false;
        peripheral_ = false;
      } else {
        internal_ = false;
        heard1_ = feedback.heard_any();
        peripheral_ = heard1_ && feedback.heard_two_or_more();
      }
      break;
    case 1:
      if (candidate_ && !internal_ && !feedback.heard_any()) state_ = State::Coloured;
      break;
    case 2:
      if (state_ == State::Active) {
        if (!candidate_ && !heard1_ && !feedback.heard_any()) {
          p_.double_capped();
        } else {
          p_.halve();
        }
      }
      break;
    default:
      if (state_ == State::Coloured && !feedback.heard_any()) state_ = State::TurnedOff;
      break;
  }
  slot_ = (slot_ + 1) % 4;
}

std::uint64_t TwoHopColouringVertex::digest() const {
  return digest_of({static_cast<std::uint64_t>(state_), slot_, candidate_, p_.exponent,
                    static_cast<std::uint64_t>(colour_), internal_, heard1_, peripheral_});
}

// ---------------------------------------------------------------------------

std::unique_ptr<VertexAutomaton> DegreeComputation::spawn(const VertexInput&) const {
  return std::make_unique<DegreeVertex>();
}

std::uint64_t DegreeComputation::default_slot_budget(const GraphMetrics& m) const {
  return kBudgetFactor *
         std::max(phase_budget(BudgetKind::Degree, m.n, m.max_degree), kMinBudgetPhases) *
         slots_per_phase();
}

SlotIntent DegreeVertex::act(StreamRng& rng) {
  switch (slot_) {
    case 0:
      candidate_ = state_ == State::Active && rng.coin_pow2(p_.exponent);
      return candidate_ ? SlotIntent::Beep : SlotIntent::Listen;
    case 1:
      return peripheral_ ? SlotIntent::Beep : SlotIntent::Listen;
    case 2:
      return heard1_ ? SlotIntent::Beep : SlotIntent::Listen;
    case 3:
      announce_ = candidate_ && !internal_ && !heard2_;
      return announce_ ? SlotIntent::Beep : SlotIntent::Listen;
    default:
      return state_ == State::Active ? SlotIntent::Beep : SlotIntent::Listen;
  }
}

void DegreeVertex::observe(const SlotFeedback& feedback) {
  switch (slot_) {
    case 0:
      if (candidate_) {
        internal_ = feedback.internal_collision();
        heard1_ = false;
        peripheral_ = false;
      } else {
        internal_ = false;
        heard1_ = feedback.heard_any();
        peripheral_ = heard1_ && feedback.heard_two_or_more();
      }
      break;
    case 1:
      heard2_ = !feedback.beeped() && feedback.heard_any();
      break;
    case 2:
      heard3_ = !feedback.beeped() && feedback.heard_any();
      break;
    case 3:
      if (announce_) {
        state_ = State::Passive;
      } else if (feedback.heard_any()) {
        ++degree_;
      }
      if (state_ == State::Active) {
        if (!candidate_ && !heard1_ && !heard3_) {
          p_.double_capped();
        } else {
          p_.halve();
        }
      }
      break;
    default:
      if (state_ == State::Passive && !feedback.heard_any()) state_ = State::TurnedOff;
      ++phase_;
      break;
  }
  slot_ = (slot_ + 1) % 5;
}

std::uint64_t DegreeVertex::digest() const {
  return digest_of({static_cast<std::uint64_t>(state_), slot_, phase_, candidate_,
                    p_.exponent, static_cast<std::uint64_t>(degree_), internal_, heard1_,
                    peripheral_, heard2_, heard3_, announce_});
}

std::shared_ptr<VirtualSlotAdapter> make_degree_bl(EmulationParams params) {
  return std::make_shared<VirtualSlotAdapter>(std::make_shared<DegreeComputation>(), params);
}

// ---------------------------------------------------------------------------

namespace {

RunResult run_default(const Graph& g, const Protocol& protocol, std::uint64_t seed,
                      std::optional<std::uint64_t> budget,
                      std::vector<VertexInput> inputs = {}) {
  RunOptions options;
  options.seed = seed;
  options.slot_budget = budget ? *budget : protocol.default_slot_budget(metrics(g));
  options.inputs = std::move(inputs);
  return run(g, protocol, protocol.required_model(), options).result;
}

}  // namespace

DetectionRun detect_collision_bl(const Graph& g, std::span<const Vertex> wishers,
                                 std::size_t k, std::uint64_t seed) {
  std::vector<VertexInput> inputs(g.order());
  for (Vertex w : wishers) {
    if (w >= g.order()) throw std::invalid_argument("wisher out of range");
    inputs[w].wishes_to_beep = true;
  }
  CollisionDetection protocol(k);
  DetectionRun out;
  out.result = run_default(g, protocol, seed, std::nullopt, std::move(inputs));
  for (auto flag : out.result.payload) out.collision.push_back(flag != 0);
  return out;
}

RunResult colour_bcdl(const Graph& g, std::uint64_t seed, std::optional<std::uint64_t> budget) {
  return run_default(g, Colouring(), seed, budget);
}

RunResult colour_bcdl_bounded(const Graph& g, std::size_t bound_k, PaletteVariant variant,
                              std::uint64_t seed, std::optional<std::uint64_t> budget) {
  return run_default(g, BoundedColouring(bound_k, variant), seed, budget);
}

RunResult two_hop_colour_bcdlcd(const Graph& g, std::uint64_t seed,
                                std::optional<std::uint64_t> budget) {
  return run_default(g, TwoHopColouring(), seed, budget);
}

RunResult degree_bcdlcd(const Graph& g, std::uint64_t seed,
                        std::optional<std::uint64_t> budget) {
  return run_default(g, DegreeComputation(), seed, budget);
}

DegreeBlRun degree_bl(const Graph& g, EmulationParams params, std::uint64_t seed,
                      std::optional<std::uint64_t> budget,
                      std::span<const Signature> signatures) {
  std::vector<VertexInput> inputs;
  if (!signatures.empty()) {
    if (signatures.size() != g.order()) {
      throw std::invalid_argument("need one signature per vertex");
    }
    inputs.resize(g.order());
    for (std::size_t v = 0; v < g.order(); ++v) inputs[v].signature = signatures[v];
  }
  auto protocol = make_degree_bl(params);
  DegreeBlRun out;
  out.result = run_default(g, *protocol, seed, budget, std::move(inputs));
  out.correct = out.result.outcome == Outcome::Terminated &&
                oracle::check_degrees(g, out.result.payload).ok();
  return out;
}

std::vector<Signature> distinct_signatures(const Graph& g, std::size_t k) {
  // Two vertices of a closed 2-neighbourhood are at most 4 apart.
  const Graph far = square_graph(square_graph(g));
  std::vector<std::size_t> colour(g.order(), 0);
  std::size_t colours_used = 0;
  for (Vertex v = 0; v < g.order(); ++v) {
    std::vector<bool> taken(g.order() + 1, false);
    for (Vertex w : far.neighbours(v)) {
      if (w < v) taken[colour[w]] = true;
    }
    std::size_t c = 0;
    while (taken[c]) ++c;
    colour[v] = c;
    colours_used = std::max(colours_used, c + 1);
  }
  if (k < 64 && colours_used > (std::size_t{1} << k)) {
    throw std::invalid_argument("k = " + std::to_string(k) + " bits cannot separate " +
                                std::to_string(colours_used) + " signatures");
  }
  std::vector<Signature> out(g.order());
  for (Vertex v = 0; v < g.order(); ++v) {
    out[v].bits.resize(k, 0);
    for (std::size_t i = 0; i < k && i < 64; ++i) out[v].bits[i] = (colour[v] >> i) & 1;
  }
  return out;
}

}  // namespace beepsim
