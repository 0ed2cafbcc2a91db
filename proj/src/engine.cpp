#include "beepsim/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace beepsim {

Signature Signature::generate(std::size_t k, StreamRng& rng) {
  Signature s;
  s.bits.reserve(k);
  for (std::size_t i = 0; i < k; ++i) s.bits.push_back(rng.bit() ? 1 : 0);
  return s;
}

std::string to_string(Outcome o) {
  return o == Outcome::Terminated ? "Terminated" : "BudgetExhausted";
}

RunOutput run(const Graph& g, const Protocol& protocol, ModelSpec model,
              const RunOptions& options) {
  if (options.slot_budget < 1) {
    throw std::invalid_argument("slot budget must be at least 1");
  }
  const std::size_t n = g.order();
  if (!options.inputs.empty() && options.inputs.size() != n) {
    throw std::invalid_argument("vertex input count does not match graph order");
  }

  std::vector<std::unique_ptr<VertexAutomaton>> vertices;
  vertices.reserve(n);
  const VertexInput blank;
  for (std::size_t v = 0; v < n; ++v) {
    vertices.push_back(protocol.spawn(options.inputs.empty() ? blank : options.inputs[v]));
  }
  std::vector<const VertexAutomaton*> views;
  for (const auto& a : vertices) views.push_back(a.get());

  auto all_terminal = [&] {
    for (const auto& a : vertices) {
      if (!a->terminal()) return false;
    }
    return true;
  };

  RunOutput out;
  if (options.record_trace) {
    out.trace.emplace();
    out.trace->model = model;
  }

  std::uint64_t slot = 0;
  std::vector<SlotIntent> intents(n);
  std::vector<bool> live(n);
  bool done = all_terminal();
  while (!done && slot < options.slot_budget) {
    // Every intent is fixed before any feedback exists.
    for (std::size_t v = 0; v < n; ++v) {
      live[v] = !vertices[v]->terminal();
      if (live[v]) {
        StreamRng rng(options.seed, v, slot);
        intents[v] = vertices[v]->act(rng);
      } else {
        intents[v] = SlotIntent::Listen;
      }
    }
    auto feedback = resolve_slot(g, intents, model);
    for (std::size_t v = 0; v < n; ++v) {
      if (!live[v]) continue;
      try {
        vertices[v]->observe(feedback[v]);
      } catch (const CapabilityFault& fault) {
        throw CapabilityFault("slot " + std::to_string(slot) + " (model " +
                              to_string(model) + "): " + fault.what());
      }
    }

    if (out.trace || options.observer) {
      SlotRecord record;
      record.slot = slot;
      record.label = protocol.label(slot);
      record.intents = intents;
      record.feedback = std::move(feedback);
      record.digests.reserve(n);
      for (const auto& a : vertices) record.digests.push_back(a->digest());
      if (options.observer) options.observer(record, views);
      if (out.trace) out.trace->records.push_back(std::move(record));
    }
    ++slot;
    done = all_terminal();
  }

  RunResult& r = out.result;
  r.outcome = done ? Outcome::Terminated : Outcome::BudgetExhausted;
  r.slots_used = slot;
  const std::uint64_t spp = protocol.slots_per_phase();
  r.phases_used = (slot + spp - 1) / spp;
  r.payload.reserve(n);
  for (const auto& a : vertices) r.payload.push_back(a->payload());
  if (out.trace) out.trace->result = r;
  return out;
}

std::uint64_t ceil_count(double x) {
  if (x <= 0.0) return 0;
  double nearest = std::round(x);
  if (std::fabs(x - nearest) < 1e-9) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(x));
}

std::uint64_t phase_budget(BudgetKind kind, std::uint64_t n, std::uint64_t max_degree) {
  if (n < 1) throw std::invalid_argument("phase_budget needs n >= 1");
  const double log_n = std::log2(static_cast<double>(n));
  const double d = static_cast<double>(max_degree);
  const double spread = kind == BudgetKind::Colouring ? d : d * d;
  return ceil_count(76.0 * log_n + 112.0 * spread);
}

}  // namespace beepsim
