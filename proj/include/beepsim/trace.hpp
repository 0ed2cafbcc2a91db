#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "beepsim/engine.hpp"

namespace beepsim {

// JSON-lines trace: one object per slot
//   {"slot":..,"phase":..,"pos":..,"intents":[0|1,..],"feedback":[code,..],
//    "digest":[..], optional "virtual_slot":{..}}
// followed by one {"result":{..}} line. `result_extra` is merged into the
// result object (algorithm name, parameters, verdict).
void write_trace_jsonl(std::ostream& out, const Trace& trace,
                       const nlohmann::json& result_extra = nlohmann::json::object());

struct LoadedTrace {
  Trace trace;
  nlohmann::json result;  // the full result object, including extras
};

// Throws std::runtime_error on malformed input.
LoadedTrace read_trace_jsonl(std::istream& in);

// Recomputes each slot's feedback from its recorded intents and reports every
// disagreement, plus gaps in slot numbering. Empty means the trace replays.
std::vector<std::string> replay_mismatches(const Graph& g, const Trace& trace);

SlotFeedback feedback_from_code(char code, ModelSpec model);

}  // namespace beepsim
