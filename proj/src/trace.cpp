#include "beepsim/trace.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace beepsim {

using nlohmann::json;

namespace {

json record_json(const SlotRecord& r) {
  json j;
  j["slot"] = r.slot;
  j["phase"] = r.label.phase;
  j["pos"] = r.label.position;
  json intents = json::array();
  for (auto i : r.intents) intents.push_back(static_cast<int>(i));
  j["intents"] = std::move(intents);
  json feedback = json::array();
  for (const auto& f : r.feedback) feedback.push_back(std::string(1, f.code()));
  j["feedback"] = std::move(feedback);
  j["digest"] = r.digests;
  if (r.label.emulation) {
    const auto& e = *r.label.emulation;
    j["virtual_slot"] = {{"slot", e.virtual_slot},
                         {"pos", e.virtual_position},
                         {"round", e.round},
                         {"half", e.half}};
  }
  return j;
}

}  // namespace

SlotFeedback feedback_from_code(char code, ModelSpec model) {
  switch (code) {
    case 'b': return SlotFeedback::beeper(std::nullopt);
    case 'a': return SlotFeedback::beeper(false);
    case 'c': return SlotFeedback::beeper(true);
    case '0': return SlotFeedback::listener(model.listener, Heard::Silence);
    case '+': return SlotFeedback::listener(ListenerSide::L, Heard::AtLeastOne);
    case '1': return SlotFeedback::listener(ListenerSide::Lcd, Heard::ExactlyOne);
    case '2': return SlotFeedback::listener(ListenerSide::Lcd, Heard::TwoOrMore);
    default:
      throw std::runtime_error(std::string("unknown feedback code '") + code + "'");
  }
}

void write_trace_jsonl(std::ostream& out, const Trace& trace, const json& result_extra) {
  for (const auto& r : trace.records) out << record_json(r).dump() << '\n';
  json result = result_extra;
  result["model"] = to_string(trace.model);
  result["outcome"] = to_string(trace.result.outcome);
  result["slots"] = trace.result.slots_used;
  result["phases"] = trace.result.phases_used;
  result["payload"] = trace.result.payload;
  out << json{{"result", std::move(result)}}.dump() << '\n';
}

LoadedTrace read_trace_jsonl(std::istream& in) {
  LoadedTrace loaded;
  std::vector<json> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(std::string("trace: bad JSON line: ") + e.what());
    }
  }
  if (lines.empty() || !lines.back().contains("result")) {
    throw std::runtime_error("trace: missing final result record");
  }
  try {
    loaded.result = lines.back().at("result");
    loaded.trace.model = parse_model(loaded.result.at("model").get<std::string>());
    auto& r = loaded.trace.result;
    auto outcome = loaded.result.at("outcome").get<std::string>();
    if (outcome == "Terminated") {
      r.outcome = Outcome::Terminated;
    } else if (outcome == "BudgetExhausted") {
      r.outcome = Outcome::BudgetExhausted;
    } else {
      throw std::runtime_error("trace: unknown outcome '" + outcome + "'");
    }
    r.slots_used = loaded.result.at("slots").get<std::uint64_t>();
    r.phases_used = loaded.result.at("phases").get<std::uint64_t>();
    r.payload = loaded.result.at("payload").get<std::vector<std::int64_t>>();

    lines.pop_back();
    for (const auto& j : lines) {
      SlotRecord rec;
      rec.slot = j.at("slot").get<std::uint64_t>();
      rec.label.phase = j.at("phase").get<std::uint64_t>();
      rec.label.position = j.at("pos").get<std::uint32_t>();
      for (int i : j.at("intents")) {
        if (i != 0 && i != 1) throw std::runtime_error("trace: intent must be 0 or 1");
        rec.intents.push_back(static_cast<SlotIntent>(i));
      }
      for (const auto& f : j.at("feedback")) {
        auto code = f.get<std::string>();
        if (code.size() != 1) throw std::runtime_error("trace: bad feedback code");
        rec.feedback.push_back(feedback_from_code(code[0], loaded.trace.model));
      }
      rec.digests = j.at("digest").get<std::vector<std::uint64_t>>();
      if (j.contains("virtual_slot")) {
        const auto& v = j.at("virtual_slot");
        rec.label.emulation = EmulationTag{v.at("pos").get<std::uint32_t>(),
                                           v.at("slot").get<std::uint64_t>(),
                                           v.at("round").get<std::uint32_t>(),
                                           v.at("half").get<std::uint32_t>()};
      }
      loaded.trace.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("trace: ") + e.what());
  }
  return loaded;
}

std::vector<std::string> replay_mismatches(const Graph& g, const Trace& trace) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& rec = trace.records[i];
    const std::string where = "slot " + std::to_string(rec.slot) + ": ";
    if (rec.slot != i) {
      problems.push_back(where + "expected slot number " + std::to_string(i));
    }
    if (rec.intents.size() != g.order() || rec.feedback.size() != g.order()) {
      problems.push_back(where + "vector length does not match graph order");
      continue;
    }
    auto expected = resolve_slot(g, rec.intents, trace.model);
    for (Vertex v = 0; v < g.order(); ++v) {
      if (expected[v].code() != rec.feedback[v].code()) {
        problems.push_back(where + "vertex " + std::to_string(v) + " recorded '" +
                           rec.feedback[v].code() + "', replay gives '" +
                           expected[v].code() + "'");
      }
    }
  }
  if (trace.records.size() != trace.result.slots_used) {
    problems.push_back("result claims " + std::to_string(trace.result.slots_used) +
                       " slots, trace holds " + std::to_string(trace.records.size()));
  }
  return problems;
}

}  // namespace beepsim
