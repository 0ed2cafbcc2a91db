#include "beepsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "beepsim/oracle.hpp"

namespace beepsim::harness {

using nlohmann::json;

Algo parse_algo(std::string_view name) {
  if (name == "collide") return Algo::Collide;
  if (name == "colour") return Algo::Colour;
  if (name == "colour-k") return Algo::ColourK;
  if (name == "two-hop") return Algo::TwoHop;
  if (name == "degree") return Algo::Degree;
  if (name == "degree-bl") return Algo::DegreeBl;
  throw SpecError("unknown algorithm '" + std::string(name) + "'");
}

std::string to_string(Algo a) {
  switch (a) {
    case Algo::Collide: return "collide";
    case Algo::Colour: return "colour";
    case Algo::ColourK: return "colour-k";
    case Algo::TwoHop: return "two-hop";
    case Algo::Degree: return "degree";
    case Algo::DegreeBl: return "degree-bl";
  }
  return "?";
}

bool is_las_vegas(Algo a) { return a != Algo::Collide && a != Algo::DegreeBl; }

EmulationPolicy parse_emulation_policy(std::string_view name) {
  if (name == "per-graph") return EmulationPolicy::PerGraph;
  if (name == "per-vertex") return EmulationPolicy::PerVertex;
  if (name == "whp") return EmulationPolicy::Whp;
  throw SpecError("unknown emulation policy '" + std::string(name) + "'");
}

std::string payload_digest(std::span<const std::int64_t> payload) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (std::int64_t value : payload) {
    auto bits = static_cast<std::uint64_t>(value);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t nearest_rank(std::vector<std::uint64_t> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::pair<double, double> normal_ci95(std::size_t failures, std::size_t total) {
  if (total == 0) return {0.0, 1.0};
  const double p = static_cast<double>(failures) / static_cast<double>(total);
  const double half = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(total));
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

Aggregates compute_aggregates(std::span<const CsvRow> rows, std::uint64_t envelope) {
  Aggregates a;
  a.trials = rows.size();
  a.envelope = envelope;
  std::vector<std::uint64_t> phases, slots;
  for (const auto& r : rows) {
    phases.push_back(r.phases);
    slots.push_back(r.slots);
    if (r.outcome == Outcome::Terminated) {
      ++a.terminated;
      if (r.safety_ok && !*r.safety_ok) ++a.failures;
    }
    if (r.phases > envelope) ++a.exceed_count;
  }
  if (a.trials > 0) {
    a.termination_rate = static_cast<double>(a.terminated) / static_cast<double>(a.trials);
    a.exceed_fraction = static_cast<double>(a.exceed_count) / static_cast<double>(a.trials);
  }
  if (a.terminated > 0) {
    a.error_rate = static_cast<double>(a.failures) / static_cast<double>(a.terminated);
  }
  std::tie(a.error_ci_low, a.error_ci_high) = normal_ci95(a.failures, a.terminated);
  a.phases = {nearest_rank(phases, 0.5), nearest_rank(phases, 0.95), nearest_rank(phases, 1.0)};
  a.slots = {nearest_rank(slots, 0.5), nearest_rank(slots, 0.95), nearest_rank(slots, 1.0)};
  return a;
}

bool BatchReport::passed() const {
  return las_vegas ? aggregates.failures == 0 : soundness_violations == 0;
}

std::vector<CsvRow> BatchReport::csv_rows() const {
  std::vector<CsvRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({r.trial, r.seed, r.result.outcome, r.result.phases_used,
                   r.result.slots_used, r.safety_ok, r.payload_digest});
  }
  return out;
}

double compare_envelope(const BatchReport& report, std::uint64_t envelope) {
  if (report.rows.empty()) return 0.0;
  std::size_t over = 0;
  for (const auto& r : report.rows) {
    if (r.result.phases_used > envelope) ++over;
  }
  return static_cast<double>(over) / static_cast<double>(report.rows.size());
}

// ---------------------------------------------------------------------------

Experiment::Experiment(ExperimentSpec spec) : spec_(std::move(spec)) {
  try {
    graph_ = build_graph(spec_.graph);
  } catch (const GraphError& e) {
    throw SpecError(e.what());
  }
  prepare();
}

Experiment::Experiment(ExperimentSpec spec, Graph graph)
    : spec_(std::move(spec)), graph_(std::move(graph)) {
  prepare();
}

void Experiment::prepare() {
  if (spec_.trials < 1) throw SpecError("trials must be >= 1");
  metrics_ = metrics(graph_);
  const std::size_t n = metrics_.n;
  try {
    switch (spec_.algo) {
      case Algo::Collide: {
        if (spec_.k) {
          k_ = *spec_.k;
        } else if (spec_.eps) {
          k_ = k_for(KPolicy::PerVertex, n, *spec_.eps);
        } else {
          k_ = k_for(KPolicy::WhpLocal, n, 0.5);
        }
        protocol_ = std::make_shared<CollisionDetection>(*k_);
        std::vector<Vertex> wishers;
        if (spec_.wishers) {
          wishers = *spec_.wishers;
        } else {
          for (Vertex v = 0; v < n; ++v) wishers.push_back(v);
        }
        inputs_.assign(n, VertexInput{});
        std::vector<SlotIntent> intents(n, SlotIntent::Listen);
        for (Vertex w : wishers) {
          if (w >= n) throw SpecError("wisher " + std::to_string(w) + " out of range");
          inputs_[w].wishes_to_beep = true;
          intents[w] = SlotIntent::Beep;
        }
        collision_truth_.resize(n);
        for (Vertex v = 0; v < n; ++v) {
          collision_truth_[v] = collision_ground_truth(graph_, intents, v).any();
        }
        envelope_ = *k_;
        break;
      }
      case Algo::Colour:
        protocol_ = std::make_shared<Colouring>(spec_.local_termination);
        envelope_ = phase_budget(BudgetKind::Colouring, n, metrics_.max_degree);
        break;
      case Algo::ColourK: {
        cap_k_ = spec_.cap_k.value_or(metrics_.max_degree);
        if (*cap_k_ < metrics_.max_degree) {
          throw SpecError("colour-k needs K >= max degree (K=" + std::to_string(*cap_k_) +
                          ", max degree " + std::to_string(metrics_.max_degree) + ")");
        }
        auto p = std::make_shared<BoundedColouring>(*cap_k_, spec_.variant);
        envelope_ = bounded_colouring_cycle_budget(n, *cap_k_) * p->phases_per_cycle();
        protocol_ = std::move(p);
        break;
      }
      case Algo::TwoHop:
        protocol_ = std::make_shared<TwoHopColouring>();
        envelope_ = phase_budget(BudgetKind::TwoHop, n, metrics_.max_degree);
        break;
      case Algo::Degree:
        protocol_ = std::make_shared<DegreeComputation>();
        envelope_ = phase_budget(BudgetKind::Degree, n, metrics_.max_degree);
        break;
      case Algo::DegreeBl: {
        EmulationParams params;
        if (spec_.k) {
          params = EmulationParams::fixed(*spec_.k);
        } else {
          switch (spec_.emulation) {
            case EmulationPolicy::PerGraph:
              if (!spec_.eps) throw SpecError("per-graph emulation needs --eps");
              params = EmulationParams::per_graph(n, *spec_.eps);
              break;
            case EmulationPolicy::PerVertex:
              if (!spec_.eps) throw SpecError("per-vertex emulation needs --eps");
              params = EmulationParams::per_vertex(*spec_.eps);
              break;
            case EmulationPolicy::Whp:
              params = EmulationParams::whp(n);
              break;
          }
        }
        params.regenerate_per_slot = spec_.regenerate_signatures;
        k_ = params.k;
        protocol_ = make_degree_bl(params);
        if (spec_.signatures == SignatureMode::ForcedDistinct) {
          auto sigs = distinct_signatures(graph_, params.k);
          inputs_.assign(n, VertexInput{});
          for (Vertex v = 0; v < n; ++v) inputs_[v].signature = sigs[v];
        }
        envelope_ = phase_budget(BudgetKind::Degree, n, metrics_.max_degree);
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }

  const ModelSpec required = protocol_->required_model();
  model_ = spec_.model.value_or(required);
  if (!model_.provides(required)) {
    throw SpecError("capability mismatch: " + to_string(spec_.algo) + " needs model " +
                    to_string(required) + ", got " + to_string(model_));
  }
  budget_ = spec_.slot_budget ? *spec_.slot_budget : protocol_->default_slot_budget(metrics_);
  if (budget_ < 1) throw SpecError("slot budget must be >= 1");
}

TrialRow Experiment::run_trial(std::size_t trial, bool record_trace) const {
  TrialRow row;
  row.trial = trial;
  row.seed = spec_.base_seed + trial;
  RunOptions options;
  options.seed = row.seed;
  options.slot_budget = budget_;
  options.inputs = inputs_;
  options.record_trace = record_trace;
  auto out = run(graph_, *protocol_, model_, options);
  row.result = std::move(out.result);
  row.trace = std::move(out.trace);
  row.payload_digest = payload_digest(row.result.payload);

  const auto& payload = row.result.payload;
  oracle::Verdict verdict;
  switch (spec_.algo) {
    case Algo::Collide: {
      verdict = oracle::check_flags(payload, collision_truth_);
      for (std::size_t v = 0; v < payload.size(); ++v) {
        if (payload[v] != 0 && !collision_truth_[v]) row.sound = false;
      }
      break;
    }
    case Algo::Colour:
      verdict = oracle::is_proper_colouring(graph_, payload);
      break;
    case Algo::ColourK:
      verdict = oracle::is_proper_colouring(graph_, payload);
      for (std::size_t v = 0; v < payload.size(); ++v) {
        if (payload[v] < 0 || payload[v] > static_cast<std::int64_t>(*cap_k_)) {
          verdict.witnesses.push_back({static_cast<Vertex>(v), static_cast<Vertex>(v),
                                       payload[v], static_cast<std::int64_t>(*cap_k_)});
        }
      }
      break;
    case Algo::TwoHop:
      verdict = oracle::is_two_hop_colouring(graph_, payload);
      break;
    case Algo::Degree:
    case Algo::DegreeBl:
      verdict = oracle::check_degrees(graph_, payload);
      break;
  }
  row.verdict = oracle::to_json(verdict);
  if (row.result.outcome == Outcome::Terminated) row.safety_ok = verdict.ok();
  return row;
}

BatchReport Experiment::run_batch() const {
  BatchReport report;
  report.spec = spec_;
  report.protocol = protocol_->name();
  report.model = model_;
  report.graph = metrics_;
  report.las_vegas = is_las_vegas(spec_.algo);
  report.k = k_;
  report.cap_k = cap_k_;
  report.slot_budget = budget_;
  report.slots_per_phase = protocol_->slots_per_phase();
  report.rows.resize(spec_.trials);

  // Rows land at their trial index, so the report does not depend on which
  // worker finished first.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec_.trials) return;
      try {
        report.rows[i] = run_trial(i, spec_.record_traces);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = spec_.trials;
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(spec_.jobs, spec_.trials));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : report.rows) {
    if (!r.sound) ++report.soundness_violations;
  }
  auto csv = report.csv_rows();
  report.aggregates = compute_aggregates(csv, envelope_);

  json notes;
  notes["phases"] = envelope_;
  switch (spec_.algo) {
    case Algo::Collide:
      notes["formula"] = "k phases of 2 slots";
      notes["miss_bound_per_vertex"] = std::ldexp(1.0, -static_cast<int>(*k_));
      break;
    case Algo::Colour:
      notes["formula"] = "ceil(76 log2 n + 112 D)";
      break;
    case Algo::ColourK: {
      const auto per_cycle = *cap_k_ + 1;
      std::vector<std::uint64_t> cycles;
      for (const auto& r : report.rows) {
        cycles.push_back((r.result.phases_used + per_cycle - 1) / per_cycle);
      }
      notes["formula"] = "ceil(10 (log2 n + log2^2 K)) cycles of K+1 phases";
      notes["cycles"] = bounded_colouring_cycle_budget(metrics_.n, *cap_k_);
      notes["phases_per_cycle"] = per_cycle;
      notes["cycles_p50"] = nearest_rank(cycles, 0.5);
      notes["cycles_max"] = nearest_rank(cycles, 1.0);
      break;
    }
    case Algo::TwoHop:
      notes["formula"] = "ceil(76 log2 n + 112 D^2)";
      notes["slots_4_per_phase"] = 4 * envelope_;
      notes["slots_5_per_phase"] = 5 * envelope_;
      break;
    case Algo::Degree:
      notes["formula"] = "ceil(76 log2 n + 112 D^2)";
      notes["slots"] = 5 * envelope_;
      break;
    case Algo::DegreeBl:
      notes["formula"] = "ceil(76 log2 n + 112 D^2) phases of 2k+4 slots";
      notes["physical_slots_per_phase"] = report.slots_per_phase;
      notes["slots"] = envelope_ * report.slots_per_phase;
      break;
  }
  report.envelope_notes = std::move(notes);
  return report;
}

json Experiment::trace_result_fields(const TrialRow& row) const {
  json params = json::object();
  if (k_) params["k"] = *k_;
  if (cap_k_) params["cap_k"] = *cap_k_;
  if (spec_.algo == Algo::Collide) {
    std::vector<Vertex> wishers;
    for (Vertex v = 0; v < inputs_.size(); ++v) {
      if (inputs_[v].wishes_to_beep) wishers.push_back(v);
    }
    params["wishers"] = wishers;
  }
  return {{"algo", to_string(spec_.algo)},
          {"graph", spec_.graph},
          {"seed", row.seed},
          {"trial", row.trial},
          {"params", std::move(params)},
          {"verdict", row.verdict}};
}

BatchReport run_batch(const ExperimentSpec& spec) { return Experiment(spec).run_batch(); }

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kCsvHeader = "trial,seed,outcome,phases,slots,safety_ok,payload_digest";

}  // namespace

void write_csv(std::ostream& out, std::span<const CsvRow> rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << r.seed << ',' << to_string(r.outcome) << ',' << r.phases << ','
        << r.slots << ',' << (r.safety_ok ? (*r.safety_ok ? "1" : "0") : "na") << ','
        << r.payload_digest << '\n';
  }
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("csv: unexpected header");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error("csv: bad row '" + line + "'");
    CsvRow r;
    try {
      r.trial = std::stoull(cells[0]);
      r.seed = std::stoull(cells[1]);
      r.phases = std::stoull(cells[3]);
      r.slots = std::stoull(cells[4]);
    } catch (const std::exception&) {
      throw std::runtime_error("csv: bad number in '" + line + "'");
    }
    if (cells[2] == "Terminated") {
      r.outcome = Outcome::Terminated;
    } else if (cells[2] == "BudgetExhausted") {
      r.outcome = Outcome::BudgetExhausted;
    } else {
      throw std::runtime_error("csv: bad outcome '" + cells[2] + "'");
    }
    if (cells[5] == "1") {
      r.safety_ok = true;
    } else if (cells[5] == "0") {
      r.safety_ok = false;
    } else if (cells[5] != "na") {
      throw std::runtime_error("csv: bad safety_ok '" + cells[5] + "'");
    }
    r.payload_digest = cells[6];
    rows.push_back(std::move(r));
  }
  return rows;
}

json report_json(const BatchReport& report) {
  const auto& a = report.aggregates;
  auto quantiles = [](const Quantiles& q) {
    return json{{"p50", q.p50}, {"p95", q.p95}, {"max", q.max}};
  };
  json j;
  j["algo"] = to_string(report.spec.algo);
  j["protocol"] = report.protocol;
  j["graph"] = report.spec.graph;
  j["n"] = report.graph.n;
  j["max_degree"] = report.graph.max_degree;
  j["model"] = to_string(report.model);
  j["base_seed"] = report.spec.base_seed;
  j["las_vegas"] = report.las_vegas;
  if (report.k) j["k"] = *report.k;
  if (report.cap_k) j["cap_k"] = *report.cap_k;
  j["slot_budget"] = report.slot_budget;
  j["slots_per_phase"] = report.slots_per_phase;
  j["trials"] = a.trials;
  j["terminated"] = a.terminated;
  j["termination_rate"] = a.termination_rate;
  j[report.las_vegas ? "safety_violations" : "errors"] = a.failures;
  j["error_rate"] = a.error_rate;
  j["error_ci95"] = {a.error_ci_low, a.error_ci_high};
  if (!report.las_vegas) j["soundness_violations"] = report.soundness_violations;
  j["phases"] = quantiles(a.phases);
  j["slots"] = quantiles(a.slots);
  j["envelope"] = report.envelope_notes;
  j["exceed_count"] = a.exceed_count;
  j["exceed_fraction"] = a.exceed_fraction;
  j["passed"] = report.passed();
  return j;
}

std::size_t max_beepers_in_closed_neighbourhood(const Graph& g,
                                                std::span<const SlotIntent> intents) {
  std::size_t worst = 0;
  for (Vertex v = 0; v < g.order(); ++v) {
    std::size_t count = intents[v] == SlotIntent::Beep ? 1 : 0;
    for (Vertex w : g.neighbours(v)) {
      if (intents[w] == SlotIntent::Beep) ++count;
    }
    worst = std::max(worst, count);
  }
  return worst;
}

VerifyResult verify_trace(const Graph& g, const LoadedTrace& loaded) {
  VerifyResult out;
  out.replay_problems = replay_mismatches(g, loaded.trace);
  const auto& payload = loaded.trace.result.payload;
  if (payload.size() != g.order()) {
    out.replay_problems.push_back("payload has " + std::to_string(payload.size()) +
                                  " entries for " + std::to_string(g.order()) + " vertices");
    return out;
  }
  const Algo algo = parse_algo(loaded.result.at("algo").get<std::string>());
  const json params = loaded.result.value("params", json::object());

  if (algo == Algo::Degree) {
    for (const auto& rec : loaded.trace.records) {
      if (rec.label.position != DegreeComputation::kAnnouncePosition) continue;
      if (rec.intents.size() != g.order()) continue;
      if (max_beepers_in_closed_neighbourhood(g, rec.intents) > 1) {
        out.safety_problems.push_back("slot " + std::to_string(rec.slot) +
                                      ": two announcers share a closed neighbourhood");
      }
    }
  }

  if (loaded.trace.result.outcome != Outcome::Terminated) {
    out.notes.push_back("budget exhausted: outcome not validated");
    return out;
  }

  auto describe = [](const oracle::Verdict& v) {
    return std::to_string(v.witnesses.size()) + " witness(es)";
  };
  switch (algo) {
    case Algo::Collide: {
      std::vector<SlotIntent> intents(g.order(), SlotIntent::Listen);
      for (Vertex w : params.at("wishers").get<std::vector<Vertex>>()) {
        if (w >= g.order()) throw std::runtime_error("trace: wisher out of range");
        intents[w] = SlotIntent::Beep;
      }
      for (Vertex v = 0; v < g.order(); ++v) {
        const bool truth = collision_ground_truth(g, intents, v).any();
        if (payload[v] != 0 && !truth) {
          out.safety_problems.push_back("vertex " + std::to_string(v) +
                                        " reports a collision that did not happen");
        } else if (payload[v] == 0 && truth) {
          out.notes.push_back("vertex " + std::to_string(v) + " missed a collision");
        }
      }
      break;
    }
    case Algo::Colour: {
      auto v = oracle::is_proper_colouring(g, payload);
      if (!v.ok()) out.safety_problems.push_back("improper colouring: " + describe(v));
      break;
    }
    case Algo::ColourK: {
      auto v = oracle::is_proper_colouring(g, payload);
      if (!v.ok()) out.safety_problems.push_back("improper colouring: " + describe(v));
      const auto cap = params.at("cap_k").get<std::int64_t>();
      for (auto c : payload) {
        if (c < 0 || c > cap) {
          out.safety_problems.push_back("colour " + std::to_string(c) + " outside {0.." +
                                        std::to_string(cap) + "}");
        }
      }
      break;
    }
    case Algo::TwoHop: {
      auto v = oracle::is_two_hop_colouring(g, payload);
      if (!v.ok()) out.safety_problems.push_back("improper 2-hop colouring: " + describe(v));
      break;
    }
    case Algo::Degree: {
      auto v = oracle::check_degrees(g, payload);
      if (!v.ok()) out.safety_problems.push_back("wrong degrees: " + describe(v));
      break;
    }
    case Algo::DegreeBl: {
      auto v = oracle::check_degrees(g, payload);
      if (!v.ok()) out.notes.push_back("Monte Carlo error, wrong degrees: " + describe(v));
      break;
    }
  }
  return out;
}

}  // namespace beepsim::harness
