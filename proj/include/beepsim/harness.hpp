#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beepsim/engine.hpp"
#include "beepsim/graph.hpp"
#include "beepsim/protocols.hpp"
#include "beepsim/trace.hpp"

namespace beepsim::harness {

// Invalid experiment configuration. The CLI maps it to exit code 2.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algo : std::uint8_t { Collide, Colour, ColourK, TwoHop, Degree, DegreeBl };

Algo parse_algo(std::string_view name);
std::string to_string(Algo a);
// Las Vegas protocols must never return a wrong answer; Monte Carlo ones may.
bool is_las_vegas(Algo a);

enum class EmulationPolicy : std::uint8_t { PerGraph, PerVertex, Whp };
EmulationPolicy parse_emulation_policy(std::string_view name);

enum class SignatureMode : std::uint8_t { Random, ForcedDistinct };

struct ExperimentSpec {
  std::string graph;
  Algo algo = Algo::Colour;
  std::optional<ModelSpec> model;  // defaults to the protocol's own model
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;     // trial i runs with seed base_seed + i
  std::optional<std::size_t> k;    // collide phases, or degree-bl emulation length
  std::optional<double> eps;
  std::optional<std::size_t> cap_k;  // colour-k degree bound; defaults to max degree
  PaletteVariant variant = PaletteVariant::Basic;
  EmulationPolicy emulation = EmulationPolicy::Whp;
  SignatureMode signatures = SignatureMode::Random;
  bool regenerate_signatures = false;
  bool local_termination = false;
  std::optional<std::vector<Vertex>> wishers;  // collide; defaults to all vertices
  std::optional<std::uint64_t> slot_budget;
  unsigned jobs = 1;
  bool record_traces = false;
};

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  RunResult result;
  std::optional<bool> safety_ok;  // nullopt when the budget ran out
  bool sound = true;              // collide: no flag raised without a collision
  std::string payload_digest;
  nlohmann::json verdict;
  std::optional<Trace> trace;
};

// The columns written to the per-trial CSV.
struct CsvRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::BudgetExhausted;
  std::uint64_t phases = 0;
  std::uint64_t slots = 0;
  std::optional<bool> safety_ok;
  std::string payload_digest;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

struct Quantiles {
  std::uint64_t p50 = 0;
  std::uint64_t p95 = 0;
  std::uint64_t max = 0;

  friend bool operator==(const Quantiles&, const Quantiles&) = default;
};

// Everything here is a function of the CSV rows and the envelope only.
struct Aggregates {
  std::size_t trials = 0;
  std::size_t terminated = 0;
  double termination_rate = 0.0;
  std::size_t failures = 0;  // terminated trials whose output the oracle rejects
  double error_rate = 0.0;   // failures / terminated
  double error_ci_low = 0.0;
  double error_ci_high = 0.0;
  Quantiles phases;
  Quantiles slots;
  std::uint64_t envelope = 0;
  std::size_t exceed_count = 0;
  double exceed_fraction = 0.0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

Aggregates compute_aggregates(std::span<const CsvRow> rows, std::uint64_t envelope);

// Nearest-rank quantile of an unsorted sample; 0 for an empty sample.
std::uint64_t nearest_rank(std::vector<std::uint64_t> values, double q);

// 95% normal-approximation interval p +- 1.96 sqrt(p(1-p)/t), clamped to [0,1].
std::pair<double, double> normal_ci95(std::size_t failures, std::size_t total);

struct BatchReport {
  ExperimentSpec spec;
  std::string protocol;
  ModelSpec model;
  GraphMetrics graph;
  bool las_vegas = true;
  std::optional<std::size_t> k;
  std::optional<std::size_t> cap_k;
  std::uint64_t slot_budget = 0;
  std::uint32_t slots_per_phase = 0;
  std::vector<TrialRow> rows;
  Aggregates aggregates;
  std::size_t soundness_violations = 0;
  nlohmann::json envelope_notes;

  // Las Vegas: no safety violation. Monte Carlo: no unsound output.
  bool passed() const;
  std::vector<CsvRow> csv_rows() const;
};

// Fraction of trials whose phase count exceeds `envelope`.
double compare_envelope(const BatchReport& report, std::uint64_t envelope);

// A validated experiment, ready to run trials.
class Experiment {
 public:
  explicit Experiment(ExperimentSpec spec);
  Experiment(ExperimentSpec spec, Graph graph);

  const Graph& graph() const { return graph_; }
  const Protocol& protocol() const { return *protocol_; }
  ModelSpec model() const { return model_; }
  std::uint64_t slot_budget() const { return budget_; }
  std::uint64_t envelope() const { return envelope_; }

  TrialRow run_trial(std::size_t trial, bool record_trace) const;
  BatchReport run_batch() const;

  // Extra fields for a trace's result record: algorithm, parameters, verdict.
  nlohmann::json trace_result_fields(const TrialRow& row) const;

 private:
  void prepare();

  ExperimentSpec spec_;
  Graph graph_;
  GraphMetrics metrics_;
  std::shared_ptr<const Protocol> protocol_;
  ModelSpec model_;
  std::vector<VertexInput> inputs_;
  std::vector<bool> collision_truth_;
  std::optional<std::size_t> k_;
  std::optional<std::size_t> cap_k_;
  std::uint64_t budget_ = 0;
  std::uint64_t envelope_ = 0;
};

BatchReport run_batch(const ExperimentSpec& spec);

void write_csv(std::ostream& out, std::span<const CsvRow> rows);
std::vector<CsvRow> read_csv(std::istream& in);

nlohmann::json report_json(const BatchReport& report);

// Largest number of beepers inside any closed neighbourhood N[v].
std::size_t max_beepers_in_closed_neighbourhood(const Graph& g,
                                                std::span<const SlotIntent> intents);

struct VerifyResult {
  std::vector<std::string> replay_problems;
  std::vector<std::string> safety_problems;  // hard failures
  std::vector<std::string> notes;            // Monte Carlo errors, inconclusive runs

  bool ok() const { return replay_problems.empty() && safety_problems.empty(); }
};

// Replays a trace written by the CLI and re-validates its outcome against the
// oracles for the algorithm named in its result record.
VerifyResult verify_trace(const Graph& g, const LoadedTrace& loaded);

std::string payload_digest(std::span<const std::int64_t> payload);

}  // namespace beepsim::harness
