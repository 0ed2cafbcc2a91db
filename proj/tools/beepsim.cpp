// beepsim: run seeded trial batches of beeping-network protocols and verify traces.
//
// Exit codes: 0 pass, 1 safety violation, 2 invalid invocation or input.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "beepsim/harness.hpp"
#include "beepsim/trace.hpp"

namespace {

using namespace beepsim;

constexpr int kPass = 0;
constexpr int kSafetyViolation = 1;
constexpr int kSpecError = 2;

std::vector<Vertex> parse_wishers(const std::string& text) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      auto v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Vertex>(v));
    } catch (const std::exception&) {
      throw harness::SpecError("bad wisher list '" + text + "'");
    }
  }
  return out;
}

struct RunArgs {
  std::string algo;
  std::string graph;
  std::string model;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> k;
  std::optional<double> eps;
  std::optional<std::size_t> cap_k;
  std::string variant = "basic";
  std::string emulation = "whp";
  std::string wishers;
  bool distinct_signatures = false;
  bool regenerate_signatures = false;
  bool local_termination = false;
  std::optional<std::uint64_t> budget;
  std::string trace;
  std::size_t trace_trial = 0;
  std::string out;
  std::string summary;
  unsigned jobs = 1;
};

int do_run(const RunArgs& args) {
  harness::ExperimentSpec spec;
  spec.graph = args.graph;
  spec.algo = harness::parse_algo(args.algo);
  if (!args.model.empty()) {
    try {
      spec.model = parse_model(args.model);
    } catch (const std::invalid_argument& e) {
      throw harness::SpecError(e.what());
    }
  }
  spec.trials = args.trials;
  spec.base_seed = args.seed;
  spec.k = args.k;
  spec.eps = args.eps;
  spec.cap_k = args.cap_k;
  if (args.variant == "basic") {
    spec.variant = PaletteVariant::Basic;
  } else if (args.variant == "modified") {
    spec.variant = PaletteVariant::Modified;
  } else {
    throw harness::SpecError("variant must be basic or modified");
  }
  spec.emulation = harness::parse_emulation_policy(args.emulation);
  if (!args.wishers.empty() && args.wishers != "all") spec.wishers = parse_wishers(args.wishers);
  spec.signatures = args.distinct_signatures ? harness::SignatureMode::ForcedDistinct
                                             : harness::SignatureMode::Random;
  spec.regenerate_signatures = args.regenerate_signatures;
  spec.local_termination = args.local_termination;
  spec.slot_budget = args.budget;
  spec.jobs = args.jobs;

  harness::Experiment experiment(spec);
  auto report = experiment.run_batch();

  {
    std::ofstream csv(args.out);
    if (!csv) throw harness::SpecError("cannot write " + args.out);
    harness::write_csv(csv, report.csv_rows());
  }
  if (!args.trace.empty()) {
    if (args.trace_trial >= spec.trials) throw harness::SpecError("--trace-trial out of range");
    auto row = experiment.run_trial(args.trace_trial, true);
    std::ofstream trace(args.trace);
    if (!trace) throw harness::SpecError("cannot write " + args.trace);
    write_trace_jsonl(trace, *row.trace, experiment.trace_result_fields(row));
  }
  const auto summary = harness::report_json(report).dump(2);
  if (!args.summary.empty()) {
    std::ofstream out(args.summary);
    if (!out) throw harness::SpecError("cannot write " + args.summary);
    out << summary << '\n';
  }
  std::cout << summary << '\n';
  return report.passed() ? kPass : kSafetyViolation;
}

int do_verify(const std::string& trace_path, const std::string& graph_desc) {
  Graph g;
  try {
    g = build_graph(graph_desc);
  } catch (const GraphError& e) {
    throw harness::SpecError(e.what());
  }
  std::ifstream in(trace_path);
  if (!in) throw harness::SpecError("cannot open " + trace_path);
  LoadedTrace loaded;
  harness::VerifyResult result;
  try {
    loaded = read_trace_jsonl(in);
    result = harness::verify_trace(g, loaded);
  } catch (const std::exception& e) {
    throw harness::SpecError(e.what());
  }
  for (const auto& p : result.replay_problems) std::cout << "replay: " << p << '\n';
  for (const auto& p : result.safety_problems) std::cout << "safety: " << p << '\n';
  for (const auto& p : result.notes) std::cout << "note: " << p << '\n';
  std::cout << (result.ok() ? "PASS" : "FAIL") << ": " << loaded.trace.records.size()
            << " slots replayed\n";
  return result.ok() ? kPass : kSafetyViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-slot simulator for anonymous beeping networks"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a seeded batch of trials");
  run_cmd->add_option("--algo", run_args.algo, "collide|colour|colour-k|two-hop|degree|degree-bl")
      ->required()
      ->check(CLI::IsMember({"collide", "colour", "colour-k", "two-hop", "degree", "degree-bl"}));
  run_cmd->add_option("--graph", run_args.graph, "ring:n path:n complete:n star:n gnp:n:p:seed file:path")
      ->required();
  run_cmd->add_option("--model", run_args.model, "bl|bcdl|blcd|bcdlcd (default: the protocol's own)");
  run_cmd->add_option("--trials", run_args.trials)->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run_args.seed, "base seed; trial i uses seed+i");
  run_cmd->add_option("--k", run_args.k, "collision-detection phases / emulation length");
  run_cmd->add_option("--eps", run_args.eps, "target error probability");
  run_cmd->add_option("--cap-K", run_args.cap_k, "degree bound K for colour-k");
  run_cmd->add_option("--variant", run_args.variant, "basic|modified");
  run_cmd->add_option("--emulation", run_args.emulation, "per-graph|per-vertex|whp");
  run_cmd->add_option("--wishers", run_args.wishers, "comma-separated vertices, or 'all'");
  run_cmd->add_flag("--distinct-signatures", run_args.distinct_signatures,
                    "force distinct signatures in every closed 2-neighbourhood");
  run_cmd->add_flag("--regenerate-signatures", run_args.regenerate_signatures,
                    "draw a fresh signature for every emulated slot");
  run_cmd->add_flag("--local-termination", run_args.local_termination,
                    "colour: add the local-termination slot");
  run_cmd->add_option("--budget", run_args.budget, "slot budget per trial");
  run_cmd->add_option("--trace", run_args.trace, "write a JSON-lines trace");
  run_cmd->add_option("--trace-trial", run_args.trace_trial, "trial to trace (default 0)");
  run_cmd->add_option("--out", run_args.out, "per-trial CSV")->required();
  run_cmd->add_option("--summary", run_args.summary, "write the JSON summary here too");
  run_cmd->add_option("--jobs", run_args.jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string trace_path, verify_graph;
  auto* verify_cmd = app.add_subcommand("verify", "Replay and re-validate a trace");
  verify_cmd->add_option("--trace", trace_path)->required();
  verify_cmd->add_option("--graph", verify_graph)->required();

  std::string graph_desc, graph_out;
  auto* graph_cmd = app.add_subcommand("graph", "Write a generated graph as an edge list");
  graph_cmd->add_option("--graph", graph_desc)->required();
  graph_cmd->add_option("--out", graph_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kSpecError;
  }

  try {
    if (*run_cmd) return do_run(run_args);
    if (*verify_cmd) return do_verify(trace_path, verify_graph);
    if (*graph_cmd) {
      Graph g = build_graph(graph_desc);
      if (graph_out.empty()) {
        write_edge_list(std::cout, g);
      } else {
        std::ofstream out(graph_out);
        if (!out) throw harness::SpecError("cannot write " + graph_out);
        write_edge_list(out, g);
      }
      return kPass;
    }
  } catch (const harness::SpecError& e) {
    std::cerr << "beepsim: " << e.what() << '\n';
    return kSpecError;
  } catch (const GraphError& e) {
    std::cerr << "beepsim: " << e.what() << '\n';
    return kSpecError;
  } catch (const CapabilityFault& e) {
    std::cerr << "beepsim: capability fault: " << e.what() << '\n';
    return kSpecError;
  }
  return kSpecError;
}
