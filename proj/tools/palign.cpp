// Command-line front end.  Wires the pipeline stages together:
// phases -> graph -> cluster -> synth -> simulate, with a one-shot
// `pipeline` command running a seeded random instance end to end.
//
// Exit codes: 0 success, 1 unreadable/malformed input, 2 solver failure,
// 3 search budget exhausted, 4 diverging simulation, 5 invalid request.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "palign/alignment.hpp"
#include "palign/cluster_anneal.hpp"
#include "palign/cluster_exact.hpp"
#include "palign/errors.hpp"
#include "palign/io.hpp"
#include "palign/netsim.hpp"
#include "palign/phases.hpp"
#include "palign/simgraph.hpp"
#include "palign/types.hpp"

namespace fs = std::filesystem;
using namespace palign;

namespace {

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Output location: an explicit --out wins, otherwise the named default file
// inside --out-dir (which itself defaults to $PALIGN_OUT_DIR, then ".").
fs::path resolve_out(const std::string& explicit_out, const std::string& out_dir,
                     const char* default_name) {
  fs::path path = explicit_out.empty() ? fs::path(out_dir) / default_name : fs::path(explicit_out);
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  return path;
}

std::vector<int> parse_member_list(const std::string& text, int family_size) {
  std::vector<int> members;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    std::size_t used = 0;
    const int value = std::stoi(field, &used);
    if (used != field.size()) throw std::invalid_argument("bad member index '" + field + "'");
    if (value < 0 || value >= family_size)
      throw std::invalid_argument("member index " + std::to_string(value) + " out of range");
    if (!members.empty() && value <= members.back())
      throw std::invalid_argument("member list must be strictly increasing");
    members.push_back(value);
  }
  if (members.empty()) throw std::invalid_argument("empty member list");
  return members;
}

// 2x2 sectorial member with phases {hi, lo}, built as a congruence of a
// unimodular diagonal.  Draw order: 8 uniforms for the congruence factor.
CMatrix banded_member(Rng& rng, double hi, double lo) {
  CMatrix t = CMatrix::Identity(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      t(r, c) += 0.3 * Complex(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = std::polar(1.0, hi);
  d(1, 1) = std::polar(1.0, lo);
  return t.adjoint() * d * t;
}

// Agent dynamics for random instances: phase bands of half-width
// 0.02..0.1 rad around centers within +-0.15 rad.  Draw order: 2 uniforms
// for the band, then the congruence draws.
MatrixSet sample_banded_set(int agents, Rng& rng) {
  MatrixSet set;
  set.reserve(static_cast<std::size_t>(agents));
  for (int i = 0; i < agents; ++i) {
    const double center = 0.3 * uniform01(rng) - 0.15;
    const double spread = 0.02 + 0.08 * uniform01(rng);
    set.push_back(banded_member(rng, center + spread, center - spread));
  }
  return set;
}

CVector sample_initial_state(int agents, Rng& rng) {
  CVector x0(2 * agents);
  for (Eigen::Index i = 0; i < x0.size(); ++i)
    x0[i] = Complex(6.0 * uniform01(rng) - 3.0, 6.0 * uniform01(rng) - 3.0);
  return x0;
}

void apply_config_file(AnnealConfig& config, const fs::path& path) {
  for (const auto& [key, value] : io::read_key_value(path)) {
    try {
      if (key == "t0")
        config.t0 = std::stod(value);
      else if (key == "beta")
        config.beta = std::stod(value);
      else if (key == "gamma")
        config.gamma = std::stod(value);
      else if (key == "e")
        config.e = std::stod(value);
      else if (key == "seed")
        config.seed = std::stoull(value);
      else if (key == "node_budget")
        config.node_budget = std::stoull(value);
      else if (key == "invert_diversity_term")
        config.invert_diversity_term = value == "1" || value == "true";
      else
        throw ParseError(path.string() + ": unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError(path.string() + ": bad value for '" + key + "': '" + value + "'");
    }
  }
}

// Reads the similarity graph when a path is given, otherwise builds it from
// the oracle family at --alpha.  The two alpha sources must agree.
SimilarityGraph resolve_graph(const MatrixSet& set, const std::string& graph_path,
                              bool alpha_given, double alpha, int jobs) {
  if (!graph_path.empty()) {
    SimilarityGraph graph = io::read_similarity(graph_path);
    if (graph.size() != static_cast<int>(set.size()))
      throw DimensionMismatch("similarity graph covers " + std::to_string(graph.size()) +
                              " matrices, the set holds " + std::to_string(set.size()));
    if (alpha_given && alpha != graph.alpha)
      throw std::invalid_argument("--alpha disagrees with the graph file's alpha");
    return graph;
  }
  if (!alpha_given) throw std::invalid_argument("either --alpha or --graph is required");
  LmiFeasibilityOracle oracle(set, alpha);
  return build_similarity_graph(oracle, jobs);
}

int count_edges(const SimilarityGraph& graph) {
  int edges = 0;
  for (int i = 0; i < graph.size(); ++i)
    for (int j = i + 1; j < graph.size(); ++j)
      if (graph.edge(i, j)) ++edges;
  return edges;
}

struct PhasesArgs {
  std::string set_path;
  std::string boundary_csv;
  int samples = 256;
};

int run_phases(const PhasesArgs& args) {
  const MatrixSet set = io::read_matrix_set(args.set_path);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const SectorClass klass = classify(set[i]);
    std::cout << "matrix " << i << ": " << io::to_string(klass);
    if (klass != SectorClass::NonSectorial) {
      const PhaseSpectrum spectrum = phases(set[i]);
      std::cout << ", rank " << spectrum.rank << ", phases";
      for (double phi : spectrum.phases) std::cout << ' ' << io::format_double(phi);
    }
    std::cout << '\n';
  }
  if (!args.boundary_csv.empty()) {
    const fs::path path = resolve_out(args.boundary_csv, ".", "boundary.csv");
    std::ofstream out(path);
    if (!out) throw ParseError(path.string() + ": cannot open for writing");
    out << "# palign boundary v1\n# tool " << io::kToolVersion << "\n";
    out << "matrix,re,im\n";
    for (std::size_t i = 0; i < set.size(); ++i)
      for (const Complex& z : numerical_range_boundary(set[i], args.samples))
        out << i << ',' << io::format_double(z.real()) << ',' << io::format_double(z.imag())
            << '\n';
    std::cout << "boundary: " << set.size() << " ranges, " << args.samples
              << " samples each -> " << path.string() << '\n';
  }
  return 0;
}

struct DivergenceArgs {
  std::string set_path;
  std::string members;
};

int run_divergence(const DivergenceArgs& args) {
  const MatrixSet set = io::read_matrix_set(args.set_path);
  std::vector<int> members(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) members[i] = static_cast<int>(i);
  if (!args.members.empty())
    members = parse_member_list(args.members, static_cast<int>(set.size()));

  MatrixSet subset;
  for (int m : members) subset.push_back(set[static_cast<std::size_t>(m)]);
  const DiversityResult result = diversity(subset);
  std::cout << "divergence: " << io::format_double(result.value)
            << (result.certificate ? " (certified)" : " (not simultaneously alignable)") << '\n';
  return 0;
}

struct GraphArgs {
  std::string set_path;
  double alpha = 0.0;
  int jobs = default_jobs();
  std::string out;
  std::string out_dir = ".";
};

int run_graph(const GraphArgs& args) {
  const MatrixSet set = io::read_matrix_set(args.set_path);
  LmiFeasibilityOracle oracle(set, args.alpha);
  const SimilarityGraph graph = build_similarity_graph(oracle, args.jobs);
  const fs::path path = resolve_out(args.out, args.out_dir, "graph.csv");
  io::write_similarity(path, graph);
  std::cout << "graph: nodes=" << graph.size() << " edges=" << count_edges(graph)
            << " components=" << connected_components(graph).size() << " -> " << path.string()
            << '\n';
  return 0;
}

struct ClusterExactArgs {
  std::string set_path;
  std::string graph_path;
  bool alpha_given = false;
  double alpha = 0.0;
  bool brute = false;
  std::uint64_t node_budget = BnrOptions{}.node_budget;
  int jobs = default_jobs();
  std::string out;
  std::string out_dir = ".";
};

int run_cluster_exact(const ClusterExactArgs& args) {
  const MatrixSet set = io::read_matrix_set(args.set_path);
  Partition part;
  if (args.brute) {
    if (!args.alpha_given) throw std::invalid_argument("--brute-force requires --alpha");
    LmiFeasibilityOracle oracle(set, args.alpha);
    part = brute_force_min_partition(oracle);
  } else {
    const SimilarityGraph graph =
        resolve_graph(set, args.graph_path, args.alpha_given, args.alpha, args.jobs);
    LmiFeasibilityOracle oracle(set, graph.alpha);
    BnrOptions options;
    options.node_budget = args.node_budget;
    part = bnr_min_clustering(graph, oracle, options);
  }
  const fs::path path = resolve_out(args.out, args.out_dir, "partition.part");
  io::write_partition(path, part);
  std::cout << "cluster-exact: clusters=" << part.size() << " source=" << io::to_string(part.source)
            << " nodes=" << part.stats.nodes_expanded << " oracle_calls=" << part.stats.oracle_calls
            << " -> " << path.string() << '\n';
  return 0;
}

struct ClusterHbnbArgs {
  std::string set_path;
  std::string graph_path;
  std::string config_path;
  bool alpha_given = false;
  double alpha = 0.0;
  AnnealConfig config;
  std::vector<std::string> overridden;  // flag names given on the command line
  std::uint64_t node_budget = 0;
  bool budget_given = false;
  bool invert = false;
  int starts = 1;
  int jobs = default_jobs();
  std::string out;
  std::string log;
  std::string out_dir = ".";
};

int run_cluster_hbnb(ClusterHbnbArgs& args) {
  // Precedence: defaults, then the config file, then command-line flags.
  AnnealConfig config;
  if (!args.config_path.empty()) apply_config_file(config, args.config_path);
  for (const std::string& flag : args.overridden) {
    if (flag == "--seed") config.seed = args.config.seed;
    if (flag == "--T0") config.t0 = args.config.t0;
    if (flag == "--beta") config.beta = args.config.beta;
    if (flag == "--gamma") config.gamma = args.config.gamma;
    if (flag == "--e") config.e = args.config.e;
  }
  if (args.budget_given) config.node_budget = args.node_budget;
  if (args.invert) config.invert_diversity_term = true;
  if (args.starts < 1) throw std::invalid_argument("--starts must be positive");

  const MatrixSet set = io::read_matrix_set(args.set_path);
  const SimilarityGraph graph =
      resolve_graph(set, args.graph_path, args.alpha_given, args.alpha, args.jobs);

  // Independent restarts at consecutive seeds; each worker owns its oracle.
  // The winner is chosen after all runs finish, so thread timing never
  // changes the result.
  std::vector<std::optional<AnnealResult>> results(static_cast<std::size_t>(args.starts));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(args.starts));
  std::atomic<int> cursor{0};
  auto worker = [&] {
    for (int idx; (idx = cursor.fetch_add(1)) < args.starts;) {
      try {
        LmiFeasibilityOracle oracle(set, graph.alpha);
        AnnealConfig run = config;
        run.seed = config.seed + static_cast<std::uint64_t>(idx);
        results[static_cast<std::size_t>(idx)] = hbnb_min_clustering(graph, oracle, run);
      } catch (...) {
        failures[static_cast<std::size_t>(idx)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min(args.jobs, args.starts);
  for (int w = 0; w < std::max(1, workers); ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& failure : failures)
    if (failure) std::rethrow_exception(failure);

  int winner = 0;
  for (int idx = 1; idx < args.starts; ++idx)
    if (results[static_cast<std::size_t>(idx)]->partition.size() <
        results[static_cast<std::size_t>(winner)]->partition.size())
      winner = idx;
  const AnnealResult& best = *results[static_cast<std::size_t>(winner)];
  const std::uint64_t winning_seed = config.seed + static_cast<std::uint64_t>(winner);

  const io::FileMeta meta{{}, winning_seed};
  const fs::path part_path = resolve_out(args.out, args.out_dir, "partition.part");
  io::write_partition(part_path, best.partition, meta);
  const fs::path log_path = resolve_out(args.log, args.out_dir, "convergence.csv");
  io::write_convergence(log_path, best.log, {graph.alpha, winning_seed});
  std::cout << "cluster-hbnb: clusters=" << best.partition.size() << " seed=" << winning_seed
            << " starts=" << args.starts << " log_records=" << best.log.records.size() << " -> "
            << part_path.string() << '\n';
  return 0;
}

struct SynthArgs {
  std::string set_path;
  std::string partition_path;
  std::string laplacian_path;
  std::string out;
  std::string out_dir = ".";
};

int run_synth(const SynthArgs& args) {
  const MatrixSet set = io::read_matrix_set(args.set_path);
  const Partition part = io::read_partition(args.partition_path);
  const MatrixSet topology = io::read_matrix_set(args.laplacian_path);
  if (topology.size() != 1)
    throw DimensionMismatch("the topology file must hold exactly one matrix");
  if (topology[0].imag().cwiseAbs().maxCoeff() > 0.0)
    throw NotLaplacian("the topology matrix must be real");
  const RMatrix l = topology[0].real();
  const double phi = essential_phase(l);
  const AgentNetwork net = assemble_network(set, l, part);

  const fs::path path = resolve_out(args.out, args.out_dir, "network.net");
  io::write_network(path, {net, part.alpha, phi});
  std::cout << "synth: agents=" << net.size() << " controllers=" << net.controllers.size()
            << " phi_ess=" << io::format_double(phi) << " -> " << path.string() << '\n';
  return 0;
}

struct SimulateArgs {
  std::string network_path;
  double dt = 1e-3;
  double horizon = 50.0;
  std::uint64_t seed = 0;
  int stride = 1;
  std::string out;
  std::string out_dir = ".";
};

int run_simulate(const SimulateArgs& args) {
  const io::NetworkFile file = io::read_network(args.network_path);
  Rng rng(args.seed);
  const CVector x0 = sample_initial_state(file.network.size(), rng);
  const SimTrace trace = simulate_closed_loop(file.network, x0, args.dt, args.horizon);
  const fs::path path = resolve_out(args.out, args.out_dir, "trace.csv");
  io::write_trace(path, trace, {file.alpha, args.seed}, args.stride);

  const double initial = trace.sync_error.front();
  const double ratio = initial > 0.0 ? trace.sync_error.back() / initial : 0.0;
  char ratio_text[32];
  std::snprintf(ratio_text, sizeof ratio_text, "%.3g", ratio);
  std::cout << "simulate: steps=" << trace.times.size() - 1 << " sync_ratio=" << ratio_text
            << " -> " << path.string() << '\n';
  return 0;
}

struct PipelineArgs {
  int agents = 10;
  std::uint64_t seed = 0;
  double density = 0.7;
  double margin = 0.95;
  std::string method = "exact";
  std::uint64_t node_budget = BnrOptions{}.node_budget;
  int jobs = default_jobs();
  double dt = 1e-3;
  double horizon = 50.0;
  int stride = 50;
  std::string out_dir = ".";
};

int run_pipeline(const PipelineArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  if (args.agents < 2) throw std::invalid_argument("--agents must be at least 2");

  // One seeded stream drives the whole instance: dynamics, topology, then
  // the initial state.  Identical flags therefore reproduce every file.
  Rng rng(args.seed);
  const MatrixSet set = sample_banded_set(args.agents, rng);
  const RMatrix l = random_strongly_connected_laplacian(args.agents, args.density, rng);
  const double phi = essential_phase(l);
  const double alpha = args.margin * phi;

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  const io::FileMeta meta{alpha, args.seed};
  io::write_matrix_set(dir / "instance.mset", set, meta);
  io::write_matrix_set(dir / "laplacian.mset", {l.cast<Complex>()}, meta);

  LmiFeasibilityOracle oracle(set, alpha);
  const SimilarityGraph graph = build_similarity_graph(oracle, args.jobs);
  io::write_similarity(dir / "graph.csv", graph, meta);

  Partition part;
  if (args.method == "hbnb") {
    AnnealConfig config;
    config.seed = args.seed;
    config.node_budget = args.node_budget;
    const AnnealResult result = hbnb_min_clustering(graph, oracle, config);
    part = result.partition;
    io::write_convergence(dir / "convergence.csv", result.log, meta);
  } else {
    BnrOptions options;
    options.node_budget = args.node_budget;
    part = bnr_min_clustering(graph, oracle, options);
  }
  io::write_partition(dir / "partition.part", part, meta);

  const AgentNetwork net = assemble_network(set, l, part);
  io::write_network(dir / "network.net", {net, alpha, phi}, meta);

  const CVector x0 = sample_initial_state(args.agents, rng);
  const SimTrace trace = simulate_closed_loop(net, x0, args.dt, args.horizon);
  io::write_trace(dir / "trace.csv", trace, meta, args.stride);

  const double initial = trace.sync_error.front();
  const double ratio = initial > 0.0 ? trace.sync_error.back() / initial : 0.0;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  char ratio_text[32], runtime_text[32];
  std::snprintf(ratio_text, sizeof ratio_text, "%.3g", ratio);
  std::snprintf(runtime_text, sizeof runtime_text, "%.2f", seconds);
  std::cout << "pipeline: agents=" << args.agents << " clusters=" << part.size()
            << " phi_ess=" << io::format_double(phi) << " sync_ratio=" << ratio_text
            << " runtime=" << runtime_text << "s -> " << dir.string() << '\n';
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const Diverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  }
}

void add_out_dir(CLI::App* cmd, std::string& target) {
  cmd->add_option("--out-dir", target, "directory for default output files")
      ->envname("PALIGN_OUT_DIR");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-aligned controller clustering for networks of integrator agents"};
  app.require_subcommand(1);

  PhasesArgs phases_args;
  auto* phases_cmd = app.add_subcommand("phases", "Classify matrices and print their phases");
  phases_cmd->add_option("set", phases_args.set_path, "matrix set file")->required();
  phases_cmd->add_option("--boundary-csv", phases_args.boundary_csv,
                         "also write numerical range boundary samples to this CSV");
  phases_cmd->add_option("--samples", phases_args.samples, "boundary samples per matrix")
      ->check(CLI::PositiveNumber);

  DivergenceArgs div_args;
  auto* div_cmd =
      app.add_subcommand("divergence", "Infimum simultaneous alignment band of a subset");
  div_cmd->add_option("set", div_args.set_path, "matrix set file")->required();
  div_cmd->add_option("--members", div_args.members,
                      "comma-separated ascending indices; whole set if omitted");

  GraphArgs graph_args;
  auto* graph_cmd = app.add_subcommand("graph", "Build the pairwise similarity graph");
  graph_cmd->add_option("set", graph_args.set_path, "matrix set file")->required();
  graph_cmd->add_option("--alpha", graph_args.alpha, "alignment band half-width in radians")
      ->required();
  graph_cmd->add_option("--jobs", graph_args.jobs, "parallel pairwise queries");
  graph_cmd->add_option("--out", graph_args.out, "similarity CSV path");
  add_out_dir(graph_cmd, graph_args.out_dir);

  ClusterExactArgs exact_args;
  auto* exact_cmd = app.add_subcommand("cluster-exact", "Minimum clustering by exact search");
  exact_cmd->add_option("set", exact_args.set_path, "matrix set file")->required();
  auto* exact_alpha = exact_cmd->add_option("--alpha", exact_args.alpha, "alignment band");
  exact_cmd->add_option("--graph", exact_args.graph_path, "reuse a similarity CSV");
  exact_cmd->add_flag("--brute-force", exact_args.brute, "exhaust all partitions instead");
  exact_cmd->add_option("--node-budget", exact_args.node_budget, "search node cap");
  exact_cmd->add_option("--jobs", exact_args.jobs, "parallel pairwise queries");
  exact_cmd->add_option("--out", exact_args.out, "partition file path");
  add_out_dir(exact_cmd, exact_args.out_dir);

  ClusterHbnbArgs hbnb_args;
  auto* hbnb_cmd = app.add_subcommand("cluster-hbnb", "Minimum clustering by annealed search");
  hbnb_cmd->add_option("set", hbnb_args.set_path, "matrix set file")->required();
  auto* hbnb_alpha = hbnb_cmd->add_option("--alpha", hbnb_args.alpha, "alignment band");
  hbnb_cmd->add_option("--graph", hbnb_args.graph_path, "reuse a similarity CSV");
  hbnb_cmd->add_option("--config", hbnb_args.config_path, "key=value annealing settings");
  hbnb_cmd->add_option("--seed", hbnb_args.config.seed, "base random seed");
  hbnb_cmd->add_option("--T0", hbnb_args.config.t0, "initial temperature");
  hbnb_cmd->add_option("--beta", hbnb_args.config.beta, "global cooling factor");
  hbnb_cmd->add_option("--gamma", hbnb_args.config.gamma, "branch cooling factor");
  hbnb_cmd->add_option("--e", hbnb_args.config.e, "termination temperature");
  hbnb_cmd->add_option("--node-budget", hbnb_args.node_budget, "search node cap");
  hbnb_cmd->add_flag("--invert-diversity", hbnb_args.invert,
                     "reward small diversity in the branch potential");
  hbnb_cmd->add_option("--starts", hbnb_args.starts, "independent restarts at consecutive seeds");
  hbnb_cmd->add_option("--jobs", hbnb_args.jobs, "parallel restarts");
  hbnb_cmd->add_option("--out", hbnb_args.out, "partition file path");
  hbnb_cmd->add_option("--log", hbnb_args.log, "convergence CSV path");
  add_out_dir(hbnb_cmd, hbnb_args.out_dir);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Controllers from a certified partition");
  synth_cmd->add_option("set", synth_args.set_path, "matrix set file")->required();
  synth_cmd->add_option("--partition", synth_args.partition_path, "partition file")->required();
  synth_cmd->add_option("--laplacian", synth_args.laplacian_path,
                        "one-matrix set file holding the topology")
      ->required();
  synth_cmd->add_option("--out", synth_args.out, "network instance path");
  add_out_dir(synth_cmd, synth_args.out_dir);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate the closed loop from a random state");
  sim_cmd->add_option("network", sim_args.network_path, "network instance file")->required();
  sim_cmd->add_option("--dt", sim_args.dt, "integration step in seconds");
  sim_cmd->add_option("--horizon", sim_args.horizon, "simulated time in seconds");
  sim_cmd->add_option("--seed", sim_args.seed, "seed for the initial state");
  sim_cmd->add_option("--stride", sim_args.stride, "keep every n-th trace row");
  sim_cmd->add_option("--out", sim_args.out, "trace CSV path");
  add_out_dir(sim_cmd, sim_args.out_dir);

  PipelineArgs pipe_args;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Seeded random instance, end to end");
  pipe_cmd->add_option("--agents", pipe_args.agents, "number of agents");
  pipe_cmd->add_option("--seed", pipe_args.seed, "instance seed");
  pipe_cmd->add_option("--density", pipe_args.density, "extra-edge probability in (0,1]");
  pipe_cmd->add_option("--margin", pipe_args.margin, "alpha as a fraction of phi_ess");
  pipe_cmd->add_option("--method", pipe_args.method, "clustering engine")
      ->check(CLI::IsMember({"exact", "hbnb"}));
  pipe_cmd->add_option("--node-budget", pipe_args.node_budget, "search node cap");
  pipe_cmd->add_option("--jobs", pipe_args.jobs, "parallel pairwise queries");
  pipe_cmd->add_option("--dt", pipe_args.dt, "integration step in seconds");
  pipe_cmd->add_option("--horizon", pipe_args.horizon, "simulated time in seconds");
  pipe_cmd->add_option("--stride", pipe_args.stride, "keep every n-th trace row");
  add_out_dir(pipe_cmd, pipe_args.out_dir);

  CLI11_PARSE(app, argc, argv);

  if (*phases_cmd) return guarded([&] { return run_phases(phases_args); });
  if (*div_cmd) return guarded([&] { return run_divergence(div_args); });
  if (*graph_cmd) return guarded([&] { return run_graph(graph_args); });
  if (*exact_cmd) {
    exact_args.alpha_given = exact_alpha->count() > 0;
    exact_args.node_budget = exact_cmd->count("--node-budget") ? exact_args.node_budget
                                                               : BnrOptions{}.node_budget;
    return guarded([&] { return run_cluster_exact(exact_args); });
  }
  if (*hbnb_cmd) {
    hbnb_args.alpha_given = hbnb_alpha->count() > 0;
    hbnb_args.budget_given = hbnb_cmd->count("--node-budget") > 0;
    for (const char* flag : {"--seed", "--T0", "--beta", "--gamma", "--e"})
      if (hbnb_cmd->count(flag)) hbnb_args.overridden.push_back(flag);
    return guarded([&] { return run_cluster_hbnb(hbnb_args); });
  }
  if (*synth_cmd) return guarded([&] { return run_synth(synth_args); });
  if (*sim_cmd) return guarded([&] { return run_simulate(sim_args); });
  if (*pipe_cmd) return guarded([&] { return run_pipeline(pipe_args); });
  return 0;
}
