#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "palign/cluster_anneal.hpp"
#include "palign/cluster_exact.hpp"
#include "palign/netsim.hpp"
#include "palign/simgraph.hpp"
#include "palign/types.hpp"

// File formats.  Structured text for matrices and partitions, CSV for logs
// and traces.  Every writer emits a prologue naming the format, the tool
// version, and (when provided) the alpha and seed that produced the data, so
// any file on disk is attributable to a run.  Writers are deterministic:
// identical inputs produce byte-identical files.  Readers report malformed
// input as ParseError with file:line context; shape violations (ragged rows,
// mixed dimensions) surface as DimensionMismatch.

namespace palign::io {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance stamped into output prologues.  Readers skip these lines except
// where noted; similarity files carry alpha and node count as load-bearing
// prologue entries.
struct FileMeta {
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
};

const char* to_string(PartitionSource source);
PartitionSource parse_source(const std::string& text);

const char* to_string(SectorClass klass);
SectorClass parse_sector_class(const std::string& text);

// Shortest decimal form that strtod parses back to the identical bits.
std::string format_double(double value);

// Matrix set: count, shared dimensions, then per-matrix real and imaginary
// row arrays.  Order in the file is the identity order used everywhere else.
void write_matrix_set(const std::filesystem::path& path, const MatrixSet& set,
                      const FileMeta& meta = {});
MatrixSet read_matrix_set(const std::filesystem::path& path);

// Partition with per-cluster members, controller, and achieved spectra.
void write_partition(const std::filesystem::path& path, const Partition& partition,
                     const FileMeta& meta = {});
Partition read_partition(const std::filesystem::path& path);

// Similarity graph as an i,j,weight CSV over all pairs i < j; alpha and the
// node count ride in the prologue.
void write_similarity(const std::filesystem::path& path, const SimilarityGraph& graph,
                      const FileMeta& meta = {});
SimilarityGraph read_similarity(const std::filesystem::path& path);

// Annealing log as iteration,best_count,T,t,event rows.
void write_convergence(const std::filesystem::path& path, const ConvergenceLog& log,
                       const FileMeta& meta = {});

// Simulation trace, agent-major state columns plus the sync error.  stride
// subsamples the rows; the first and last step are always kept.
void write_trace(const std::filesystem::path& path, const SimTrace& trace,
                 const FileMeta& meta = {}, int stride = 1);

// Full closed-loop instance: dynamics, topology, assignment, controllers,
// together with the alpha the clusters were certified at and the phase
// budget of the topology.
struct NetworkFile {
  AgentNetwork network;
  double alpha = 0.0;
  double essential = 0.0;
};

void write_network(const std::filesystem::path& path, const NetworkFile& file,
                   const FileMeta& meta = {});
NetworkFile read_network(const std::filesystem::path& path);

// Plain key=value configuration; '#' comments and blank lines ignored.
std::map<std::string, std::string> read_key_value(const std::filesystem::path& path);

}  // namespace palign::io
