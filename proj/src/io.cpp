#include "palign/io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "palign/errors.hpp"

namespace palign::io {
namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

[[noreturn]] void fail_at(const std::string& name, int line_no, const std::string& message) {
  throw ParseError(name + ":" + std::to_string(line_no) + ": " + message);
}

double parse_double_token(const std::string& name, int line_no, const std::string& token) {
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    fail_at(name, line_no, "not a number: '" + token + "'");
  return value;
}

long long parse_int_token(const std::string& name, int line_no, const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE)
    fail_at(name, line_no, "not an integer: '" + token + "'");
  return value;
}

// Sequential reader over the data lines of a structured text file.  Keeps the
// current line number so every error points at its source.
struct LineReader {
  std::ifstream in;
  std::string name;
  int line_no = 0;

  explicit LineReader(const std::filesystem::path& path) : in(path), name(path.string()) {
    if (!in) throw ParseError(name + ": cannot open for reading");
  }

  [[noreturn]] void fail(const std::string& message) const { fail_at(name, line_no, message); }

  [[noreturn]] void fail_shape(const std::string& message) const {
    throw DimensionMismatch(name + ":" + std::to_string(line_no) + ": " + message);
  }

  // Tokens of the next data line; empty at end of file.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (is_comment_or_blank(line)) continue;
      return split_tokens(line);
    }
    return {};
  }

  std::vector<std::string> require(const char* key) {
    auto tokens = next();
    if (tokens.empty()) fail(std::string("unexpected end of file, expected '") + key + "'");
    if (tokens[0] != key) fail("expected '" + std::string(key) + "', found '" + tokens[0] + "'");
    return tokens;
  }

  std::vector<std::string> require_exact(const char* key, std::size_t values) {
    auto tokens = require(key);
    if (tokens.size() != values + 1)
      fail("'" + std::string(key) + "' takes " + std::to_string(values) + " value(s), found " +
           std::to_string(tokens.size() - 1));
    return tokens;
  }

  double to_double(const std::string& token) const {
    return parse_double_token(name, line_no, token);
  }

  long long to_int(const std::string& token) const {
    return parse_int_token(name, line_no, token);
  }

  void expect_end() {
    if (!next().empty()) fail("trailing content after end of data");
  }
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  return out;
}

void write_prologue(std::ostream& out, const char* kind, const FileMeta& meta) {
  out << "# palign " << kind << " v1\n";
  out << "# tool " << kToolVersion << "\n";
  if (meta.alpha) out << "# alpha " << format_double(*meta.alpha) << "\n";
  if (meta.seed) out << "# seed " << *meta.seed << "\n";
}

void write_matrix_rows(std::ostream& out, const CMatrix& m) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << (pass == 0 ? "re" : "im");
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        out << ' ' << format_double(pass == 0 ? m(i, j).real() : m(i, j).imag());
      out << '\n';
    }
}

// Real rows then imaginary rows.  A wrong row length or a block whose row
// count disagrees with the declared dimensions is a shape error, not a syntax
// error: that is how a file mixing matrix sizes is reported.
CMatrix read_matrix_rows(LineReader& reader, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int pass = 0; pass < 2; ++pass) {
    const char* key = pass == 0 ? "re" : "im";
    const char* other = pass == 0 ? "im" : "re";
    for (int i = 0; i < rows; ++i) {
      auto tokens = reader.next();
      if (tokens.empty())
        reader.fail(std::string("unexpected end of file inside a matrix block, expected '") +
                    key + "'");
      if (tokens[0] != key) {
        if (tokens[0] == other || tokens[0] == "matrix")
          reader.fail_shape("matrix block row count disagrees with the declared dimensions");
        reader.fail("expected '" + std::string(key) + "', found '" + tokens[0] + "'");
      }
      if (tokens.size() != static_cast<std::size_t>(cols) + 1)
        reader.fail_shape("row has " + std::to_string(tokens.size() - 1) +
                          " entries, expected " + std::to_string(cols));
      for (int j = 0; j < cols; ++j) {
        const double value = reader.to_double(tokens[j + 1]);
        if (pass == 0)
          m(i, j) = Complex(value, 0.0);
        else
          m(i, j) += Complex(0.0, value);
      }
    }
  }
  return m;
}

}  // namespace

const char* to_string(PartitionSource source) {
  switch (source) {
    case PartitionSource::Singletons: return "singletons";
    case PartitionSource::BnR: return "bnr";
    case PartitionSource::HBnB: return "hbnb";
    case PartitionSource::BruteForce: return "brute-force";
  }
  return "singletons";
}

PartitionSource parse_source(const std::string& text) {
  if (text == "singletons") return PartitionSource::Singletons;
  if (text == "bnr") return PartitionSource::BnR;
  if (text == "hbnb") return PartitionSource::HBnB;
  if (text == "brute-force") return PartitionSource::BruteForce;
  throw ParseError("unknown partition source: '" + text + "'");
}

const char* to_string(SectorClass klass) {
  switch (klass) {
    case SectorClass::Sectorial: return "sectorial";
    case SectorClass::QuasiSectorial: return "quasi-sectorial";
    case SectorClass::SemiSectorial: return "semi-sectorial";
    case SectorClass::NonSectorial: return "non-sectorial";
  }
  return "non-sectorial";
}

SectorClass parse_sector_class(const std::string& text) {
  if (text == "sectorial") return SectorClass::Sectorial;
  if (text == "quasi-sectorial") return SectorClass::QuasiSectorial;
  if (text == "semi-sectorial") return SectorClass::SemiSectorial;
  if (text == "non-sectorial") return SectorClass::NonSectorial;
  throw ParseError("unknown sector class: '" + text + "'");
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_matrix_set(const std::filesystem::path& path, const MatrixSet& set,
                      const FileMeta& meta) {
  const Eigen::Index rows = set.empty() ? 0 : set.front().rows();
  const Eigen::Index cols = set.empty() ? 0 : set.front().cols();
  for (const CMatrix& m : set)
    if (m.rows() != rows || m.cols() != cols)
      throw DimensionMismatch("matrix set is not uniformly sized");

  auto out = open_out(path);
  write_prologue(out, "matrix-set", meta);
  out << "count " << set.size() << '\n';
  out << "rows " << rows << '\n';
  out << "cols " << cols << '\n';
  for (std::size_t idx = 0; idx < set.size(); ++idx) {
    out << "matrix " << idx << '\n';
    write_matrix_rows(out, set[idx]);
  }
}

MatrixSet read_matrix_set(const std::filesystem::path& path) {
  LineReader reader(path);
  const long long count = reader.to_int(reader.require_exact("count", 1)[1]);
  const long long rows = reader.to_int(reader.require_exact("rows", 1)[1]);
  const long long cols = reader.to_int(reader.require_exact("cols", 1)[1]);
  if (count < 0 || rows < 0 || cols < 0) reader.fail("count and dimensions must be nonnegative");

  MatrixSet set;
  set.reserve(static_cast<std::size_t>(count));
  for (long long idx = 0; idx < count; ++idx) {
    auto head = reader.next();
    if (head.empty()) reader.fail("unexpected end of file, expected 'matrix'");
    if (head[0] == "re" || head[0] == "im")
      reader.fail_shape("matrix block row count disagrees with the declared dimensions");
    if (head[0] != "matrix" || head.size() != 2)
      reader.fail("expected 'matrix <index>', found '" + head[0] + "'");
    if (reader.to_int(head[1]) != idx) reader.fail("matrix blocks must be numbered in file order");
    set.push_back(read_matrix_rows(reader, static_cast<int>(rows), static_cast<int>(cols)));
  }
  auto tail = reader.next();
  if (!tail.empty()) {
    if (tail[0] == "re" || tail[0] == "im")
      reader.fail_shape("matrix block row count disagrees with the declared dimensions");
    reader.fail("trailing content after last matrix");
  }
  return set;
}

void write_partition(const std::filesystem::path& path, const Partition& partition,
                     const FileMeta& meta) {
  auto out = open_out(path);
  FileMeta stamped = meta;
  stamped.alpha.reset();  // alpha is a data line below, not an annotation
  write_prologue(out, "partition", stamped);
  out << "alpha " << format_double(partition.alpha) << '\n';
  out << "source " << to_string(partition.source) << '\n';
  out << "nodes_expanded " << partition.stats.nodes_expanded << '\n';
  out << "oracle_calls " << partition.stats.oracle_calls << '\n';
  out << "clusters " << partition.clusters.size() << '\n';
  for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
    const Cluster& cluster = partition.clusters[c];
    out << "cluster " << c << '\n';
    out << "members " << cluster.members.size();
    for (int member : cluster.members) out << ' ' << member;
    out << '\n';
    out << "k_rows " << cluster.certificate.k.rows() << '\n';
    out << "k_cols " << cluster.certificate.k.cols() << '\n';
    write_matrix_rows(out, cluster.certificate.k);
    out << "ranks_preserved " << (cluster.certificate.ranks_preserved ? 1 : 0) << '\n';
    out << "spectra " << cluster.certificate.achieved.size() << '\n';
    for (const PhaseSpectrum& spectrum : cluster.certificate.achieved) {
      out << "spectrum " << to_string(spectrum.klass) << ' '
          << format_double(spectrum.center) << ' ' << spectrum.phases.size();
      for (double phi : spectrum.phases) out << ' ' << format_double(phi);
      out << '\n';
    }
  }
}

Partition read_partition(const std::filesystem::path& path) {
  LineReader reader(path);
  Partition partition;
  partition.alpha = reader.to_double(reader.require_exact("alpha", 1)[1]);
  try {
    partition.source = parse_source(reader.require_exact("source", 1)[1]);
  } catch (const ParseError& e) {
    reader.fail(e.what());
  }
  partition.stats.nodes_expanded =
      static_cast<std::uint64_t>(reader.to_int(reader.require_exact("nodes_expanded", 1)[1]));
  partition.stats.oracle_calls =
      static_cast<std::uint64_t>(reader.to_int(reader.require_exact("oracle_calls", 1)[1]));
  const long long clusters = reader.to_int(reader.require_exact("clusters", 1)[1]);
  if (clusters < 0) reader.fail("cluster count must be nonnegative");

  for (long long c = 0; c < clusters; ++c) {
    auto head = reader.require_exact("cluster", 1);
    if (reader.to_int(head[1]) != c) reader.fail("cluster blocks must be numbered in file order");
    Cluster cluster;

    auto members = reader.require("members");
    if (members.size() < 2) reader.fail("'members' needs a count");
    const long long member_count = reader.to_int(members[1]);
    if (member_count < 1) reader.fail("a cluster must have at least one member");
    if (members.size() != static_cast<std::size_t>(member_count) + 2)
      reader.fail("'members' lists " + std::to_string(members.size() - 2) +
                  " indices, declared " + std::to_string(member_count));
    for (long long m = 0; m < member_count; ++m) {
      const long long member = reader.to_int(members[static_cast<std::size_t>(m) + 2]);
      if (member < 0) reader.fail("member indices must be nonnegative");
      if (!cluster.members.empty() && member <= cluster.members.back())
        reader.fail("cluster members must be strictly increasing");
      cluster.members.push_back(static_cast<int>(member));
    }

    const long long k_rows = reader.to_int(reader.require_exact("k_rows", 1)[1]);
    const long long k_cols = reader.to_int(reader.require_exact("k_cols", 1)[1]);
    if (k_rows < 0 || k_cols < 0) reader.fail("controller dimensions must be nonnegative");
    cluster.certificate.k =
        read_matrix_rows(reader, static_cast<int>(k_rows), static_cast<int>(k_cols));
    cluster.certificate.alpha = partition.alpha;

    const long long preserved = reader.to_int(reader.require_exact("ranks_preserved", 1)[1]);
    if (preserved != 0 && preserved != 1) reader.fail("ranks_preserved must be 0 or 1");
    cluster.certificate.ranks_preserved = preserved == 1;

    const long long spectra = reader.to_int(reader.require_exact("spectra", 1)[1]);
    if (spectra < 0) reader.fail("spectrum count must be nonnegative");
    for (long long s = 0; s < spectra; ++s) {
      auto tokens = reader.require("spectrum");
      if (tokens.size() < 4) reader.fail("'spectrum' needs a class, center, and phase count");
      PhaseSpectrum spectrum;
      try {
        spectrum.klass = parse_sector_class(tokens[1]);
      } catch (const ParseError& e) {
        reader.fail(e.what());
      }
      spectrum.center = reader.to_double(tokens[2]);
      const long long phase_count = reader.to_int(tokens[3]);
      if (phase_count < 0) reader.fail("phase count must be nonnegative");
      if (tokens.size() != static_cast<std::size_t>(phase_count) + 4)
        reader.fail("'spectrum' lists " + std::to_string(tokens.size() - 4) +
                    " phases, declared " + std::to_string(phase_count));
      for (long long q = 0; q < phase_count; ++q)
        spectrum.phases.push_back(reader.to_double(tokens[static_cast<std::size_t>(q) + 4]));
      spectrum.rank = static_cast<int>(phase_count);
      cluster.certificate.achieved.push_back(std::move(spectrum));
    }
    partition.clusters.push_back(std::move(cluster));
  }
  reader.expect_end();
  return partition;
}

void write_similarity(const std::filesystem::path& path, const SimilarityGraph& graph,
                      const FileMeta& meta) {
  auto out = open_out(path);
  FileMeta stamped = meta;
  stamped.alpha = graph.alpha;  // the graph's own alpha is authoritative
  write_prologue(out, "similarity", stamped);
  out << "# nodes " << graph.size() << '\n';
  out << "i,j,weight\n";
  for (int i = 0; i < graph.size(); ++i)
    for (int j = i + 1; j < graph.size(); ++j)
      out << i << ',' << j << ',' << format_double(graph.weights(i, j)) << '\n';
}

SimilarityGraph read_similarity(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string name = path.string();
  if (!in) throw ParseError(name + ": cannot open for reading");

  std::optional<double> alpha;
  std::optional<long long> nodes;
  RMatrix weights;
  bool header_seen = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text[0] == '#') {
      auto tokens = split_tokens(text);
      if (tokens.size() == 3 && tokens[0] == "#") {
        if (tokens[1] == "alpha") alpha = parse_double_token(name, line_no, tokens[2]);
        if (tokens[1] == "nodes") {
          nodes = parse_int_token(name, line_no, tokens[2]);
          if (*nodes < 0) fail_at(name, line_no, "node count must be nonnegative");
          weights = RMatrix::Zero(*nodes, *nodes);
        }
      }
      continue;
    }
    if (!header_seen) {
      if (text != "i,j,weight")
        fail_at(name, line_no, "expected header 'i,j,weight', found '" + text + "'");
      header_seen = true;
      continue;
    }
    if (!nodes) fail_at(name, line_no, "'# nodes' must precede the edge rows");
    std::vector<std::string> fields;
    std::stringstream row(text);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) fail_at(name, line_no, "edge rows take exactly i,j,weight");
    const long long i = parse_int_token(name, line_no, fields[0]);
    const long long j = parse_int_token(name, line_no, fields[1]);
    if (i < 0 || j < 0 || i >= *nodes || j >= *nodes)
      fail_at(name, line_no, "edge endpoint out of range");
    if (i >= j) fail_at(name, line_no, "edge rows must satisfy i < j");
    const double weight = parse_double_token(name, line_no, fields[2]);
    weights(i, j) = weight;
    weights(j, i) = weight;
  }
  if (!alpha) throw ParseError(name + ": missing '# alpha' prologue entry");
  if (!nodes) throw ParseError(name + ": missing '# nodes' prologue entry");
  return SimilarityGraph{*alpha, std::move(weights)};
}

void write_convergence(const std::filesystem::path& path, const ConvergenceLog& log,
                       const FileMeta& meta) {
  auto out = open_out(path);
  write_prologue(out, "convergence", meta);
  out << "iteration,best_count,T,t,event\n";
  for (const ConvergenceRecord& record : log.records)
    out << record.iteration << ',' << record.best_count << ','
        << format_double(record.global_temperature) << ','
        << format_double(record.branch_temperature) << ',' << to_string(record.event) << '\n';
}

void write_trace(const std::filesystem::path& path, const SimTrace& trace, const FileMeta& meta,
                 int stride) {
  if (stride < 1) throw std::invalid_argument("trace stride must be positive");
  if (trace.times.size() != trace.states.size() ||
      trace.times.size() != trace.sync_error.size())
    throw DimensionMismatch("trace rows have mismatched lengths");

  auto out = open_out(path);
  write_prologue(out, "trace", meta);
  const Eigen::Index dim = trace.states.empty() ? 0 : trace.states.front().size();
  out << "time";
  for (Eigen::Index i = 0; i < dim / 2; ++i)
    out << ",y" << i << "_1_re,y" << i << "_1_im,y" << i << "_2_re,y" << i << "_2_im";
  out << ",sync_error\n";

  const std::size_t last = trace.times.empty() ? 0 : trace.times.size() - 1;
  for (std::size_t row = 0; row < trace.times.size(); ++row) {
    if (row % static_cast<std::size_t>(stride) != 0 && row != last) continue;
    const CVector& y = trace.states[row];
    if (y.size() != dim) throw DimensionMismatch("trace states have mismatched lengths");
    out << format_double(trace.times[row]);
    for (Eigen::Index e = 0; e < dim; ++e)
      out << ',' << format_double(y[e].real()) << ',' << format_double(y[e].imag());
    out << ',' << format_double(trace.sync_error[row]) << '\n';
  }
}

void write_network(const std::filesystem::path& path, const NetworkFile& file,
                   const FileMeta& meta) {
  validate_network(file.network);  // never persist a malformed instance
  auto out = open_out(path);
  FileMeta stamped = meta;
  stamped.alpha.reset();
  write_prologue(out, "network", stamped);

  const AgentNetwork& net = file.network;
  out << "alpha " << format_double(file.alpha) << '\n';
  out << "essential " << format_double(file.essential) << '\n';
  out << "agents " << net.size() << '\n';
  out << "laplacian\n";
  for (int i = 0; i < net.size(); ++i) {
    for (int j = 0; j < net.size(); ++j) out << (j ? " " : "") << format_double(net.l(i, j));
    out << '\n';
  }
  for (int i = 0; i < net.size(); ++i) {
    out << "dynamics " << i << '\n';
    write_matrix_rows(out, net.m[static_cast<std::size_t>(i)]);
  }
  out << "assignment";
  for (int a : net.assignment) out << ' ' << a;
  out << '\n';
  out << "controllers " << net.controllers.size() << '\n';
  for (std::size_t c = 0; c < net.controllers.size(); ++c) {
    out << "controller " << c << '\n';
    write_matrix_rows(out, net.controllers[c]);
  }
}

NetworkFile read_network(const std::filesystem::path& path) {
  LineReader reader(path);
  NetworkFile file;
  file.alpha = reader.to_double(reader.require_exact("alpha", 1)[1]);
  file.essential = reader.to_double(reader.require_exact("essential", 1)[1]);
  const long long n = reader.to_int(reader.require_exact("agents", 1)[1]);
  if (n < 1) reader.fail("agent count must be positive");

  reader.require_exact("laplacian", 0);
  RMatrix l(n, n);
  for (long long i = 0; i < n; ++i) {
    auto tokens = reader.next();
    if (tokens.empty()) reader.fail("unexpected end of file inside the Laplacian block");
    if (tokens.size() != static_cast<std::size_t>(n))
      reader.fail_shape("Laplacian row has " + std::to_string(tokens.size()) +
                        " entries, expected " + std::to_string(n));
    for (long long j = 0; j < n; ++j)
      l(i, j) = reader.to_double(tokens[static_cast<std::size_t>(j)]);
  }
  file.network.l = std::move(l);

  for (long long i = 0; i < n; ++i) {
    auto head = reader.require_exact("dynamics", 1);
    if (reader.to_int(head[1]) != i) reader.fail("dynamics blocks must be numbered in file order");
    file.network.m.push_back(read_matrix_rows(reader, 2, 2));
  }

  auto assignment = reader.require("assignment");
  if (assignment.size() != static_cast<std::size_t>(n) + 1)
    reader.fail_shape("'assignment' lists " + std::to_string(assignment.size() - 1) +
                      " entries, expected " + std::to_string(n));
  for (long long i = 0; i < n; ++i)
    file.network.assignment.push_back(
        static_cast<int>(reader.to_int(assignment[static_cast<std::size_t>(i) + 1])));

  const long long controllers = reader.to_int(reader.require_exact("controllers", 1)[1]);
  if (controllers < 0) reader.fail("controller count must be nonnegative");
  for (long long c = 0; c < controllers; ++c) {
    auto head = reader.require_exact("controller", 1);
    if (reader.to_int(head[1]) != c)
      reader.fail("controller blocks must be numbered in file order");
    file.network.controllers.push_back(read_matrix_rows(reader, 2, 2));
  }
  reader.expect_end();
  validate_network(file.network);
  return file;
}

std::map<std::string, std::string> read_key_value(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string name = path.string();
  if (!in) throw ParseError(name + ": cannot open for reading");

  std::map<std::string, std::string> result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const std::size_t equals = text.find('=');
    if (equals == std::string::npos) fail_at(name, line_no, "expected key=value");
    const std::string key = trim(text.substr(0, equals));
    const std::string value = trim(text.substr(equals + 1));
    if (key.empty()) fail_at(name, line_no, "empty key");
    result[key] = value;
  }
  return result;
}

}  // namespace palign::io
