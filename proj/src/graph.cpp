#include "scalenet/graph.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "scalenet/error.hpp"

namespace scalenet {

DirectedGraph::DirectedGraph(IntMatrix adj) : adj_(std::move(adj)) {
  if (!adj_.is_square()) throw std::invalid_argument("adjacency matrix must be square");
  for (auto v : adj_.values())
    if (v <= 0) throw std::invalid_argument("adjacency entries must be positive counts");
}

DirectedGraph DirectedGraph::from_edge_list(const std::vector<Edge>& edges, Index n) {
  if (n < 0) throw ValidationError("node count must be non-negative");
  std::vector<Triplet<std::int64_t>> entries;
  entries.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [src, dst] = edges[k];
    if (src < 0 || src >= n || dst < 0 || dst >= n) {
      std::ostringstream msg;
      msg << "edge " << (k + 1) << " (" << src << ", " << dst << ") is out of range for " << n << " nodes";
      throw ValidationError(msg.str());
    }
    entries.push_back({src, dst, 1});
  }
  return DirectedGraph(IntMatrix::from_triplets(n, n, std::move(entries)));
}

std::uint64_t DirectedGraph::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(adj_.rows()));
  for (auto p : adj_.row_ptr()) mix(static_cast<std::uint64_t>(p));
  for (auto c : adj_.col_idx()) mix(static_cast<std::uint64_t>(c));
  for (auto v : adj_.values()) mix(static_cast<std::uint64_t>(v));
  return h;
}

namespace {

struct RawEdge {
  std::string src;
  std::string dst;
  std::size_t line;
};

std::vector<RawEdge> scan_edge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge list " + path.string());
  std::vector<RawEdge> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string src, dst, extra;
    if (!(fields >> src)) continue;
    if (!(fields >> dst) || (fields >> extra)) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected `src<TAB>dst`");
    }
    out.push_back({src, dst, lineno});
  }
  return out;
}

bool parse_index(const std::string& s, Index& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EdgeListFile read_edge_list(const std::filesystem::path& path) {
  auto raw = scan_edge_file(path);
  EdgeListFile result;
  std::unordered_map<std::string, Index> ids;
  auto id_of = [&](const std::string& label) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<Index>(result.node_labels.size()));
    if (inserted) result.node_labels.push_back(label);
    return it->second;
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) {
    const Index s = id_of(e.src);
    edges.emplace_back(s, id_of(e.dst));
  }
  result.graph = DirectedGraph::from_edge_list(edges, static_cast<Index>(result.node_labels.size()));
  return result;
}

DirectedGraph read_edge_list(const std::filesystem::path& path, Index n) {
  auto raw = scan_edge_file(path);
  std::vector<Triplet<std::int64_t>> entries;
  entries.reserve(raw.size());
  for (const auto& e : raw) {
    Index s = -1, d = -1;
    if (!parse_index(e.src, s) || !parse_index(e.dst, d) || s < 0 || s >= n || d < 0 || d >= n) {
      throw ValidationError(path.string() + ":" + std::to_string(e.line) + ": node id out of range [0, " +
                            std::to_string(n) + ")");
    }
    entries.push_back({s, d, 1});
  }
  return DirectedGraph(IntMatrix::from_triplets(n, n, std::move(entries)));
}

DirectedGraph random_digraph(Index n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet<std::int64_t>> entries;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && u(rng) < p) entries.push_back({i, j, 1});
  return DirectedGraph(IntMatrix::from_triplets(n, n, std::move(entries)));
}

void write_edge_list(std::ostream& os, const DirectedGraph& g) {
  const auto& a = g.adjacency();
  for (Index r = 0; r < a.rows(); ++r) {
    auto cols = a.row_cols(r);
    auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      for (std::int64_t c = 0; c < vals[k]; ++c) os << r << '\t' << cols[k] << '\n';
  }
}

namespace {
template <class V>
void write_matrix_impl(std::ostream& os, const CsrMatrix<V>& m) {
  os << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (const auto& t : m.triplets()) os << t.row << ' ' << t.col << ' ' << t.value << '\n';
}
}  // namespace

void write_matrix(std::ostream& os, const IntMatrix& m) { write_matrix_impl(os, m); }

void write_matrix(std::ostream& os, const RealMatrix& m) {
  auto old = os.precision(17);
  write_matrix_impl(os, m);
  os.precision(old);
}

IntMatrix read_int_matrix(std::istream& is) {
  Index rows = 0, cols = 0, nnz = 0;
  if (!(is >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
    throw ValidationError("matrix dump: bad header");
  std::vector<Triplet<std::int64_t>> entries;
  entries.reserve(nnz);
  for (Index k = 0; k < nnz; ++k) {
    Triplet<std::int64_t> t{};
    if (!(is >> t.row >> t.col >> t.value)) throw ValidationError("matrix dump: truncated at entry " + std::to_string(k + 1));
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ValidationError("matrix dump: entry " + std::to_string(k + 1) + " out of range");
    entries.push_back(t);
  }
  return IntMatrix::from_triplets(rows, cols, std::move(entries));
}

}  // namespace scalenet
