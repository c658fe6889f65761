#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scalenet/sparse.hpp"

namespace scalenet {

using Edge = std::pair<Index, Index>;

// Directed graph over dense 0-based node ids. adj(i, j) counts edges i -> j.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(IntMatrix adj);

  // Duplicate edges accumulate. Throws ValidationError naming the offending
  // (1-based) position in `edges` when an endpoint is outside [0, n).
  static DirectedGraph from_edge_list(const std::vector<Edge>& edges, Index n);

  Index num_nodes() const { return adj_.rows(); }
  Index num_edges() const { return adj_.nnz(); }
  const IntMatrix& adjacency() const { return adj_; }
  IntMatrix transposed() const { return transpose(adj_); }

  // Stable FNV-1a hash of the canonical adjacency, used to tag derived matrices.
  std::uint64_t hash() const;

 private:
  IntMatrix adj_;
};

struct EdgeListFile {
  DirectedGraph graph;
  std::vector<std::string> node_labels;  // node_labels[id] is the label found in the file
};

// `src<TAB>dst` per line, '#' starts a comment. Arbitrary labels are remapped
// to ids in order of first appearance.
EdgeListFile read_edge_list(const std::filesystem::path& path);

// Same format but ids must already be integers in [0, n).
DirectedGraph read_edge_list(const std::filesystem::path& path, Index n);

// Each ordered pair (i != j) becomes an edge with probability p.
DirectedGraph random_digraph(Index n, double p, std::mt19937_64& rng);

void write_edge_list(std::ostream& os, const DirectedGraph& g);

// Matrix dump: "rows cols nnz" header, then "i j v" lines sorted by (i, j).
void write_matrix(std::ostream& os, const IntMatrix& m);
void write_matrix(std::ostream& os, const RealMatrix& m);
IntMatrix read_int_matrix(std::istream& is);

}  // namespace scalenet
