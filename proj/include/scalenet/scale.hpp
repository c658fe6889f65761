#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scalenet/graph.hpp"
#include "scalenet/sparse.hpp"

namespace scalenet {

enum class Hop { Fwd, Rev };

// A scaled edge: an ordered sequence of forward (A) and reverse (A^T) hops.
// Its name is the literal product, e.g. {Fwd, Rev} is "AA^T".
class ScaleWord {
 public:
  explicit ScaleWord(std::vector<Hop> hops);

  // Accepts names such as "A", "A^T", "AA^T", "A^TA^TA".
  static ScaleWord parse(std::string_view name);

  std::size_t scale() const { return hops_.size(); }
  const std::vector<Hop>& hops() const { return hops_; }
  std::string name() const;

  bool operator==(const ScaleWord&) const = default;

 private:
  std::vector<Hop> hops_;
};

// Left-to-right product of A / A^T per hop, as integer path counts.
IntMatrix scale_word_matrix(const DirectedGraph& g, const ScaleWord& w);

// All words of length k in lexicographic order (Fwd before Rev).
std::vector<ScaleWord> all_words(std::size_t k);

struct ScaledGraphSet {
  std::size_t scale = 0;
  SelfLoopPolicy policy = SelfLoopPolicy::Keep;
  std::uint64_t lineage = 0;
  std::map<std::string, IntMatrix> members;
};

// k = 1 gives {A, A^T}; k = 2 gives {AA, AA^T, A^TA, A^TA^T}. Members are
// binarized before the self-loop policy is applied.
ScaledGraphSet build_scaled_set(const DirectedGraph& g, std::size_t k, SelfLoopPolicy policy);

// Binarized scaled matrix for any word name, with the policy applied.
IntMatrix scaled_matrix(const DirectedGraph& g, std::string_view name, SelfLoopPolicy policy);

enum class ProximityKind { M, D };

struct ProximityMatrix {
  std::size_t order = 0;
  ProximityKind kind = ProximityKind::M;
  bool pruned = false;
  IntMatrix matrix;
};

// M(k) = A^{k-1} (A^T)^{k-1}, D(k) = (A^T)^{k-1} A^{k-1}, built order by order as
// M(k+1) = A M(k) A^T. With `prune`, the diagonal of every intermediate and of the
// result is cleared before it is used. Output is binary.
ProximityMatrix korder_proximity(const DirectedGraph& g, std::size_t k, ProximityKind kind, bool prune);

// support(higher) minus the union of the supports of `lowers`; values of `higher` kept.
IntMatrix remove_shared_edges(const IntMatrix& higher, const std::vector<IntMatrix>& lowers);

// [norm(A)] followed by [norm(M(k)), norm(D(k))] for 2 <= k <= k_max, every
// structural weight equal to 1 before normalization.
std::vector<RealMatrix> inception_uniform(const DirectedGraph& g, std::size_t k_max);

// Same supports as inception_uniform with the structural weights drawn i.i.d. from
// uniform[low, high] by a seeded generator. `raw_weights`, when non-null, receives
// the pre-normalization matrices.
std::vector<RealMatrix> random_weight_inception(const DirectedGraph& g, std::size_t k_max, double low, double high,
                                                std::uint64_t seed, std::vector<RealMatrix>* raw_weights = nullptr);

struct SelfLoopExpansionReport {
  std::int64_t dev_aat = 0;  // (A+I)(A^T+I) vs AA^T + A + A^T + I
  std::int64_t dev_ata = 0;  // (A^T+I)(A+I) vs A^TA + A + A^T + I
  std::int64_t dev_aa = 0;   // (A+I)(A+I) vs AA + 2A + I
  std::int64_t dev_atat = 0; // (A^T+I)(A^T+I) vs A^TA^T + 2A^T + I
  std::int64_t max_deviation() const;
  bool holds() const { return max_deviation() == 0; }
};

SelfLoopExpansionReport selfloop_expansion_report(const IntMatrix& a);

enum class SecondScaleBlock { AA, AAt, AtA, AtAt };

std::string block_name(SecondScaleBlock b);

// Flattens a word over second-scale blocks into the equivalent length-2k word.
ScaleWord word_embedding_witness(const std::vector<SecondScaleBlock>& blocks);

// Product of the second-scale block matrices, left to right.
IntMatrix block_word_matrix(const DirectedGraph& g, const std::vector<SecondScaleBlock>& blocks);

struct EgoGraph {
  std::set<Index> nodes;
  std::set<std::pair<Index, Index>> edges;
};

// Nodes reachable from `center` within `depth` hops of the scaled edge `w`, and
// the scaled edges traversed out of every node visited before the last hop.
EgoGraph ego_graph(const DirectedGraph& g, Index center, std::size_t depth, const ScaleWord& w);

}  // namespace scalenet
