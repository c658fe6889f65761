#pragma once

#include <optional>
#include <span>

#include "scalenet/graph.hpp"
#include "scalenet/nn.hpp"
#include "scalenet/sparse.hpp"

namespace scalenet {

enum class FilterKind { Mlp, Gcn, Sage, Gat, Cheb, Appnp };

// Forward-only message-passing filters. Weight counts: MLP, GCN and GAT take one
// matrix, SAGE two (neighbour, self), CHEB K, APPNP K + 1.
struct FilterSpec {
  FilterKind kind = FilterKind::Gcn;
  SelfLoopPolicy self_loops = SelfLoopPolicy::Keep;
  int order = 1;                          // K for CHEB and APPNP
  std::optional<double> teleport_alpha;   // APPNP only, in (0, 1)
  std::optional<RealMatrix> attention;    // GAT only, weights over the adjacency support
  bool sage_normalized = false;           // SAGE neighbour term uses the normalized matrix

  void validate() const;
  std::size_t weight_count() const;
};

// binarize -> self-loop policy -> symmetric normalization (or a real-valued copy
// when `normalized` is false).
RealMatrix propagation_matrix(const IntMatrix& adj, SelfLoopPolicy policy, bool normalized = true);

DenseMatrix filter_forward(const FilterSpec& spec, const DirectedGraph& g, const DenseMatrix& x,
                           std::span<const DenseMatrix> weights);

// H <- P (H W_l) for every layer, with ReLU between layers when `activation`.
DenseMatrix stacked_propagation(const RealMatrix& p, const DenseMatrix& x, std::span<const DenseMatrix> weights,
                                bool activation);

// stacked_propagation with P = normalized A under the given self-loop policy.
// Without activation this equals P^n X W_1 ... W_n.
DenseMatrix stacked_linear_gcn(const DirectedGraph& g, const DenseMatrix& x, std::size_t n_layers,
                               SelfLoopPolicy self_loops, std::span<const DenseMatrix> weights, bool activation);

}  // namespace scalenet
