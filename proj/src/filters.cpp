#include "scalenet/filters.hpp"

#include <stdexcept>
#include <string>

namespace scalenet {

void FilterSpec::validate() const {
  if ((kind == FilterKind::Cheb || kind == FilterKind::Appnp) && order < 1)
    throw std::invalid_argument("filter order K must be >= 1");
  if (kind == FilterKind::Appnp) {
    if (!teleport_alpha || !(*teleport_alpha > 0.0 && *teleport_alpha < 1.0))
      throw std::invalid_argument("APPNP requires teleport alpha in (0, 1)");
  } else if (teleport_alpha) {
    throw std::invalid_argument("teleport alpha is only meaningful for APPNP");
  }
  if (kind == FilterKind::Gat && !attention) throw std::invalid_argument("GAT requires supplied attention weights");
}

std::size_t FilterSpec::weight_count() const {
  switch (kind) {
    case FilterKind::Mlp:
    case FilterKind::Gcn:
    case FilterKind::Gat: return 1;
    case FilterKind::Sage: return 2;
    case FilterKind::Cheb: return static_cast<std::size_t>(order);
    case FilterKind::Appnp: return static_cast<std::size_t>(order) + 1;
  }
  return 0;
}

RealMatrix propagation_matrix(const IntMatrix& adj, SelfLoopPolicy policy, bool normalized) {
  IntMatrix support = set_self_loops(binarize(adj), policy);
  return normalized ? normalize_sym(support) : cast<double>(support);
}

namespace {

// Element-wise product of the attention weights with a binary support.
RealMatrix masked_attention(const RealMatrix& attention, const IntMatrix& support) {
  if (attention.rows() != support.rows() || attention.cols() != support.cols())
    throw std::invalid_argument("attention shape mismatch");
  std::vector<Triplet<double>> entries;
  for (const auto& t : support.triplets()) entries.push_back({t.row, t.col, attention.at(t.row, t.col)});
  return RealMatrix::from_triplets(support.rows(), support.cols(), std::move(entries));
}

}  // namespace

DenseMatrix filter_forward(const FilterSpec& spec, const DirectedGraph& g, const DenseMatrix& x,
                           std::span<const DenseMatrix> weights) {
  spec.validate();
  if (weights.size() != spec.weight_count())
    throw std::invalid_argument("filter expects " + std::to_string(spec.weight_count()) + " weight matrices");
  if (x.rows() != g.num_nodes()) throw std::invalid_argument("feature rows must equal node count");

  switch (spec.kind) {
    case FilterKind::Mlp:
      return x * weights[0];
    case FilterKind::Gcn:
      return spmm(propagation_matrix(g.adjacency(), spec.self_loops), x * weights[0]);
    case FilterKind::Sage: {
      const RealMatrix p = propagation_matrix(g.adjacency(), spec.self_loops, spec.sage_normalized);
      return spmm(p, x) * weights[0] + x * weights[1];
    }
    case FilterKind::Gat: {
      const IntMatrix support = set_self_loops(binarize(g.adjacency()), spec.self_loops);
      return spmm(masked_attention(*spec.attention, support), x * weights[0]);
    }
    case FilterKind::Cheb: {
      // T_1 = I, T_2 = I - P, T_{k+2} = 2 P T_{k+1} - T_k, applied to X.
      const RealMatrix p = propagation_matrix(g.adjacency(), spec.self_loops);
      DenseMatrix t_prev = x;
      DenseMatrix out = t_prev * weights[0];
      if (spec.order == 1) return out;
      DenseMatrix t_cur = x - spmm(p, x);
      out += t_cur * weights[1];
      for (int k = 2; k < spec.order; ++k) {
        DenseMatrix t_next = 2.0 * spmm(p, t_cur) - t_prev;
        out += t_next * weights[k];
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
      }
      return out;
    }
    case FilterKind::Appnp: {
      const double a = *spec.teleport_alpha;
      const RealMatrix p = propagation_matrix(g.adjacency(), spec.self_loops);
      DenseMatrix h = x * weights[0];
      for (int k = 1; k <= spec.order; ++k) h = (1.0 - a) * spmm(p, h) + a * (x * weights[k]);
      return h;
    }
  }
  throw std::invalid_argument("unknown filter kind");
}

DenseMatrix stacked_propagation(const RealMatrix& p, const DenseMatrix& x, std::span<const DenseMatrix> weights,
                                bool activation) {
  if (weights.empty()) throw std::invalid_argument("at least one layer is required");
  DenseMatrix h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = spmm(p, h * weights[l]);
    if (activation && l + 1 < weights.size()) h = relu(h);
  }
  return h;
}

DenseMatrix stacked_linear_gcn(const DirectedGraph& g, const DenseMatrix& x, std::size_t n_layers,
                               SelfLoopPolicy self_loops, std::span<const DenseMatrix> weights, bool activation) {
  if (n_layers < 1 || weights.size() != n_layers) throw std::invalid_argument("need one weight matrix per layer");
  return stacked_propagation(propagation_matrix(g.adjacency(), self_loops), x, weights, activation);
}

}  // namespace scalenet
