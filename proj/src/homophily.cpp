#include <algorithm>

#include "scalenet/dataset.hpp"
#include "scalenet/scale.hpp"

namespace scalenet {

HomophilyReport directional_homophily(const NodeDataset& ds, const std::string& matrix_name) {
  const IntMatrix m = scaled_matrix(ds.graph, matrix_name, SelfLoopPolicy::Remove);
  HomophilyReport r;
  r.matrix = matrix_name;
  std::vector<Index> counts(ds.num_classes);
  for (Index i = 0; i < m.rows(); ++i) {
    if (m.row_nnz(i) == 0) {
      ++r.no_neigh;
      continue;
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (Index j : m.row_cols(i)) ++counts[ds.labels[j]];
    const Index best = *std::max_element(counts.begin(), counts.end());
    const auto winners = std::count(counts.begin(), counts.end(), best);
    if (winners == 1 && counts[ds.labels[i]] == best) ++r.homo;
    else ++r.hetero;
  }
  return r;
}

}  // namespace scalenet
