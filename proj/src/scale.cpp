#include "scalenet/scale.hpp"

#include <cstdlib>
#include <random>
#include <stdexcept>

#include "scalenet/error.hpp"

namespace scalenet {

ScaleWord::ScaleWord(std::vector<Hop> hops) : hops_(std::move(hops)) {
  if (hops_.empty()) throw std::invalid_argument("scale word must have at least one hop");
}

ScaleWord ScaleWord::parse(std::string_view name) {
  std::vector<Hop> hops;
  std::size_t i = 0;
  while (i < name.size()) {
    if (name[i] != 'A') throw ValidationError("bad scale word '" + std::string(name) + "'");
    if (name.substr(i, 3) == "A^T") {
      hops.push_back(Hop::Rev);
      i += 3;
    } else {
      hops.push_back(Hop::Fwd);
      i += 1;
    }
  }
  if (hops.empty()) throw ValidationError("empty scale word");
  return ScaleWord(std::move(hops));
}

std::string ScaleWord::name() const {
  std::string out;
  for (Hop h : hops_) out += (h == Hop::Fwd) ? "A" : "A^T";
  return out;
}

IntMatrix scale_word_matrix(const DirectedGraph& g, const ScaleWord& w) {
  const IntMatrix& a = g.adjacency();
  const IntMatrix at = transpose(a);
  IntMatrix out = (w.hops().front() == Hop::Fwd) ? a : at;
  for (std::size_t k = 1; k < w.hops().size(); ++k) out = matmul(out, w.hops()[k] == Hop::Fwd ? a : at);
  return out;
}

std::vector<ScaleWord> all_words(std::size_t k) {
  std::vector<ScaleWord> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
    std::vector<Hop> hops(k);
    for (std::size_t i = 0; i < k; ++i) hops[i] = ((bits >> (k - 1 - i)) & 1U) ? Hop::Rev : Hop::Fwd;
    out.emplace_back(std::move(hops));
  }
  return out;
}

ScaledGraphSet build_scaled_set(const DirectedGraph& g, std::size_t k, SelfLoopPolicy policy) {
  if (k != 1 && k != 2) throw std::invalid_argument("scaled graph sets are defined for k in {1, 2}");
  ScaledGraphSet set;
  set.scale = k;
  set.policy = policy;
  set.lineage = g.hash();
  for (const auto& w : all_words(k)) set.members.emplace(w.name(), set_self_loops(binarize(scale_word_matrix(g, w)), policy));
  return set;
}

IntMatrix scaled_matrix(const DirectedGraph& g, std::string_view name, SelfLoopPolicy policy) {
  return set_self_loops(binarize(scale_word_matrix(g, ScaleWord::parse(name))), policy);
}

ProximityMatrix korder_proximity(const DirectedGraph& g, std::size_t k, ProximityKind kind, bool prune) {
  if (k < 2) throw std::invalid_argument("korder_proximity requires k >= 2");
  const IntMatrix a = binarize(g.adjacency());
  const IntMatrix at = transpose(a);
  const IntMatrix& left = (kind == ProximityKind::M) ? a : at;
  const IntMatrix& right = (kind == ProximityKind::M) ? at : a;

  auto finish = [prune](IntMatrix m) {
    m = binarize(m);
    return prune ? set_self_loops(m, SelfLoopPolicy::Remove) : m;
  };
  IntMatrix current = finish(matmul(left, right));
  for (std::size_t order = 3; order <= k; ++order) current = finish(matmul(matmul(left, current), right));
  return ProximityMatrix{k, kind, prune, std::move(current)};
}

IntMatrix remove_shared_edges(const IntMatrix& higher, const std::vector<IntMatrix>& lowers) {
  IntMatrix out = higher;
  for (const auto& low : lowers) out = difference_support(out, low);
  return out;
}

namespace {

std::vector<IntMatrix> inception_supports(const DirectedGraph& g, std::size_t k_max) {
  if (k_max < 1) throw std::invalid_argument("inception requires k_max >= 1");
  std::vector<IntMatrix> out{binarize(g.adjacency())};
  for (std::size_t k = 2; k <= k_max; ++k) {
    out.push_back(korder_proximity(g, k, ProximityKind::M, false).matrix);
    out.push_back(korder_proximity(g, k, ProximityKind::D, false).matrix);
  }
  return out;
}

}  // namespace

std::vector<RealMatrix> inception_uniform(const DirectedGraph& g, std::size_t k_max) {
  std::vector<RealMatrix> out;
  for (const auto& s : inception_supports(g, k_max)) out.push_back(normalize_sym(s));
  return out;
}

std::vector<RealMatrix> random_weight_inception(const DirectedGraph& g, std::size_t k_max, double low, double high,
                                                std::uint64_t seed, std::vector<RealMatrix>* raw_weights) {
  if (!(low > 0.0) || !(high >= low)) throw ValidationError("random weight range must satisfy 0 < low <= high");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(low, high);
  std::vector<RealMatrix> out;
  if (raw_weights) raw_weights->clear();
  for (const auto& s : inception_supports(g, k_max)) {
    std::vector<double> w(s.nnz());
    for (auto& x : w) x = (low == high) ? low : dist(rng);
    auto weighted = RealMatrix::from_canonical(s.rows(), s.cols(), {s.row_ptr().begin(), s.row_ptr().end()},
                                               {s.col_idx().begin(), s.col_idx().end()}, std::move(w));
    out.push_back(normalize_sym(weighted));
    if (raw_weights) raw_weights->push_back(std::move(weighted));
  }
  return out;
}

std::int64_t SelfLoopExpansionReport::max_deviation() const {
  return std::max({dev_aat, dev_ata, dev_aa, dev_atat});
}

namespace {
std::int64_t max_abs_difference(const IntMatrix& x, const IntMatrix& y) {
  std::int64_t worst = 0;
  for (auto v : add(x, scaled<std::int64_t>(y, -1)).values()) worst = std::max(worst, std::abs(v));
  return worst;
}
}  // namespace

SelfLoopExpansionReport selfloop_expansion_report(const IntMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("selfloop_expansion_report: matrix is not square");
  const IntMatrix at = transpose(a);
  const IntMatrix eye = IntMatrix::identity(a.rows());
  const IntMatrix a_hat = add(a, eye);
  const IntMatrix at_hat = add(at, eye);

  SelfLoopExpansionReport r;
  r.dev_aat = max_abs_difference(matmul(a_hat, at_hat), add(add(add(matmul(a, at), a), at), eye));
  r.dev_ata = max_abs_difference(matmul(at_hat, a_hat), add(add(add(matmul(at, a), a), at), eye));
  r.dev_aa = max_abs_difference(matmul(a_hat, a_hat), add(add(matmul(a, a), scaled<std::int64_t>(a, 2)), eye));
  r.dev_atat = max_abs_difference(matmul(at_hat, at_hat), add(add(matmul(at, at), scaled<std::int64_t>(at, 2)), eye));
  return r;
}

std::string block_name(SecondScaleBlock b) {
  switch (b) {
    case SecondScaleBlock::AA: return "AA";
    case SecondScaleBlock::AAt: return "AA^T";
    case SecondScaleBlock::AtA: return "A^TA";
    case SecondScaleBlock::AtAt: return "A^TA^T";
  }
  return {};
}

ScaleWord word_embedding_witness(const std::vector<SecondScaleBlock>& blocks) {
  std::vector<Hop> hops;
  hops.reserve(2 * blocks.size());
  for (auto b : blocks) {
    const bool first_rev = (b == SecondScaleBlock::AtA || b == SecondScaleBlock::AtAt);
    const bool second_rev = (b == SecondScaleBlock::AAt || b == SecondScaleBlock::AtAt);
    hops.push_back(first_rev ? Hop::Rev : Hop::Fwd);
    hops.push_back(second_rev ? Hop::Rev : Hop::Fwd);
  }
  return ScaleWord(std::move(hops));
}

IntMatrix block_word_matrix(const DirectedGraph& g, const std::vector<SecondScaleBlock>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("block word must be non-empty");
  IntMatrix out = scale_word_matrix(g, ScaleWord::parse(block_name(blocks.front())));
  for (std::size_t i = 1; i < blocks.size(); ++i)
    out = matmul(out, scale_word_matrix(g, ScaleWord::parse(block_name(blocks[i]))));
  return out;
}

EgoGraph ego_graph(const DirectedGraph& g, Index center, std::size_t depth, const ScaleWord& w) {
  if (center < 0 || center >= g.num_nodes()) throw ValidationError("ego_graph: center out of range");
  if (depth < 1) throw std::invalid_argument("ego_graph: depth must be >= 1");
  const IntMatrix m = scale_word_matrix(g, w);
  EgoGraph ego;
  ego.nodes.insert(center);
  std::vector<Index> frontier{center};
  for (std::size_t level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<Index> next;
    for (Index u : frontier) {
      for (Index v : m.row_cols(u)) {
        ego.edges.emplace(u, v);
        if (ego.nodes.insert(v).second) next.push_back(v);
      }
    }
    frontier = std::move(next);
  }
  return ego;
}

}  // namespace scalenet
