#pragma once

// Independent reference computations for the tests. Everything here works on
// dense matrices with naive loops and never calls the sparse kernels under test.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "scalenet/graph.hpp"

namespace oracle {

using IntDense = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline IntDense dense(const scalenet::IntMatrix& m) {
  IntDense d = IntDense::Zero(m.rows(), m.cols());
  for (const auto& t : m.triplets()) d(t.row, t.col) = t.value;
  return d;
}

inline IntDense from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  IntDense d(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (int v : r) d(i, j++) = v;
    ++i;
  }
  return d;
}

inline IntDense naive_product(const IntDense& a, const IntDense& b) {
  IntDense out = IntDense::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

inline IntDense support(const IntDense& a) { return a.unaryExpr([](std::int64_t v) -> std::int64_t { return v != 0; }); }

// Counts every walk i = v0, v1, ..., vk = j whose hop t follows an edge forward
// (hops[t] == false) or backward (hops[t] == true).
inline IntDense enumerate_walks(const IntDense& a, const std::vector<bool>& reverse_hops) {
  const Eigen::Index n = a.rows();
  IntDense out = IntDense::Zero(n, n);
  std::vector<Eigen::Index> path;
  auto step = [&](auto&& self, Eigen::Index at, std::size_t depth, std::int64_t mult) -> void {
    if (depth == reverse_hops.size()) {
      out(path.front(), at) += mult;
      return;
    }
    for (Eigen::Index next = 0; next < n; ++next) {
      const std::int64_t w = reverse_hops[depth] ? a(next, at) : a(at, next);
      if (w) self(self, next, depth + 1, mult * w);
    }
  };
  for (Eigen::Index s = 0; s < n; ++s) {
    path.assign(1, s);
    step(step, s, 0, 1);
  }
  return out;
}

inline scalenet::DirectedGraph random_graph(scalenet::Index n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<scalenet::Edge> edges;
  for (scalenet::Index i = 0; i < n; ++i)
    for (scalenet::Index j = 0; j < n; ++j)
      if (i != j && u(rng) < p) edges.emplace_back(i, j);
  return scalenet::DirectedGraph::from_edge_list(edges, n);
}

inline Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

// Dense D_row^{-1/2} M D_col^{-1/2} with zero-degree rows/cols mapped to zero.
inline Eigen::MatrixXd sym_normalized(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  const Eigen::VectorXd r = m.rowwise().sum();
  const Eigen::RowVectorXd c = m.colwise().sum();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out(i, j) = m(i, j) / std::sqrt(r(i) * c(j));
  return out;
}

// Central differences of a scalar function of one matrix.
template <class F>
Eigen::MatrixXd numeric_gradient(Eigen::MatrixXd& param, F loss, double h = 1e-6) {
  Eigen::MatrixXd g(param.rows(), param.cols());
  for (Eigen::Index j = 0; j < param.cols(); ++j)
    for (Eigen::Index i = 0; i < param.rows(); ++i) {
      const double saved = param(i, j);
      param(i, j) = saved + h;
      const double up = loss();
      param(i, j) = saved - h;
      const double down = loss();
      param(i, j) = saved;
      g(i, j) = (up - down) / (2 * h);
    }
  return g;
}

inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double denom = a.norm() + b.norm();
  return denom < 1e-12 ? 0.0 : (a - b).norm() / denom;
}

// The 6-node worked example: edges 1->2, 3->2, 4->3, 5->3, 6->1 (1-based).
inline scalenet::DirectedGraph worked_example() {
  return scalenet::DirectedGraph::from_edge_list({{0, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 0}}, 6);
}

}  // namespace oracle
