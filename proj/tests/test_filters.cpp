#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "scalenet/filters.hpp"

using namespace scalenet;

namespace {

double max_abs(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

struct Fixture {
  std::mt19937_64 rng{17};
  DirectedGraph g = oracle::random_graph(25, 0.12, rng);
  Eigen::MatrixXd a = to_dense(g.adjacency());
  Eigen::MatrixXd p = oracle::sym_normalized(a);
  DenseMatrix x = oracle::gaussian(25, 6, rng);
  std::vector<DenseMatrix> w;
  Fixture() {
    for (int i = 0; i < 4; ++i) w.push_back(oracle::gaussian(6, 6, rng));
  }
};

}  // namespace

TEST_CASE("filter spec validation") {
  FilterSpec appnp;
  appnp.kind = FilterKind::Appnp;
  CHECK_THROWS(appnp.validate());
  appnp.teleport_alpha = 0.1;
  CHECK_NOTHROW(appnp.validate());
  appnp.teleport_alpha = 1.0;
  CHECK_THROWS(appnp.validate());

  FilterSpec gcn;
  gcn.teleport_alpha = 0.2;
  CHECK_THROWS(gcn.validate());

  FilterSpec cheb;
  cheb.kind = FilterKind::Cheb;
  cheb.order = 0;
  CHECK_THROWS(cheb.validate());

  FilterSpec gat;
  gat.kind = FilterKind::Gat;
  CHECK_THROWS(gat.validate());
}

TEST_CASE("MLP and GCN") {
  Fixture f;
  FilterSpec mlp;
  mlp.kind = FilterKind::Mlp;
  CHECK(max_abs(filter_forward(mlp, f.g, f.x, {f.w.data(), 1}), f.x * f.w[0]) < 1e-12);

  FilterSpec gcn;
  CHECK(max_abs(filter_forward(gcn, f.g, f.x, {f.w.data(), 1}), f.p * f.x * f.w[0]) < 1e-12);
  gcn.self_loops = SelfLoopPolicy::Add;
  const Eigen::MatrixXd pi = oracle::sym_normalized(f.a + Eigen::MatrixXd::Identity(25, 25));
  CHECK(max_abs(filter_forward(gcn, f.g, f.x, {f.w.data(), 1}), pi * f.x * f.w[0]) < 1e-12);
  CHECK_THROWS(filter_forward(gcn, f.g, f.x, {f.w.data(), 2}));
}

TEST_CASE("CHEB closed forms") {
  Fixture f;
  FilterSpec cheb;
  cheb.kind = FilterKind::Cheb;
  cheb.order = 1;
  CHECK(max_abs(filter_forward(cheb, f.g, f.x, {f.w.data(), 1}), f.x * f.w[0]) < 1e-12);

  cheb.order = 2;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(25, 25);
  const DenseMatrix k2 = f.x * f.w[0] + (id - f.p) * f.x * f.w[1];
  CHECK(max_abs(filter_forward(cheb, f.g, f.x, {f.w.data(), 2}), k2) < 1e-12);

  cheb.order = 3;
  const Eigen::MatrixXd t3 = 2 * f.p * (id - f.p) - id;
  CHECK(max_abs(filter_forward(cheb, f.g, f.x, {f.w.data(), 3}), k2 + t3 * f.x * f.w[2]) < 1e-12);
}

TEST_CASE("APPNP K=2 closed form") {
  Fixture f;
  FilterSpec appnp;
  appnp.kind = FilterKind::Appnp;
  appnp.order = 2;
  appnp.teleport_alpha = 0.15;
  const double a = 0.15;
  const DenseMatrix expected = (1 - a) * (1 - a) * f.p * f.p * f.x * f.w[0] + (1 - a) * a * f.p * f.x * f.w[1] +
                               a * f.x * f.w[2];
  CHECK(max_abs(filter_forward(appnp, f.g, f.x, {f.w.data(), 3}), expected) < 1e-12);
}

TEST_CASE("SAGE variants") {
  Fixture f;
  FilterSpec sage;
  sage.kind = FilterKind::Sage;
  const DenseMatrix raw = f.a * f.x * f.w[0] + f.x * f.w[1];
  CHECK(max_abs(filter_forward(sage, f.g, f.x, {f.w.data(), 2}), raw) < 1e-12);

  sage.sage_normalized = true;
  const DenseMatrix norm = f.p * f.x * f.w[0] + f.x * f.w[1];
  CHECK(max_abs(filter_forward(sage, f.g, f.x, {f.w.data(), 2}), norm) < 1e-12);

  // An added self-loop is absorbed by the self weight: (I + A) X W1 + X W2 = A X W1 + X (W1 + W2).
  sage.sage_normalized = false;
  sage.self_loops = SelfLoopPolicy::Add;
  const DenseMatrix with_loops = filter_forward(sage, f.g, f.x, {f.w.data(), 2});
  sage.self_loops = SelfLoopPolicy::Keep;
  const std::vector<DenseMatrix> retuned{f.w[0], f.w[0] + f.w[1]};
  CHECK(max_abs(with_loops, filter_forward(sage, f.g, f.x, retuned)) < 1e-12);
}

TEST_CASE("GAT uses supplied attention on the support only") {
  Fixture f;
  std::vector<Triplet<double>> att;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::MatrixXd dense_att = Eigen::MatrixXd::Zero(25, 25);
  for (Index i = 0; i < 25; ++i)
    for (Index j = 0; j < 25; ++j) {
      const double v = u(f.rng);
      att.push_back({i, j, v});
      if (f.a(i, j) != 0) dense_att(i, j) = v;
    }
  FilterSpec gat;
  gat.kind = FilterKind::Gat;
  gat.attention = RealMatrix::from_triplets(25, 25, att);
  CHECK(max_abs(filter_forward(gat, f.g, f.x, {f.w.data(), 1}), dense_att * f.x * f.w[0]) < 1e-12);
}

TEST_CASE("stacked linear GCN") {
  Fixture f;
  CHECK(max_abs(stacked_linear_gcn(f.g, f.x, 2, SelfLoopPolicy::Keep, {f.w.data(), 2}, false),
                f.p * f.p * f.x * f.w[0] * f.w[1]) < 1e-9);

  const Eigen::MatrixXd pi = oracle::sym_normalized(f.a + Eigen::MatrixXd::Identity(25, 25));
  CHECK(max_abs(stacked_linear_gcn(f.g, f.x, 1, SelfLoopPolicy::Add, {f.w.data(), 1}, false), pi * f.x * f.w[0]) <
        1e-12);

  std::vector<Edge> loops;
  for (Index i = 0; i < 25; ++i) loops.emplace_back(i, i);
  const auto id_graph = DirectedGraph::from_edge_list(loops, 25);
  CHECK(max_abs(stacked_linear_gcn(id_graph, f.x, 3, SelfLoopPolicy::Keep, {f.w.data(), 3}, false),
                f.x * f.w[0] * f.w[1] * f.w[2]) < 1e-9);

  // With activation the hidden layers are rectified.
  const DenseMatrix act = stacked_linear_gcn(f.g, f.x, 2, SelfLoopPolicy::Keep, {f.w.data(), 2}, true);
  CHECK(max_abs(act, f.p * relu(f.p * f.x * f.w[0]) * f.w[1]) < 1e-12);
}
