#include "scalenet/hermitian.hpp"

#include <cmath>
#include <stdexcept>

namespace scalenet {

namespace {

Eigen::VectorXd inv_sqrt_or_zero(const Eigen::VectorXd& d) {
  Eigen::VectorXd out(d.size());
  for (Index i = 0; i < d.size(); ++i) out(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  return out;
}

DenseMatrix binary_dense(const DirectedGraph& g) { return to_dense(binarize(g.adjacency())); }

}  // namespace

MagnetMatrices build_magnet(const DirectedGraph& g, PhaseParam q) {
  if (q.q < 0.0) throw std::invalid_argument("phase parameter q must be >= 0");
  const DenseMatrix a = binary_dense(g);
  const Index n = a.rows();
  MagnetMatrices out;
  out.symmetrized = 0.5 * (a + a.transpose());
  out.degree = out.symmetrized.rowwise().sum();
  const Eigen::VectorXd s = inv_sqrt_or_zero(out.degree);
  out.normalized = s.asDiagonal() * out.symmetrized * s.asDiagonal();

  const double alpha = q.alpha();
  out.hermitian.real_part = DenseMatrix::Zero(n, n);
  out.hermitian.imag_part = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double v = out.normalized(i, j);
      if (v == 0.0) continue;
      const double phase = alpha * (a(i, j) - a(j, i));
      out.hermitian.real_part(i, j) = v * std::cos(phase);
      out.hermitian.imag_part(i, j) = v * std::sin(phase);
    }
  }
  return out;
}

double skew_identity_check(const DirectedGraph& g, PhaseParam q) {
  const MagnetMatrices mm = build_magnet(g, q);
  const DenseMatrix a = binary_dense(g);
  const Eigen::VectorXd s = inv_sqrt_or_zero((0.5 * (a + a.transpose())).rowwise().sum());
  const DenseMatrix closed = 0.5 * std::sin(q.alpha()) * (s.asDiagonal() * (a - a.transpose()) * s.asDiagonal());
  return (mm.hermitian.imag_part - closed).cwiseAbs().maxCoeff();
}

MagnetWeights random_magnet_weights(Index in, Index hidden, Index out, std::size_t k, std::mt19937_64& rng) {
  MagnetWeights w;
  for (std::size_t i = 0; i < k; ++i) w.cheb.push_back(glorot(in, hidden, rng));
  w.real_head = glorot(hidden, out, rng);
  w.imag_head = glorot(hidden, out, rng);
  w.bias = glorot(1, out, rng);
  return w;
}

DenseMatrix magnet_forward(const DirectedGraph& g, const DenseMatrix& x, PhaseParam q, std::size_t k,
                           const MagnetWeights& w, bool faithful_quirk) {
  if (k < 1 || k > 2) throw std::invalid_argument("magnet_forward supports k in {1, 2}");
  if (w.cheb.size() < k) throw std::invalid_argument("magnet_forward: missing Chebyshev weights");
  const MagnetMatrices mm = build_magnet(g, q);
  const Index n = x.rows();

  // X_hat = X + iX; T_1 = I.
  DenseMatrix z_re = x * w.cheb[0];
  DenseMatrix z_im = x * w.cheb[0];
  if (k == 2) {
    DenseMatrix t2_re = -mm.hermitian.real_part;
    const DenseMatrix t2_im = -mm.hermitian.imag_part;
    if (!faithful_quirk) t2_re += DenseMatrix::Identity(n, n);
    // (T_re + i T_im)(X + iX) = (T_re - T_im) X + i (T_re + T_im) X
    z_re += (t2_re - t2_im) * x * w.cheb[1];
    z_im += (t2_re + t2_im) * x * w.cheb[1];
  }
  DenseMatrix out = z_re * w.real_head + z_im * w.imag_head;
  out.rowwise() += w.bias.row(0);
  return out;
}

ClosedFormWeights map_weights(const MagnetWeights& w) {
  if (w.cheb.size() < 2) throw std::invalid_argument("map_weights needs two Chebyshev weights");
  ClosedFormWeights m;
  m.self = w.cheb[0] * (w.real_head + w.imag_head);
  m.sym = -w.cheb[1] * (w.real_head + w.imag_head);
  m.skew = w.cheb[1] * (w.real_head - w.imag_head);
  m.bias = w.bias;
  return m;
}

DenseMatrix closed_form_out2(const DirectedGraph& g, const DenseMatrix& x, PhaseParam q, const ClosedFormWeights& w) {
  const DenseMatrix a = binary_dense(g);
  const Index n = a.rows();
  const double alpha = q.alpha();
  DenseMatrix a_bar = DenseMatrix::Zero(n, n);
  DenseMatrix a_sym = 0.5 * (a + a.transpose());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const bool fwd = a(i, j) != 0.0, back = a(j, i) != 0.0;
      if (fwd && back) a_bar(i, j) = 1.0;
      else if (fwd || back) a_bar(i, j) = 0.5 * std::cos(alpha);
    }
  }
  const Eigen::VectorXd s = inv_sqrt_or_zero(a_sym.rowwise().sum());
  const DenseMatrix sym = s.asDiagonal() * a_bar * s.asDiagonal();
  const DenseMatrix skew = s.asDiagonal() * (a - a.transpose()) * s.asDiagonal();
  DenseMatrix out = x * w.self + sym * x * w.sym + 0.5 * std::sin(alpha) * (skew * x * w.skew);
  out.rowwise() += w.bias.row(0);
  return out;
}

EquivalenceRow equivalence_check(const DirectedGraph& g, const DenseMatrix& x, PhaseParam q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const MagnetWeights w = random_magnet_weights(x.cols(), 8, 4, 2, rng);
  const DenseMatrix lhs = magnet_forward(g, x, q, 2, w, true);
  const DenseMatrix rhs = closed_form_out2(g, x, q, map_weights(w));
  return {seed, g.num_nodes(), q.q, (lhs - rhs).cwiseAbs().maxCoeff()};
}

}  // namespace scalenet
