#pragma once

#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "scalenet/graph.hpp"
#include "scalenet/nn.hpp"

namespace scalenet {

struct PhaseParam {
  double q = 0.0;
  double alpha() const { return 2.0 * std::numbers::pi * q; }
};

struct ComplexAdjacency {
  DenseMatrix real_part;  // symmetric
  DenseMatrix imag_part;  // skew-symmetric
};

struct MagnetMatrices {
  DenseMatrix symmetrized;  // A_s = (A + A^T) / 2
  DenseMatrix normalized;   // D^{-1/2} A_s D^{-1/2}, D = row sums of A_s, no added self-loops
  ComplexAdjacency hermitian;
  Eigen::VectorXd degree;
};

// Normalized symmetrized adjacency multiplied entry-wise by exp(i 2 pi q (A - A^T)).
MagnetMatrices build_magnet(const DirectedGraph& g, PhaseParam q);

// max |imag_part - 0.5 sin(alpha) D^{-1/2} (A - A^T) D^{-1/2}|.
double skew_identity_check(const DirectedGraph& g, PhaseParam q);

// Chebyshev weights (one per order, d x h), then the heads applied to the real and
// imaginary halves of Z (h x out each), then an output bias (1 x out).
struct MagnetWeights {
  std::vector<DenseMatrix> cheb;
  DenseMatrix real_head;
  DenseMatrix imag_head;
  DenseMatrix bias;
};

MagnetWeights random_magnet_weights(Index in, Index hidden, Index out, std::size_t k, std::mt19937_64& rng);

// Complex Chebyshev accumulation Z = sum_k T_k (X + iX) W_k followed by
// Out = Re(Z) W_real + Im(Z) W_imag + b. With `faithful_quirk`, T_2 = -A_hat (the
// doubly subtracted identity); otherwise T_2 = I - A_hat. Only k in {1, 2}.
DenseMatrix magnet_forward(const DirectedGraph& g, const DenseMatrix& x, PhaseParam q, std::size_t k,
                           const MagnetWeights& w, bool faithful_quirk = true);

// Weights of the three-term closed form obtained by expanding the k = 2 output.
struct ClosedFormWeights {
  DenseMatrix self;     // W1 (W_real + W_imag)
  DenseMatrix sym;      // -W2 (W_real + W_imag)
  DenseMatrix skew;     // W2 (W_real - W_imag)
  DenseMatrix bias;
};

ClosedFormWeights map_weights(const MagnetWeights& w);

// X W_self + (D^{-1/2} Abar_s D^{-1/2}) X W_sym + 0.5 sin(alpha) D^{-1/2} (A - A^T) D^{-1/2} X W_skew + b,
// where Abar_s equals A_s with unidirectional entries scaled by cos(alpha). Built
// directly from A, independent of build_magnet.
DenseMatrix closed_form_out2(const DirectedGraph& g, const DenseMatrix& x, PhaseParam q, const ClosedFormWeights& w);

struct EquivalenceRow {
  std::uint64_t seed = 0;
  Index n = 0;
  double q = 0.0;
  double max_dev = 0.0;
};

// Random features/weights from `seed`; max |magnet_forward(k=2) - closed_form_out2|.
EquivalenceRow equivalence_check(const DirectedGraph& g, const DenseMatrix& x, PhaseParam q, std::uint64_t seed);

}  // namespace scalenet
