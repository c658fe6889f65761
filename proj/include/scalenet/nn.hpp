#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "scalenet/sparse.hpp"

namespace scalenet {

using DenseMatrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

// A trainable tensor and its gradient buffer.
struct ParamRef {
  DenseMatrix* value;
  DenseMatrix* grad;
};

// Glorot-uniform initialization from the given generator.
DenseMatrix glorot(Index rows, Index cols, std::mt19937_64& rng);

// Y = X W + b, W is (in x out).
struct Linear {
  DenseMatrix weight;
  DenseMatrix bias;  // 1 x out, empty when the layer has no bias
  DenseMatrix weight_grad;
  DenseMatrix bias_grad;

  Linear() = default;
  Linear(Index in, Index out, bool with_bias, std::mt19937_64& rng);

  Index in_features() const { return weight.rows(); }
  Index out_features() const { return weight.cols(); }
  bool has_bias() const { return bias.size() > 0; }

  DenseMatrix forward(const DenseMatrix& x) const;
  // Accumulates parameter gradients and returns dL/dX.
  DenseMatrix backward(const DenseMatrix& x, const DenseMatrix& grad_out);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
  Index parameter_count() const { return weight.size() + bias.size(); }
};

DenseMatrix relu(const DenseMatrix& x);
DenseMatrix relu_backward(const DenseMatrix& x, const DenseMatrix& grad_out);

// Inverted dropout. The mask is kept so backward reuses it.
class Dropout {
 public:
  explicit Dropout(double rate = 0.0) : rate_(rate) {}
  DenseMatrix forward(const DenseMatrix& x, bool training, std::mt19937_64& rng);
  DenseMatrix backward(const DenseMatrix& grad_out) const;
  double rate() const { return rate_; }

 private:
  double rate_;
  DenseMatrix mask_;  // empty means identity
};

// Per-column normalization over the node dimension with a learned affine.
class BatchNorm1d {
 public:
  BatchNorm1d() = default;
  explicit BatchNorm1d(Index features, double eps = 1e-5, double momentum = 0.1);

  DenseMatrix forward(const DenseMatrix& x, bool training);
  DenseMatrix backward(const DenseMatrix& grad_out);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
  Index parameter_count() const { return gamma.size() + beta.size(); }

  DenseMatrix gamma, beta;  // 1 x features
  DenseMatrix gamma_grad, beta_grad;
  RowVector running_mean, running_var;

 private:
  double eps_ = 1e-5;
  double momentum_ = 0.1;
  DenseMatrix x_hat_;
  RowVector inv_std_;
  bool training_ = true;
};

struct LossResult {
  double loss = 0.0;
  DenseMatrix grad;  // dL/dlogits, zero outside the selected rows
};

// Mean softmax cross-entropy over the rows in `rows`.
LossResult softmax_cross_entropy(const DenseMatrix& logits, std::span<const int> labels, std::span<const Index> rows);

double accuracy(const DenseMatrix& logits, std::span<const int> labels, std::span<const Index> rows);

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// Adam with bias correction. Weight decay is added to the gradient (L2 form).
class Adam {
 public:
  Adam(std::vector<ParamRef> params, AdamOptions opts);
  void step();
  std::int64_t steps() const { return step_; }

 private:
  std::vector<ParamRef> params_;
  AdamOptions opts_;
  std::vector<DenseMatrix> m_, v_;
  std::int64_t step_ = 0;
};

bool all_finite(const DenseMatrix& m);

}  // namespace scalenet
