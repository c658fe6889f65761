#include "scalenet/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scalenet {

DenseMatrix glorot(Index rows, Index cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  DenseMatrix w(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) w(i, j) = dist(rng);
  return w;
}

Linear::Linear(Index in, Index out, bool with_bias, std::mt19937_64& rng)
    : weight(glorot(in, out, rng)),
      weight_grad(DenseMatrix::Zero(in, out)),
      bias_grad(with_bias ? DenseMatrix::Zero(1, out) : DenseMatrix()) {
  if (with_bias) {
    // Uniform in +-1/sqrt(fan_in); zero biases would make empty rows tie exactly.
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Index>(in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    bias.resize(1, out);
    for (Index j = 0; j < out; ++j) bias(0, j) = dist(rng);
  }
}

DenseMatrix Linear::forward(const DenseMatrix& x) const {
  if (x.cols() != weight.rows()) throw std::invalid_argument("Linear: input width mismatch");
  DenseMatrix y = x * weight;
  if (has_bias()) y.rowwise() += bias.row(0);
  return y;
}

DenseMatrix Linear::backward(const DenseMatrix& x, const DenseMatrix& grad_out) {
  if (grad_out.cols() != weight.cols() || grad_out.rows() != x.rows())
    throw std::invalid_argument("Linear: gradient shape mismatch");
  weight_grad.noalias() += x.transpose() * grad_out;
  if (has_bias()) bias_grad += grad_out.colwise().sum();
  return grad_out * weight.transpose();
}

void Linear::zero_grad() {
  weight_grad.setZero(weight.rows(), weight.cols());
  if (has_bias()) bias_grad.setZero(1, bias.cols());
}

void Linear::collect(std::vector<ParamRef>& out) {
  out.push_back({&weight, &weight_grad});
  if (has_bias()) out.push_back({&bias, &bias_grad});
}

DenseMatrix relu(const DenseMatrix& x) { return x.cwiseMax(0.0); }

DenseMatrix relu_backward(const DenseMatrix& x, const DenseMatrix& grad_out) {
  return (x.array() > 0.0).cast<double>().matrix().cwiseProduct(grad_out);
}

DenseMatrix Dropout::forward(const DenseMatrix& x, bool training, std::mt19937_64& rng) {
  if (!training || rate_ <= 0.0) {
    mask_.resize(0, 0);
    return x;
  }
  if (rate_ >= 1.0) throw std::invalid_argument("dropout rate must be < 1");
  std::bernoulli_distribution keep(1.0 - rate_);
  const double scale = 1.0 / (1.0 - rate_);
  mask_.resize(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) mask_(i, j) = keep(rng) ? scale : 0.0;
  return x.cwiseProduct(mask_);
}

DenseMatrix Dropout::backward(const DenseMatrix& grad_out) const {
  if (mask_.size() == 0) return grad_out;
  return grad_out.cwiseProduct(mask_);
}

BatchNorm1d::BatchNorm1d(Index features, double eps, double momentum)
    : gamma(DenseMatrix::Ones(1, features)),
      beta(DenseMatrix::Zero(1, features)),
      gamma_grad(DenseMatrix::Zero(1, features)),
      beta_grad(DenseMatrix::Zero(1, features)),
      running_mean(RowVector::Zero(features)),
      running_var(RowVector::Ones(features)),
      eps_(eps),
      momentum_(momentum) {}

DenseMatrix BatchNorm1d::forward(const DenseMatrix& x, bool training) {
  if (x.cols() != gamma.cols()) throw std::invalid_argument("BatchNorm1d: width mismatch");
  RowVector mean, var;
  if (training) {
    const double n = static_cast<double>(x.rows());
    mean = x.colwise().mean();
    var = (x.rowwise() - mean).array().square().colwise().sum().matrix() / n;
    running_mean = (1.0 - momentum_) * running_mean + momentum_ * mean;
    const double unbias = x.rows() > 1 ? n / (n - 1.0) : 1.0;
    running_var = (1.0 - momentum_) * running_var + momentum_ * unbias * var;
  } else {
    mean = running_mean;
    var = running_var;
  }
  inv_std_ = (var.array() + eps_).rsqrt().matrix();
  x_hat_ = (x.rowwise() - mean).array().rowwise() * inv_std_.array();
  training_ = training;
  DenseMatrix y = x_hat_.array().rowwise() * gamma.row(0).array();
  y.rowwise() += beta.row(0);
  return y;
}

DenseMatrix BatchNorm1d::backward(const DenseMatrix& grad_out) {
  gamma_grad += grad_out.cwiseProduct(x_hat_).colwise().sum();
  beta_grad += grad_out.colwise().sum();
  const DenseMatrix dx_hat = grad_out.array().rowwise() * gamma.row(0).array();
  if (!training_) return dx_hat.array().rowwise() * inv_std_.array();
  const double n = static_cast<double>(grad_out.rows());
  const RowVector sum_dx_hat = dx_hat.colwise().sum();
  const RowVector sum_dx_hat_xhat = dx_hat.cwiseProduct(x_hat_).colwise().sum();
  DenseMatrix centered = (n * dx_hat).rowwise() - sum_dx_hat;
  centered -= (x_hat_.array().rowwise() * sum_dx_hat_xhat.array()).matrix();
  return (centered.array().rowwise() * (inv_std_.array() / n)).matrix();
}

void BatchNorm1d::zero_grad() {
  gamma_grad.setZero();
  beta_grad.setZero();
}

void BatchNorm1d::collect(std::vector<ParamRef>& out) {
  out.push_back({&gamma, &gamma_grad});
  out.push_back({&beta, &beta_grad});
}

LossResult softmax_cross_entropy(const DenseMatrix& logits, std::span<const int> labels, std::span<const Index> rows) {
  if (static_cast<Index>(labels.size()) != logits.rows()) throw std::invalid_argument("label count mismatch");
  LossResult r;
  r.grad = DenseMatrix::Zero(logits.rows(), logits.cols());
  if (rows.empty()) return r;
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (Index i : rows) {
    const int y = labels[i];
    if (y < 0 || y >= logits.cols()) throw std::invalid_argument("label out of range");
    const double mx = logits.row(i).maxCoeff();
    const RowVector e = (logits.row(i).array() - mx).exp().matrix();
    const double z = e.sum();
    r.loss += (std::log(z) + mx - logits(i, y)) * inv;
    r.grad.row(i) = e / z * inv;
    r.grad(i, y) -= inv;
  }
  return r;
}

double accuracy(const DenseMatrix& logits, std::span<const int> labels, std::span<const Index> rows) {
  if (rows.empty()) return 0.0;
  std::size_t hit = 0;
  for (Index i : rows) {
    Index best = 0;
    logits.row(i).maxCoeff(&best);
    if (best == labels[i]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(rows.size());
}

Adam::Adam(std::vector<ParamRef> params, AdamOptions opts) : params_(std::move(params)), opts_(opts) {
  for (const auto& p : params_) {
    m_.push_back(DenseMatrix::Zero(p.value->rows(), p.value->cols()));
    v_.push_back(DenseMatrix::Zero(p.value->rows(), p.value->cols()));
  }
}

void Adam::step() {
  ++step_;
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(step_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    DenseMatrix& w = *params_[k].value;
    DenseMatrix g = *params_[k].grad;
    if (g.rows() != w.rows() || g.cols() != w.cols()) throw std::invalid_argument("Adam: gradient shape mismatch");
    if (opts_.weight_decay != 0.0) g += opts_.weight_decay * w;
    m_[k] = opts_.beta1 * m_[k] + (1.0 - opts_.beta1) * g;
    v_[k] = opts_.beta2 * v_[k] + (1.0 - opts_.beta2) * g.cwiseProduct(g);
    const DenseMatrix m_hat = m_[k] / bc1;
    const DenseMatrix v_hat = v_[k] / bc2;
    w.array() -= opts_.lr * m_hat.array() / (v_hat.array().sqrt() + opts_.eps);
  }
}

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

}  // namespace scalenet
