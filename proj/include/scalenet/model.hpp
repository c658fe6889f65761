#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scalenet/graph.hpp"
#include "scalenet/nn.hpp"
#include "scalenet/sparse.hpp"

namespace scalenet {

enum class Comb1 { Sum, JkCat, JkMax };
enum class Comb2 { Last, Sum, JkCat };
enum class AggKind { Gcn, Sage };

// Branch coefficients (for M, N) of the bidirectional mix:
// (1 + a) a AGG(M, X) + (1 + a)(1 - a) AGG(N, X).
std::pair<double, double> agg_b_coefficients(double alpha);

// alpha == 2 aggregates over the union of the two supports, alpha == 3 over the
// intersection; every other value uses the polynomial weighting.
enum class MixMode { Polynomial, Union, Intersection };
MixMode mix_mode(double alpha);

struct BranchSpec {
  std::string m;
  std::string n;
  double alpha = 0.5;
  SelfLoopPolicy self_loops = SelfLoopPolicy::Keep;
  double coeff_scale = 1.0;  // multiplies both polynomial coefficients
};

struct ScaleNetConfig {
  std::vector<BranchSpec> branches;
  Comb1 comb1 = Comb1::Sum;
  Comb2 comb2 = Comb2::Last;
  int layers = 1;
  int hidden = 64;
  AggKind agg = AggKind::Gcn;
  bool sage_normalized = false;
  bool batchnorm = false;
  bool activation = true;
  double dropout = 0.0;
  double lr = 0.01;
  double weight_decay = 0.0;
  int epochs = 200;
  int patience = 50;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static ScaleNetConfig from_json(const nlohmann::json& j);
};

std::string to_string(SelfLoopPolicy p);
SelfLoopPolicy parse_self_loop_policy(const std::string& s);

// Binary supports of every first- and second-scale matrix, keyed by name
// ("A", "A^T", "AA", "AA^T", "A^TA", "A^TA^T").
std::map<std::string, IntMatrix> scaled_supports(const DirectedGraph& g);

// Propagation operators of one AGG-B block.
struct BranchOperators {
  MixMode mode = MixMode::Polynomial;
  double coeff_m = 0.0;
  double coeff_n = 0.0;
  RealMatrix op_m;  // for Union/Intersection this is the combined operator
  RealMatrix op_n;
};

// Applies the self-loop policy to both supports; Union/Intersection recompute the
// normalization on the combined support.
BranchOperators make_branch_operators(const BranchSpec& spec, const IntMatrix& m_support, const IntMatrix& n_support,
                                      bool normalized);

// One AGG over a propagation operator: GCN is P X W + b, SAGE is P X W_nb + X W_self + b.
struct AggUnit {
  Linear neighbor;
  Linear self;  // unused for GCN
  AggKind kind = AggKind::Gcn;

  AggUnit() = default;
  AggUnit(AggKind kind, Index in, Index out, std::mt19937_64& rng);

  DenseMatrix forward(const RealMatrix& p, const DenseMatrix& x, DenseMatrix* px_cache) const;
  // Accumulates parameter gradients; returns dL/dX.
  DenseMatrix backward(const RealMatrix& p, const DenseMatrix& x, const DenseMatrix& px, const DenseMatrix& grad_out);
  void collect(std::vector<ParamRef>& out);
  void zero_grad();
  Index parameter_count() const;
};

// AGG-B over prebuilt operators. alpha = -1 (both coefficients zero) returns zeros.
DenseMatrix agg_b(const BranchOperators& ops, const DenseMatrix& x, const AggUnit& unit_m, const AggUnit& unit_n);

struct ModelOutput {
  DenseMatrix logits;
  std::vector<DenseMatrix> hidden;  // per-layer outputs X^(1) ... X^(L)
};

class ScaleNet {
 public:
  ScaleNet(ScaleNetConfig cfg, const DirectedGraph& g, Index in_features, Index num_classes);

  ModelOutput forward(const DenseMatrix& x, bool training);
  // Backpropagates dL/dlogits through the cache of the last forward call.
  void backward(const DenseMatrix& grad_logits);

  // One layer (AGG-B blocks, COMB1, optional batch-norm/activation/dropout).
  DenseMatrix layer_forward(std::size_t layer, const DenseMatrix& h, bool training);

  std::vector<ParamRef> parameters();
  void zero_grad();
  Index parameter_count() const;
  const ScaleNetConfig& config() const { return cfg_; }
  const std::vector<BranchOperators>& operators() const { return ops_; }
  // Width of the COMB1 input of the given layer (sum of branch widths for JK_CAT).
  Index comb1_input_width(std::size_t layer) const;

 private:
  struct BranchParams {
    AggUnit unit_m;
    AggUnit unit_n;
  };
  struct LayerParams {
    std::vector<BranchParams> branches;
    Linear projection;  // JK_CAT only
    BatchNorm1d norm;
    Dropout dropout;
  };
  struct BranchCache {
    DenseMatrix px_m, px_n;
  };
  struct LayerCache {
    DenseMatrix input;
    std::vector<BranchCache> branches;
    std::vector<DenseMatrix> branch_out;
    DenseMatrix concat;
    Eigen::MatrixXi argmax;  // JK_MAX winner per entry
    DenseMatrix pre_activation;
  };

  void layer_backward(std::size_t layer, DenseMatrix grad, DenseMatrix* grad_input);

  ScaleNetConfig cfg_;
  std::vector<BranchOperators> ops_;
  std::vector<LayerParams> layers_;
  Linear classifier_;
  std::mt19937_64 dropout_rng_;
  std::vector<LayerCache> cache_;
  DenseMatrix classifier_input_;
};

}  // namespace scalenet
