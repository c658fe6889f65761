#include "scalenet/model.hpp"

#include <set>
#include <stdexcept>

#include "scalenet/error.hpp"
#include "scalenet/filters.hpp"
#include "scalenet/scale.hpp"

namespace scalenet {

std::pair<double, double> agg_b_coefficients(double alpha) {
  return {(1.0 + alpha) * alpha, (1.0 + alpha) * (1.0 - alpha)};
}

MixMode mix_mode(double alpha) {
  if (alpha == 2.0) return MixMode::Union;
  if (alpha == 3.0) return MixMode::Intersection;
  return MixMode::Polynomial;
}

std::string to_string(SelfLoopPolicy p) {
  switch (p) {
    case SelfLoopPolicy::Add: return "add";
    case SelfLoopPolicy::Remove: return "remove";
    case SelfLoopPolicy::Keep: return "keep";
  }
  return "keep";
}

SelfLoopPolicy parse_self_loop_policy(const std::string& s) {
  if (s == "add") return SelfLoopPolicy::Add;
  if (s == "remove") return SelfLoopPolicy::Remove;
  if (s == "keep") return SelfLoopPolicy::Keep;
  throw ValidationError("unknown self-loop policy '" + s + "'");
}

namespace {

template <class E>
E parse_enum(const std::string& key, const std::string& value, std::initializer_list<std::pair<const char*, E>> table) {
  for (const auto& [name, e] : table)
    if (value == name) return e;
  throw ValidationError("config: unknown value '" + value + "' for '" + key + "'");
}

const char* comb1_name(Comb1 c) {
  switch (c) {
    case Comb1::Sum: return "sum";
    case Comb1::JkCat: return "jk_cat";
    case Comb1::JkMax: return "jk_max";
  }
  return "sum";
}

const char* comb2_name(Comb2 c) {
  switch (c) {
    case Comb2::Last: return "last";
    case Comb2::Sum: return "sum";
    case Comb2::JkCat: return "jk_cat";
  }
  return "last";
}

}  // namespace

void ScaleNetConfig::validate() const {
  if (branches.empty()) throw ValidationError("config: at least one branch is required");
  for (const auto& b : branches) {
    if (b.m == b.n) throw ValidationError("config: branch pair must name two different matrices");
    if (!(b.coeff_scale > 0.0)) throw ValidationError("config: coeff_scale must be positive");
  }
  if (layers < 1) throw ValidationError("config: layers must be >= 1");
  if (hidden < 1) throw ValidationError("config: hidden must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("config: dropout must be in [0, 1)");
  if (!(lr > 0.0)) throw ValidationError("config: lr must be positive");
  if (epochs < 1) throw ValidationError("config: epochs must be >= 1");
  if (patience < 1) throw ValidationError("config: patience must be >= 1");
}

nlohmann::json ScaleNetConfig::to_json() const {
  nlohmann::json j;
  j["branches"] = nlohmann::json::array();
  for (const auto& b : branches) {
    nlohmann::json jb{{"pair", {b.m, b.n}}, {"alpha", b.alpha}, {"self_loops", to_string(b.self_loops)}};
    if (b.coeff_scale != 1.0) jb["coeff_scale"] = b.coeff_scale;
    j["branches"].push_back(std::move(jb));
  }
  j["comb1"] = comb1_name(comb1);
  j["comb2"] = comb2_name(comb2);
  j["layers"] = layers;
  j["hidden"] = hidden;
  j["agg"] = agg == AggKind::Gcn ? "gcn" : "sage";
  j["sage_normalized"] = sage_normalized;
  j["batchnorm"] = batchnorm;
  j["activation"] = activation;
  j["dropout"] = dropout;
  j["lr"] = lr;
  j["weight_decay"] = weight_decay;
  j["epochs"] = epochs;
  j["patience"] = patience;
  j["seed"] = seed;
  return j;
}

ScaleNetConfig ScaleNetConfig::from_json(const nlohmann::json& j) {
  ScaleNetConfig cfg;
  try {
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    static const std::set<std::string> known{"branches", "comb1",   "comb2",      "layers",   "hidden",
                                             "agg",      "batchnorm", "activation", "dropout", "lr",
                                             "epochs",   "patience", "seed",       "weight_decay",
                                             "sage_normalized"};
    static const std::set<std::string> branch_keys{"pair", "alpha", "self_loops", "coeff_scale"};
    for (const auto& [key, value] : j.items())
      if (!known.count(key)) throw ValidationError("config: unknown key '" + key + "'");
    for (const auto& jb : j.at("branches")) {
      BranchSpec b;
      for (const auto& [key, value] : jb.items())
        if (!branch_keys.count(key)) throw ValidationError("config: unknown branch key '" + key + "'");
      const auto& pair = jb.at("pair");
      if (!pair.is_array() || pair.size() != 2) throw ValidationError("config: branch pair must have two names");
      b.m = pair[0].get<std::string>();
      b.n = pair[1].get<std::string>();
      b.alpha = jb.value("alpha", 0.5);
      b.self_loops = parse_self_loop_policy(jb.value("self_loops", std::string("keep")));
      b.coeff_scale = jb.value("coeff_scale", 1.0);
      cfg.branches.push_back(std::move(b));
    }
    cfg.comb1 = parse_enum<Comb1>("comb1", j.value("comb1", std::string("sum")),
                                  {{"sum", Comb1::Sum}, {"jk_cat", Comb1::JkCat}, {"jk_max", Comb1::JkMax}});
    cfg.comb2 = parse_enum<Comb2>("comb2", j.value("comb2", std::string("last")),
                                  {{"last", Comb2::Last}, {"sum", Comb2::Sum}, {"jk_cat", Comb2::JkCat}});
    cfg.agg = parse_enum<AggKind>("agg", j.value("agg", std::string("gcn")), {{"gcn", AggKind::Gcn}, {"sage", AggKind::Sage}});
    cfg.layers = j.value("layers", cfg.layers);
    cfg.hidden = j.value("hidden", cfg.hidden);
    cfg.sage_normalized = j.value("sage_normalized", cfg.sage_normalized);
    cfg.batchnorm = j.value("batchnorm", cfg.batchnorm);
    cfg.activation = j.value("activation", cfg.activation);
    cfg.dropout = j.value("dropout", cfg.dropout);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.patience = j.value("patience", cfg.patience);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::map<std::string, IntMatrix> scaled_supports(const DirectedGraph& g) {
  std::map<std::string, IntMatrix> out;
  for (std::size_t k : {1, 2})
    for (auto& [name, m] : build_scaled_set(g, k, SelfLoopPolicy::Keep).members) out.emplace(name, std::move(m));
  return out;
}

BranchOperators make_branch_operators(const BranchSpec& spec, const IntMatrix& m_support, const IntMatrix& n_support,
                                      bool normalized) {
  const IntMatrix m = set_self_loops(binarize(m_support), spec.self_loops);
  const IntMatrix n = set_self_loops(binarize(n_support), spec.self_loops);
  auto finish = [normalized](const IntMatrix& s) { return normalized ? normalize_sym(s) : cast<double>(s); };

  BranchOperators ops;
  ops.mode = mix_mode(spec.alpha);
  switch (ops.mode) {
    case MixMode::Polynomial: {
      auto [cm, cn] = agg_b_coefficients(spec.alpha);
      ops.coeff_m = cm * spec.coeff_scale;
      ops.coeff_n = cn * spec.coeff_scale;
      ops.op_m = finish(m);
      ops.op_n = finish(n);
      break;
    }
    case MixMode::Union:
      ops.coeff_m = spec.coeff_scale;
      ops.op_m = finish(union_support(m, n));
      break;
    case MixMode::Intersection:
      ops.coeff_m = spec.coeff_scale;
      ops.op_m = finish(intersect_support(m, n));
      break;
  }
  return ops;
}

AggUnit::AggUnit(AggKind k, Index in, Index out, std::mt19937_64& rng) : neighbor(in, out, true, rng), kind(k) {
  if (kind == AggKind::Sage) self = Linear(in, out, false, rng);
}

DenseMatrix AggUnit::forward(const RealMatrix& p, const DenseMatrix& x, DenseMatrix* px_cache) const {
  DenseMatrix px = spmm(p, x);
  DenseMatrix y = neighbor.forward(px);
  if (kind == AggKind::Sage) y += self.forward(x);
  if (px_cache) *px_cache = std::move(px);
  return y;
}

DenseMatrix AggUnit::backward(const RealMatrix& p, const DenseMatrix& x, const DenseMatrix& px,
                              const DenseMatrix& grad_out) {
  DenseMatrix grad_x = spmm_transposed(p, neighbor.backward(px, grad_out));
  if (kind == AggKind::Sage) grad_x += self.backward(x, grad_out);
  return grad_x;
}

void AggUnit::collect(std::vector<ParamRef>& out) {
  neighbor.collect(out);
  if (kind == AggKind::Sage) self.collect(out);
}

void AggUnit::zero_grad() {
  neighbor.zero_grad();
  if (kind == AggKind::Sage) self.zero_grad();
}

Index AggUnit::parameter_count() const {
  return neighbor.parameter_count() + (kind == AggKind::Sage ? self.parameter_count() : 0);
}

DenseMatrix agg_b(const BranchOperators& ops, const DenseMatrix& x, const AggUnit& unit_m, const AggUnit& unit_n) {
  const Index out_width = unit_m.neighbor.out_features();
  DenseMatrix y = DenseMatrix::Zero(x.rows(), out_width);
  if (ops.coeff_m != 0.0) y += ops.coeff_m * unit_m.forward(ops.op_m, x, nullptr);
  if (ops.mode == MixMode::Polynomial && ops.coeff_n != 0.0) y += ops.coeff_n * unit_n.forward(ops.op_n, x, nullptr);
  return y;
}

ScaleNet::ScaleNet(ScaleNetConfig cfg, const DirectedGraph& g, Index in_features, Index num_classes)
    : cfg_(std::move(cfg)), dropout_rng_(cfg_.seed ^ 0x9e3779b97f4a7c15ULL) {
  cfg_.validate();
  if (num_classes < 1) throw ValidationError("model needs at least one output class");
  const auto supports = scaled_supports(g);
  const bool normalized = cfg_.agg == AggKind::Gcn || cfg_.sage_normalized;
  for (const auto& b : cfg_.branches) {
    auto im = supports.find(b.m);
    auto in = supports.find(b.n);
    if (im == supports.end() || in == supports.end())
      throw ValidationError("config: unresolvable branch matrix '" + (im == supports.end() ? b.m : b.n) + "'");
    ops_.push_back(make_branch_operators(b, im->second, in->second, normalized));
  }

  std::mt19937_64 rng(cfg_.seed);
  const Index h = cfg_.hidden;
  const Index nb = static_cast<Index>(cfg_.branches.size());
  for (int l = 0; l < cfg_.layers; ++l) {
    LayerParams lp;
    const Index in = (l == 0) ? in_features : h;
    for (Index b = 0; b < nb; ++b) {
      BranchParams bp;
      bp.unit_m = AggUnit(cfg_.agg, in, h, rng);
      bp.unit_n = AggUnit(cfg_.agg, in, h, rng);
      lp.branches.push_back(std::move(bp));
    }
    if (cfg_.comb1 == Comb1::JkCat) lp.projection = Linear(nb * h, h, true, rng);
    if (cfg_.batchnorm) lp.norm = BatchNorm1d(h);
    lp.dropout = Dropout(cfg_.dropout);
    layers_.push_back(std::move(lp));
  }
  const Index head_in = (cfg_.comb2 == Comb2::JkCat) ? h * cfg_.layers : h;
  classifier_ = Linear(head_in, num_classes, true, rng);
  cache_.resize(layers_.size());
}

Index ScaleNet::comb1_input_width(std::size_t layer) const {
  const Index h = cfg_.hidden;
  return cfg_.comb1 == Comb1::JkCat ? h * static_cast<Index>(layers_.at(layer).branches.size()) : h;
}

DenseMatrix ScaleNet::layer_forward(std::size_t layer, const DenseMatrix& h, bool training) {
  LayerParams& lp = layers_.at(layer);
  LayerCache& c = cache_.at(layer);
  c.input = h;
  c.branches.assign(lp.branches.size(), {});
  c.branch_out.clear();

  for (std::size_t b = 0; b < lp.branches.size(); ++b) {
    const BranchOperators& ops = ops_[b];
    BranchParams& bp = lp.branches[b];
    DenseMatrix y = DenseMatrix::Zero(h.rows(), cfg_.hidden);
    if (ops.coeff_m != 0.0) y += ops.coeff_m * bp.unit_m.forward(ops.op_m, h, &c.branches[b].px_m);
    if (ops.mode == MixMode::Polynomial && ops.coeff_n != 0.0)
      y += ops.coeff_n * bp.unit_n.forward(ops.op_n, h, &c.branches[b].px_n);
    c.branch_out.push_back(std::move(y));
  }

  DenseMatrix out;
  switch (cfg_.comb1) {
    case Comb1::Sum:
      out = c.branch_out.front();
      for (std::size_t b = 1; b < c.branch_out.size(); ++b) out += c.branch_out[b];
      break;
    case Comb1::JkCat: {
      c.concat.resize(h.rows(), comb1_input_width(layer));
      for (std::size_t b = 0; b < c.branch_out.size(); ++b)
        c.concat.middleCols(static_cast<Index>(b) * cfg_.hidden, cfg_.hidden) = c.branch_out[b];
      out = lp.projection.forward(c.concat);
      break;
    }
    case Comb1::JkMax: {
      out = c.branch_out.front();
      c.argmax = Eigen::MatrixXi::Zero(out.rows(), out.cols());
      for (std::size_t b = 1; b < c.branch_out.size(); ++b) {
        for (Index j = 0; j < out.cols(); ++j)
          for (Index i = 0; i < out.rows(); ++i)
            if (c.branch_out[b](i, j) > out(i, j)) {
              out(i, j) = c.branch_out[b](i, j);
              c.argmax(i, j) = static_cast<int>(b);
            }
      }
      break;
    }
  }

  if (cfg_.batchnorm) out = lp.norm.forward(out, training);
  c.pre_activation = out;
  if (cfg_.activation) out = relu(out);
  return lp.dropout.forward(out, training, dropout_rng_);
}

ModelOutput ScaleNet::forward(const DenseMatrix& x, bool training) {
  ModelOutput result;
  DenseMatrix h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = layer_forward(l, h, training);
    result.hidden.push_back(h);
  }
  switch (cfg_.comb2) {
    case Comb2::Last:
      classifier_input_ = result.hidden.back();
      break;
    case Comb2::Sum:
      classifier_input_ = result.hidden.front();
      for (std::size_t l = 1; l < result.hidden.size(); ++l) classifier_input_ += result.hidden[l];
      break;
    case Comb2::JkCat:
      classifier_input_.resize(x.rows(), cfg_.hidden * cfg_.layers);
      for (std::size_t l = 0; l < result.hidden.size(); ++l)
        classifier_input_.middleCols(static_cast<Index>(l) * cfg_.hidden, cfg_.hidden) = result.hidden[l];
      break;
  }
  result.logits = classifier_.forward(classifier_input_);
  if (cfg_.comb2 == Comb2::Last) result.hidden.erase(result.hidden.begin(), result.hidden.end() - 1);
  return result;
}

void ScaleNet::layer_backward(std::size_t layer, DenseMatrix grad, DenseMatrix* grad_input) {
  LayerParams& lp = layers_.at(layer);
  LayerCache& c = cache_.at(layer);
  grad = lp.dropout.backward(grad);
  if (cfg_.activation) grad = relu_backward(c.pre_activation, grad);
  if (cfg_.batchnorm) grad = lp.norm.backward(grad);

  std::vector<DenseMatrix> branch_grad(lp.branches.size());
  switch (cfg_.comb1) {
    case Comb1::Sum:
      for (auto& g : branch_grad) g = grad;
      break;
    case Comb1::JkCat: {
      const DenseMatrix gc = lp.projection.backward(c.concat, grad);
      for (std::size_t b = 0; b < branch_grad.size(); ++b)
        branch_grad[b] = gc.middleCols(static_cast<Index>(b) * cfg_.hidden, cfg_.hidden);
      break;
    }
    case Comb1::JkMax:
      for (std::size_t b = 0; b < branch_grad.size(); ++b)
        branch_grad[b] = (c.argmax.array() == static_cast<int>(b)).cast<double>().matrix().cwiseProduct(grad);
      break;
  }

  DenseMatrix gin = DenseMatrix::Zero(c.input.rows(), c.input.cols());
  for (std::size_t b = 0; b < lp.branches.size(); ++b) {
    const BranchOperators& ops = ops_[b];
    BranchParams& bp = lp.branches[b];
    if (ops.coeff_m != 0.0)
      gin += bp.unit_m.backward(ops.op_m, c.input, c.branches[b].px_m, ops.coeff_m * branch_grad[b]);
    if (ops.mode == MixMode::Polynomial && ops.coeff_n != 0.0)
      gin += bp.unit_n.backward(ops.op_n, c.input, c.branches[b].px_n, ops.coeff_n * branch_grad[b]);
  }
  if (grad_input) *grad_input = std::move(gin);
}

void ScaleNet::backward(const DenseMatrix& grad_logits) {
  const DenseMatrix g_head = classifier_.backward(classifier_input_, grad_logits);
  const Index h = cfg_.hidden;
  const std::size_t nl = layers_.size();
  // Gradient arriving at each layer's output from COMB2, plus the next layer's input.
  std::vector<DenseMatrix> from_comb2(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    switch (cfg_.comb2) {
      case Comb2::Last:
        from_comb2[l] = (l + 1 == nl) ? g_head : DenseMatrix::Zero(g_head.rows(), h);
        break;
      case Comb2::Sum:
        from_comb2[l] = g_head;
        break;
      case Comb2::JkCat:
        from_comb2[l] = g_head.middleCols(static_cast<Index>(l) * h, h);
        break;
    }
  }
  DenseMatrix carry;
  for (std::size_t l = nl; l-- > 0;) {
    DenseMatrix grad = from_comb2[l];
    if (l + 1 < nl) grad += carry;
    layer_backward(l, std::move(grad), &carry);
  }
}

std::vector<ParamRef> ScaleNet::parameters() {
  std::vector<ParamRef> out;
  for (auto& lp : layers_) {
    for (auto& bp : lp.branches) {
      bp.unit_m.collect(out);
      bp.unit_n.collect(out);
    }
    if (cfg_.comb1 == Comb1::JkCat) lp.projection.collect(out);
    if (cfg_.batchnorm) lp.norm.collect(out);
  }
  classifier_.collect(out);
  return out;
}

void ScaleNet::zero_grad() {
  for (auto& lp : layers_) {
    for (auto& bp : lp.branches) {
      bp.unit_m.zero_grad();
      bp.unit_n.zero_grad();
    }
    if (cfg_.comb1 == Comb1::JkCat) lp.projection.zero_grad();
    if (cfg_.batchnorm) lp.norm.zero_grad();
  }
  classifier_.zero_grad();
}

Index ScaleNet::parameter_count() const {
  Index total = classifier_.parameter_count();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& lp = layers_[l];
    for (std::size_t b = 0; b < lp.branches.size(); ++b) {
      // Units that can never receive gradient are not counted.
      const auto& ops = ops_[b];
      if (ops.coeff_m != 0.0) total += lp.branches[b].unit_m.parameter_count();
      if (ops.mode == MixMode::Polynomial && ops.coeff_n != 0.0) total += lp.branches[b].unit_n.parameter_count();
    }
    if (cfg_.comb1 == Comb1::JkCat) total += lp.projection.parameter_count();
    if (cfg_.batchnorm) total += lp.norm.parameter_count();
  }
  return total;
}

}  // namespace scalenet
