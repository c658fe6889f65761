#include "scalenet/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "scalenet/error.hpp"
#include "scalenet/filters.hpp"
#include "scalenet/scale.hpp"

namespace scalenet {

bool VerifyReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) arr.push_back({{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"passed", passed()}, {"checks", arr}, {"seconds", seconds}};
}

std::string VerifyReport::summary() const {
  std::ostringstream os;
  std::size_t ok = 0;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.suite << "/" << c.name;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << '\n';
    ok += c.passed;
  }
  os << ok << "/" << checks.size() << " checks passed in " << seconds << " s\n";
  return os.str();
}

std::string VerifyReport::hermitian_csv() const {
  std::ostringstream os;
  os.precision(6);
  os << "seed,n,q,max_dev\n";
  for (const auto& r : hermitian_rows) os << r.seed << ',' << r.n << ',' << r.q << ',' << std::scientific << r.max_dev << std::defaultfloat << '\n';
  return os.str();
}

const std::vector<std::string>& verification_suites() {
  static const std::vector<std::string> names{"algebra", "proximity", "filters", "scalenet", "hermitian"};
  return names;
}

DirectedGraph worked_example_graph() {
  return DirectedGraph::from_edge_list({{0, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 0}}, 6);
}

double scalenet_gradient_check(ScaleNet& model, const DenseMatrix& x, std::span<const int> labels,
                               std::span<const Index> rows, double step) {
  auto loss_at = [&]() { return softmax_cross_entropy(model.forward(x, true).logits, labels, rows).loss; };
  model.zero_grad();
  const auto out = model.forward(x, true);
  model.backward(softmax_cross_entropy(out.logits, labels, rows).grad);

  double worst = 0.0;
  for (const auto& p : model.parameters()) {
    const DenseMatrix analytic = *p.grad;
    DenseMatrix numeric(analytic.rows(), analytic.cols());
    for (Index j = 0; j < p.value->cols(); ++j) {
      for (Index i = 0; i < p.value->rows(); ++i) {
        const double saved = (*p.value)(i, j);
        (*p.value)(i, j) = saved + step;
        const double up = loss_at();
        (*p.value)(i, j) = saved - step;
        const double down = loss_at();
        (*p.value)(i, j) = saved;
        numeric(i, j) = (up - down) / (2.0 * step);
      }
    }
    const double denom = analytic.norm() + numeric.norm();
    if (denom < 1e-10) continue;
    worst = std::max(worst, (analytic - numeric).norm() / denom);
  }
  return worst;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Suite {
  std::string name;
  std::vector<CheckResult>* out;

  void check(const std::string& what, bool ok, const std::string& detail = {}) {
    out->push_back({name, what, ok, detail});
  }
  // Runs `body`, recording an exception as a failure.
  void run(const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      auto [ok, detail] = body();
      check(what, ok, detail);
    } catch (const std::exception& e) {
      check(what, false, std::string("exception: ") + e.what());
    }
  }
};

DenseMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

IntMatrix dense_01(Index rows, Index cols, std::initializer_list<std::pair<Index, Index>> ones) {
  std::vector<Triplet<std::int64_t>> t;
  for (auto [r, c] : ones) t.push_back({r, c, 1});
  return IntMatrix::from_triplets(rows, cols, std::move(t));
}

IntMatrix random_int(Index rows, Index cols, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> val(1, 3);
  std::vector<Triplet<std::int64_t>> t;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (u(rng) < density) t.push_back({i, j, val(rng)});
  return IntMatrix::from_triplets(rows, cols, std::move(t));
}

void algebra_suite(Suite s) {
  s.run("matmul associativity", [] {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<Index> dim(1, 40);
    for (int t = 0; t < 30; ++t) {
      const Index a = dim(rng), b = dim(rng), c = dim(rng), d = dim(rng);
      const auto x = random_int(a, b, 0.2, rng), y = random_int(b, c, 0.2, rng), z = random_int(c, d, 0.2, rng);
      if (!(matmul(matmul(x, y), z) == matmul(x, matmul(y, z)))) return std::pair{false, "trial " + std::to_string(t)};
    }
    return std::pair{true, std::string("30 random triples")};
  });
  s.run("transpose of product", [] {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 30; ++t) {
      const auto x = random_int(17, 23, 0.15, rng), y = random_int(23, 9, 0.15, rng);
      if (!(transpose(matmul(x, y)) == matmul(transpose(y), transpose(x)))) return std::pair{false, std::to_string(t)};
    }
    return std::pair{true, std::string()};
  });
  s.run("binary powers compose", [] {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
      const auto a = binarize(random_int(30, 30, 0.06, rng));
      const auto sq = binarize(matmul(a, a));
      IntMatrix lhs = sq, rhs = a;
      for (int k = 1; k < 3; ++k) lhs = binarize(matmul(lhs, sq));
      for (int k = 1; k < 6; ++k) rhs = binarize(matmul(rhs, a));
      if (!(lhs == rhs)) return std::pair{false, std::to_string(t)};
    }
    return std::pair{true, std::string("(A^2)^3 vs A^6")};
  });
  s.run("normalize_sym range and symmetry", [] {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 20; ++t) {
      const auto a = random_int(25, 25, 0.1, rng);
      const auto sym = add(a, transpose(a));
      const auto na = normalize_sym(a);
      for (double v : na.values())
        if (!(v >= 0.0 && v <= 1.0)) return std::pair{false, "entry " + fmt(v)};
      const auto ns = normalize_sym(sym);
      if ((to_dense(ns) - to_dense(ns).transpose()).cwiseAbs().maxCoeff() > 1e-15) return std::pair{false, std::string("asym")};
    }
    return std::pair{true, std::string()};
  });
  s.run("self-loop expansion identities", [] {
    std::mt19937_64 rng(15);
    std::uniform_int_distribution<Index> size(1, 30);
    for (int t = 0; t < 200; ++t) {
      const auto g = random_digraph(size(rng), 0.15, rng);
      const auto r = selfloop_expansion_report(g.adjacency());
      if (!r.holds()) return std::pair{false, "deviation " + std::to_string(r.max_deviation())};
    }
    return std::pair{true, std::string("200 digraphs")};
  });
}

void proximity_suite(Suite s) {
  const DirectedGraph g = worked_example_graph();
  const IntMatrix m2 = dense_01(6, 6, {{0, 0}, {0, 2}, {2, 0}, {2, 2}, {3, 3}, {3, 4}, {4, 3}, {4, 4}, {5, 5}});
  const IntMatrix m2_hat = dense_01(6, 6, {{0, 2}, {2, 0}, {3, 4}, {4, 3}});
  const IntMatrix m3 = dense_01(6, 6, {{3, 3}, {3, 4}, {3, 5}, {4, 3}, {4, 4}, {4, 5}, {5, 3}, {5, 4}, {5, 5}});
  const IntMatrix m3_hat = dense_01(6, 6, {{3, 5}, {4, 5}, {5, 3}, {5, 4}});
  s.check("golden M2", korder_proximity(g, 2, ProximityKind::M, false).matrix == m2);
  s.check("golden M2 pruned", korder_proximity(g, 2, ProximityKind::M, true).matrix == m2_hat);
  s.check("golden M3", korder_proximity(g, 3, ProximityKind::M, false).matrix == m3);
  s.check("golden M3 pruned", korder_proximity(g, 3, ProximityKind::M, true).matrix == m3_hat);
  s.check("golden D2 pruned is empty", korder_proximity(g, 2, ProximityKind::D, true).matrix.nnz() == 0);

  s.run("generated self-loop proposition", [] {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
      const auto gr = random_digraph(25, 0.08, rng);
      const auto mk = korder_proximity(gr, 2, ProximityKind::M, false).matrix;
      const auto dk = korder_proximity(gr, 2, ProximityKind::D, false).matrix;
      const auto a = gr.adjacency();
      const auto at = transpose(a);
      for (Index i = 0; i < a.rows(); ++i) {
        if (a.row_nnz(i) > 0 && mk.at(i, i) <= 0) return std::pair{false, "M diag at " + std::to_string(i)};
        if (at.row_nnz(i) > 0 && dk.at(i, i) <= 0) return std::pair{false, "D diag at " + std::to_string(i)};
      }
    }
    return std::pair{true, std::string("100 digraphs")};
  });
  s.run("pruned diagonal and densification", [] {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 30; ++t) {
      const auto gr = random_digraph(20, 0.1, rng);
      for (std::size_t k = 2; k <= 4; ++k) {
        for (auto kind : {ProximityKind::M, ProximityKind::D}) {
          const auto pruned = korder_proximity(gr, k, kind, true).matrix;
          const auto full = korder_proximity(gr, k, kind, false).matrix;
          for (Index i = 0; i < pruned.rows(); ++i)
            if (pruned.at(i, i) != 0) return std::pair{false, std::string("non-zero diagonal")};
          if (!(difference_support(pruned, full).nnz() == 0)) return std::pair{false, std::string("pruned not within full")};
        }
      }
    }
    return std::pair{true, std::string()};
  });
  s.run("block words equal flattened words", [] {
    std::mt19937_64 rng(23);
    const SecondScaleBlock all[] = {SecondScaleBlock::AA, SecondScaleBlock::AAt, SecondScaleBlock::AtA, SecondScaleBlock::AtAt};
    for (int t = 0; t < 20; ++t) {
      const auto gr = random_digraph(15, 0.12, rng);
      for (std::size_t k = 1; k <= 3; ++k) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < k; ++i) total *= 4;
        for (std::size_t code = 0; code < total; ++code) {
          std::vector<SecondScaleBlock> word;
          for (std::size_t i = 0, c = code; i < k; ++i, c /= 4) word.push_back(all[c % 4]);
          if (!(block_word_matrix(gr, word) == scale_word_matrix(gr, word_embedding_witness(word))))
            return std::pair{false, std::string("mismatch")};
        }
      }
    }
    return std::pair{true, std::string("20 digraphs, k <= 3")};
  });
  s.run("shared-edge removal is disjoint", [] {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 30; ++t) {
      const auto gr = random_digraph(20, 0.1, rng);
      const auto set1 = build_scaled_set(gr, 1, SelfLoopPolicy::Keep);
      const auto set2 = build_scaled_set(gr, 2, SelfLoopPolicy::Keep);
      const std::vector<IntMatrix> lowers{set1.members.at("A"), set1.members.at("A^T")};
      for (const auto& [name, m] : set2.members) {
        const auto rest = remove_shared_edges(m, lowers);
        for (const auto& low : lowers)
          if (intersect_support(rest, low).nnz() != 0) return std::pair{false, name};
      }
    }
    return std::pair{true, std::string()};
  });
}

void filters_suite(Suite s) {
  std::mt19937_64 rng(31);
  const auto g = random_digraph(20, 0.15, rng);
  std::normal_distribution<double> gauss;
  auto rand = [&](Index r, Index c) {
    DenseMatrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
    return m;
  };
  const DenseMatrix x = rand(20, 5);
  const DenseMatrix p = to_dense(propagation_matrix(g.adjacency(), SelfLoopPolicy::Keep));
  const std::vector<DenseMatrix> w{rand(5, 3), rand(5, 3), rand(5, 3)};
  const DenseMatrix eye = DenseMatrix::Identity(20, 20);

  s.run("cheb K=2 closed form", [&] {
    FilterSpec spec;
    spec.kind = FilterKind::Cheb;
    spec.order = 2;
    const DenseMatrix got = filter_forward(spec, g, x, std::span(w).first(2));
    const double dev = (got - (x * w[0] + (eye - p) * x * w[1])).cwiseAbs().maxCoeff();
    return std::pair{dev < 1e-12, fmt(dev)};
  });
  s.run("appnp K=2 closed form", [&] {
    const double a = 0.1;
    FilterSpec spec;
    spec.kind = FilterKind::Appnp;
    spec.order = 2;
    spec.teleport_alpha = a;
    const DenseMatrix got = filter_forward(spec, g, x, w);
    const DenseMatrix want = (1 - a) * (1 - a) * p * p * x * w[0] + (1 - a) * a * p * x * w[1] + a * x * w[2];
    const double dev = (got - want).cwiseAbs().maxCoeff();
    return std::pair{dev < 1e-12, fmt(dev)};
  });
  s.run("linear stack on AA equals doubled stack on A", [&] {
    const RealMatrix pa = propagation_matrix(g.adjacency(), SelfLoopPolicy::Keep);
    const RealMatrix paa = matmul(pa, pa);
    const std::vector<DenseMatrix> ws{rand(5, 4), rand(4, 3)};
    const std::vector<DenseMatrix> interleaved{DenseMatrix::Identity(5, 5), ws[0], DenseMatrix::Identity(4, 4), ws[1]};
    const double dev = (stacked_propagation(paa, x, ws, false) - stacked_propagation(pa, x, interleaved, false)).cwiseAbs().maxCoeff();
    return std::pair{dev < 1e-6, fmt(dev)};
  });
  s.run("uniform logits give ln C", [] {
    const DenseMatrix logits = DenseMatrix::Zero(4, 5);
    const std::vector<int> y{0, 1, 2, 3};
    const std::vector<Index> rows{0, 1, 2, 3};
    const double loss = softmax_cross_entropy(logits, y, rows).loss;
    return std::pair{std::abs(loss - std::log(5.0)) < 1e-15, fmt(loss)};
  });
}

ScaleNetConfig small_config(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 1 << 20);
  const char* names[] = {"A", "A^T", "AA", "AA^T", "A^TA", "A^TA^T"};
  const double alphas[] = {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 0.3};
  ScaleNetConfig cfg;
  const int nb = 1 + pick(rng) % 3;
  for (int b = 0; b < nb; ++b) {
    const int i = pick(rng) % 6;
    const int j = (i + 1 + pick(rng) % 5) % 6;
    cfg.branches.push_back({names[i], names[j], alphas[pick(rng) % 7], static_cast<SelfLoopPolicy>(pick(rng) % 3)});
  }
  cfg.comb1 = static_cast<Comb1>(pick(rng) % 3);
  cfg.comb2 = static_cast<Comb2>(pick(rng) % 3);
  cfg.layers = 1 + pick(rng) % 2;
  cfg.hidden = 3;
  cfg.agg = (pick(rng) % 2) ? AggKind::Gcn : AggKind::Sage;
  cfg.batchnorm = pick(rng) % 2;
  cfg.activation = pick(rng) % 2;
  cfg.dropout = 0.0;
  cfg.seed = static_cast<std::uint64_t>(pick(rng));
  return cfg;
}

void scalenet_suite(Suite s) {
  s.run("alpha coefficient table", [] {
    const double alphas[] = {-1.0, 0.0, 0.5, 1.0};
    const std::pair<double, double> want[] = {{0, 0}, {0, 1}, {0.75, 0.75}, {2, 0}};
    for (int i = 0; i < 4; ++i)
      if (agg_b_coefficients(alphas[i]) != want[i]) return std::pair{false, "alpha " + fmt(alphas[i])};
    return std::pair{true, std::string()};
  });
  s.run("finite-difference gradients", [] {
    std::mt19937_64 rng(41);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const auto g = random_digraph(12, 0.2, rng);
      const DenseMatrix x = gaussian(12, 4, rng);
      std::vector<int> y(12);
      for (int i = 0; i < 12; ++i) y[i] = i % 3;
      std::vector<Index> rows{0, 1, 2, 3, 4, 5, 6, 7};
      ScaleNet model(small_config(rng), g, 4, 3);
      worst = std::max(worst, scalenet_gradient_check(model, x, y, rows));
    }
    return std::pair{worst < 1e-3, "max rel err " + fmt(worst)};
  });
  s.run("deterministic logits", [] {
    std::mt19937_64 rng(42);
    const auto g = random_digraph(15, 0.2, rng);
    const DenseMatrix x = gaussian(15, 4, rng);
    auto cfg = small_config(rng);
    cfg.dropout = 0.3;
    ScaleNet a(cfg, g, 4, 3), b(cfg, g, 4, 3);
    return std::pair{a.forward(x, true).logits == b.forward(x, true).logits, std::string()};
  });
}

void hermitian_suite(Suite s, std::vector<EquivalenceRow>& rows) {
  double worst_skew = 0.0, worst_eq = 0.0, worst_sym = 0.0;
  try {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(1000 + seed);
      std::uniform_int_distribution<Index> size(2, 50);
      const Index n = size(rng);
      const auto g = random_digraph(n, 0.1, rng);
      DenseMatrix x(n, 5);
      std::normal_distribution<double> gauss;
      for (Index j = 0; j < 5; ++j)
        for (Index i = 0; i < n; ++i) x(i, j) = gauss(rng);
      for (double q : {0.0, 0.05, 0.1, 0.25}) {
        worst_skew = std::max(worst_skew, skew_identity_check(g, {q}));
        const auto mm = build_magnet(g, {q});
        worst_sym = std::max({worst_sym, (mm.hermitian.real_part - mm.hermitian.real_part.transpose()).cwiseAbs().maxCoeff(),
                              (mm.hermitian.imag_part + mm.hermitian.imag_part.transpose()).cwiseAbs().maxCoeff()});
        auto row = equivalence_check(g, x, {q}, seed);
        worst_eq = std::max(worst_eq, row.max_dev);
        rows.push_back(row);
      }
    }
  } catch (const std::exception& e) {
    s.check("hermitian run", false, e.what());
    return;
  }
  s.check("real symmetric, imaginary skew", worst_sym < 1e-14, fmt(worst_sym));
  s.check("skew identity", worst_skew < 1e-12, fmt(worst_skew));
  s.check("closed-form equivalence", worst_eq < 1e-10, fmt(worst_eq));
}

}  // namespace

VerifyReport run_verification(const std::string& suite) {
  const auto& names = verification_suites();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
    throw ValidationError("unknown verification suite '" + suite + "'");
  const auto start = Clock::now();
  VerifyReport report;
  auto wants = [&](const char* name) { return suite == "all" || suite == name; };
  if (wants("algebra")) algebra_suite({"algebra", &report.checks});
  if (wants("proximity")) proximity_suite({"proximity", &report.checks});
  if (wants("filters")) filters_suite({"filters", &report.checks});
  if (wants("scalenet")) scalenet_suite({"scalenet", &report.checks});
  if (wants("hermitian")) hermitian_suite({"hermitian", &report.checks}, report.hermitian_rows);
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace scalenet
