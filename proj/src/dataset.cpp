#include "scalenet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "scalenet/error.hpp"

namespace scalenet {

void NodeDataset::validate() const {
  const Index n = num_nodes();
  if (features.rows() != n)
    throw ValidationError("features have " + std::to_string(features.rows()) + " rows, expected " + std::to_string(n));
  if (static_cast<Index>(labels.size()) != n)
    throw ValidationError("labels have " + std::to_string(labels.size()) + " rows, expected " + std::to_string(n));
  if (num_classes < 2) throw ValidationError("dataset needs at least two classes");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw ValidationError("label of node " + std::to_string(i) + " is out of range");
  if (!features.allFinite()) throw ValidationError("features contain NaN or Inf");
  std::vector<char> seen(n, 0);
  for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
    for (Index i : *part) {
      if (i < 0 || i >= n) throw ValidationError("split index " + std::to_string(i) + " out of range");
      if (seen[i]++) throw ValidationError("node " + std::to_string(i) + " appears in more than one split");
    }
  }
}

Splits stratified_split(const std::vector<int>& labels, int num_classes, std::uint64_t seed, double train_frac,
                        double val_frac) {
  std::mt19937_64 rng(seed);
  Splits s;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<Index> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(static_cast<Index>(i));
    std::shuffle(members.begin(), members.end(), rng);
    const auto m = static_cast<double>(members.size());
    const auto n_train = static_cast<std::size_t>(std::lround(train_frac * m));
    const auto n_val = static_cast<std::size_t>(std::lround(val_frac * m));
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto& dst = k < n_train ? s.train : (k < n_train + n_val ? s.val : s.test);
      dst.push_back(members[k]);
    }
  }
  for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  return s;
}

namespace {

std::string where(const std::filesystem::path& p, std::size_t line) { return p.string() + ":" + std::to_string(line); }

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

DenseMatrix read_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("missing file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      double v = 0.0;
      const char* b = cell.data();
      while (b < cell.data() + cell.size() && (*b == ' ' || *b == '\t')) ++b;
      const char* e = cell.data() + cell.size();
      while (e > b && (e[-1] == ' ' || e[-1] == '\r' || e[-1] == '\t')) --e;
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e) throw ValidationError(where(path, lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError(where(path, lineno) + ": expected " + std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  const Index d = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  DenseMatrix x(static_cast<Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < d; ++j) x(static_cast<Index>(i), j) = rows[i][j];
  return x;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("missing file " + path.string());
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    int v = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw ValidationError(where(path, lineno) + ": bad label '" + line + "'");
    if (v < 0) throw ValidationError(where(path, lineno) + ": label out of range");
    labels.push_back(v);
  }
  return labels;
}

Splits read_splits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    Splits s;
    s.train = j.at("train").get<std::vector<Index>>();
    s.val = j.at("val").get<std::vector<Index>>();
    s.test = j.at("test").get<std::vector<Index>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

NodeDataset load_dataset(const std::filesystem::path& dir, std::uint64_t split_seed) {
  NodeDataset ds;
  ds.labels = read_labels(dir / "labels.csv");
  const auto n = static_cast<Index>(ds.labels.size());
  ds.features = read_features(dir / "features.csv");
  if (ds.features.rows() != n)
    throw ValidationError((dir / "features.csv").string() + ": has " + std::to_string(ds.features.rows()) +
                          " rows but labels.csv has " + std::to_string(n));
  if (!std::filesystem::exists(dir / "graph.tsv")) throw ValidationError("missing file " + (dir / "graph.tsv").string());
  ds.graph = read_edge_list(dir / "graph.tsv", n);
  ds.num_classes = ds.labels.empty() ? 0 : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  if (std::filesystem::exists(dir / "splits.json")) {
    ds.splits = read_splits(dir / "splits.json");
  } else {
    ds.splits = stratified_split(ds.labels, ds.num_classes, split_seed);
  }
  ds.validate();
  return ds;
}

void write_dataset(const std::filesystem::path& dir, const NodeDataset& ds) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "graph.tsv");
    write_edge_list(out, ds.graph);
  }
  {
    std::ofstream out(dir / "features.csv");
    for (Index i = 0; i < ds.features.rows(); ++i) {
      for (Index j = 0; j < ds.features.cols(); ++j) out << (j ? "," : "") << format_double(ds.features(i, j));
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.csv");
    for (int y : ds.labels) out << y << '\n';
  }
  {
    nlohmann::json j{{"train", ds.splits.train}, {"val", ds.splits.val}, {"test", ds.splits.test}};
    std::ofstream out(dir / "splits.json");
    out << j.dump() << '\n';
  }
}

NodeDataset synth_dataset(SynthKind kind, Index n, int classes, std::uint64_t seed, const SynthOptions& opts) {
  if (n < 50) throw ValidationError("synthetic datasets need n >= 50");
  if (classes < 2 || classes > n) throw ValidationError("synthetic datasets need 2 <= classes <= n");
  if (opts.feature_dim < 1) throw ValidationError("feature_dim must be >= 1");
  std::mt19937_64 rng(seed);

  NodeDataset ds;
  ds.num_classes = classes;
  ds.labels.resize(n);
  for (Index i = 0; i < n; ++i) ds.labels[i] = static_cast<int>(i * classes / n);
  std::shuffle(ds.labels.begin(), ds.labels.end(), rng);

  std::vector<Edge> edges;
  if (kind == SynthKind::Homophilic) {
    if (!(opts.p_in > 0.0 && opts.p_in <= 1.0)) throw ValidationError("p_in must be in (0, 1]");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p_out = opts.p_in * opts.cross_ratio;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double p = ds.labels[i] == ds.labels[j] ? opts.p_in : p_out;
        if (u(rng) < p) edges.emplace_back(i, j);
      }
  } else {
    if (!(opts.source_fraction >= 0.0 && opts.source_fraction < 1.0))
      throw ValidationError("source_fraction must be in [0, 1)");
    if (opts.out_degree < 1) throw ValidationError("out_degree must be >= 1");
    std::vector<Index> order(n);
    for (Index i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_sources = static_cast<std::size_t>(opts.source_fraction * static_cast<double>(n));
    // Nodes after the first n_sources of the permutation may receive edges.
    std::vector<std::vector<Index>> targets(classes);
    for (std::size_t k = n_sources; k < order.size(); ++k) targets[ds.labels[order[k]]].push_back(order[k]);
    for (auto& t : targets) std::sort(t.begin(), t.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> any_class(0, classes - 1);
    for (Index i = 0; i < n; ++i) {
      for (int e = 0; e < opts.out_degree; ++e) {
        int c = u(rng) < opts.next_class_share ? (ds.labels[i] + 1) % classes : any_class(rng);
        for (int tries = 0; targets[c].empty() && tries < classes; ++tries) c = (c + 1) % classes;
        const auto& pool = targets[c];
        if (pool.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const Index j = pool[pick(rng)];
        if (j != i) edges.emplace_back(i, j);
      }
    }
  }
  ds.graph = DirectedGraph::from_edge_list(edges, n);

  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix means(classes, opts.feature_dim);
  for (int c = 0; c < classes; ++c) {
    for (int j = 0; j < opts.feature_dim; ++j) means(c, j) = gauss(rng);
    means.row(c).normalize();
  }
  ds.features.resize(n, opts.feature_dim);
  for (Index i = 0; i < n; ++i)
    for (int j = 0; j < opts.feature_dim; ++j)
      ds.features(i, j) = means(ds.labels[i], j) + opts.feature_noise * gauss(rng);

  ds.splits = stratified_split(ds.labels, classes, seed);
  ds.validate();
  return ds;
}

}  // namespace scalenet
