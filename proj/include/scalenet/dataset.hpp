#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scalenet/graph.hpp"
#include "scalenet/nn.hpp"

namespace scalenet {

struct Splits {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;
};

struct NodeDataset {
  DirectedGraph graph;
  DenseMatrix features;     // n x d
  std::vector<int> labels;  // values in [0, num_classes)
  int num_classes = 0;
  Splits splits;

  Index num_nodes() const { return graph.num_nodes(); }
  // Throws ValidationError when shapes, labels or splits are inconsistent.
  void validate() const;
};

// Per class, shuffle with `seed` and cut 60/20/20 (train/val/test).
Splits stratified_split(const std::vector<int>& labels, int num_classes, std::uint64_t seed,
                        double train_frac = 0.6, double val_frac = 0.2);

// Reads graph.tsv, features.csv, labels.csv and optional splits.json from `dir`.
// Without splits.json a stratified split is generated from `split_seed`.
NodeDataset load_dataset(const std::filesystem::path& dir, std::uint64_t split_seed = 0);

// Writes the same four files; doubles are printed with 17 significant digits so
// reloading is lossless and output bytes depend only on the values.
void write_dataset(const std::filesystem::path& dir, const NodeDataset& ds);

enum class SynthKind { Homophilic, Heterophilic };

struct SynthOptions {
  int feature_dim = 16;
  // Homophilic: edge probability within a class; across classes it is 10x smaller.
  double p_in = 0.06;
  double cross_ratio = 0.1;
  // Heterophilic: out-edges per node, share pointing at the next class, and the
  // fraction of nodes that receive no edges at all.
  int out_degree = 10;
  double next_class_share = 0.9;
  double source_fraction = 0.5;
  // Feature means have unit norm; noise is i.i.d. Gaussian with this deviation.
  double feature_noise = 1.5;
};

// Directed stochastic block generator with class-correlated Gaussian features.
NodeDataset synth_dataset(SynthKind kind, Index n, int classes, std::uint64_t seed, const SynthOptions& opts = {});

struct HomophilyReport {
  std::string matrix;
  Index homo = 0;
  Index hetero = 0;
  Index no_neigh = 0;
};

// For each node, compares its label with the majority label over {j != i : M(i, j) != 0}.
// Nodes without such neighbours count as no_neigh; ties count as hetero.
HomophilyReport directional_homophily(const NodeDataset& ds, const std::string& matrix_name);

}  // namespace scalenet
