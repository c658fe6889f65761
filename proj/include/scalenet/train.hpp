#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "scalenet/dataset.hpp"
#include "scalenet/model.hpp"

namespace scalenet {

struct TrainOptions {
  bool zero_input = false;  // replace every feature with 0 (structure-free baseline)
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = 0;  // 1-based
  double best_val_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  Index parameter_count = 0;
  bool failed = false;
  std::string failure;
  double wall_time_ms = 0.0;

  // Timing is left out unless asked for, so reports of identical runs are identical.
  nlohmann::json to_json(bool include_timing = false) const;
};

std::string config_hash(const ScaleNetConfig& cfg);

// Full-batch Adam training with early stopping on validation loss; the parameters
// of the best epoch are restored before test evaluation. `seed` replaces cfg.seed.
RunReport train(const NodeDataset& ds, ScaleNetConfig cfg, std::uint64_t seed, const TrainOptions& opts = {});

struct RepeatSummary {
  std::vector<RunReport> runs;
  double mean_test_accuracy = 0.0;
  double std_test_accuracy = 0.0;
};

// Seeds seed, seed + 1, ..., seed + repeats - 1.
RepeatSummary train_repeats(const NodeDataset& ds, const ScaleNetConfig& cfg, std::uint64_t seed, int repeats,
                            const TrainOptions& opts = {});

struct GridRow {
  ScaleNetConfig config;
  RunReport report;
};

struct GridResult {
  std::vector<GridRow> rows;  // sorted: val accuracy desc, parameter count asc, config text asc; failed runs last
  std::size_t best = 0;       // index into rows; rows.size() when every run failed
};

// grid.json: {"base": <config>, "grid": {"<key>": [values...], ...}}. Keys are
// config fields; "alpha" and "self_loops" apply to every branch.
std::vector<ScaleNetConfig> expand_grid(const nlohmann::json& grid);

GridResult grid_search(const NodeDataset& ds, const nlohmann::json& grid, std::uint64_t seed);

nlohmann::json grid_to_json(const GridResult& g);
std::string grid_to_markdown(const GridResult& g);
std::string run_to_markdown(const RepeatSummary& s);

}  // namespace scalenet
