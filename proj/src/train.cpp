#include "scalenet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "scalenet/error.hpp"

namespace scalenet {

std::string config_hash(const ScaleNetConfig& cfg) {
  const std::string text = cfg.to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json RunReport::to_json(bool include_timing) const {
  nlohmann::json j{{"config_hash", config_hash},
                   {"seed", seed},
                   {"train_loss", train_loss},
                   {"val_loss", val_loss},
                   {"best_epoch", best_epoch},
                   {"best_val_loss", best_val_loss},
                   {"train_accuracy", train_accuracy},
                   {"val_accuracy", val_accuracy},
                   {"test_accuracy", test_accuracy},
                   {"parameter_count", parameter_count},
                   {"failed", failed}};
  if (failed) j["failure"] = failure;
  if (include_timing) j["wall_time_ms"] = wall_time_ms;
  return j;
}

RunReport train(const NodeDataset& ds, ScaleNetConfig cfg, std::uint64_t seed, const TrainOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  cfg.seed = seed;
  RunReport report;
  report.seed = seed;
  report.config_hash = config_hash(cfg);

  const DenseMatrix x = opts.zero_input ? DenseMatrix::Zero(ds.features.rows(), ds.features.cols()) : ds.features;
  ScaleNet model(cfg, ds.graph, x.cols(), ds.num_classes);
  report.parameter_count = model.parameter_count();
  Adam adam(model.parameters(), AdamOptions{.lr = cfg.lr, .weight_decay = cfg.weight_decay});

  ScaleNet best = model;
  report.best_val_loss = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    model.zero_grad();
    const auto out = model.forward(x, true);
    const auto loss = softmax_cross_entropy(out.logits, ds.labels, ds.splits.train);
    if (!std::isfinite(loss.loss)) {
      report.failed = true;
      report.failure = "non-finite training loss at epoch " + std::to_string(epoch);
      break;
    }
    model.backward(loss.grad);
    adam.step();

    const auto eval = model.forward(x, false);
    const double val_loss = softmax_cross_entropy(eval.logits, ds.labels, ds.splits.val).loss;
    report.train_loss.push_back(loss.loss);
    report.val_loss.push_back(val_loss);
    if (!std::isfinite(val_loss)) {
      report.failed = true;
      report.failure = "non-finite validation loss at epoch " + std::to_string(epoch);
      break;
    }
    if (val_loss < report.best_val_loss) {
      report.best_val_loss = val_loss;
      report.best_epoch = epoch;
      best = model;
    } else if (epoch - report.best_epoch >= cfg.patience) {
      break;
    }
  }

  if (report.best_epoch > 0) {
    const auto eval = best.forward(x, false);
    report.train_accuracy = accuracy(eval.logits, ds.labels, ds.splits.train);
    report.val_accuracy = accuracy(eval.logits, ds.labels, ds.splits.val);
    report.test_accuracy = accuracy(eval.logits, ds.labels, ds.splits.test);
  } else {
    report.best_val_loss = std::numeric_limits<double>::quiet_NaN();
    report.failed = true;
    if (report.failure.empty()) report.failure = "no finite validation loss";
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

RepeatSummary train_repeats(const NodeDataset& ds, const ScaleNetConfig& cfg, std::uint64_t seed, int repeats,
                            const TrainOptions& opts) {
  if (repeats < 1) throw ValidationError("--repeats must be >= 1");
  RepeatSummary s;
  for (int r = 0; r < repeats; ++r) s.runs.push_back(train(ds, cfg, seed + static_cast<std::uint64_t>(r), opts));
  double sum = 0.0, sq = 0.0;
  for (const auto& r : s.runs) sum += r.test_accuracy;
  s.mean_test_accuracy = sum / repeats;
  for (const auto& r : s.runs) sq += (r.test_accuracy - s.mean_test_accuracy) * (r.test_accuracy - s.mean_test_accuracy);
  s.std_test_accuracy = std::sqrt(sq / repeats);
  return s;
}

std::vector<ScaleNetConfig> expand_grid(const nlohmann::json& grid) {
  if (!grid.is_object() || !grid.contains("base")) throw ValidationError("grid: expected {\"base\": ..., \"grid\": ...}");
  std::vector<nlohmann::json> configs{grid.at("base")};
  if (grid.contains("grid")) {
    for (const auto& [key, values] : grid.at("grid").items()) {
      if (!values.is_array() || values.empty()) throw ValidationError("grid: '" + key + "' must be a non-empty list");
      std::vector<nlohmann::json> next;
      for (const auto& c : configs) {
        for (const auto& v : values) {
          nlohmann::json cfg = c;
          if (key == "alpha" || key == "self_loops") {
            for (auto& b : cfg.at("branches")) b[key] = v;
          } else {
            cfg[key] = v;
          }
          next.push_back(std::move(cfg));
        }
      }
      configs = std::move(next);
    }
  }
  std::vector<ScaleNetConfig> out;
  for (const auto& c : configs) out.push_back(ScaleNetConfig::from_json(c));
  return out;
}

GridResult grid_search(const NodeDataset& ds, const nlohmann::json& grid, std::uint64_t seed) {
  GridResult result;
  for (auto& cfg : expand_grid(grid)) {
    RunReport report;
    try {
      report = train(ds, cfg, seed);
    } catch (const std::exception& e) {
      report.failed = true;
      report.failure = e.what();
      report.seed = seed;
      report.config_hash = config_hash(cfg);
    }
    cfg.seed = seed;
    result.rows.push_back({std::move(cfg), std::move(report)});
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const GridRow& a, const GridRow& b) {
    if (a.report.failed != b.report.failed) return !a.report.failed;
    if (a.report.val_accuracy != b.report.val_accuracy) return a.report.val_accuracy > b.report.val_accuracy;
    if (a.report.parameter_count != b.report.parameter_count) return a.report.parameter_count < b.report.parameter_count;
    return a.config.to_json().dump() < b.config.to_json().dump();
  });
  result.best = result.rows.size();
  for (std::size_t i = 0; i < result.rows.size(); ++i)
    if (!result.rows[i].report.failed) {
      result.best = i;
      break;
    }
  return result;
}

nlohmann::json grid_to_json(const GridResult& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : g.rows) rows.push_back({{"config", r.config.to_json()}, {"report", r.report.to_json()}});
  nlohmann::json j{{"rows", rows}};
  j["best"] = g.best < g.rows.size() ? g.rows[g.best].config.to_json() : nlohmann::json();
  return j;
}

namespace {
std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}
}  // namespace

std::string grid_to_markdown(const GridResult& g) {
  std::ostringstream os;
  os << "| rank | config | val acc | test acc | params | status |\n";
  os << "|---:|---|---:|---:|---:|---|\n";
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    const auto& r = g.rows[i];
    os << "| " << (i + 1) << " | `" << r.report.config_hash << "` | " << pct(r.report.val_accuracy) << " | "
       << pct(r.report.test_accuracy) << " | " << r.report.parameter_count << " | "
       << (r.report.failed ? "failed: " + r.report.failure : (i == g.best ? "best" : "ok")) << " |\n";
  }
  return os.str();
}

std::string run_to_markdown(const RepeatSummary& s) {
  std::ostringstream os;
  os << "| seed | best epoch | val loss | val acc | test acc |\n";
  os << "|---:|---:|---:|---:|---:|\n";
  for (const auto& r : s.runs) {
    char loss[32];
    std::snprintf(loss, sizeof loss, "%.4f", r.best_val_loss);
    os << "| " << r.seed << " | " << r.best_epoch << " | " << loss << " | " << pct(r.val_accuracy) << " | "
       << pct(r.test_accuracy) << (r.failed ? " (failed)" : "") << " |\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f ± %.1f", 100.0 * s.mean_test_accuracy, 100.0 * s.std_test_accuracy);
  os << "\nTest accuracy: " << buf << "\n";
  return os.str();
}

}  // namespace scalenet
