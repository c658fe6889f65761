// scalenet: command-line front end for scaled-graph construction, training,
// grid search, homophily statistics, synthetic data and verification suites.
//
// Exit codes: 0 ok, 1 validation error, 2 verification failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scalenet/dataset.hpp"
#include "scalenet/error.hpp"
#include "scalenet/model.hpp"
#include "scalenet/scale.hpp"
#include "scalenet/train.hpp"
#include "scalenet/verify.hpp"

namespace fs = std::filesystem;
using namespace scalenet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitVerifyFailed = 2;

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

// Writes `j` to `out` (and a Markdown companion next to it), or prints to stdout.
void emit(const std::string& out, const nlohmann::json& j, const std::string& markdown) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  write_text(out, j.dump(2) + "\n");
  if (!markdown.empty()) write_text(fs::path(out).replace_extension(".md"), markdown);
  std::cout << markdown;
}

// File-system friendly member name: "AA^T" -> "AAt".
std::string file_stem(std::string name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (name.compare(i, 2, "^T") == 0) {
      out += 't';
      ++i;
    } else {
      out += name[i];
    }
  }
  return out;
}

struct Common {
  std::string data;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int repeats = 1;
};

int cmd_transform(const Common& c, const std::string& edges, int scale, const std::string& policy) {
  DirectedGraph g;
  if (!edges.empty()) {
    g = read_edge_list(edges).graph;
  } else if (!c.data.empty()) {
    g = load_dataset(c.data, c.seed.value_or(0)).graph;
  } else {
    throw ValidationError("transform needs --data DIR or --edges FILE");
  }
  if (c.out.empty()) throw ValidationError("transform needs --out DIR");
  if (scale != 1 && scale != 2) throw ValidationError("--scale must be 1 or 2");
  const auto set = build_scaled_set(g, static_cast<std::size_t>(scale), parse_self_loop_policy(policy));
  fs::create_directories(c.out);
  nlohmann::json manifest{{"scale", set.scale}, {"policy", to_string(set.policy)}, {"lineage", set.lineage}};
  manifest["members"] = nlohmann::json::array();
  for (const auto& [name, m] : set.members) {
    const std::string file = file_stem(name) + ".mtx";
    std::ofstream out(fs::path(c.out) / file);
    write_matrix(out, m);
    manifest["members"].push_back({{"name", name}, {"file", file}, {"nnz", m.nnz()}});
  }
  write_text(fs::path(c.out) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << manifest.dump(2) << '\n';
  return kExitOk;
}

int cmd_train(const Common& c, bool zero_input, bool timing) {
  if (c.data.empty() || c.config.empty()) throw ValidationError("train needs --data DIR and --config FILE");
  const auto cfg = ScaleNetConfig::from_json(read_json(c.config));
  const std::uint64_t seed = c.seed.value_or(cfg.seed);
  const auto ds = load_dataset(c.data, seed);
  const auto summary = train_repeats(ds, cfg, seed, c.repeats, TrainOptions{.zero_input = zero_input});
  nlohmann::json j{{"config", cfg.to_json()}, {"zero_input", zero_input}};
  j["runs"] = nlohmann::json::array();
  for (const auto& r : summary.runs) j["runs"].push_back(r.to_json(timing));
  j["mean_test_accuracy"] = summary.mean_test_accuracy;
  j["std_test_accuracy"] = summary.std_test_accuracy;
  emit(c.out, j, run_to_markdown(summary));
  for (const auto& r : summary.runs) std::cerr << "seed " << r.seed << ": " << r.wall_time_ms << " ms\n";
  return kExitOk;
}

int cmd_grid(const Common& c) {
  if (c.data.empty() || c.config.empty()) throw ValidationError("grid needs --data DIR and --config GRID.json");
  const std::uint64_t seed = c.seed.value_or(0);
  const auto ds = load_dataset(c.data, seed);
  const auto result = grid_search(ds, read_json(c.config), seed);
  emit(c.out, grid_to_json(result), grid_to_markdown(result));
  return kExitOk;
}

int cmd_stats(const Common& c, std::vector<std::string> matrices) {
  if (c.data.empty()) throw ValidationError("stats needs --data DIR");
  const auto ds = load_dataset(c.data, c.seed.value_or(0));
  if (matrices.empty()) matrices = {"A", "A^T", "AA", "AA^T", "A^TA", "A^TA^T"};
  nlohmann::json j = nlohmann::json::array();
  std::string md = "| matrix | homo | hetero | no neighbours |\n|---|---:|---:|---:|\n";
  for (const auto& name : matrices) {
    const auto r = directional_homophily(ds, name);
    j.push_back({{"matrix", r.matrix}, {"homo", r.homo}, {"hetero", r.hetero}, {"no_neigh", r.no_neigh}});
    md += "| " + r.matrix + " | " + std::to_string(r.homo) + " | " + std::to_string(r.hetero) + " | " +
          std::to_string(r.no_neigh) + " |\n";
  }
  emit(c.out, j, md);
  return kExitOk;
}

int cmd_verify(const Common& c, const std::string& suite, const std::string& csv) {
  const auto report = run_verification(suite);
  std::cout << report.summary();
  if (!c.out.empty()) write_text(c.out, report.to_json().dump(2) + "\n");
  if (!csv.empty()) write_text(csv, report.hermitian_csv());
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

int cmd_synth(const Common& c, const std::string& kind, Index n, int classes) {
  if (c.out.empty()) throw ValidationError("synth needs --out DIR");
  SynthKind k;
  if (kind == "homophilic") k = SynthKind::Homophilic;
  else if (kind == "heterophilic") k = SynthKind::Heterophilic;
  else throw ValidationError("--kind must be homophilic or heterophilic");
  const auto ds = synth_dataset(k, n, classes, c.seed.value_or(0));
  write_dataset(c.out, ds);
  std::cout << "wrote " << ds.num_nodes() << " nodes, " << ds.graph.num_edges() << " edges to " << c.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaled directed-graph toolkit"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--data", common.data, "Dataset directory");
    sub->add_option("--config", common.config, "Config or grid JSON");
    sub->add_option("--seed", common.seed, "Random seed");
    sub->add_option("--out", common.out, "Output file or directory");
    sub->add_option("--repeats", common.repeats, "Number of seeds to average")->check(CLI::PositiveNumber);
  };

  auto* transform = app.add_subcommand("transform", "Build scaled adjacency matrices");
  add_common(transform);
  std::string edges, policy = "keep";
  int scale = 2;
  transform->add_option("--edges", edges, "Edge list (src<TAB>dst)");
  transform->add_option("--scale", scale, "Scale level (1 or 2)");
  transform->add_option("--policy", policy, "Self-loop policy: add, remove, keep");

  auto* train_cmd = app.add_subcommand("train", "Train a ScaleNet configuration");
  add_common(train_cmd);
  bool zero_input = false, timing = false;
  train_cmd->add_flag("--zero-input", zero_input, "Replace all features with zeros");
  train_cmd->add_flag("--timing", timing, "Include wall time in the JSON report");

  auto* grid = app.add_subcommand("grid", "Grid search over configurations");
  add_common(grid);

  auto* stats = app.add_subcommand("stats", "Directional homophily counts");
  add_common(stats);
  std::vector<std::string> matrices;
  stats->add_option("--matrix", matrices, "Scaled matrix names (default: all six)");

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  add_common(verify);
  std::string suite = "all", csv;
  verify->add_option("--suite", suite, "algebra, proximity, filters, scalenet, hermitian or all");
  verify->add_option("--csv", csv, "Write hermitian (seed, n, q, max_dev) rows here");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(synth);
  std::string kind = "homophilic";
  Index n = 300;
  int classes = 3;
  synth->add_option("--kind", kind, "homophilic or heterophilic");
  synth->add_option("--n", n, "Node count");
  synth->add_option("--classes", classes, "Class count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*transform) return cmd_transform(common, edges, scale, policy);
    if (*train_cmd) return cmd_train(common, zero_input, timing);
    if (*grid) return cmd_grid(common);
    if (*stats) return cmd_stats(common, matrices);
    if (*verify) return cmd_verify(common, suite, csv);
    if (*synth) return cmd_synth(common, kind, n, classes);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
