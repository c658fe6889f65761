#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "scalenet/dataset.hpp"
#include "scalenet/error.hpp"
#include "scalenet/scale.hpp"

using namespace scalenet;
namespace fs = std::filesystem;

namespace {

const fs::path kToy = fs::path(SCALENET_TEST_DATA) / "toy";

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "scalenet_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Majority vote over {j != i : M(i, j) != 0} computed from a dense matrix.
HomophilyReport vote(const Eigen::MatrixXd& m, const std::vector<int>& labels) {
  HomophilyReport r;
  for (Index i = 0; i < m.rows(); ++i) {
    std::map<int, int> votes;
    for (Index j = 0; j < m.cols(); ++j)
      if (j != i && m(i, j) != 0) ++votes[labels[j]];
    if (votes.empty()) {
      ++r.no_neigh;
      continue;
    }
    int best = -1, count = 0;
    bool tie = false;
    for (const auto& [label, c] : votes) {
      if (c > count) {
        best = label;
        count = c;
        tie = false;
      } else if (c == count) {
        tie = true;
      }
    }
    if (!tie && best == labels[i]) ++r.homo;
    else ++r.hetero;
  }
  return r;
}

}  // namespace

TEST_CASE("bundled toy dataset") {
  const auto ds = load_dataset(kToy, 0);
  CHECK(ds.num_nodes() == 6);
  CHECK(ds.features.cols() == 6);
  CHECK(ds.num_classes == 2);
  CHECK(ds.features == DenseMatrix::Identity(6, 6));
  CHECK(ds.labels == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(ds.graph.adjacency() == oracle::worked_example().adjacency());

  // No splits.json: a seeded stratified split is generated.
  const auto& s = ds.splits;
  CHECK(s.train.size() + s.val.size() + s.test.size() == 6);
  std::set<Index> seen(s.train.begin(), s.train.end());
  seen.insert(s.val.begin(), s.val.end());
  seen.insert(s.test.begin(), s.test.end());
  CHECK(seen.size() == 6);
  CHECK(load_dataset(kToy, 0).splits.train == s.train);
}

TEST_CASE("stratified split proportions") {
  std::vector<int> labels;
  for (int i = 0; i < 300; ++i) labels.push_back(i % 3);
  const auto s = stratified_split(labels, 3, 4);
  CHECK(s.train.size() == 180);
  CHECK(s.val.size() == 60);
  CHECK(s.test.size() == 60);
  std::vector<int> per_class(3, 0);
  for (Index i : s.train) ++per_class[labels[i]];
  CHECK(per_class == std::vector<int>{60, 60, 60});
  CHECK(stratified_split(labels, 3, 5).train != s.train);
}

TEST_CASE("loader rejects malformed datasets") {
  const auto dir = fresh_dir("bad_rows");
  fs::copy(kToy / "graph.tsv", dir / "graph.tsv");
  fs::copy(kToy / "labels.csv", dir / "labels.csv");
  std::ofstream(dir / "features.csv") << "1,0\n0,1\n1,1\n";
  try {
    load_dataset(dir);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("features.csv") != std::string::npos);
  }

  std::ofstream(dir / "features.csv") << "1\n2\n3\n4\nx\n6\n";
  try {
    load_dataset(dir);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("features.csv:5") != std::string::npos);
  }

  std::ofstream(dir / "features.csv") << "1\n2\n3\n4\n5\n6\n";
  std::ofstream(dir / "labels.csv") << "0\n0\n-1\n1\n1\n1\n";
  try {
    load_dataset(dir);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("labels.csv:3") != std::string::npos);
  }

  std::ofstream(dir / "labels.csv") << "0\n0\n0\n1\n1\n1\n";
  std::ofstream(dir / "splits.json") << R"({"train":[0,1],"val":[1],"test":[5]})";
  CHECK_THROWS_AS(load_dataset(dir), ValidationError);

  fs::remove(dir / "graph.tsv");
  CHECK_THROWS_AS(load_dataset(dir), ValidationError);
}

TEST_CASE("dataset write and reload") {
  const auto ds = synth_dataset(SynthKind::Homophilic, 60, 3, 9);
  const auto dir = fresh_dir("roundtrip");
  write_dataset(dir, ds);
  const auto back = load_dataset(dir);
  CHECK(back.features == ds.features);
  CHECK(back.labels == ds.labels);
  CHECK(back.graph.adjacency() == ds.graph.adjacency());
  CHECK(back.splits.train == ds.splits.train);
  CHECK(back.splits.test == ds.splits.test);
}

TEST_CASE("directional homophily") {
  const auto ds = load_dataset(kToy, 0);
  const auto a = directional_homophily(ds, "A");
  CHECK(a.homo == 2);
  CHECK(a.hetero == 3);
  CHECK(a.no_neigh == 1);

  const auto big = synth_dataset(SynthKind::Heterophilic, 120, 3, 2);
  for (const char* name : {"A", "A^T", "AA", "AA^T", "A^TA", "A^TA^T"}) {
    const auto r = directional_homophily(big, name);
    const auto expected = vote(to_dense(scale_word_matrix(big.graph, ScaleWord::parse(name))), big.labels);
    CHECK(r.matrix == name);
    CHECK(r.homo == expected.homo);
    CHECK(r.hetero == expected.hetero);
    CHECK(r.no_neigh == expected.no_neigh);
    CHECK(r.homo + r.hetero + r.no_neigh == big.num_nodes());
  }

  auto empty = ds;
  empty.graph = DirectedGraph::from_edge_list({}, 6);
  CHECK(directional_homophily(empty, "AA^T").no_neigh == 6);
  CHECK_THROWS(directional_homophily(ds, "B"));
}

TEST_CASE("synthetic generators") {
  SUBCASE("homophilic edges concentrate within classes") {
    const auto ds = synth_dataset(SynthKind::Homophilic, 300, 3, 1);
    double within = 0, cross = 0, within_pairs = 0, cross_pairs = 0;
    for (Index i = 0; i < 300; ++i)
      for (Index j = 0; j < 300; ++j) {
        if (i == j) continue;
        const bool same = ds.labels[i] == ds.labels[j];
        (same ? within_pairs : cross_pairs) += 1;
        if (ds.graph.adjacency().at(i, j)) (same ? within : cross) += 1;
      }
    const double ratio = (within / within_pairs) / (cross / cross_pairs);
    CHECK(ratio > 7.0);
    CHECK(ratio < 14.0);
    CHECK(SynthOptions{}.cross_ratio == 0.1);
  }
  SUBCASE("heterophilic graphs leave many nodes without in-edges") {
    const auto ds = synth_dataset(SynthKind::Heterophilic, 300, 3, 1);
    const auto at = ds.graph.transposed();
    Index empty_rows = 0;
    for (Index i = 0; i < 300; ++i) empty_rows += at.row_nnz(i) == 0;
    CHECK(empty_rows >= 120);
    CHECK(directional_homophily(ds, "A").hetero > directional_homophily(ds, "A").homo);
  }
  SUBCASE("same seed gives identical bytes") {
    for (auto kind : {SynthKind::Homophilic, SynthKind::Heterophilic}) {
      const auto d1 = fresh_dir("synth_a"), d2 = fresh_dir("synth_b");
      write_dataset(d1, synth_dataset(kind, 100, 3, 7));
      write_dataset(d2, synth_dataset(kind, 100, 3, 7));
      for (const char* f : {"graph.tsv", "features.csv", "labels.csv", "splits.json"})
        CHECK(slurp(d1 / f) == slurp(d2 / f));
      write_dataset(d2, synth_dataset(kind, 100, 3, 8));
      CHECK(slurp(d1 / "features.csv") != slurp(d2 / "features.csv"));
    }
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(synth_dataset(SynthKind::Homophilic, 20, 3, 0), ValidationError);
    CHECK_THROWS_AS(synth_dataset(SynthKind::Homophilic, 100, 1, 0), ValidationError);
  }
}
