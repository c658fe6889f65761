#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "scalenet/error.hpp"
#include "scalenet/graph.hpp"

using namespace scalenet;
namespace fs = std::filesystem;

namespace {

fs::path scratch_file(const std::string& name, const std::string& content) {
  const auto dir = fs::temp_directory_path() / "scalenet_tests";
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("edge list with arbitrary labels is remapped in order of appearance") {
  const auto path = scratch_file("labels.tsv", "# comment\nalice\tbob\n\ncarol\tbob\nbob\talice  # trailing\n");
  const auto file = read_edge_list(path);
  REQUIRE(file.node_labels == std::vector<std::string>{"alice", "bob", "carol"});
  CHECK(file.graph.num_nodes() == 3);
  CHECK(file.graph.adjacency().at(0, 1) == 1);
  CHECK(file.graph.adjacency().at(2, 1) == 1);
  CHECK(file.graph.adjacency().at(1, 0) == 1);
  CHECK(file.graph.num_edges() == 3);
}

TEST_CASE("integer edge list reports the offending line") {
  const auto path = scratch_file("bad.tsv", "0\t1\n1\t2\n2\t9\n");
  try {
    read_edge_list(path, 3);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  const auto ok = read_edge_list(scratch_file("ok.tsv", "0\t1\n1\t2\n"), 3);
  CHECK(ok.num_edges() == 2);
}

TEST_CASE("matrix dump round trip") {
  const auto g = oracle::worked_example();
  std::stringstream ss;
  write_matrix(ss, g.adjacency());
  CHECK(ss.str().rfind("6 6 5\n0 1 1\n", 0) == 0);
  CHECK(read_int_matrix(ss) == g.adjacency());

  std::stringstream edges;
  write_edge_list(edges, g);
  const auto path = scratch_file("roundtrip.tsv", edges.str());
  CHECK(read_edge_list(path, 6).adjacency() == g.adjacency());

  std::stringstream bad("2 2 1\n0 5 1\n");
  CHECK_THROWS_AS(read_int_matrix(bad), ValidationError);
}

TEST_CASE("graph hash tracks structure") {
  const auto g = oracle::worked_example();
  CHECK(g.hash() == oracle::worked_example().hash());
  CHECK(g.hash() != DirectedGraph::from_edge_list({{0, 1}}, 6).hash());
}

TEST_CASE("random_digraph is seeded and loop-free") {
  std::mt19937_64 r1(9), r2(9);
  const auto a = random_digraph(30, 0.1, r1);
  const auto b = random_digraph(30, 0.1, r2);
  CHECK(a.adjacency() == b.adjacency());
  for (Index i = 0; i < 30; ++i) CHECK(a.adjacency().at(i, i) == 0);
}
