#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scalenet/hermitian.hpp"
#include "scalenet/model.hpp"

namespace scalenet {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<EquivalenceRow> hermitian_rows;
  double seconds = 0.0;

  bool passed() const;
  nlohmann::json to_json() const;
  std::string summary() const;
  std::string hermitian_csv() const;
};

// Suites: algebra, proximity, filters, scalenet, hermitian, all.
VerifyReport run_verification(const std::string& suite);
const std::vector<std::string>& verification_suites();

// The 6-node digraph with edges 1->2, 3->2, 4->3, 5->3, 6->1 (0-based here).
DirectedGraph worked_example_graph();

// Central finite differences over every parameter of `model` for the mean
// cross-entropy on `rows`. Returns the largest per-tensor relative error
// ||analytic - numeric|| / (||analytic|| + ||numeric||).
double scalenet_gradient_check(ScaleNet& model, const DenseMatrix& x, std::span<const int> labels,
                               std::span<const Index> rows, double step = 1e-5);

}  // namespace scalenet
