#pragma once

// Proximity matrices of the 6-node worked example, written out by hand
// (rows and columns are nodes 1..6).

#include "oracles.hpp"

namespace golden {

inline oracle::IntDense m2() {
  return oracle::from_rows({{1, 0, 1, 0, 0, 0},
                            {0, 0, 0, 0, 0, 0},
                            {1, 0, 1, 0, 0, 0},
                            {0, 0, 0, 1, 1, 0},
                            {0, 0, 0, 1, 1, 0},
                            {0, 0, 0, 0, 0, 1}});
}

inline oracle::IntDense m2_pruned() {
  return oracle::from_rows({{0, 0, 1, 0, 0, 0},
                            {0, 0, 0, 0, 0, 0},
                            {1, 0, 0, 0, 0, 0},
                            {0, 0, 0, 0, 1, 0},
                            {0, 0, 0, 1, 0, 0},
                            {0, 0, 0, 0, 0, 0}});
}

inline oracle::IntDense m3() {
  return oracle::from_rows({{0, 0, 0, 0, 0, 0},
                            {0, 0, 0, 0, 0, 0},
                            {0, 0, 0, 0, 0, 0},
                            {0, 0, 0, 1, 1, 1},
                            {0, 0, 0, 1, 1, 1},
                            {0, 0, 0, 1, 1, 1}});
}

inline oracle::IntDense m3_pruned() {
  return oracle::from_rows({{0, 0, 0, 0, 0, 0},
                            {0, 0, 0, 0, 0, 0},
                            {0, 0, 0, 0, 0, 0},
                            {0, 0, 0, 0, 0, 1},
                            {0, 0, 0, 0, 0, 1},
                            {0, 0, 0, 1, 1, 0}});
}

}  // namespace golden
