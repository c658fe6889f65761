#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace scalenet {

using Index = std::int64_t;

template <class V>
struct Triplet {
  Index row;
  Index col;
  V value;
};

enum class SelfLoopPolicy { Add, Remove, Keep };

// Compressed sparse row matrix kept in canonical form: column indices strictly
// increasing within each row and no stored zeros. Structural equality is
// therefore value equality.
template <class V>
class CsrMatrix {
 public:
  using value_type = V;

  CsrMatrix() : row_ptr_(1, 0) {}
  CsrMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  }

  // Duplicates are summed; entries that sum to zero are dropped.
  static CsrMatrix from_triplets(Index rows, Index cols, std::vector<Triplet<V>> entries) {
    CsrMatrix m(rows, cols);
    for (const auto& t : entries) {
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw std::out_of_range("triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet<V>& a, const Triplet<V>& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 0; k < entries.size();) {
      const Index r = entries[k].row;
      const Index c = entries[k].col;
      V sum{};
      for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k) sum += entries[k].value;
      if (sum != V{}) {
        m.col_idx_.push_back(c);
        m.values_.push_back(sum);
        ++m.row_ptr_[r + 1];
      }
    }
    for (Index r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  static CsrMatrix identity(Index n) {
    CsrMatrix m(n, n);
    m.col_idx_.resize(n);
    m.values_.assign(n, V{1});
    for (Index i = 0; i < n; ++i) {
      m.col_idx_[i] = i;
      m.row_ptr_[i + 1] = i + 1;
    }
    return m;
  }

  // Trusts the caller to supply canonical arrays.
  static CsrMatrix from_canonical(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                                  std::vector<V> values) {
    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.values_ = std::move(values);
    return m;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  bool is_square() const { return rows_ == cols_; }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const V> values() const { return values_; }

  std::span<const Index> row_cols(Index r) const {
    return {col_idx_.data() + row_ptr_[r], static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
  }
  std::span<const V> row_values(Index r) const {
    return {values_.data() + row_ptr_[r], static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
  }
  Index row_nnz(Index r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  V at(Index r, Index c) const {
    auto cols = row_cols(r);
    auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return V{};
    return values_[row_ptr_[r] + (it - cols.begin())];
  }

  std::vector<Triplet<V>> triplets() const {
    std::vector<Triplet<V>> out;
    out.reserve(values_.size());
    for (Index r = 0; r < rows_; ++r)
      for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_idx_[k], values_[k]});
    return out;
  }

  bool operator==(const CsrMatrix&) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<V> values_;
};

using IntMatrix = CsrMatrix<std::int64_t>;
using RealMatrix = CsrMatrix<double>;

namespace detail {
inline void require_same_shape(Index r1, Index c1, Index r2, Index c2, const char* what) {
  if (r1 != r2 || c1 != c2) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

// Merge two canonical rows, applying `combine(a_present, a, b_present, b)`; returns
// value to store (zero means skip).
template <class V, class F>
CsrMatrix<V> merge(const CsrMatrix<V>& a, const CsrMatrix<V>& b, F combine) {
  std::vector<Index> ptr(a.rows() + 1, 0);
  std::vector<Index> idx;
  std::vector<V> val;
  for (Index r = 0; r < a.rows(); ++r) {
    auto ac = a.row_cols(r), bc = b.row_cols(r);
    auto av = a.row_values(r), bv = b.row_values(r);
    std::size_t i = 0, j = 0;
    while (i < ac.size() || j < bc.size()) {
      Index c;
      V x{}, y{};
      bool has_a = false, has_b = false;
      if (j >= bc.size() || (i < ac.size() && ac[i] < bc[j])) {
        c = ac[i];
        x = av[i++];
        has_a = true;
      } else if (i >= ac.size() || bc[j] < ac[i]) {
        c = bc[j];
        y = bv[j++];
        has_b = true;
      } else {
        c = ac[i];
        x = av[i++];
        y = bv[j++];
        has_a = has_b = true;
      }
      V out = combine(has_a, x, has_b, y);
      if (out != V{}) {
        idx.push_back(c);
        val.push_back(out);
      }
    }
    ptr[r + 1] = static_cast<Index>(idx.size());
  }
  return CsrMatrix<V>::from_canonical(a.rows(), a.cols(), std::move(ptr), std::move(idx), std::move(val));
}
}  // namespace detail

template <class V>
CsrMatrix<V> transpose(const CsrMatrix<V>& m) {
  std::vector<Index> ptr(m.cols() + 1, 0);
  for (Index c : m.col_idx()) ++ptr[c + 1];
  for (Index c = 0; c < m.cols(); ++c) ptr[c + 1] += ptr[c];
  std::vector<Index> idx(m.nnz());
  std::vector<V> val(m.nnz());
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  // Rows are visited in increasing order, so each output row comes out sorted.
  for (Index r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index dst = next[cols[k]]++;
      idx[dst] = r;
      val[dst] = vals[k];
    }
  }
  return CsrMatrix<V>::from_canonical(m.cols(), m.rows(), std::move(ptr), std::move(idx), std::move(val));
}

// Row-by-row Gustavson product over the (+, *) semiring. Each output row is
// accumulated in the order of the left operand's stored entries, so results are
// reproducible for floating-point values too.
template <class V>
CsrMatrix<V> matmul(const CsrMatrix<V>& a, const CsrMatrix<V>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  std::vector<Index> ptr(a.rows() + 1, 0);
  std::vector<Index> idx;
  std::vector<V> val;
  std::vector<V> acc(b.cols(), V{});
  std::vector<Index> marker(b.cols(), -1);
  std::vector<Index> touched;
  for (Index r = 0; r < a.rows(); ++r) {
    touched.clear();
    auto ac = a.row_cols(r);
    auto av = a.row_values(r);
    for (std::size_t k = 0; k < ac.size(); ++k) {
      auto bc = b.row_cols(ac[k]);
      auto bv = b.row_values(ac[k]);
      for (std::size_t t = 0; t < bc.size(); ++t) {
        const Index c = bc[t];
        if (marker[c] != r) {
          marker[c] = r;
          acc[c] = V{};
          touched.push_back(c);
        }
        acc[c] += av[k] * bv[t];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index c : touched) {
      if (acc[c] != V{}) {
        idx.push_back(c);
        val.push_back(acc[c]);
      }
    }
    ptr[r + 1] = static_cast<Index>(idx.size());
  }
  return CsrMatrix<V>::from_canonical(a.rows(), b.cols(), std::move(ptr), std::move(idx), std::move(val));
}

template <class V>
CsrMatrix<V> binarize(const CsrMatrix<V>& m) {
  std::vector<V> ones(m.nnz(), V{1});
  return CsrMatrix<V>::from_canonical(m.rows(), m.cols(), {m.row_ptr().begin(), m.row_ptr().end()},
                                      {m.col_idx().begin(), m.col_idx().end()}, std::move(ones));
}

template <class V>
CsrMatrix<V> add(const CsrMatrix<V>& a, const CsrMatrix<V>& b) {
  detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "add");
  return detail::merge(a, b, [](bool, V x, bool, V y) { return x + y; });
}

template <class V>
CsrMatrix<V> scaled(const CsrMatrix<V>& m, V factor) {
  if (factor == V{}) return CsrMatrix<V>(m.rows(), m.cols());
  std::vector<V> val(m.values().begin(), m.values().end());
  for (auto& v : val) v *= factor;
  return CsrMatrix<V>::from_canonical(m.rows(), m.cols(), {m.row_ptr().begin(), m.row_ptr().end()},
                                      {m.col_idx().begin(), m.col_idx().end()}, std::move(val));
}

template <class V>
CsrMatrix<V> set_self_loops(const CsrMatrix<V>& m, SelfLoopPolicy policy) {
  if (!m.is_square()) throw std::invalid_argument("set_self_loops: matrix is not square");
  switch (policy) {
    case SelfLoopPolicy::Keep:
      return m;
    case SelfLoopPolicy::Remove: {
      auto diag = CsrMatrix<V>::identity(m.rows());
      return detail::merge(m, diag, [](bool, V x, bool on_diag, V) { return on_diag ? V{} : x; });
    }
    case SelfLoopPolicy::Add: {
      auto diag = CsrMatrix<V>::identity(m.rows());
      return detail::merge(m, diag, [](bool has, V x, bool, V) { return has ? x : V{1}; });
    }
  }
  return m;
}

// Support-wise OR; output is binary.
template <class V>
CsrMatrix<V> union_support(const CsrMatrix<V>& a, const CsrMatrix<V>& b) {
  detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "union");
  return detail::merge(a, b, [](bool, V, bool, V) { return V{1}; });
}

// Support-wise AND; output is binary.
template <class V>
CsrMatrix<V> intersect_support(const CsrMatrix<V>& a, const CsrMatrix<V>& b) {
  detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "intersect");
  return detail::merge(a, b, [](bool ha, V, bool hb, V) { return (ha && hb) ? V{1} : V{}; });
}

// Entries of `a` whose position is absent from `b`; values of `a` are kept.
template <class V>
CsrMatrix<V> difference_support(const CsrMatrix<V>& a, const CsrMatrix<V>& b) {
  detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "difference");
  return detail::merge(a, b, [](bool ha, V x, bool hb, V) { return (ha && !hb) ? x : V{}; });
}

template <class To, class From>
CsrMatrix<To> cast(const CsrMatrix<From>& m) {
  std::vector<To> val(m.values().begin(), m.values().end());
  return CsrMatrix<To>::from_canonical(m.rows(), m.cols(), {m.row_ptr().begin(), m.row_ptr().end()},
                                       {m.col_idx().begin(), m.col_idx().end()}, std::move(val));
}

// entry(i,j) / sqrt(rowdeg(i) * coldeg(j)), degrees being weighted row/column
// sums. Rows or columns with zero degree carry no entries, so nothing divides by 0.
template <class V>
RealMatrix normalize_sym(const CsrMatrix<V>& m) {
  std::vector<double> row_deg(m.rows(), 0.0), col_deg(m.cols(), 0.0);
  for (Index r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (vals[k] < V{}) throw std::invalid_argument("normalize_sym: negative entry");
      row_deg[r] += static_cast<double>(vals[k]);
      col_deg[cols[k]] += static_cast<double>(vals[k]);
    }
  }
  std::vector<double> val(m.nnz());
  for (Index r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      val[m.row_ptr()[r] + k] = static_cast<double>(vals[k]) / std::sqrt(row_deg[r] * col_deg[cols[k]]);
  }
  return RealMatrix::from_canonical(m.rows(), m.cols(), {m.row_ptr().begin(), m.row_ptr().end()},
                                    {m.col_idx().begin(), m.col_idx().end()}, std::move(val));
}

template <class V>
Eigen::MatrixXd to_dense(const CsrMatrix<V>& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) d(r, cols[k]) = static_cast<double>(vals[k]);
  }
  return d;
}

// Sparse times dense. Each output row is a fixed-order sum over the stored entries.
inline Eigen::MatrixXd spmm(const RealMatrix& a, const Eigen::MatrixXd& x) {
  if (a.cols() != x.rows()) throw std::invalid_argument("spmm: inner dimension mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), x.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    auto cols = a.row_cols(r);
    auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out.row(r) += vals[k] * x.row(cols[k]);
  }
  return out;
}

// Transposed product a^T * x without materializing a^T.
inline Eigen::MatrixXd spmm_transposed(const RealMatrix& a, const Eigen::MatrixXd& x) {
  if (a.rows() != x.rows()) throw std::invalid_argument("spmm_transposed: dimension mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.cols(), x.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    auto cols = a.row_cols(r);
    auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out.row(cols[k]) += vals[k] * x.row(r);
  }
  return out;
}

}  // namespace scalenet
