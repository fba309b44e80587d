#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hindsight {

// Dense row-major rectangular array. Used for per-player variation arrays
// and bootstrap moment rows; nothing fancy on purpose.
class RowMatrix {
 public:
  RowMatrix() = default;
  RowMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Square matrix with finite nonnegative entries; validated on construction.
class NonNegMatrix {
 public:
  explicit NonNegMatrix(std::size_t dim);
  NonNegMatrix(std::size_t dim, std::vector<double> entries);
  static NonNegMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t r, std::size_t c) const {
    return entries_[r * dim_ + c];
  }
  const std::vector<double>& entries() const { return entries_; }

  // Rank-one update A += v v^T. The only mutating operation; used to build
  // sums of outer products exactly as written, term by term.
  void add_outer(std::span<const double> v);

  double frobenius_norm() const;
  std::vector<double> multiply(std::span<const double> v) const;

 private:
  std::size_t dim_;
  std::vector<double> entries_;
};

struct PFEigenpair {
  double value = 0.0;
  std::vector<double> vector;  // unit Euclidean norm, nonnegative entries
};

struct PowerIterationOptions {
  double value_rel_tol = 1e-13;
  double residual_rel_tol = 1e-10;  // relative to the Frobenius norm
  int max_iterations = 10000;
};

// Copy of m with every exactly-zero entry replaced by eta (> 0).
NonNegMatrix regularize(const NonNegMatrix& m, double eta);

// Dominant eigenpair of a strictly positive matrix by power iteration with
// the deterministic start vector (1/sqrt(dim), ..., 1/sqrt(dim)).
PFEigenpair perron_frobenius(const NonNegMatrix& m,
                             const PowerIterationOptions& opts = {});

// Concentration bound for a vector of functions of conditionally independent
// coordinates: given the Gram matrix of coordinate-wise maximal variations,
// returns the componentwise deviation epsilon with tail probability <= rho.
std::vector<double> mcdiarmid_vector_bound(const NonNegMatrix& variation_gram,
                                           double rho);

}  // namespace hindsight
