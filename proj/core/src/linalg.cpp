#include "hindsight/linalg.hpp"

#include <cmath>
#include <string>

#include "hindsight/errors.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

namespace {

void validate_entries(const std::vector<double>& entries) {
  for (double v : entries) {
    if (!std::isfinite(v)) {
      throw NumericError("invalid matrix: nonfinite entry");
    }
    if (v < 0.0) {
      throw NumericError("invalid matrix: negative entry " + std::to_string(v));
    }
  }
}

}  // namespace

NonNegMatrix::NonNegMatrix(std::size_t dim)
    : dim_(dim), entries_(dim * dim, 0.0) {
  if (dim == 0) throw NumericError("invalid matrix: dimension 0");
}

NonNegMatrix::NonNegMatrix(std::size_t dim, std::vector<double> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim == 0) throw NumericError("invalid matrix: dimension 0");
  if (entries_.size() != dim * dim) {
    throw NumericError("invalid matrix: entry count does not match dimension");
  }
  validate_entries(entries_);
}

NonNegMatrix NonNegMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t dim = rows.size();
  std::vector<double> entries;
  entries.reserve(dim * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) {
      throw NumericError("invalid matrix: ragged rows");
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return NonNegMatrix(dim, std::move(entries));
}

void NonNegMatrix::add_outer(std::span<const double> v) {
  if (v.size() != dim_) {
    throw NumericError("outer-product update: vector length mismatch");
  }
  for (std::size_t r = 0; r < dim_; ++r) {
    const double vr = v[r];
    for (std::size_t c = 0; c < dim_; ++c) {
      entries_[r * dim_ + c] += vr * v[c];
    }
  }
}

double NonNegMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (double v : entries_) acc += v * v;
  return std::sqrt(acc);
}

std::vector<double> NonNegMatrix::multiply(std::span<const double> v) const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) acc += entries_[r * dim_ + c] * v[c];
    out[r] = acc;
  }
  return out;
}

NonNegMatrix regularize(const NonNegMatrix& m, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("regularize: eta must be a positive finite number");
  }
  std::vector<double> entries = m.entries();
  for (double& v : entries) {
    if (v == 0.0) v = eta;
  }
  return NonNegMatrix(m.dim(), std::move(entries));
}

PFEigenpair perron_frobenius(const NonNegMatrix& m,
                             const PowerIterationOptions& opts) {
  const std::size_t dim = m.dim();
  if (dim == 1) {
    return {m(0, 0), {1.0}};
  }

  const double frob = m.frobenius_norm();
  const double residual_tol = opts.residual_rel_tol * frob;

  std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  double value = 0.0;
  double residual = 0.0;

  for (int it = 0; it < opts.max_iterations; ++it) {
    std::vector<double> w = m.multiply(v);
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < dim; ++i) rayleigh += v[i] * w[i];

    double res_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) res_sq += sq(w[i] - rayleigh * v[i]);
    residual = std::sqrt(res_sq);

    const bool value_settled =
        it > 0 && std::abs(rayleigh - value) <= opts.value_rel_tol * std::abs(rayleigh);
    value = rayleigh;

    if (value_settled && residual <= residual_tol) {
      return {value, v};
    }

    double norm_sq = 0.0;
    for (double x : w) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) {
      // Only reachable for the zero matrix, which the regularized inputs
      // never produce.
      return {0.0, v};
    }
    for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / norm;
  }

  throw IterationLimitError(
      "perron_frobenius: no convergence after " +
          std::to_string(opts.max_iterations) + " iterations",
      residual);
}

std::vector<double> mcdiarmid_vector_bound(const NonNegMatrix& variation_gram,
                                           double rho) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw ConfigError("mcdiarmid_vector_bound: rho must lie in (0,1)");
  }
  const PFEigenpair pf = perron_frobenius(variation_gram);
  const double scale = std::sqrt(-std::log(rho) / (2.0 * pf.value));
  std::vector<double> bound = variation_gram.multiply(pf.vector);
  for (double& b : bound) b *= scale;
  return bound;
}

}  // namespace hindsight
