#pragma once

// Linear discriminant weak learner. Shared (pooled, regularized) covariance,
// class means and priors give linear scores
//
//   g_i(x) = w_i . x + w_i0,  w_i = S^-1 mu_i,  w_i0 = -1/2 mu_i' S^-1 mu_i + ln P(c_i)
//
// and a softmax of g_i turns the scores into a posterior weight vector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affectfuse/error.hpp"

namespace affectfuse::lda {

/// Dense row-major matrix, sized for the handful of dimensions a weak learner sees.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular L with L L' = a, or nullopt if a is not positive definite.
inline std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// Solve (L L') x = b given the Cholesky factor L.
inline std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
    y[i] /= l(i, i);
  }
  return y;
}

struct LdaOptions {
  double shrinkage = 0.01;  ///< lambda in [0, 1): blend toward diag(S)
  double ridge = 1e-8;      ///< epsilon > 0 added to the diagonal
};

struct LdaModel {
  std::size_t num_classes = 0;
  std::size_t dim = 0;
  Matrix means;       ///< num_classes x dim
  Matrix covariance;  ///< dim x dim, regularized pooled covariance
  std::vector<double> priors;
  Matrix weights;     ///< num_classes x dim, row i = S^-1 mu_i
  std::vector<double> biases;

  friend bool operator==(const LdaModel&, const LdaModel&) = default;
};

/// Training set in row form: x[i] has `dim` entries, labels[i] is a class
/// index in [0, num_classes).
struct TrainingSet {
  std::vector<std::vector<double>> x;
  std::vector<std::size_t> labels;
};

/// Derive weights and biases from means, covariance and priors.
inline void derive_weights(LdaModel& m) {
  auto chol = cholesky(m.covariance);
  if (!chol) throw TrainingError("fit_lda: regularized covariance is not positive definite");
  m.weights = Matrix(m.num_classes, m.dim);
  m.biases.assign(m.num_classes, 0.0);
  for (std::size_t i = 0; i < m.num_classes; ++i) {
    const auto w = cholesky_solve(*chol, m.means.row(i));
    double quad = 0.0;
    for (std::size_t k = 0; k < m.dim; ++k) {
      m.weights(i, k) = w[k];
      quad += m.means(i, k) * w[k];
    }
    m.biases[i] = -0.5 * quad + std::log(m.priors[i]);
  }
}

/// Fit class means, pooled covariance S = scatter / (N - K), regularized as
/// (1 - lambda) S + lambda diag(S) + eps I, frequency priors, and weights.
inline LdaModel fit_lda(const TrainingSet& data, std::size_t num_classes,
                        const LdaOptions& opts = {}) {
  if (num_classes < 1) throw TrainingError("fit_lda: need at least one class");
  if (data.x.size() != data.labels.size()) {
    throw TrainingError("fit_lda: rows and labels differ in length");
  }
  if (data.x.empty() || data.x.front().empty()) throw TrainingError("fit_lda: dimension must be >= 1");
  if (!(opts.shrinkage >= 0.0 && opts.shrinkage < 1.0)) {
    throw ParameterError("fit_lda: shrinkage must lie in [0, 1)");
  }
  if (!(opts.ridge > 0.0) || !std::isfinite(opts.ridge)) {
    throw ParameterError("fit_lda: ridge must be positive");
  }

  const std::size_t d = data.x.front().size();
  LdaModel m;
  m.num_classes = num_classes;
  m.dim = d;
  m.means = Matrix(num_classes, d);
  std::vector<std::size_t> counts(num_classes, 0);

  for (std::size_t r = 0; r < data.x.size(); ++r) {
    const auto& row = data.x[r];
    const std::size_t c = data.labels[r];
    if (row.size() != d) throw TrainingError("fit_lda: inconsistent row dimension");
    if (c >= num_classes) throw TrainingError("fit_lda: label out of range");
    for (std::size_t k = 0; k < d; ++k) m.means(c, k) += row[k];
    ++counts[c];
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] < 2) {
      throw TrainingError("fit_lda: class " + std::to_string(c) + " has fewer than 2 rows");
    }
    for (std::size_t k = 0; k < d; ++k) m.means(c, k) /= static_cast<double>(counts[c]);
  }

  Matrix scatter(d, d);
  std::vector<double> diff(d);
  for (std::size_t r = 0; r < data.x.size(); ++r) {
    const std::size_t c = data.labels[r];
    for (std::size_t k = 0; k < d; ++k) diff[k] = data.x[r][k] - m.means(c, k);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) scatter(i, j) += diff[i] * diff[j];
    }
  }
  const double n = static_cast<double>(data.x.size());
  const double dof = std::max(1.0, n - static_cast<double>(num_classes));

  m.covariance = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double v = scatter(i, j) / dof;
      v *= (i == j) ? 1.0 : (1.0 - opts.shrinkage);
      if (i == j) v += opts.ridge;
      m.covariance(i, j) = v;
      m.covariance(j, i) = v;
    }
  }

  m.priors.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) m.priors[c] = static_cast<double>(counts[c]) / n;

  derive_weights(m);
  return m;
}

/// g_i(x) = w_i . x + w_i0 for every class.
inline std::vector<double> discriminants(const LdaModel& m, std::span<const double> x) {
  if (x.size() != m.dim) {
    throw ContractError("discriminants: expected dimension " + std::to_string(m.dim) +
                        ", got " + std::to_string(x.size()));
  }
  std::vector<double> g(m.num_classes);
  for (std::size_t i = 0; i < m.num_classes; ++i) {
    double s = m.biases[i];
    const auto w = m.weights.row(i);
    for (std::size_t k = 0; k < m.dim; ++k) s += w[k] * x[k];
    g[i] = s;
  }
  return g;
}

/// Softmax with max-subtraction; entries are nonnegative and sum to 1.
inline std::vector<double> weight_vector(std::span<const double> g) {
  if (g.empty()) throw ParameterError("weight_vector: empty score vector");
  for (double v : g) if (!std::isfinite(v)) throw ParameterError("weight_vector: non-finite score");
  const double top = *std::max_element(g.begin(), g.end());
  std::vector<double> w(g.size());
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    w[i] = std::exp(g[i] - top);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

/// Index of the largest entry; the lowest index wins ties.
inline std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace affectfuse::lda
