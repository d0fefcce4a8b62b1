#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace tucker {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

std::size_t product(std::span<const std::size_t> dims);

/// Dense d-way array of doubles.
///
/// Storage is column-major in the multilinear sense: the mode-0 index varies
/// fastest, then mode 1, and so on. A tensor with dims (n0, n1, n2) stores
/// entry (i0, i1, i2) at i0 + n0 * (i1 + n1 * i2).
class DenseTensor {
 public:
  /// A 1-element scalar tensor holding zero.
  DenseTensor();
  /// Zero-filled tensor of the given shape.
  explicit DenseTensor(Dims dims);
  DenseTensor(Dims dims, std::vector<double> data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  std::size_t linear_index(std::span<const std::size_t> index) const;
  double operator()(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }
  double& operator()(std::span<const std::size_t> index) { return data_[linear_index(index)]; }
  double at(std::initializer_list<std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index);

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// Product of every dimension except `mode`.
std::size_t complement_size(const Dims& dims, std::size_t mode);

/// Mode-k unfolding A_(k): n_k rows, columns ordered by the remaining modes
/// with the lowest remaining mode varying fastest.
Matrix unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of unfold for the same convention.
DenseTensor fold(const Matrix& m, std::size_t mode, const Dims& dims);

/// t x_k b, i.e. the tensor whose mode-k unfolding is b * unfold(t, k).
DenseTensor mode_product(const DenseTensor& t, const Matrix& b, std::size_t mode);

/// t x_k b^T without forming the transpose.
DenseTensor mode_product_transposed(const DenseTensor& t, const Matrix& b, std::size_t mode);

double inner_product(const DenseTensor& a, const DenseTensor& b);
double frobenius_norm(const DenseTensor& t);
/// ||a - b||_F.
double frobenius_distance(const DenseTensor& a, const DenseTensor& b);

/// Diagonal tensor with v_i at (i, i, ..., i).
DenseTensor tendiag(std::span<const double> v, const Dims& dims);

}  // namespace tucker
