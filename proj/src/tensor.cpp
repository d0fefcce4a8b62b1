#include "tucker/tensor.hpp"

#include "tucker/kernels.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tucker {

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace {

void check_dims(const Dims& dims) {
  if (dims.empty()) throw std::invalid_argument("tensor needs at least one mode");
  for (auto n : dims)
    if (n == 0) throw std::invalid_argument("tensor dimensions must be positive");
}

void check_mode(const DenseTensor& t, std::size_t mode) {
  if (mode >= t.order())
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for order-" +
                            std::to_string(t.order()) + " tensor");
}

}  // namespace

DenseTensor::DenseTensor() : dims_{1}, data_(1, 0.0) {}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(product(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != product(dims_))
    throw std::invalid_argument("tensor data length does not match dims");
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw std::invalid_argument("index arity mismatch");
  std::size_t offset = 0;
  std::size_t stride = 1;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (index[k] >= dims_[k]) throw std::out_of_range("tensor index out of range");
    offset += index[k] * stride;
    stride *= dims_[k];
  }
  return offset;
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const {
  return data_[linear_index(std::span(index.begin(), index.size()))];
}

double& DenseTensor::at(std::initializer_list<std::size_t> index) {
  return data_[linear_index(std::span(index.begin(), index.size()))];
}

std::size_t complement_size(const Dims& dims, std::size_t mode) {
  std::size_t n = 1;
  for (std::size_t j = 0; j < dims.size(); ++j)
    if (j != mode) n *= dims[j];
  return n;
}

Matrix unfold(const DenseTensor& t, std::size_t mode) {
  check_mode(t, mode);
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  Matrix m(extent, left * right);
  const double* src = t.data().data();
  for (std::size_t r = 0; r < right; ++r) {
    Eigen::Map<const Matrix> slab(src + r * left * extent, left, extent);
    m.middleCols(r * left, left) = slab.transpose();
  }
  return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Dims& dims) {
  check_dims(dims);
  if (mode >= dims.size()) throw std::out_of_range("fold mode out of range");
  const auto [left, extent, right] = slab_shape(dims, mode);
  if (static_cast<std::size_t>(m.rows()) != extent ||
      static_cast<std::size_t>(m.cols()) != left * right)
    throw std::invalid_argument("fold: matrix shape does not match dims");
  DenseTensor t(dims);
  double* dst = t.data().data();
  for (std::size_t r = 0; r < right; ++r) {
    Eigen::Map<Matrix> slab(dst + r * left * extent, left, extent);
    slab = m.middleCols(r * left, left).transpose();
  }
  return t;
}

DenseTensor mode_product(const DenseTensor& t, const Matrix& b, std::size_t mode) {
  check_mode(t, mode);
  if (static_cast<std::size_t>(b.cols()) != t.dim(mode))
    throw std::invalid_argument("mode_product: matrix columns must equal n_k");
  return kernels::mode_product(t, b, mode);
}

DenseTensor mode_product_transposed(const DenseTensor& t, const Matrix& b, std::size_t mode) {
  check_mode(t, mode);
  if (static_cast<std::size_t>(b.rows()) != t.dim(mode))
    throw std::invalid_argument("mode_product_transposed: matrix rows must equal n_k");
  return kernels::mode_product_transposed(t, b, mode);
}

double inner_product(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("inner_product: dims mismatch");
  Eigen::Map<const Vector> va(a.data().data(), static_cast<Eigen::Index>(a.size()));
  Eigen::Map<const Vector> vb(b.data().data(), static_cast<Eigen::Index>(b.size()));
  return va.dot(vb);
}

double frobenius_norm(const DenseTensor& t) {
  Eigen::Map<const Vector> v(t.data().data(), static_cast<Eigen::Index>(t.size()));
  return v.norm();
}

double frobenius_distance(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("frobenius_distance: dims mismatch");
  Eigen::Map<const Vector> va(a.data().data(), static_cast<Eigen::Index>(a.size()));
  Eigen::Map<const Vector> vb(b.data().data(), static_cast<Eigen::Index>(b.size()));
  return (va - vb).norm();
}

DenseTensor tendiag(std::span<const double> v, const Dims& dims) {
  check_dims(dims);
  const auto min_dim = *std::min_element(dims.begin(), dims.end());
  if (v.size() > min_dim) throw std::invalid_argument("tendiag: vector longer than smallest dimension");
  DenseTensor t(dims);
  std::size_t diag_stride = 0;
  std::size_t stride = 1;
  for (auto n : dims) {
    diag_stride += stride;
    stride *= n;
  }
  for (std::size_t i = 0; i < v.size(); ++i) t.data()[i * diag_stride] = v[i];
  return t;
}

}  // namespace tucker
