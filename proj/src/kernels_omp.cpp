#include "tucker/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tucker {

SlabShape slab_shape(const Dims& dims, std::size_t mode) {
  SlabShape s;
  for (std::size_t j = 0; j < mode; ++j) s.left *= dims[j];
  s.extent = dims.at(mode);
  for (std::size_t j = mode + 1; j < dims.size(); ++j) s.right *= dims[j];
  return s;
}

int configure_threads_from_env() {
  const char* raw = std::getenv("TUCKER_SKETCH_THREADS");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (*end != '\0' || n < 1) return 0;
  omp_set_num_threads(static_cast<int>(n));
  return static_cast<int>(n);
}

namespace kernels {
namespace {

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

using Index = Eigen::Index;

// Reductions over slabs are split into at most this many chunks; partial sums
// are added in chunk order, so results do not depend on the thread count.
constexpr std::size_t kReductionChunks = 64;

struct Chunking {
  std::size_t count;
  std::size_t per_chunk;
};

Chunking chunking(std::size_t right) {
  const std::size_t count = std::min(right, kReductionChunks);
  return {count, (right + count - 1) / count};
}

void check_mode(const DenseTensor& t, std::size_t mode) {
  if (mode >= t.order()) throw std::out_of_range("kernel mode out of range");
}

}  // namespace

Matrix unfolding_times(const DenseTensor& t, std::size_t mode, const Matrix& x) {
  check_mode(t, mode);
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  if (static_cast<std::size_t>(x.rows()) != left * right)
    throw std::invalid_argument("unfolding_times: row count mismatch");
  const double* src = t.data().data();
  const Index cols = x.cols();

  if (left == 1) {
    ConstMap a(src, static_cast<Index>(extent), static_cast<Index>(right));
    return a * x;
  }
  if (right == 1) {
    ConstMap s(src, static_cast<Index>(left), static_cast<Index>(extent));
    return s.transpose() * x;
  }

  const auto [count, per_chunk] = chunking(right);
  std::vector<Matrix> partial(count, Matrix::Zero(static_cast<Index>(extent), cols));
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t begin = c * per_chunk;
    const std::size_t end = std::min(right, begin + per_chunk);
    for (std::size_t r = begin; r < end; ++r) {
      ConstMap s(src + r * left * extent, static_cast<Index>(left), static_cast<Index>(extent));
      partial[c].noalias() += s.transpose() * x.middleRows(static_cast<Index>(r * left), static_cast<Index>(left));
    }
  }
  Matrix out = std::move(partial[0]);
  for (std::size_t c = 1; c < count; ++c) out += partial[c];
  return out;
}

Matrix unfolding_transpose_times(const DenseTensor& t, std::size_t mode, const Matrix& y) {
  check_mode(t, mode);
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  if (static_cast<std::size_t>(y.rows()) != extent)
    throw std::invalid_argument("unfolding_transpose_times: row count mismatch");
  const double* src = t.data().data();

  if (left == 1) {
    ConstMap a(src, static_cast<Index>(extent), static_cast<Index>(right));
    return a.transpose() * y;
  }
  Matrix out(static_cast<Index>(left * right), y.cols());
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < right; ++r) {
    ConstMap s(src + r * left * extent, static_cast<Index>(left), static_cast<Index>(extent));
    out.middleRows(static_cast<Index>(r * left), static_cast<Index>(left)).noalias() = s * y;
  }
  return out;
}

Matrix unfolding_gram(const DenseTensor& t, std::size_t mode) {
  check_mode(t, mode);
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  const double* src = t.data().data();
  const auto n = static_cast<Index>(extent);

  if (left == 1) {
    ConstMap a(src, n, static_cast<Index>(right));
    Matrix g(n, n);
    g.setZero();
    g.selfadjointView<Eigen::Lower>().rankUpdate(a);
    return g.selfadjointView<Eigen::Lower>();
  }

  const auto [count, per_chunk] = chunking(right);
  std::vector<Matrix> partial(count, Matrix::Zero(n, n));
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t begin = c * per_chunk;
    const std::size_t end = std::min(right, begin + per_chunk);
    for (std::size_t r = begin; r < end; ++r) {
      ConstMap s(src + r * left * extent, static_cast<Index>(left), n);
      partial[c].selfadjointView<Eigen::Lower>().rankUpdate(s.transpose());
    }
  }
  Matrix out = std::move(partial[0]);
  for (std::size_t c = 1; c < count; ++c) out += partial[c];
  return out.selfadjointView<Eigen::Lower>();
}

namespace {

template <typename Factor>
DenseTensor apply_mode(const DenseTensor& t, const Factor& b_t, std::size_t mode, std::size_t new_extent) {
  // b_t is the n_k x m matrix multiplying each slab from the right.
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  Dims out_dims = t.dims();
  out_dims[mode] = new_extent;
  DenseTensor out(out_dims);
  const double* src = t.data().data();
  double* dst = out.data().data();
  const auto m = static_cast<Index>(new_extent);

  if (left == 1) {
    ConstMap a(src, static_cast<Index>(extent), static_cast<Index>(right));
    MutMap c(dst, m, static_cast<Index>(right));
    c.noalias() = b_t.transpose() * a;
    return out;
  }
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < right; ++r) {
    ConstMap s(src + r * left * extent, static_cast<Index>(left), static_cast<Index>(extent));
    MutMap c(dst + r * left * new_extent, static_cast<Index>(left), m);
    c.noalias() = s * b_t;
  }
  return out;
}

}  // namespace

DenseTensor mode_product(const DenseTensor& t, const Matrix& b, std::size_t mode) {
  check_mode(t, mode);
  if (static_cast<std::size_t>(b.cols()) != t.dim(mode))
    throw std::invalid_argument("mode_product: matrix columns must equal n_k");
  return apply_mode(t, b.transpose(), mode, static_cast<std::size_t>(b.rows()));
}

DenseTensor mode_product_transposed(const DenseTensor& t, const Matrix& b, std::size_t mode) {
  check_mode(t, mode);
  if (static_cast<std::size_t>(b.rows()) != t.dim(mode))
    throw std::invalid_argument("mode_product_transposed: matrix rows must equal n_k");
  return apply_mode(t, b, mode, static_cast<std::size_t>(b.cols()));
}

}  // namespace kernels
}  // namespace tucker
