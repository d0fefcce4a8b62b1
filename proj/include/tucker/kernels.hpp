#pragma once

// Compute kernels over mode-k unfoldings that never materialize A_(k).
//
// Viewing the tensor as a (left x n_k x right) block, every right index
// selects a contiguous left x n_k column-major slab S, and
// A_(k) = [S_0^T, S_1^T, ..., S_{right-1}^T]. The `kernels` namespace runs
// the slab products under OpenMP; `reference` holds plain serial loops over
// tensor indices and is kept as the oracle for tests and the benchmark.
//
// Parallel kernels are deterministic: reductions over slabs use a fixed
// chunk partition that does not depend on the thread count.

#include "tucker/tensor.hpp"

namespace tucker {

struct SlabShape {
  std::size_t left = 1;
  std::size_t extent = 1;
  std::size_t right = 1;
};

SlabShape slab_shape(const Dims& dims, std::size_t mode);

namespace kernels {

/// A_(k) * x, with x of shape (size / n_k) x c.
Matrix unfolding_times(const DenseTensor& t, std::size_t mode, const Matrix& x);

/// A_(k)^T * y, with y of shape n_k x c.
Matrix unfolding_transpose_times(const DenseTensor& t, std::size_t mode, const Matrix& y);

/// A_(k) * A_(k)^T.
Matrix unfolding_gram(const DenseTensor& t, std::size_t mode);

/// t x_k b.
DenseTensor mode_product(const DenseTensor& t, const Matrix& b, std::size_t mode);

/// t x_k b^T.
DenseTensor mode_product_transposed(const DenseTensor& t, const Matrix& b, std::size_t mode);

}  // namespace kernels

namespace reference {

Matrix unfold(const DenseTensor& t, std::size_t mode);
DenseTensor fold(const Matrix& m, std::size_t mode, const Dims& dims);
Matrix unfolding_times(const DenseTensor& t, std::size_t mode, const Matrix& x);
Matrix unfolding_transpose_times(const DenseTensor& t, std::size_t mode, const Matrix& y);
Matrix unfolding_gram(const DenseTensor& t, std::size_t mode);
DenseTensor mode_product(const DenseTensor& t, const Matrix& b, std::size_t mode);

}  // namespace reference

/// Caps OpenMP threads from TUCKER_SKETCH_THREADS when set. Returns the cap
/// applied, or 0 when the variable is absent or invalid.
int configure_threads_from_env();

}  // namespace tucker
