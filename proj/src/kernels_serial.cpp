#include "tucker/kernels.hpp"

#include <stdexcept>

namespace tucker::reference {

// Plain index loops. Entry (i_k, c) of A_(k) lives at
// data[i_left + left * (i_k + n_k * i_right)] with c = i_left + left * i_right.

Matrix unfold(const DenseTensor& t, std::size_t mode) {
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  Matrix m(extent, left * right);
  for (std::size_t ir = 0; ir < right; ++ir)
    for (std::size_t ik = 0; ik < extent; ++ik)
      for (std::size_t il = 0; il < left; ++il)
        m(ik, il + left * ir) = t.data()[il + left * (ik + extent * ir)];
  return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Dims& dims) {
  const auto [left, extent, right] = slab_shape(dims, mode);
  if (static_cast<std::size_t>(m.rows()) != extent ||
      static_cast<std::size_t>(m.cols()) != left * right)
    throw std::invalid_argument("reference::fold: shape mismatch");
  DenseTensor t(dims);
  for (std::size_t ir = 0; ir < right; ++ir)
    for (std::size_t ik = 0; ik < extent; ++ik)
      for (std::size_t il = 0; il < left; ++il)
        t.data()[il + left * (ik + extent * ir)] = m(ik, il + left * ir);
  return t;
}

Matrix unfolding_times(const DenseTensor& t, std::size_t mode, const Matrix& x) {
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  Matrix out = Matrix::Zero(extent, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (std::size_t ir = 0; ir < right; ++ir)
      for (std::size_t ik = 0; ik < extent; ++ik)
        for (std::size_t il = 0; il < left; ++il)
          out(ik, c) += t.data()[il + left * (ik + extent * ir)] * x(il + left * ir, c);
  return out;
}

Matrix unfolding_transpose_times(const DenseTensor& t, std::size_t mode, const Matrix& y) {
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  Matrix out = Matrix::Zero(left * right, y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c)
    for (std::size_t ir = 0; ir < right; ++ir)
      for (std::size_t ik = 0; ik < extent; ++ik)
        for (std::size_t il = 0; il < left; ++il)
          out(il + left * ir, c) += t.data()[il + left * (ik + extent * ir)] * y(ik, c);
  return out;
}

Matrix unfolding_gram(const DenseTensor& t, std::size_t mode) {
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  Matrix g = Matrix::Zero(extent, extent);
  for (std::size_t a = 0; a < extent; ++a)
    for (std::size_t b = 0; b < extent; ++b) {
      double sum = 0.0;
      for (std::size_t ir = 0; ir < right; ++ir)
        for (std::size_t il = 0; il < left; ++il)
          sum += t.data()[il + left * (a + extent * ir)] * t.data()[il + left * (b + extent * ir)];
      g(a, b) = sum;
    }
  return g;
}

DenseTensor mode_product(const DenseTensor& t, const Matrix& b, std::size_t mode) {
  const auto [left, extent, right] = slab_shape(t.dims(), mode);
  if (static_cast<std::size_t>(b.cols()) != extent)
    throw std::invalid_argument("reference::mode_product: dimension mismatch");
  const auto m = static_cast<std::size_t>(b.rows());
  Dims out_dims = t.dims();
  out_dims[mode] = m;
  DenseTensor out(out_dims);
  for (std::size_t ir = 0; ir < right; ++ir)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t il = 0; il < left; ++il) {
        double sum = 0.0;
        for (std::size_t ik = 0; ik < extent; ++ik)
          sum += t.data()[il + left * (ik + extent * ir)] * b(j, ik);
        out.data()[il + left * (j + m * ir)] = sum;
      }
  return out;
}

}  // namespace tucker::reference
