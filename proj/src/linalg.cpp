#include "tucker/linalg.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace tucker {
namespace {

void check_finite(const Matrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("svd: non-finite input");
}

// Largest-magnitude entry of each left singular vector made positive.
void fix_signs(Matrix& u, Matrix* v) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index arg = 0;
    u.col(c).cwiseAbs().maxCoeff(&arg);
    if (u(arg, c) < 0.0) {
      u.col(c) *= -1.0;
      if (v) v->col(c) *= -1.0;
    }
  }
}

}  // namespace

EconSvd econ_svd(const Matrix& m) {
  check_finite(m);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  EconSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  fix_signs(out.u, &out.v);
  return out;
}

LeftSvd left_svd(const Matrix& m) {
  check_finite(m);
  LeftSvd out;
  if (m.cols() > 2 * m.rows()) {
    // M^T = Q R, so M = R^T Q^T and the left factor of M is that of R^T.
    Eigen::HouseholderQR<Matrix> qr(m.transpose());
    const Matrix rt = qr.matrixQR().topRows(m.rows()).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
    Eigen::BDCSVD<Matrix> svd(rt, Eigen::ComputeThinU);
    out = {svd.matrixU(), svd.singularValues()};
  } else {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    out = {svd.matrixU(), svd.singularValues()};
  }
  fix_signs(out.u, nullptr);
  return out;
}

Vector singular_values(const Matrix& m) {
  check_finite(m);
  if (m.cols() > 2 * m.rows()) return left_svd(m).s;
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

Matrix orth(const Matrix& m) {
  if (m.rows() < m.cols()) throw std::invalid_argument("orth: expects rows >= cols");
  check_finite(m);
  if (m.cols() == 0) return m;
  const double scale = m.colwise().norm().maxCoeff();
  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  if (scale == 0.0) return Matrix(m.rows(), 0);
  const auto& r = qr.matrixQR();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m.cols(); ++i)
    if (std::abs(r(i, i)) > 1e-12 * scale) keep.push_back(i);
  if (static_cast<Eigen::Index>(keep.size()) == m.cols()) return q;
  Matrix out(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = q.col(keep[j]);
  return out;
}

EconSvd truncated_svd(const Matrix& m, std::size_t r) {
  const auto p = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  if (r < 1 || r > p) throw std::invalid_argument("truncated_svd: rank out of range");
  EconSvd full = econ_svd(m);
  const auto rr = static_cast<Eigen::Index>(r);
  return {full.u.leftCols(rr), full.s.head(rr), full.v.leftCols(rr)};
}

double tail_energy(const Vector& s, std::size_t r) {
  if (r >= static_cast<std::size_t>(s.size())) return 0.0;
  return s.tail(s.size() - static_cast<Eigen::Index>(r)).norm();
}

double orthonormality_defect(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

}  // namespace tucker
