#pragma once

#include "tucker/tensor.hpp"

namespace tucker {

/// Thin SVD M = U diag(s) V^T with p = min(rows, cols) triplets, s descending.
/// Each column of U has its largest-magnitude entry positive (V follows).
struct EconSvd {
  Matrix u;
  Vector s;
  Matrix v;
};

/// Left factor and singular values only.
struct LeftSvd {
  Matrix u;
  Vector s;
};

EconSvd econ_svd(const Matrix& m);

/// Same U and s as econ_svd without forming V. Very wide inputs are first
/// reduced by a QR factorization of M^T.
LeftSvd left_svd(const Matrix& m);

Vector singular_values(const Matrix& m);

/// Orthonormal basis for range(m) from an unpivoted Householder QR. Columns
/// whose |R_ii| falls below 1e-12 times the largest column norm of m are
/// dropped, so a rank-deficient input yields fewer columns.
Matrix orth(const Matrix& m);

/// Leading r singular triplets.
EconSvd truncated_svd(const Matrix& m, std::size_t r);

/// sqrt(sum_{i >= r} s_i^2) over 0-based indices, i.e. the best rank-r error.
double tail_energy(const Vector& s, std::size_t r);

/// ||Q^T Q - I||_F.
double orthonormality_defect(const Matrix& q);

}  // namespace tucker
