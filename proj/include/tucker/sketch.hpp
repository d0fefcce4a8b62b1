#pragma once

// Seeded random test matrices.
//
// Engine: std::mt19937_64 (its output sequence is fixed by the C++ standard),
// seeded with a SplitMix64-mixed 64-bit value. Entries are drawn in
// column-major order. Uniform doubles take the top 53 bits of one engine
// output. Gaussians use the basic Box-Muller transform, consuming two engine
// outputs per pair and emitting both the cosine and the sine variate:
//   u1 = (k1 + 1) * 2^-53 in (0, 1], u2 = k2 * 2^-53 in [0, 1),
//   z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2).

#include "tucker/tensor.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace tucker {

enum class SketchFamily { Gaussian, Uniform, KhatriRaoGaussian, KhatriRaoUniform };

std::string_view to_string(SketchFamily family);
/// Accepts gaussian, uniform, kr-gaussian, kr-uniform (and the long
/// khatri-rao-* spellings).
std::optional<SketchFamily> parse_sketch_family(std::string_view name);

struct SketchSpec {
  SketchFamily family = SketchFamily::Gaussian;
  /// Per-factor row counts for Khatri-Rao families; their product must equal
  /// the requested row count. Empty means a single factor.
  std::vector<std::size_t> factor_dims;
  std::uint64_t seed = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent stream seed for (master, a, b), e.g. (trial seed, mode, 0).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in (0, 1].
  double uniform01_open_low();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);
/// Entries i.i.d. uniform on [-1, 1].
Matrix uniform_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Column-wise Kronecker product: column i is kron(a_i, b_i).
Matrix khatri_rao(const Matrix& a, const Matrix& b);
Matrix kronecker(const Matrix& a, const Matrix& b);

/// Draws a rows x cols sketch of the requested family. Khatri-Rao families
/// draw one factor_dims[i] x cols base matrix per factor and fold them
/// left to right with khatri_rao.
Matrix draw_sketch(const SketchSpec& spec, std::size_t rows, std::size_t cols);

}  // namespace tucker
