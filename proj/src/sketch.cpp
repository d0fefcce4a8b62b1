#include "tucker/sketch.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tucker {
namespace {

// Stream tags keep the families on unrelated engine states for equal seeds.
constexpr std::uint64_t kGaussianTag = 0x6761757373ULL;
constexpr std::uint64_t kUniformTag = 0x756e69666fULL;
constexpr std::uint64_t kKhatriRaoTag = 0x6b72ULL;

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

std::string_view to_string(SketchFamily family) {
  switch (family) {
    case SketchFamily::Gaussian: return "gaussian";
    case SketchFamily::Uniform: return "uniform";
    case SketchFamily::KhatriRaoGaussian: return "kr-gaussian";
    case SketchFamily::KhatriRaoUniform: return "kr-uniform";
  }
  return "unknown";
}

std::optional<SketchFamily> parse_sketch_family(std::string_view name) {
  if (name == "gaussian") return SketchFamily::Gaussian;
  if (name == "uniform") return SketchFamily::Uniform;
  if (name == "kr-gaussian" || name == "khatri-rao-gaussian") return SketchFamily::KhatriRaoGaussian;
  if (name == "kr-uniform" || name == "khatri-rao-uniform") return SketchFamily::KhatriRaoUniform;
  return std::nullopt;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

double RandomStream::uniform01() { return static_cast<double>(engine_() >> 11) * kTwoPow53Inv; }

double RandomStream::uniform01_open_low() {
  return static_cast<double>((engine_() >> 11) + 1) * kTwoPow53Inv;
}

double RandomStream::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform01_open_low();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("gaussian_matrix: empty shape");
  RandomStream rng(derive_seed(seed, kGaussianTag, 0));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Matrix uniform_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("uniform_matrix: empty shape");
  RandomStream rng(derive_seed(seed, kUniformTag, 0));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * rng.uniform01() - 1.0;
  return m;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("khatri_rao: column counts differ");
  Matrix out(a.rows() * b.rows(), a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.col(c).segment(i * b.rows(), b.rows()) = a(i, c) * b.col(c);
  return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix draw_sketch(const SketchSpec& spec, std::size_t rows, std::size_t cols) {
  switch (spec.family) {
    case SketchFamily::Gaussian: return gaussian_matrix(rows, cols, spec.seed);
    case SketchFamily::Uniform: return uniform_matrix(rows, cols, spec.seed);
    case SketchFamily::KhatriRaoGaussian:
    case SketchFamily::KhatriRaoUniform: break;
  }
  std::vector<std::size_t> factors = spec.factor_dims;
  if (factors.empty()) factors.push_back(rows);
  if (product(factors) != rows)
    throw std::invalid_argument("draw_sketch: factor_dims do not multiply to the row count");
  const bool gaussian = spec.family == SketchFamily::KhatriRaoGaussian;
  const std::uint64_t family_seed = derive_seed(spec.seed, kKhatriRaoTag, gaussian ? 1 : 2);
  auto base = [&](std::size_t i) {
    const auto seed = derive_seed(family_seed, i, 0);
    return gaussian ? gaussian_matrix(factors[i], cols, seed) : uniform_matrix(factors[i], cols, seed);
  };
  Matrix out = base(0);
  for (std::size_t i = 1; i < factors.size(); ++i) out = khatri_rao(out, base(i));
  return out;
}

}  // namespace tucker
