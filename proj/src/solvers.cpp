#include "tucker/solvers.hpp"

#include "tucker/kernels.hpp"
#include "tucker/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tucker {
namespace {

constexpr std::size_t kDefaultOversampling = 10;
// Sigma(l, l) below this fraction of Sigma(1, 1) is treated as zero and
// leaves the shift untouched.
constexpr double kDegenerateShiftRatio = 1e-14;
// PVE changes below this fraction of the top estimate are roundoff. Without
// the floor an exactly rank-r input (sigma_{r+1} ~ 0) never meets the
// tol * sigma_{r+1} test and runs to q_max.
constexpr double kPveNoiseRatio = 1e-13;

enum class Basis { Svd, Orth };
enum class Branch { T, ST };

struct PowerOptions {
  Basis init = Basis::Svd;
  Basis plain_step = Basis::Svd;
  bool shifted = false;
  bool shift_enabled = true;
  int q = 1;
  const PveControl* pve = nullptr;
  std::size_t rank = 0;
};

struct PowerOutcome {
  Matrix q;
  ModeShiftTrace trace;
  int iterations = 0;
};

double as_double(std::size_t n) { return static_cast<double>(n); }

Matrix basis_of(const Matrix& y, Basis basis, CostTally& cost, Vector* sigma) {
  const auto rows = static_cast<std::size_t>(y.rows());
  const auto cols = static_cast<std::size_t>(y.cols());
  cost.svd += as_double(rows) * as_double(cols) * as_double(std::min(rows, cols));
  if (basis == Basis::Orth) return orth(y);
  LeftSvd svd = left_svd(y);
  if (sigma) *sigma = std::move(svd.s);
  return std::move(svd.u);
}

// Range finder on the mode-k unfolding M of `source`: Q from M * omega, then
// power steps Q <- basis(M (M^T Q) - alpha Q). alpha stays 0 unless the
// shifted scheme is enabled; with a PVE control the loop stops by the
// per-vector-error rule instead of after a fixed q steps.
PowerOutcome power_range(const DenseTensor& source, std::size_t mode, const Matrix& omega,
                         const PowerOptions& opt, CostTally& cost) {
  const auto n = as_double(source.dim(mode));
  const auto cols = as_double(complement_size(source.dims(), mode));
  const auto l = as_double(static_cast<std::size_t>(omega.cols()));

  PowerOutcome out;
  out.trace.mode = mode;
  cost.mm += n * cols * l;
  out.q = basis_of(kernels::unfolding_times(source, mode, omega), opt.init, cost, nullptr);

  const bool use_svd = opt.shifted || opt.plain_step == Basis::Svd;
  const int max_steps = opt.pve ? opt.pve->q_max : opt.q;
  double alpha = 0.0;
  Vector previous;
  if (opt.pve) previous = Vector::Zero(out.q.cols());

  for (int step = 1; step <= max_steps; ++step) {
    // A rank-deficient input can leave Orth with nothing to iterate on; the
    // caller reports it.
    if (out.q.cols() == 0) break;
    const Matrix z = kernels::unfolding_transpose_times(source, mode, out.q);
    Matrix w = kernels::unfolding_times(source, mode, z);
    cost.mm += 2.0 * n * cols * as_double(static_cast<std::size_t>(out.q.cols()));
    if (alpha != 0.0) w -= alpha * out.q;
    ++out.iterations;

    if (!use_svd) {
      out.q = basis_of(w, Basis::Orth, cost, nullptr);
      continue;
    }
    Vector sigma;
    out.q = basis_of(w, Basis::Svd, cost, &sigma);
    const double sigma_last = sigma(sigma.size() - 1);
    out.trace.steps.push_back({step, alpha, sigma_last});

    if (opt.pve) {
      const auto r = static_cast<Eigen::Index>(opt.rank);
      const Vector estimate = sigma.array() + alpha;
      const double change = (estimate.head(r) - previous.head(r)).cwiseAbs().maxCoeff();
      if (change <= std::max(opt.pve->tol * estimate(r), kPveNoiseRatio * estimate(0))) break;
      previous = estimate;
    }
    if (opt.shifted && opt.shift_enabled && sigma_last > alpha &&
        sigma_last >= kDegenerateShiftRatio * sigma(0)) {
      alpha = 0.5 * (sigma_last + alpha);
    }
  }
  out.trace.final_alpha = alpha;
  return out;
}

std::vector<std::size_t> identity_order(std::size_t d) {
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

Matrix mode_sketch(const SolverConfig& cfg, const Dims& source_dims, std::size_t mode, std::size_t width) {
  SketchSpec spec;
  spec.family = cfg.sketch.family;
  spec.seed = derive_seed(cfg.sketch.seed, mode, 0);
  // Remaining modes, highest first, so the last Khatri-Rao factor (the
  // fastest-varying one) lines up with the lowest remaining mode.
  for (std::size_t j = source_dims.size(); j-- > 0;)
    if (j != mode) spec.factor_dims.push_back(source_dims[j]);
  return draw_sketch(spec, complement_size(source_dims, mode), width);
}

double projection_residual_sq(const DenseTensor& g, const Matrix& u, std::size_t mode, const DenseTensor& projected) {
  const DenseTensor lifted = kernels::mode_product(projected, u, mode);
  const double d = frobenius_distance(g, lifted);
  return d * d;
}

SolveResult run_randomized(const DenseTensor& t, const SolverConfig& raw, Branch branch, PowerOptions opt) {
  const SolverConfig cfg = resolve_config(t.dims(), raw, true);
  const auto l = sketch_sizes(cfg);
  const std::size_t d = t.order();

  SolveResult result;
  result.factorization.factors.resize(d);
  result.trace.modes.resize(d);
  result.power_counts.assign(d, 0);
  DenseTensor core = t;

  for (const std::size_t k : cfg.order) {
    const DenseTensor& source = branch == Branch::T ? t : core;
    const Matrix omega = mode_sketch(cfg, source.dims(), k, l[k]);
    opt.rank = cfg.ranks[k];
    PowerOutcome range = power_range(source, k, omega, opt, result.cost);
    if (static_cast<std::size_t>(range.q.cols()) < cfg.ranks[k])
      throw SolverError("mode " + std::to_string(k) + ": sketched range has fewer columns than the rank");

    Matrix u = range.q.leftCols(static_cast<Eigen::Index>(cfg.ranks[k]));
    DenseTensor next = kernels::mode_product_transposed(core, u, k);
    result.cost.mm += as_double(cfg.ranks[k]) * as_double(core.size());
    if (branch == Branch::ST) result.step_residuals.push_back(projection_residual_sq(core, u, k, next));
    core = std::move(next);

    result.factorization.factors[k] = std::move(u);
    result.trace.modes[k] = std::move(range.trace);
    result.power_counts[k] = range.iterations;
  }
  result.factorization.core = std::move(core);
  return result;
}

TuckerFactorization thosvd_impl(const DenseTensor& t, const SolverConfig& cfg, CostTally& cost) {
  TuckerFactorization f;
  f.factors.resize(t.order());
  for (std::size_t k = 0; k < t.order(); ++k) {
    const Matrix unfolding = unfold(t, k);
    cost.svd += as_double(t.dim(k)) * as_double(complement_size(t.dims(), k)) * as_double(cfg.ranks[k]);
    f.factors[k] = left_svd(unfolding).u.leftCols(static_cast<Eigen::Index>(cfg.ranks[k]));
  }
  DenseTensor core = t;
  for (const std::size_t k : cfg.order) {
    cost.mm += as_double(cfg.ranks[k]) * as_double(core.size());
    core = kernels::mode_product_transposed(core, f.factors[k], k);
  }
  f.core = std::move(core);
  return f;
}

SolveResult sthosvd_impl(const DenseTensor& t, const SolverConfig& cfg) {
  SolveResult result;
  result.factorization.factors.resize(t.order());
  DenseTensor core = t;
  for (const std::size_t k : cfg.order) {
    const Matrix unfolding = unfold(core, k);
    result.cost.svd += as_double(core.dim(k)) * as_double(complement_size(core.dims(), k)) * as_double(cfg.ranks[k]);
    Matrix u = left_svd(unfolding).u.leftCols(static_cast<Eigen::Index>(cfg.ranks[k]));
    DenseTensor next = kernels::mode_product_transposed(core, u, k);
    result.cost.mm += as_double(cfg.ranks[k]) * as_double(core.size());
    result.step_residuals.push_back(projection_residual_sq(core, u, k, next));
    core = std::move(next);
    result.factorization.factors[k] = std::move(u);
  }
  result.factorization.core = std::move(core);
  return result;
}

}  // namespace

SolverConfig resolve_config(const Dims& dims, SolverConfig cfg, bool randomized) {
  const std::size_t d = dims.size();
  if (cfg.ranks.size() != d)
    throw ConfigError("expected " + std::to_string(d) + " ranks, got " + std::to_string(cfg.ranks.size()));
  for (std::size_t k = 0; k < d; ++k)
    if (cfg.ranks[k] < 1 || cfg.ranks[k] > dims[k])
      throw ConfigError("rank " + std::to_string(cfg.ranks[k]) + " out of range for mode " + std::to_string(k) +
                        " of size " + std::to_string(dims[k]));

  if (cfg.order.empty()) {
    cfg.order = identity_order(d);
  } else {
    auto sorted = cfg.order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != identity_order(d)) throw ConfigError("processing order is not a permutation of the modes");
  }
  if (!randomized) return cfg;

  if (cfg.oversampling.empty()) cfg.oversampling.assign(d, kDefaultOversampling);
  if (cfg.oversampling.size() == 1 && d > 1) cfg.oversampling.assign(d, cfg.oversampling[0]);
  if (cfg.oversampling.size() != d) throw ConfigError("oversampling tuple has the wrong length");
  if (cfg.power < 0) throw ConfigError("power parameter must be nonnegative");
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t l = cfg.ranks[k] + cfg.oversampling[k];
    const std::size_t limit = std::min(dims[k], complement_size(dims, k));
    if (l > limit)
      throw ConfigError("sketch size l=" + std::to_string(l) + " exceeds min(n_k, prod n_j)=" + std::to_string(limit) +
                        " for mode " + std::to_string(k));
  }
  return cfg;
}

std::vector<std::size_t> sketch_sizes(const SolverConfig& resolved) {
  std::vector<std::size_t> l(resolved.ranks.size());
  for (std::size_t k = 0; k < l.size(); ++k) l[k] = resolved.ranks[k] + resolved.oversampling.at(k);
  return l;
}

TuckerFactorization thosvd(const DenseTensor& t, const std::vector<std::size_t>& ranks) {
  SolverConfig cfg;
  cfg.ranks = ranks;
  CostTally cost;
  return thosvd_impl(t, resolve_config(t.dims(), cfg, false), cost);
}

TuckerFactorization sthosvd(const DenseTensor& t, const std::vector<std::size_t>& ranks,
                            const std::vector<std::size_t>& order) {
  return sthosvd_detailed(t, ranks, order).factorization;
}

SolveResult sthosvd_detailed(const DenseTensor& t, const std::vector<std::size_t>& ranks,
                             const std::vector<std::size_t>& order) {
  SolverConfig cfg;
  cfg.ranks = ranks;
  cfg.order = order;
  return sthosvd_impl(t, resolve_config(t.dims(), cfg, false));
}

SolveResult rand_thosvd(const DenseTensor& t, const SolverConfig& cfg) {
  PowerOptions opt;
  opt.q = cfg.power;
  return run_randomized(t, cfg, Branch::T, opt);
}

SolveResult rand_sthosvd(const DenseTensor& t, const SolverConfig& cfg) {
  PowerOptions opt;
  opt.q = cfg.power;
  return run_randomized(t, cfg, Branch::ST, opt);
}

namespace {

PowerOptions shifted_options(const SolverConfig& cfg) {
  if (cfg.power < 1) throw ConfigError("shifted power iteration needs q >= 1");
  PowerOptions opt;
  opt.shifted = true;
  opt.shift_enabled = cfg.shift_enabled;
  opt.q = cfg.power;
  return opt;
}

}  // namespace

SolveResult shifted_rand_thosvd(const DenseTensor& t, const SolverConfig& cfg) {
  return run_randomized(t, cfg, Branch::T, shifted_options(cfg));
}

SolveResult shifted_rand_sthosvd(const DenseTensor& t, const SolverConfig& cfg) {
  return run_randomized(t, cfg, Branch::ST, shifted_options(cfg));
}

SolveResult pve_shifted_sthosvd(const DenseTensor& t, const SolverConfig& raw) {
  if (!raw.pve) throw ConfigError("PVE solver needs a tolerance and q_max");
  const PveControl& pve = *raw.pve;
  if (!(pve.tol > 0.0 && pve.tol <= 1.0)) throw ConfigError("PVE tolerance must lie in (0, 1]");
  if (pve.q_max < 1) throw ConfigError("q_max must be at least 1");
  const SolverConfig cfg = resolve_config(t.dims(), raw, true);
  for (auto s : cfg.oversampling)
    if (s < 1) throw ConfigError("PVE control needs oversampling >= 1 to read sigma_{r+1}");

  PowerOptions opt;
  opt.shifted = true;
  opt.shift_enabled = cfg.shift_enabled;
  opt.pve = &pve;
  return run_randomized(t, cfg, Branch::ST, opt);
}

SolveResult holistic_rand_sthosvd(const DenseTensor& t, const SolverConfig& raw) {
  const SolverConfig cfg = resolve_config(t.dims(), raw, true);
  const auto l = sketch_sizes(cfg);
  const std::size_t d = t.order();

  PowerOptions opt;
  opt.init = Basis::Orth;
  opt.plain_step = Basis::Orth;
  opt.q = cfg.power;
  if (cfg.shift_enabled) {
    if (cfg.power < 1) throw ConfigError("shifted power iteration needs q >= 1");
    opt.shifted = true;
  }

  SolveResult result;
  result.trace.modes.resize(d);
  result.power_counts.assign(d, 0);
  std::vector<Matrix> bases(d);
  DenseTensor compressed = t;
  for (const std::size_t k : cfg.order) {
    const Matrix omega = mode_sketch(cfg, compressed.dims(), k, l[k]);
    PowerOutcome range = power_range(compressed, k, omega, opt, result.cost);
    if (static_cast<std::size_t>(range.q.cols()) < cfg.ranks[k])
      throw SolverError("mode " + std::to_string(k) + ": compressed basis has fewer columns than the rank");
    result.cost.mm += as_double(static_cast<std::size_t>(range.q.cols())) * as_double(compressed.size());
    compressed = kernels::mode_product_transposed(compressed, range.q, k);
    bases[k] = std::move(range.q);
    result.trace.modes[k] = std::move(range.trace);
    result.power_counts[k] = range.iterations;
  }

  SolverConfig inner;
  inner.ranks = cfg.ranks;
  inner.order = cfg.order;
  SolveResult small = sthosvd_impl(compressed, resolve_config(compressed.dims(), inner, false));
  result.cost.mm += small.cost.mm;
  result.cost.svd += small.cost.svd;
  result.step_residuals = std::move(small.step_residuals);

  result.factorization.core = std::move(small.factorization.core);
  result.factorization.factors.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    result.factorization.factors[k] = bases[k] * small.factorization.factors[k];
    result.cost.mm += as_double(static_cast<std::size_t>(bases[k].rows())) *
                      as_double(static_cast<std::size_t>(bases[k].cols())) * as_double(cfg.ranks[k]);
  }
  return result;
}

DenseTensor reconstruct(const TuckerFactorization& f) {
  if (f.factors.size() != f.core.order()) throw std::invalid_argument("reconstruct: factor count mismatch");
  DenseTensor out = f.core;
  for (std::size_t k = 0; k < f.factors.size(); ++k) out = mode_product(out, f.factors[k], k);
  return out;
}

double relative_error(const DenseTensor& t, const TuckerFactorization& f) {
  const double norm = frobenius_norm(t);
  if (norm == 0.0) throw std::invalid_argument("relative_error: input tensor has zero norm");
  const DenseTensor approx = reconstruct(f);
  if (approx.dims() != t.dims()) throw std::invalid_argument("relative_error: reconstruction shape mismatch");
  return frobenius_distance(t, approx) / norm;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Thosvd: return "thosvd";
    case Algorithm::Sthosvd: return "sthosvd";
    case Algorithm::RandThosvd: return "rand-thosvd";
    case Algorithm::RandSthosvd: return "rand-sthosvd";
    case Algorithm::ShiftedThosvd: return "shifted-thosvd";
    case Algorithm::ShiftedSthosvd: return "shifted-sthosvd";
    case Algorithm::Holistic: return "holistic";
    case Algorithm::HolisticShifted: return "holistic-shifted";
    case Algorithm::Pve: return "pve";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::Thosvd, Algorithm::Sthosvd, Algorithm::RandThosvd, Algorithm::RandSthosvd,
                 Algorithm::ShiftedThosvd, Algorithm::ShiftedSthosvd, Algorithm::Holistic,
                 Algorithm::HolisticShifted, Algorithm::Pve})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

bool is_randomized(Algorithm a) { return a != Algorithm::Thosvd && a != Algorithm::Sthosvd; }

SolveResult solve(Algorithm a, const DenseTensor& t, const SolverConfig& cfg) {
  switch (a) {
    case Algorithm::Thosvd: {
      SolveResult r;
      r.factorization = thosvd_impl(t, resolve_config(t.dims(), cfg, false), r.cost);
      return r;
    }
    case Algorithm::Sthosvd: return sthosvd_impl(t, resolve_config(t.dims(), cfg, false));
    case Algorithm::RandThosvd: return rand_thosvd(t, cfg);
    case Algorithm::RandSthosvd: return rand_sthosvd(t, cfg);
    case Algorithm::ShiftedThosvd: return shifted_rand_thosvd(t, cfg);
    case Algorithm::ShiftedSthosvd: return shifted_rand_sthosvd(t, cfg);
    case Algorithm::Holistic: {
      SolverConfig c = cfg;
      c.shift_enabled = false;
      return holistic_rand_sthosvd(t, c);
    }
    case Algorithm::HolisticShifted: {
      SolverConfig c = cfg;
      c.shift_enabled = true;
      return holistic_rand_sthosvd(t, c);
    }
    case Algorithm::Pve: {
      SolverConfig c = cfg;
      if (!c.pve) c.pve = PveControl{};
      return pve_shifted_sthosvd(t, c);
    }
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace tucker
