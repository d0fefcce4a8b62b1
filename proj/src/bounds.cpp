#include "tucker/bounds.hpp"

#include "tucker/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace tucker {
namespace {

using std::numbers::pi;

double check_knob(double v, const char* name) {
  if (!(v > 1.0) || !std::isfinite(v)) throw std::domain_error(std::string(name) + " must be a finite number > 1");
  return v;
}

// 1/sqrt(2 pi m) * (e / (m beta))^m
double smallest_sv_tail(double m, double beta) {
  return std::exp(-0.5 * std::log(2.0 * pi * m) + m * (1.0 - std::log(m * beta)));
}

// 1/(4(g^2-1) sqrt(pi n g^2)) * (2 g^2 / e^(g^2-1))^n
double largest_sv_tail(double n, double gamma) {
  const double g2 = gamma * gamma;
  return std::exp(-std::log(4.0 * (g2 - 1.0)) - 0.5 * std::log(pi * n * g2) + n * (std::log(2.0 * g2) - (g2 - 1.0)));
}

// Last term of the failure probability; the base's denominator is e^(g^2) - 1.
double wide_tail(double n, double gamma) {
  const double g2 = gamma * gamma;
  return std::exp(-std::log(4.0 * (g2 - 1.0)) - 0.5 * std::log(pi * n * g2) +
                  n * (std::log(2.0 * g2) - std::log(std::expm1(g2))));
}

void check_shape(const BoundParams& p) {
  const std::size_t d = p.dims.size();
  if (d == 0) throw std::invalid_argument("bound params: no modes");
  auto check = [d](std::size_t n, const char* what) {
    if (n != d) throw std::invalid_argument(std::string("bound params: ") + what + " has the wrong length");
  };
  check(p.ranks.size(), "ranks");
  check(p.sketch.size(), "sketch sizes");
  check(p.j.size(), "j");
  check(p.beta.size(), "beta");
  check(p.gamma.size(), "gamma");
}

void check_mode(const BoundParams& p, std::size_t k) {
  check_shape(p);
  if (k >= p.dims.size()) throw std::out_of_range("bound params: mode out of range");
  check_knob(p.beta[k], "beta");
  check_knob(p.gamma[k], "gamma");
  if (p.j[k] < 1 || p.j[k] > p.ranks[k] || p.ranks[k] > p.sketch[k])
    throw std::domain_error("bound params: need 1 <= j_k <= r_k <= l_k in mode " + std::to_string(k));
}

std::vector<std::size_t> order_of(const BoundParams& p) {
  if (p.order.empty()) {
    std::vector<std::size_t> o(p.dims.size());
    std::iota(o.begin(), o.end(), std::size_t{0});
    return o;
  }
  if (p.order.size() != p.dims.size()) throw std::invalid_argument("bound params: order has the wrong length");
  return p.order;
}

// r for modes processed before k, n for modes processed after.
double shrunk_columns(const BoundParams& p, std::size_t k) {
  const auto order = order_of(p);
  double cols = 1.0;
  bool before = true;
  for (const std::size_t m : order) {
    if (m == k) {
      before = false;
      continue;
    }
    cols *= static_cast<double>(before ? p.ranks[m] : p.dims[m]);
  }
  return cols;
}

double failure(const BoundParams& p, std::size_t k, double cols) {
  check_mode(p, k);
  const double l = static_cast<double>(p.sketch[k]);
  const double m = l - static_cast<double>(p.j[k]) + 1.0;
  const double n_small = std::min(static_cast<double>(p.dims[k]), cols);
  const double beta = p.beta[k];
  const double gamma = p.gamma[k];
  return smallest_sv_tail(m, beta) + largest_sv_tail(l, gamma) + largest_sv_tail(std::min(n_small, l), gamma) +
         wide_tail(cols, gamma);
}

double sigma_at(const Vector& s, std::size_t one_based) {
  return one_based <= static_cast<std::size_t>(s.size()) ? s(static_cast<Eigen::Index>(one_based) - 1) : 0.0;
}

// sqrt(sum_{i=from+1}^{to} s_i^2), 1-based, clipped to the spectrum length.
double band_energy(const Vector& s, std::size_t from, std::size_t to) {
  double sum = 0.0;
  const auto n = static_cast<std::size_t>(s.size());
  for (std::size_t i = from; i < std::min(to, n); ++i) sum += s(static_cast<Eigen::Index>(i)) * s(static_cast<Eigen::Index>(i));
  return std::sqrt(sum);
}

// prod_t (sigma_x^2 - alpha_t) / prod_t (sigma_j^2 - alpha_t)
double shifted_ratio(const Vector& s, std::size_t x, std::size_t j, const std::vector<double>& shifts) {
  const double sx = sigma_at(s, x);
  const double sj = sigma_at(s, j);
  double ratio = 1.0;
  for (const double a : shifts) ratio *= (sx * sx - a) / (sj * sj - a);
  return ratio;
}

void check_spectra(const BoundParams& p) {
  if (p.spectra.size() != p.dims.size()) throw std::invalid_argument("bound params: one spectrum per mode required");
  if (p.shifts.size() != p.dims.size()) throw std::invalid_argument("bound params: one shift list per mode required");
  for (std::size_t k = 0; k < p.dims.size(); ++k) {
    const double sj = sigma_at(p.spectra[k], p.j[k]);
    for (const double a : p.shifts[k])
      if (!(a < sj * sj))
        throw std::invalid_argument("bound params: shift " + std::to_string(a) + " is not below sigma_j^2 in mode " +
                                    std::to_string(k));
  }
}

void check_hypotheses(const BoundParams& p, const std::vector<double>& n_small, BoundReport& report) {
  report.probability_floor = 1.0 - report.failure;
  for (std::size_t k = 0; k < p.dims.size(); ++k)
    if (static_cast<double>(p.sketch[k] + p.ranks[k]) > n_small[k]) {
      report.hypotheses_hold = false;
      report.violation = "mode " + std::to_string(k) + ": need l_k <= min(n_k, columns) - r_k, got l_k=" +
                         std::to_string(p.sketch[k]) + ", r_k=" + std::to_string(p.ranks[k]);
      return;
    }
  if (!(report.failure > 0.0 && report.failure < 1.0)) {
    report.hypotheses_hold = false;
    report.violation = "sum of failure probabilities is " + std::to_string(report.failure) + ", outside (0, 1)";
  }
}

BoundReport gated(BoundReport report) {
  if (!report.hypotheses_hold) throw BoundHypothesisError(report.violation);
  return report;
}

}  // namespace

double gaussian_largest_sv_floor(std::size_t n, double gamma) {
  if (n == 0) throw std::domain_error("n must be positive");
  check_knob(gamma, "gamma");
  const double floor = 1.0 - largest_sv_tail(static_cast<double>(n), gamma);
  if (floor < 0.0) throw std::domain_error("largest singular value floor is negative for these parameters");
  return floor;
}

double gaussian_smallest_sv_floor(std::size_t n, std::size_t l, double beta) {
  if (l == 0 || l > n) throw std::domain_error("need 1 <= l <= n");
  check_knob(beta, "beta");
  const double floor = 1.0 - smallest_sv_tail(static_cast<double>(n - l + 1), beta);
  if (floor < 0.0) throw std::domain_error("smallest singular value floor is negative for these parameters");
  return floor;
}

BoundParams with_default_knobs(BoundParams p) {
  const std::size_t d = p.dims.size();
  if (p.j.empty())
    for (std::size_t k = 0; k < d; ++k) p.j.push_back(std::max<std::size_t>(1, p.ranks.at(k) - 1));
  if (p.beta.empty()) p.beta.assign(d, 2.0);
  if (p.gamma.empty()) p.gamma.assign(d, 2.0);
  return p;
}

BoundParams bound_params_for(const DenseTensor& t, const SolverConfig& resolved, const ShiftTrace& trace) {
  BoundParams p;
  p.dims = t.dims();
  p.ranks = resolved.ranks;
  p.sketch = sketch_sizes(resolved);
  p.order = resolved.order;
  p.spectra = unfolding_spectra(t);
  p.shifts.resize(t.order());
  for (std::size_t k = 0; k < t.order(); ++k) {
    if (k < trace.modes.size() && !trace.modes[k].steps.empty()) {
      for (const auto& step : trace.modes[k].steps) p.shifts[k].push_back(step.alpha);
    } else {
      p.shifts[k].assign(static_cast<std::size_t>(std::max(resolved.power, 0)), 0.0);
    }
  }
  return p;
}

double phi_k(const BoundParams& p, std::size_t k) {
  check_shape(p);
  if (k >= p.dims.size()) throw std::out_of_range("bound params: mode out of range");
  return failure(p, k, static_cast<double>(complement_size(p.dims, k)));
}

double psi_k(const BoundParams& p, std::size_t k) {
  check_shape(p);
  if (k >= p.dims.size()) throw std::out_of_range("bound params: mode out of range");
  return failure(p, k, shrunk_columns(p, k));
}

BoundReport evaluate_thosvd_bound(const BoundParams& p) {
  check_shape(p);
  check_spectra(p);
  BoundReport report;
  std::vector<double> n_hat(p.dims.size());
  for (std::size_t k = 0; k < p.dims.size(); ++k) {
    const double cols = static_cast<double>(complement_size(p.dims, k));
    n_hat[k] = std::min(static_cast<double>(p.dims[k]), cols);
    report.failure += phi_k(p, k);

    const Vector& s = p.spectra[k];
    const double l = static_cast<double>(p.sketch[k]);
    const std::size_t j = p.j[k];
    const std::size_t r = p.ranks[k];
    const double gamma = p.gamma[k];
    const double rho_j = shifted_ratio(s, j + 1, j, p.shifts[k]);
    const double rho_r = shifted_ratio(s, r + 1, j, p.shifts[k]);
    const double f = std::sqrt(2.0 * l) * gamma * rho_j + 1.0;
    const double g = std::sqrt(2.0 * std::min(n_hat[k], l)) * gamma * rho_r + 1.0 +
                     std::sqrt(2.0 * cols * l) * p.beta[k] * gamma * rho_r;
    const double term = 2.0 * (f * band_energy(s, j, r) + g * band_energy(s, r, s.size()));
    report.per_mode.push_back(term);
    report.value += term;
  }
  check_hypotheses(p, n_hat, report);
  return report;
}

BoundReport evaluate_sthosvd_bound(const BoundParams& p) {
  check_shape(p);
  check_spectra(p);
  BoundReport report;
  std::vector<double> n_tilde(p.dims.size());
  for (std::size_t k = 0; k < p.dims.size(); ++k) {
    const double cols = shrunk_columns(p, k);
    n_tilde[k] = std::min(static_cast<double>(p.dims[k]), cols);
    report.failure += psi_k(p, k);

    const Vector& s = p.spectra[k];
    const double l = static_cast<double>(p.sketch[k]);
    const double gamma = p.gamma[k];
    const double head = band_energy(s, p.j[k], p.ranks[k]);
    const double tail = band_energy(s, p.ranks[k], s.size());
    const double term = 2.0 * (std::sqrt(2.0 * l) * gamma + 1.0) * head +
                        2.0 * (std::sqrt(2.0 * std::min(n_tilde[k], l)) * gamma + 1.0) * tail +
                        2.0 * std::sqrt(2.0 * cols * l) * p.beta[k] * gamma * tail;
    report.per_mode.push_back(term);
    report.value += term;
  }
  check_hypotheses(p, n_tilde, report);
  return report;
}

BoundReport thosvd_error_bound(const BoundParams& p) { return gated(evaluate_thosvd_bound(p)); }

BoundReport sthosvd_error_bound(const BoundParams& p) { return gated(evaluate_sthosvd_bound(p)); }

BoundReport deterministic_error_bound(const std::vector<Vector>& spectra, const std::vector<std::size_t>& ranks) {
  if (spectra.size() != ranks.size()) throw std::invalid_argument("deterministic bound: spectra/ranks length mismatch");
  BoundReport report;
  double sum = 0.0;
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    const double tail = tail_energy(spectra[k], ranks[k]);
    report.per_mode.push_back(tail * tail);
    sum += tail * tail;
  }
  report.value = std::sqrt(sum);
  return report;
}

std::vector<Vector> unfolding_spectra(const DenseTensor& t) {
  std::vector<Vector> out;
  out.reserve(t.order());
  for (std::size_t k = 0; k < t.order(); ++k) out.push_back(singular_values(unfold(t, k)));
  return out;
}

}  // namespace tucker
