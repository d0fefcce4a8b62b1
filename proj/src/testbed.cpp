#include "tucker/testbed.hpp"

#include "tucker/linalg.hpp"
#include "tucker/sketch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tucker {
namespace {

constexpr std::uint64_t kSparseTag = 0x737061727365;  // "sparse"
constexpr std::uint64_t kFactorTag = 0x666163746f72;  // "factor"
constexpr std::uint64_t kCoreTag = 0x636f7265;        // "core"
constexpr std::uint64_t kTensorTag = 0x74656e736f72;  // "tensor"

struct SparseVector {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

SparseVector sparse_vector(std::size_t length, std::size_t nnz, RandomStream& rng) {
  std::vector<std::size_t> perm(length);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SparseVector v;
  for (std::size_t i = 0; i < nnz; ++i) {
    const std::size_t span = length - i;
    const auto offset = std::min(span - 1, static_cast<std::size_t>(rng.uniform01() * static_cast<double>(span)));
    std::swap(perm[i], perm[i + offset]);
    v.index.push_back(perm[i]);
  }
  for (std::size_t i = 0; i < nnz; ++i) v.value.push_back(rng.normal());
  return v;
}

DenseTensor orthonormal_product(DenseTensor core, const Dims& dims, std::uint64_t seed) {
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const Matrix basis = orth(gaussian_matrix(dims[k], core.dim(k), derive_seed(seed, kFactorTag, k)));
    if (static_cast<std::size_t>(basis.cols()) != core.dim(k))
      throw std::runtime_error("orthonormal factor lost rank");
    core = mode_product(core, basis, k);
  }
  return core;
}

std::vector<std::size_t> parse_tuple(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad tuple entry '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty tuple");
  return out;
}

std::string join(const std::vector<std::size_t>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

DenseTensor gen_sparse_sum(const Dims& dims, std::size_t n_terms, std::size_t n_terms_big, double gamma,
                           double sparsity, std::uint64_t seed) {
  if (dims.size() != 3) throw std::invalid_argument("sparse-sum tensors are 3-way");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw std::invalid_argument("sparsity must lie in (0, 1]");
  if (n_terms_big > n_terms) throw std::invalid_argument("more large terms than terms");
  DenseTensor t(dims);
  RandomStream rng(derive_seed(seed, kSparseTag, 0));
  double* data = t.data().data();
  const std::size_t s0 = dims[0];
  const std::size_t s1 = dims[0] * dims[1];
  for (std::size_t i = 1; i <= n_terms; ++i) {
    const double weight = (i <= n_terms_big ? gamma : 1.0) / static_cast<double>(i);
    SparseVector f[3];
    for (std::size_t k = 0; k < 3; ++k) {
      const auto nnz = static_cast<std::size_t>(std::ceil(sparsity * static_cast<double>(dims[k])));
      f[k] = sparse_vector(dims[k], std::min(nnz, dims[k]), rng);
    }
    for (std::size_t c = 0; c < f[2].index.size(); ++c)
      for (std::size_t b = 0; b < f[1].index.size(); ++b) {
        const double wzy = weight * f[2].value[c] * f[1].value[b];
        const std::size_t base = f[2].index[c] * s1 + f[1].index[b] * s0;
        for (std::size_t a = 0; a < f[0].index.size(); ++a) data[base + f[0].index[a]] += wzy * f[0].value[a];
      }
  }
  return t;
}

DenseTensor gen_tensor_a(std::size_t n, std::size_t n_terms_big, double gamma, double sparsity, std::uint64_t seed) {
  if (n < n_terms_big) throw std::invalid_argument("gen_tensor_a: n must be at least n_terms_big");
  return gen_sparse_sum({n, n, n}, n, n_terms_big, gamma, sparsity, seed);
}

Vector decay_vector(std::size_t n, Decay decay) {
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i);
    double value = 0.0;
    switch (decay) {
      case Decay::Slow: value = 1.0 / (x * x); break;
      case Decay::Fast: value = std::exp(-x / 7.0); break;
      case Decay::SShape: value = 0.001 + 1.0 / (1.0 + std::exp(x - 29.0)); break;
    }
    v(static_cast<Eigen::Index>(i) - 1) = value;
  }
  return v;
}

DenseTensor gen_tensor_b(std::size_t n, Decay decay, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_tensor_b: n must be positive");
  const Vector v = decay_vector(n, decay);
  const Dims dims{n, n, n};
  return orthonormal_product(tendiag(std::span<const double>(v.data(), n), dims), dims, seed);
}

DenseTensor gen_tensor_c(const Dims& dims, std::uint64_t seed, std::size_t n_terms_big, double gamma,
                         double sparsity) {
  if (dims.size() != 3) throw std::invalid_argument("gen_tensor_c: three dims required");
  return gen_sparse_sum(dims, dims[0], std::min(n_terms_big, dims[0]), gamma, sparsity, seed);
}

DenseTensor gen_exact_rank(const Dims& dims, const std::vector<std::size_t>& ranks, std::uint64_t seed) {
  if (ranks.size() != dims.size()) throw std::invalid_argument("gen_exact_rank: ranks/dims length mismatch");
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (ranks[k] < 1 || ranks[k] > dims[k]) throw std::invalid_argument("gen_exact_rank: rank out of range");
  const Matrix g = gaussian_matrix(product(ranks), 1, derive_seed(seed, kCoreTag, 0));
  DenseTensor core(ranks, std::vector<double>(g.data(), g.data() + g.size()));
  return orthonormal_product(std::move(core), dims, seed);
}

Recipe parse_recipe(const std::string& text) {
  Recipe r;
  const auto colon = text.find(':');
  r.kind = text.substr(0, colon);
  static const char* kinds[] = {"a", "b-slow", "b-fast", "b-sshape", "c", "exact"};
  if (std::find(std::begin(kinds), std::end(kinds), r.kind) == std::end(kinds))
    throw std::invalid_argument("unknown recipe kind '" + r.kind + "'");
  if (r.kind == "c") r.dims = {60, 70, 80};
  if (colon == std::string::npos) return r;

  // Options are separated by ',' or ';' (the canonical form uses ';' so it
  // can sit in a CSV field).
  std::string options = text.substr(colon + 1);
  std::replace(options.begin(), options.end(), ';', ',');
  std::stringstream ss(options);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("recipe option '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "n") r.n = static_cast<std::size_t>(std::stoull(value));
      else if (key == "dims") r.dims = parse_tuple(value);
      else if (key == "ranks") r.ranks = parse_tuple(value);
      else if (key == "big") r.big = static_cast<std::size_t>(std::stoull(value));
      else if (key == "gamma") r.gamma = std::stod(value);
      else if (key == "sparsity") r.sparsity = std::stod(value);
      else throw std::invalid_argument("unknown recipe key '" + key + "'");
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("bad recipe option '" + item + "': " + e.what());
    }
  }
  return r;
}

std::string to_string(const Recipe& r) {
  std::string out = r.kind;
  if (r.kind == "a") {
    out += ":n=" + std::to_string(r.n) + ";big=" + std::to_string(r.big) + ";gamma=" + format_double(r.gamma) +
           ";sparsity=" + format_double(r.sparsity);
  } else if (r.kind == "c") {
    out += ":dims=" + join(r.dims, 'x') + ";big=" + std::to_string(r.big) + ";gamma=" + format_double(r.gamma) +
           ";sparsity=" + format_double(r.sparsity);
  } else if (r.kind == "exact") {
    out += ":dims=" + join(r.dims, 'x') + ";ranks=" + join(r.ranks, 'x');
  } else {
    out += ":n=" + std::to_string(r.n);
  }
  return out;
}

DenseTensor generate(const Recipe& r, std::uint64_t seed) {
  if (r.kind == "a") return gen_tensor_a(r.n, r.big, r.gamma, r.sparsity, seed);
  if (r.kind == "b-slow") return gen_tensor_b(r.n, Decay::Slow, seed);
  if (r.kind == "b-fast") return gen_tensor_b(r.n, Decay::Fast, seed);
  if (r.kind == "b-sshape") return gen_tensor_b(r.n, Decay::SShape, seed);
  if (r.kind == "c") return gen_tensor_c(r.dims, seed, r.big, r.gamma, r.sparsity);
  if (r.kind == "exact") {
    if (r.dims.empty() || r.ranks.empty()) throw std::invalid_argument("exact recipe needs dims and ranks");
    return gen_exact_rank(r.dims, r.ranks, seed);
  }
  throw std::invalid_argument("unknown recipe kind '" + r.kind + "'");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t config_index, std::size_t trial) {
  return derive_seed(master_seed, config_index, trial);
}

std::uint64_t tensor_seed(std::uint64_t master_seed) { return derive_seed(master_seed, kTensorTag, 0); }

std::vector<RunReport> run_experiment(const ExperimentPlan& plan) {
  return run_experiment(plan, generate(plan.recipe, tensor_seed(plan.master_seed)));
}

std::vector<RunReport> run_experiment(const ExperimentPlan& plan, const DenseTensor& t) {
  if (plan.trials < 1) throw std::invalid_argument("plan needs at least one trial");
  std::vector<RunReport> reports;
  for (std::size_t c = 0; c < plan.configs.size(); ++c)
    for (const Algorithm a : plan.algorithms)
      for (std::size_t trial = 0; trial < plan.trials; ++trial) {
        RunReport r;
        r.algorithm = a;
        r.config_index = c;
        r.config = plan.configs[c];
        r.trial = trial;
        r.seed = trial_seed(plan.master_seed, c, trial);
        r.config.sketch.seed = r.seed;
        reports.push_back(std::move(r));
      }

  const auto cells = static_cast<std::ptrdiff_t>(reports.size());
#pragma omp parallel for schedule(dynamic) if (plan.parallel_cells)
  for (std::ptrdiff_t i = 0; i < cells; ++i) {
    RunReport& r = reports[static_cast<std::size_t>(i)];
    try {
      const auto start = std::chrono::steady_clock::now();
      SolveResult result = solve(r.algorithm, t, r.config);
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      r.re = relative_error(t, result.factorization);
      r.cost = result.cost;
      r.power_counts = result.power_counts;
      for (const auto& m : result.trace.modes) r.final_alpha.push_back(m.final_alpha);
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
      r.re = std::nan("");
    }
  }
  return reports;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<CellSummary> aggregate(const std::vector<RunReport>& reports) {
  struct Acc {
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::vector<double> re;
    std::vector<double> seconds;
  };
  std::map<std::pair<std::size_t, int>, Acc> groups;
  for (const auto& r : reports) {
    Acc& acc = groups[{r.config_index, static_cast<int>(r.algorithm)}];
    ++acc.runs;
    if (!r.ok) {
      ++acc.failures;
      continue;
    }
    acc.re.push_back(r.re);
    acc.seconds.push_back(r.seconds);
  }
  // Sorting before summing keeps the mean bit-identical under any trial order.
  auto mean = [](std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  std::vector<CellSummary> out;
  for (const auto& [key, acc] : groups) {
    CellSummary s;
    s.config_index = key.first;
    s.algorithm = static_cast<Algorithm>(key.second);
    s.runs = acc.runs;
    s.failures = acc.failures;
    s.mean_re = mean(acc.re);
    s.median_re = median(acc.re);
    s.mean_seconds = mean(acc.seconds);
    s.median_seconds = median(acc.seconds);
    out.push_back(s);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<RunReport>& reports, const std::string& recipe, bool timing) {
  out << "algorithm,recipe,r,s,q,trial,seed,re,seconds,alpha_final\n";
  for (const auto& r : reports) {
    std::string q;
    if (r.algorithm == Algorithm::Pve && r.ok) {
      std::vector<std::size_t> counts(r.power_counts.begin(), r.power_counts.end());
      q = join(counts, ';');
    } else if (is_randomized(r.algorithm)) {
      q = std::to_string(r.config.power);
    }
    std::string s;
    if (is_randomized(r.algorithm))
      s = r.config.oversampling.empty() ? std::string("10") : join(r.config.oversampling, ';');
    std::string alpha;
    for (std::size_t i = 0; i < r.final_alpha.size(); ++i) {
      if (i) alpha += ';';
      alpha += format_double(r.final_alpha[i]);
    }
    out << to_string(r.algorithm) << ',' << recipe << ',' << join(r.config.ranks, ';') << ',' << s << ',' << q << ','
        << r.trial << ',' << r.seed << ',' << (r.ok ? format_double(r.re) : std::string("nan")) << ','
        << (timing ? format_double(r.seconds) : std::string()) << ',' << alpha << '\n';
  }
}

}  // namespace tucker
