#include "dotmark/benchgen.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dotmark/bessel.hpp"
#include "dotmark/errors.hpp"
#include "dotmark/rng.hpp"

namespace dotmark {

namespace {

constexpr const char* kClassNames[] = {"WhiteNoise", "GRFrough",      "GRFmoderate", "GRFsmooth",     "LogGRF",
                                       "LogitGRF",   "CauchyDensity", "Shapes",      "ClassicImages", "Microscopy"};

void check_resolution(int n) {
  if (n < 1 || n > 4096) throw InvalidArgument("resolution must be in [1, 4096]");
}

/// Walker/Vose alias table over non-negative weights.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) : prob_(weights.size()), alias_(weights.size()) {
    const std::size_t n = weights.size();
    double total = 0.0;
    for (double w : weights) total += w;
    if (n == 0 || !(total > 0.0)) throw InvalidArgument("alias table needs positive total weight");
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0, alias_[i] = i;
    for (std::uint32_t i : small) prob_[i] = 1.0, alias_[i] = i;  // rounding leftovers
  }

  std::size_t draw(Rng& rng) const {
    const std::size_t i = rng.below(prob_.size());
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

// FFTW planning is not thread-safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

/// In-place forward 2-D DFT of an m x m complex array.
void fft2(std::vector<std::complex<double>>& data, int m) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_mutex());
    plan = fftw_plan_dft_2d(m, m, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("fftw planning failed");
  fftw_execute(plan);
  std::lock_guard lock(fftw_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void MaternParams::validate() const {
  if (!(variance > 0.0) || !(smoothness > 0.0) || !(range > 0.0) || !std::isfinite(variance) ||
      !std::isfinite(smoothness) || !std::isfinite(range))
    throw InvalidArgument("Matérn parameters must be finite and strictly positive");
}

std::string class_name(int class_id) {
  if (class_id < 1 || class_id > 10) throw InvalidArgument("class id must be in 1..10");
  return kClassNames[class_id - 1];
}

int class_id_from_name(std::string_view name) {
  for (int i = 0; i < 10; ++i)
    if (name == kClassNames[i]) return i + 1;
  throw InvalidArgument("unknown class name: " + std::string(name));
}

MaternParams default_matern(int class_id) {
  switch (class_id) {
    case 2: return {1.0, 0.25, 0.05};
    case 3: return {1.0, 1.0, 0.15};
    case 4: return {1.0, 2.5, 0.3};
    case 5: return {1.0, 0.5, 0.4};
    case 6: return {4.0, 4.5, 0.1};
    default: throw InvalidArgument("class " + std::to_string(class_id) + " is not GRF-based");
  }
}

double matern_cov(double r, const MaternParams& params) {
  params.validate();
  if (!std::isfinite(r)) throw InvalidArgument("matern_cov: non-finite distance");
  if (r < 0.0) throw InvalidArgument("matern_cov: negative distance");
  if (r == 0.0) return params.variance;
  const double nu = params.smoothness;
  const double z = std::sqrt(2.0 * nu) * r / params.range;
  if (z > 700.0) return 0.0;
  const double k = bessel_k(nu, z);
  if (k == 0.0) return 0.0;
  const double log_k = std::log(params.variance) + (1.0 - nu) * std::numbers::ln2 - std::lgamma(nu) +
                       nu * std::log(z) + std::log(k);
  return std::min(params.variance, std::exp(log_k));
}

namespace {

/// k at pixel lag (dr, dc) for 0 <= dr, dc < n.
std::vector<double> lag_table(const MaternParams& params, int n) {
  std::vector<double> table(static_cast<std::size_t>(n) * n);
  for (int dr = 0; dr < n; ++dr)
    for (int dc = 0; dc < n; ++dc)
      table[static_cast<std::size_t>(dr) * n + dc] = matern_cov(std::hypot(dr, dc) / n, params);
  return table;
}

}  // namespace

std::vector<double> matern_covariance_matrix(const MaternParams& params, int n) {
  check_resolution(n);
  const std::size_t N = static_cast<std::size_t>(n) * n;
  if (N > 16384) throw InvalidArgument("covariance matrix too large");
  const auto table = lag_table(params, n);
  std::vector<double> cov(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const int dr = std::abs(static_cast<int>(i / n) - static_cast<int>(j / n));
      const int dc = std::abs(static_cast<int>(i % n) - static_cast<int>(j % n));
      cov[i * N + j] = table[static_cast<std::size_t>(dr) * n + dc];
    }
  return cov;
}

struct GrfSampler::Impl {
  int n = 0;
  double jitter = 0.0;
  int m = 0;  // circulant side, 0 for Cholesky
  Eigen::MatrixXd lower;
  std::vector<double> sqrt_eigen;  // sqrt(lambda / m^2), m x m
};

GrfSampler::GrfSampler(const MaternParams& params, int n) : impl_(std::make_unique<Impl>()) {
  params.validate();
  check_resolution(n);
  impl_->n = n;
  const double sigma2 = params.variance;

  if (n <= kCholeskyMaxResolution) {
    const auto cov = matern_covariance_matrix(params, n);
    const Eigen::Index N = static_cast<Eigen::Index>(n) * n;
    const Eigen::Map<const Eigen::MatrixXd> base(cov.data(), N, N);
    for (double jitter = 1e-10 * sigma2; jitter <= 1e-4 * sigma2 * 1.0001; jitter *= 10.0) {
      Eigen::MatrixXd a = base;
      a.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() == Eigen::Success) {
        impl_->lower = llt.matrixL();
        impl_->jitter = jitter;
        return;
      }
    }
    throw NumericalError("GRF covariance is not positive definite after jitter 1e-4 sigma^2");
  }

  // Circulant embedding on an m x m torus; enlarge while the spectrum has
  // significantly negative eigenvalues, clamp whatever remains.
  for (int m = 2 * n;; m *= 2) {
    std::vector<std::complex<double>> c(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        const int da = std::min(a, m - a), db = std::min(b, m - b);
        c[static_cast<std::size_t>(a) * m + b] = matern_cov(std::hypot(da, db) / n, params);
      }
    fft2(c, m);
    double lo = 0.0, hi = 0.0;
    for (const auto& z : c) lo = std::min(lo, z.real()), hi = std::max(hi, z.real());
    const bool last = m >= 4 * n;
    if (lo < -1e-8 * hi && !last) continue;
    impl_->m = m;
    impl_->sqrt_eigen.resize(c.size());
    const double scale = 1.0 / (static_cast<double>(m) * m);
    for (std::size_t i = 0; i < c.size(); ++i) impl_->sqrt_eigen[i] = std::sqrt(std::max(0.0, c[i].real()) * scale);
    return;
  }
}

GrfSampler::~GrfSampler() = default;
GrfSampler::GrfSampler(GrfSampler&&) noexcept = default;
GrfSampler& GrfSampler::operator=(GrfSampler&&) noexcept = default;

double GrfSampler::jitter() const noexcept { return impl_->jitter; }
int GrfSampler::embedding_size() const noexcept { return impl_->m; }

RawField GrfSampler::sample(std::uint64_t seed) const {
  const int n = impl_->n;
  const std::size_t N = static_cast<std::size_t>(n) * n;
  Rng rng(seed);
  RawField field{n, std::vector<double>(N)};
  if (impl_->m == 0) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(N));
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const Eigen::VectorXd x = impl_->lower.triangularView<Eigen::Lower>() * z;
    for (std::size_t i = 0; i < N; ++i) field.values[i] = x[static_cast<Eigen::Index>(i)];
    return field;
  }
  const int m = impl_->m;
  std::vector<std::complex<double>> w(static_cast<std::size_t>(m) * m);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    w[i] = impl_->sqrt_eigen[i] * std::complex<double>(re, im);
  }
  fft2(w, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) field.values[static_cast<std::size_t>(r) * n + c] = w[static_cast<std::size_t>(r) * m + c].real();
  return field;
}

RawField sample_grf(const MaternParams& params, int n, std::uint64_t seed) {
  return GrfSampler(params, n).sample(seed);
}

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

RawField transform_log(RawField field) {
  for (double& v : field.values) v = std::exp(v);
  return field;
}

RawField transform_logit(RawField field) {
  for (double& v : field.values) v = logistic(v);
  return field;
}

CauchyParams draw_cauchy_params(std::uint64_t seed, const ScaleRange& range) {
  if (!(range.lo >= 1e-3) || !(range.hi >= range.lo) || !std::isfinite(range.hi))
    throw InvalidArgument("Cauchy scale range must satisfy 1e-3 <= lo <= hi");
  Rng rng(seed);
  CauchyParams p;
  p.center_row = rng.uniform(0.2, 0.8);
  p.center_col = rng.uniform(0.2, 0.8);
  p.axis_a = rng.uniform(range.lo, range.hi);
  p.axis_b = rng.uniform(range.lo, range.hi);
  p.angle = rng.uniform(0.0, std::numbers::pi);
  return p;
}

RawField gen_cauchy(int n, const CauchyParams& p) {
  check_resolution(n);
  const double a = std::max(p.axis_a, 1e-3), b = std::max(p.axis_b, 1e-3);
  const double cs = std::cos(p.angle), sn = std::sin(p.angle);
  const double norm = 1.0 / (2.0 * std::numbers::pi * a * b);
  RawField field{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double dr = (r + 0.5) / n - p.center_row;
      const double dc = (c + 0.5) / n - p.center_col;
      const double u = (cs * dr + sn * dc) / a;
      const double v = (-sn * dr + cs * dc) / b;
      field.values[static_cast<std::size_t>(r) * n + c] = norm * std::pow(1.0 + u * u + v * v, -1.5);
    }
  return field;
}

RawField gen_cauchy(int n, std::uint64_t seed, const ScaleRange& range) {
  return gen_cauchy(n, draw_cauchy_params(seed, range));
}

namespace {

bool in_disk(double x, double y, double cx, double cy, double radius) {
  return (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius;
}

// x is the column coordinate, y the row coordinate, both in [0, 1].
bool shape_contains(int index, double x, double y) {
  const double dx = x - 0.5, dy = y - 0.5;
  switch (index) {
    case 0: return in_disk(x, y, 0.5, 0.5, 0.3);
    case 1: return in_disk(x, y, 0.5, 0.5, 0.35) && !in_disk(x, y, 0.5, 0.5, 0.2);
    case 2: {
      const double d = std::max(std::abs(dx), std::abs(dy));
      return d <= 0.35 && d > 0.22;
    }
    case 3: return std::abs(x - y) <= 0.11 && x >= 0.1 && x <= 0.9 && y >= 0.1 && y <= 0.9;
    case 4:
      return (std::abs(dx) <= 0.08 && std::abs(dy) <= 0.35) || (std::abs(dy) <= 0.08 && std::abs(dx) <= 0.35);
    case 5: {
      // apex (0.5, 0.2), base from (0.2, 0.8) to (0.8, 0.8)
      if (y < 0.2 || y > 0.8) return false;
      return std::abs(dx) <= 0.3 * (y - 0.2) / 0.6;
    }
    case 6: return in_disk(x, y, 0.3, 0.35, 0.15) || in_disk(x, y, 0.68, 0.65, 0.2);
    case 7: {
      if (x < 0.1 || x >= 0.9 || y < 0.1 || y >= 0.9) return false;
      const int bx = static_cast<int>((x - 0.1) / 0.2), by = static_cast<int>((y - 0.1) / 0.2);
      return (bx + by) % 2 == 0;
    }
    case 8:
      return (x >= 0.2 && x <= 0.45 && y >= 0.15 && y <= 0.85) || (x >= 0.2 && x <= 0.8 && y >= 0.6 && y <= 0.85);
    case 9: {
      const double rr = std::hypot(dx, dy);
      if (rr < 0.2 || rr > 0.4) return false;
      double angle = std::atan2(dy, dx);
      if (angle < 0) angle += 2.0 * std::numbers::pi;
      return angle <= 1.5 * std::numbers::pi;
    }
    default: throw InvalidArgument("shape index must be in 0..9");
  }
}

constexpr const char* kShapeNames[] = {"disk",     "annulus",        "square_frame", "diagonal_bar", "cross",
                                       "triangle", "two_disks",      "checker",      "l_shape",      "ring_sector"};

}  // namespace

std::string shape_name(int image_index) {
  if (image_index < 0 || image_index >= kShapeCatalogSize) throw InvalidArgument("shape index must be in 0..9");
  return kShapeNames[image_index];
}

RawField gen_shapes(int n, int image_index) {
  check_resolution(n);
  if (image_index < 0 || image_index >= kShapeCatalogSize) throw InvalidArgument("shape index must be in 0..9");
  RawField field{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      field.values[static_cast<std::size_t>(r) * n + c] = shape_contains(image_index, (c + 0.5) / n, (r + 0.5) / n);
  return field;
}

GridMeasure normalize_to_integer_masses(const RawField& field, std::int64_t target_mean,
                                        double redistribution_fraction, std::uint64_t seed) {
  const int n = field.resolution;
  check_resolution(n);
  const std::size_t N = static_cast<std::size_t>(n) * n;
  if (field.values.size() != N) throw InvalidArgument("field size does not match resolution");
  if (target_mean < 1) throw InvalidArgument("target mean must be positive");
  if (!(redistribution_fraction >= 0.0 && redistribution_fraction <= 0.01))
    throw InvalidArgument("redistribution fraction must be in [0, 0.01]");
  if (target_mean > std::numeric_limits<std::int64_t>::max() / static_cast<std::int64_t>(N))
    throw InvalidArgument("target total overflows");
  const std::int64_t total = target_mean * static_cast<std::int64_t>(N);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : field.values) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw InvalidArgument("field contains NaN or +inf");
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) throw InvalidArgument("field has no finite value");

  std::vector<std::int64_t> mass(N, target_mean);
  if (!(hi > lo)) return GridMeasure(n, std::move(mass));

  std::vector<double> scaled(N);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    scaled[i] = std::isfinite(field.values[i]) ? field.values[i] - lo : 0.0;
    sum += scaled[i];
  }
  const double factor = static_cast<double>(total) / sum;
  std::vector<double> remainder(N);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = scaled[i] * factor;
    const double f = std::floor(x);
    mass[i] = static_cast<std::int64_t>(f);
    remainder[i] = x - f;
    assigned += mass[i];
  }
  // Floating-point slack can overshoot by a few units; take them from the largest pixels.
  while (assigned > total) {
    auto it = std::max_element(mass.begin(), mass.end());
    --*it;
    --assigned;
  }

  Rng rng(seed);
  if (std::int64_t deficit = total - assigned; deficit > 0) {
    double rem_sum = 0.0;
    for (double r : remainder) rem_sum += r;
    if (!(rem_sum > 0.0)) std::fill(remainder.begin(), remainder.end(), 1.0);
    const AliasTable table(remainder);
    for (; deficit > 0; --deficit) ++mass[table.draw(rng)];
  }

  // Rounding alone moves at most n^2 units; the remaining budget is split so that
  // two seeds stay within redistribution_fraction * total of each other in L1.
  const double budget = redistribution_fraction * static_cast<double>(total) - 2.0 * static_cast<double>(N);
  const auto moves = static_cast<std::int64_t>(std::floor(std::max(0.0, budget) / 4.0));
  if (moves > 0) {
    std::vector<double> weight(mass.begin(), mass.end());
    const AliasTable table(weight);
    for (std::int64_t k = 0; k < moves;) {
      const std::size_t i = table.draw(rng);
      if (mass[i] > 0) --mass[i], ++k;
    }
    for (std::int64_t k = 0; k < moves; ++k) ++mass[table.draw(rng)];
  }
  return GridMeasure(n, std::move(mass));
}

namespace {

void check_spec(const ClassSpec& spec) {
  if (spec.class_id == 9 || spec.class_id == 10)
    throw InvalidArgument("classes 9 and 10 are real data and can only be loaded");
  if (spec.class_id < 1 || spec.class_id > 8) throw InvalidArgument("class id must be in 1..8");
  check_resolution(spec.resolution);
}

MaternParams matern_for(const ClassSpec& spec) {
  return spec.matern ? *spec.matern : default_matern(spec.class_id);
}

std::uint64_t member_seed(const ClassSpec& spec, int index) { return derive_seed(spec.seed, static_cast<std::uint64_t>(index)); }

RawField raw_member(const ClassSpec& spec, int index, const GrfSampler* grf) {
  const int n = spec.resolution;
  const std::uint64_t seed = member_seed(spec, index);
  switch (static_cast<BenchClass>(spec.class_id)) {
    case BenchClass::WhiteNoise: {
      Rng rng(seed);
      RawField field{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
      for (double& v : field.values) v = rng.uniform();
      return field;
    }
    case BenchClass::GRFrough:
    case BenchClass::GRFmoderate:
    case BenchClass::GRFsmooth: return grf->sample(seed);
    case BenchClass::LogGRF: return transform_log(grf->sample(seed));
    case BenchClass::LogitGRF: return transform_logit(grf->sample(seed));
    case BenchClass::CauchyDensity: return gen_cauchy(n, seed, spec.scale_range);
    case BenchClass::Shapes: return gen_shapes(n, index);
    default: throw InvalidArgument("unsupported class");
  }
}

bool is_grf(int class_id) { return class_id >= 2 && class_id <= 6; }

}  // namespace

RawField generate_raw(const ClassSpec& spec, int index) {
  check_spec(spec);
  if (index < 0 || index >= kImagesPerClass) throw InvalidArgument("member index must be in 0..9");
  if (is_grf(spec.class_id)) {
    const GrfSampler grf(matern_for(spec), spec.resolution);
    return raw_member(spec, index, &grf);
  }
  return raw_member(spec, index, nullptr);
}

std::vector<GridMeasure> build_class(const ClassSpec& spec) {
  check_spec(spec);
  std::optional<GrfSampler> grf;
  if (is_grf(spec.class_id)) grf.emplace(matern_for(spec), spec.resolution);
  std::vector<GridMeasure> out;
  out.reserve(kImagesPerClass);
  for (int k = 0; k < kImagesPerClass; ++k) {
    const RawField raw = raw_member(spec, k, grf ? &*grf : nullptr);
    out.push_back(normalize_to_integer_masses(raw, spec.target_mean, spec.redistribution_fraction,
                                              derive_seed(spec.seed, 1000 + static_cast<std::uint64_t>(k))));
  }
  return out;
}

}  // namespace dotmark
