#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dotmark/measures.hpp"

namespace dotmark {

/// Matérn covariance parameters: sigma^2, smoothness nu_m and range gamma, all > 0.
struct MaternParams {
  double variance = 1.0;
  double smoothness = 1.0;
  double range = 0.15;

  void validate() const;  // throws InvalidArgument
  friend bool operator==(const MaternParams&, const MaternParams&) = default;
};

/// Pre-normalization pixel values, row-major on an n x n grid.
struct RawField {
  int resolution = 0;
  std::vector<double> values;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * resolution + col]; }
};

/// Semi-axis range for the random Cauchy scale ellipse.
struct ScaleRange {
  double lo = 0.05;
  double hi = 0.3;
};

struct CauchyParams {
  double center_row = 0.5;  // unit-square coordinates of the mode
  double center_col = 0.5;
  double axis_a = 0.1;      // semi-axes of the scale ellipse
  double axis_b = 0.1;
  double angle = 0.0;       // rotation in [0, pi)
};

enum class BenchClass : int {
  WhiteNoise = 1,
  GRFrough = 2,
  GRFmoderate = 3,
  GRFsmooth = 4,
  LogGRF = 5,
  LogitGRF = 6,
  CauchyDensity = 7,
  Shapes = 8,
  ClassicImages = 9,
  Microscopy = 10,
};

inline constexpr int kImagesPerClass = 10;
inline constexpr int kShapeCatalogSize = 10;
inline constexpr std::int64_t kDefaultTargetMean = 100000;
inline constexpr double kDefaultRedistribution = 0.005;

/// DOTmark directory name of a class id 1-10. Throws InvalidArgument otherwise.
std::string class_name(int class_id);
/// Inverse of class_name. Throws InvalidArgument on unknown names.
int class_id_from_name(std::string_view name);
/// Table 1 parameters for the GRF-based classes 2-6.
MaternParams default_matern(int class_id);

struct ClassSpec {
  int class_id = 1;
  int resolution = 32;
  std::uint64_t seed = 0;
  std::optional<MaternParams> matern;  // classes 2-6; Table 1 defaults when empty
  ScaleRange scale_range;              // class 7
  double redistribution_fraction = kDefaultRedistribution;
  std::int64_t target_mean = kDefaultTargetMean;
};

/// k(r) = sigma^2 2^(1-nu)/Gamma(nu) (sqrt(2 nu) r / gamma)^nu K_nu(sqrt(2 nu) r / gamma).
double matern_cov(double r, const MaternParams& params);

/// Dense covariance of the pixel centres of an n x n grid, row-major n^2 x n^2.
std::vector<double> matern_covariance_matrix(const MaternParams& params, int n);

/**
 * @brief Centred Gaussian random field with Matérn covariance at pixel centres.
 *
 * Setup (factorization or circulant spectrum) is done once; each sample()
 * is then cheap. Cholesky for n <= 64, circulant embedding above.
 */
class GrfSampler {
 public:
  GrfSampler(const MaternParams& params, int n);
  ~GrfSampler();
  GrfSampler(GrfSampler&&) noexcept;
  GrfSampler& operator=(GrfSampler&&) noexcept;

  RawField sample(std::uint64_t seed) const;
  /// Diagonal jitter that was needed (Cholesky path), or 0.
  double jitter() const noexcept;
  /// Torus side used by circulant embedding, or 0 on the Cholesky path.
  int embedding_size() const noexcept;

  static constexpr int kCholeskyMaxResolution = 64;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RawField sample_grf(const MaternParams& params, int n, std::uint64_t seed);

/// Logistic function, evaluated on the branch that cannot overflow.
double logistic(double x) noexcept;
RawField transform_log(RawField field);
RawField transform_logit(RawField field);

CauchyParams draw_cauchy_params(std::uint64_t seed, const ScaleRange& range = {});
RawField gen_cauchy(int n, const CauchyParams& params);
RawField gen_cauchy(int n, std::uint64_t seed, const ScaleRange& range = {});

/// Binary rendering of catalog shape image_index (0-9) at pixel centres.
RawField gen_shapes(int n, int image_index);
std::string shape_name(int image_index);

/**
 * @brief Shift, scale and round a field to integer masses with mean target_mean.
 *
 * Values are shifted by the minimum and scaled so that the total is exactly
 * target_mean * n^2. The floor deficit is handed out one unit at a time to
 * pixels drawn in proportion to their fractional parts. Then a small amount
 * of mass is moved at random: units are removed and re-added in proportion
 * to the rounded mass, so empty pixels stay empty. Two seeds differ by at
 * most redistribution_fraction * total in L1. A field with no dynamic range becomes uniform.
 */
GridMeasure normalize_to_integer_masses(const RawField& field,
                                        std::int64_t target_mean = kDefaultTargetMean,
                                        double redistribution_fraction = 0.0, std::uint64_t seed = 0);

/// Raw field of member `index` (0-9) of a class before normalization.
RawField generate_raw(const ClassSpec& spec, int index);
std::vector<GridMeasure> build_class(const ClassSpec& spec);

}  // namespace dotmark
