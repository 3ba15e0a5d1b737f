#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "uncertainty/observables.hpp"

namespace uncertainty {

/// Uncorrelated bivariate normal density over phase space,
///   f(x, p) = 1 / (2 pi sx sp) exp(-[(x - mx)^2 / sx^2 + (p - mp)^2 / sp^2] / 2).
class PhaseSpaceGaussian {
 public:
  /// Throws NonPositiveSigma.
  PhaseSpaceGaussian(double mean_x, double mean_p, double sigma_x, double sigma_p);

  double mean_x() const noexcept { return mean_x_; }
  double mean_p() const noexcept { return mean_p_; }
  double sigma_x() const noexcept { return sigma_x_; }
  double sigma_p() const noexcept { return sigma_p_; }

  friend bool operator==(const PhaseSpaceGaussian&, const PhaseSpaceGaussian&) = default;

 private:
  double mean_x_;
  double mean_p_;
  double sigma_x_;
  double sigma_p_;
};

double density_eval(const PhaseSpaceGaussian& g, double x, double p);

/// Throws DegenerateVariance when either variance is not positive.
PhaseSpaceGaussian from_stats(const StateStats& stats);

struct PhasePoint {
  double x;
  double p;
  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

struct SampleBatch {
  std::uint64_t seed = 0;
  std::vector<PhasePoint> points;
  PhaseSpaceGaussian source{0.0, 0.0, 1.0, 1.0};
};

/// n draws; x and p of each point come from one Box-Muller pair.
SampleBatch sample(const PhaseSpaceGaussian& g, std::size_t n, std::uint64_t seed);

/// "x,p" header then one record per point, '\n' terminated.
void write_csv(std::ostream& out, const SampleBatch& batch);

struct MomentReport {
  std::size_t count = 0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;  // unbiased, divisor n - 1
  double var_p = 0.0;
  std::optional<double> corr_xp;  // absent when a variance is zero
  std::optional<double> skew_x;   // g1; absent below 4 points or for zero variance
  std::optional<double> skew_p;
  std::optional<double> excess_kurt_x;  // g2 = m4 / m2^2 - 3
  std::optional<double> excess_kurt_p;
  bool degenerate_variance = false;
};

/// Single pass (Welford / Terriberry updates). Throws InsufficientSamples
/// below two points.
MomentReport estimate_moments(std::span<const PhasePoint> points);
inline MomentReport estimate_moments(const SampleBatch& batch) { return estimate_moments(batch.points); }

struct UniformMicro {
  double a;
  double b;
  friend bool operator==(const UniformMicro&, const UniformMicro&) = default;
};
struct TwoPointMicro {
  double v1;
  double v2;
  friend bool operator==(const TwoPointMicro&, const TwoPointMicro&) = default;
};
struct ExponentialMicro {
  double lambda;
  friend bool operator==(const ExponentialMicro&, const ExponentialMicro&) = default;
};
using MicroDistribution = std::variant<UniformMicro, TwoPointMicro, ExponentialMicro>;

/// Each of the n_samples phase points has coordinates that are independent
/// standardized sums (sum_k u_k - m mu) / (sigma sqrt(m)) of m_terms micro
/// draws. Throws InsufficientSamples, InvalidParameter.
MomentReport clt_aggregate(const MicroDistribution& micro, int m_terms, std::size_t n_samples, std::uint64_t seed);

}  // namespace uncertainty
