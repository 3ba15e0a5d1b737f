#include "uncertainty/fluctuations.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "uncertainty/error.hpp"
#include "uncertainty/format.hpp"
#include "uncertainty/random.hpp"

namespace uncertainty {

PhaseSpaceGaussian::PhaseSpaceGaussian(double mean_x, double mean_p, double sigma_x, double sigma_p)
    : mean_x_(mean_x), mean_p_(mean_p), sigma_x_(sigma_x), sigma_p_(sigma_p) {
  if (!(sigma_x > 0.0) || !(sigma_p > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma, "phase-space widths must be positive");
  }
}

double density_eval(const PhaseSpaceGaussian& g, double x, double p) {
  const double zx = (x - g.mean_x()) / g.sigma_x();
  const double zp = (p - g.mean_p()) / g.sigma_p();
  return std::exp(-0.5 * (zx * zx + zp * zp)) / (2.0 * std::numbers::pi * g.sigma_x() * g.sigma_p());
}

PhaseSpaceGaussian from_stats(const StateStats& stats) {
  if (!(stats.var_x > 0.0) || !(stats.var_p > 0.0)) {
    throw Error(ErrorCode::DegenerateVariance, "phase-space Gaussian needs positive variances");
  }
  return PhaseSpaceGaussian(stats.mean_x, stats.mean_p, std::sqrt(stats.var_x), std::sqrt(stats.var_p));
}

SampleBatch sample(const PhaseSpaceGaussian& g, std::size_t n, std::uint64_t seed) {
  SampleBatch batch{seed, {}, g};
  batch.points.reserve(n);
  RandomStream stream(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [zx, zp] = stream.normal_pair();
    batch.points.push_back({g.mean_x() + g.sigma_x() * zx, g.mean_p() + g.sigma_p() * zp});
  }
  return batch;
}

void write_csv(std::ostream& out, const SampleBatch& batch) {
  out << "x,p\n";
  for (const auto& pt : batch.points) out << format_real(pt.x) << ',' << format_real(pt.p) << '\n';
}

namespace {

struct AxisAccumulator {
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  // returns the deviation from the previous mean
  double push(double value, double n) {
    const double n1 = n - 1.0;
    const double delta = value - mean;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean += delta_n;
    m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
    m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
    return delta;
  }
};

}  // namespace

MomentReport estimate_moments(std::span<const PhasePoint> points) {
  if (points.size() < 2) throw Error(ErrorCode::InsufficientSamples, "moment estimates need at least 2 points");

  AxisAccumulator ax;
  AxisAccumulator ap;
  double comoment = 0.0;
  double n = 0.0;
  for (const auto& pt : points) {
    n += 1.0;
    const double dx_old = ax.push(pt.x, n);
    ap.push(pt.p, n);
    comoment += dx_old * (pt.p - ap.mean);
  }

  MomentReport r;
  r.count = points.size();
  r.mean_x = ax.mean;
  r.mean_p = ap.mean;
  r.var_x = ax.m2 / (n - 1.0);
  r.var_p = ap.m2 / (n - 1.0);
  r.degenerate_variance = !(ax.m2 > 0.0) || !(ap.m2 > 0.0);
  if (!r.degenerate_variance) r.corr_xp = comoment / std::sqrt(ax.m2 * ap.m2);

  if (points.size() >= 4) {
    if (ax.m2 > 0.0) {
      r.skew_x = std::sqrt(n) * ax.m3 / std::pow(ax.m2, 1.5);
      r.excess_kurt_x = n * ax.m4 / (ax.m2 * ax.m2) - 3.0;
    }
    if (ap.m2 > 0.0) {
      r.skew_p = std::sqrt(n) * ap.m3 / std::pow(ap.m2, 1.5);
      r.excess_kurt_p = n * ap.m4 / (ap.m2 * ap.m2) - 3.0;
    }
  }
  return r;
}

namespace {

struct MicroSampler {
  MicroDistribution micro;
  double mu = 0.0;
  double sigma = 1.0;

  explicit MicroSampler(const MicroDistribution& m) : micro(m) {
    if (const auto* u = std::get_if<UniformMicro>(&micro)) {
      if (!(u->b > u->a)) throw Error(ErrorCode::InvalidParameter, "uniform micro-distribution needs b > a");
      mu = 0.5 * (u->a + u->b);
      sigma = (u->b - u->a) / std::sqrt(12.0);
    } else if (const auto* t = std::get_if<TwoPointMicro>(&micro)) {
      if (t->v1 == t->v2) throw Error(ErrorCode::InvalidParameter, "two-point micro-distribution needs distinct values");
      mu = 0.5 * (t->v1 + t->v2);
      sigma = 0.5 * std::abs(t->v2 - t->v1);
    } else {
      const auto& e = std::get<ExponentialMicro>(micro);
      if (!(e.lambda > 0.0)) throw Error(ErrorCode::InvalidParameter, "exponential micro-distribution needs lambda > 0");
      mu = 1.0 / e.lambda;
      sigma = 1.0 / e.lambda;
    }
  }

  double draw(RandomStream& stream) const {
    if (const auto* u = std::get_if<UniformMicro>(&micro)) return u->a + (u->b - u->a) * stream.uniform();
    if (const auto* t = std::get_if<TwoPointMicro>(&micro)) return (stream.next_u64() >> 63) ? t->v2 : t->v1;
    return -std::log1p(-stream.uniform()) / std::get<ExponentialMicro>(micro).lambda;
  }

  double standardized_sum(RandomStream& stream, int m) const {
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += draw(stream);
    return (sum - m * mu) / (sigma * std::sqrt(static_cast<double>(m)));
  }
};

}  // namespace

MomentReport clt_aggregate(const MicroDistribution& micro, int m_terms, std::size_t n_samples, std::uint64_t seed) {
  if (m_terms < 1) throw Error(ErrorCode::InvalidParameter, "m_terms must be >= 1");
  if (n_samples < 4) throw Error(ErrorCode::InsufficientSamples, "CLT study needs at least 4 samples");
  const MicroSampler sampler(micro);
  const RandomStream root(seed);
  RandomStream x_stream = root.split(0);
  RandomStream p_stream = root.split(1);

  std::vector<PhasePoint> points(n_samples);
  for (auto& pt : points) {
    pt.x = sampler.standardized_sum(x_stream, m_terms);
    pt.p = sampler.standardized_sum(p_stream, m_terms);
  }
  return estimate_moments(points);
}

}  // namespace uncertainty
