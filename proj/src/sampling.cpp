#include "pinn/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pinn::sampling {

TruncExpParams::TruncExpParams(double a_, double b_, double r_)
    : a(a_), b(b_), r(r_) {
  if (!(a < b)) {
    throw std::invalid_argument("TruncExpParams: requires a < b, got a=" +
                                std::to_string(a_) + " b=" + std::to_string(b_));
  }
}

namespace {

inline bool uniform_limit(double r) { return std::fabs(r) < kUniformRateEps; }

}  // namespace

double density(const TruncExpParams& p, double t) {
  if (t < p.a || t > p.b) return 0.0;
  if (uniform_limit(p.r)) return 1.0 / (p.b - p.a);
  // r e^{-r(t-a)} / (1 - e^{-r(b-a)}); expm1 keeps small rates accurate.
  return -p.r * std::exp(-p.r * (t - p.a)) / std::expm1(-p.r * (p.b - p.a));
}

double cdf(const TruncExpParams& p, double t) {
  if (t <= p.a) return 0.0;
  if (t >= p.b) return 1.0;
  if (uniform_limit(p.r)) return (t - p.a) / (p.b - p.a);
  return std::expm1(-p.r * (t - p.a)) / std::expm1(-p.r * (p.b - p.a));
}

double quantile(const TruncExpParams& p, double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("quantile: q must lie in [0,1], got " +
                            std::to_string(q));
  }
  if (uniform_limit(p.r)) return p.a + q * (p.b - p.a);
  // a - ln(1 - q + q e^{-r(b-a)}) / r, written via log1p/expm1.
  const double y = std::log1p(q * std::expm1(-p.r * (p.b - p.a)));
  return p.a - y / p.r;
}

std::vector<double> quantile_grid(const TruncExpParams& p, std::size_t n) {
  if (n == 0) throw std::domain_error("quantile_grid: n must be >= 1");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = quantile(p, (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return grid;
}

std::vector<double> density_weights(const TruncExpParams& p,
                                    std::span<const double> grid) {
  std::vector<double> w(grid.size());
  // Exponents are shifted by their maximum before exponentiating, so the
  // largest weight is exactly 1 and extreme rates cannot overflow; the
  // normalization cancels the shift.
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (t < p.a || t > p.b) {
      throw std::domain_error("density_weights: grid point outside [a,b]");
    }
    w[i] = uniform_limit(p.r) ? 0.0 : -p.r * (t - p.a);
    peak = (i == 0) ? w[i] : std::max(peak, w[i]);
  }
  double sum = 0.0;
  for (double& wi : w) {
    wi = std::exp(wi - peak);
    sum += wi;
  }
  for (double& wi : w) wi /= sum;
  return w;
}

}  // namespace pinn::sampling
