#ifndef PINN_SAMPLING_HPP
#define PINN_SAMPLING_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace pinn::sampling {

// Rates with |r| below this are evaluated through the analytic r -> 0 limit
// (the uniform law) instead of the exponential formulas, which lose all
// precision to cancellation there.
inline constexpr double kUniformRateEps = 1e-12;

// Truncated exponential law E^{a,b,r}: support [a,b], density proportional
// to e^{-r t}. r = 0 is the uniform law; r may be negative.
struct TruncExpParams {
  double a;
  double b;
  double r;

  TruncExpParams(double a_, double b_, double r_);  // throws if a >= b
};

// Density at t; zero outside [a,b]. Integrates to 1 over [a,b].
double density(const TruncExpParams& p, double t);

// Distribution function; 0 below a, 1 above b.
double cdf(const TruncExpParams& p, double t);

// Inverse of the CDF. Requires q in [0,1]; quantile(0)=a, quantile(1)=b.
double quantile(const TruncExpParams& p, double q);

// Deterministic collocation grid: quantiles at midpoint levels
// q_i = (i + 0.5)/n. Strictly increasing, all interior to (a,b).
std::vector<double> quantile_grid(const TruncExpParams& p, std::size_t n);

// Weights proportional to e^{-r t_i} on a caller-supplied grid, normalized
// to sum to one so losses stay comparable across rates. All grid points must
// lie in [a,b].
std::vector<double> density_weights(const TruncExpParams& p,
                                    std::span<const double> grid);

}  // namespace pinn::sampling

#endif
