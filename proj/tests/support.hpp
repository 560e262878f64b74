#ifndef PINN_TESTS_SUPPORT_HPP
#define PINN_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>

// Quadrature and root-finding oracles used by the tests. These stay
// independent of the library code they check.
namespace testsupport {

inline double trapezoid(const std::function<double(double)>& f, double a,
                        double b, int n) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int k = 1; k < n; ++k) acc += f(a + h * k);
  return acc * h;
}

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n_intervals) {
  const int n = n_intervals + (n_intervals % 2);  // must be even
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += f(a + h * k) * (k % 2 == 0 ? 2.0 : 4.0);
  return acc * h / 3.0;
}

// Bisection solve of f(x) = target on [lo, hi]; f must be increasing.
inline double bisect_increasing(const std::function<double(double)>& f,
                                double target, double lo, double hi,
                                int iters = 200) {
  for (int k = 0; k < iters; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double rel_err(double got, double want) {
  const double denom = std::max(std::fabs(got), std::fabs(want));
  return denom == 0.0 ? 0.0 : std::fabs(got - want) / denom;
}

}  // namespace testsupport

#endif
