#include "pinn/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace pinn::theory {

namespace {

bool lambda_limit(double lambda) { return std::fabs(lambda) < kLambdaEps; }

// int_0^T e^{2 lambda (T-t)/3} dt
double exp23_integral(double lambda, double T) {
  if (lambda_limit(lambda)) return T;
  return 3.0 * std::expm1(2.0 * lambda * T / 3.0) / (2.0 * lambda);
}

// (e^{lambda (T-t)} - 1) / lambda, the integral-metric kernel; positive for
// every sign of lambda, with limit T - t at lambda = 0.
double integral_kernel(double lambda, double T, double t) {
  if (lambda_limit(lambda)) return T - t;
  return std::expm1(lambda * (T - t)) / lambda;
}

}  // namespace

void validate(const BudgetProblem& bp) {
  if (!(bp.budget > 0.0)) {
    throw std::invalid_argument("BudgetProblem: budget must be > 0");
  }
  if (!(bp.T > 0.0)) throw std::invalid_argument("BudgetProblem: T must be > 0");
  if (bp.n_grid < 100) {
    throw std::invalid_argument("BudgetProblem: n_grid must be >= 100");
  }
}

double error_bound(double lambda, double T, double B) {
  if (!(B > 0.0)) throw std::invalid_argument("error_bound: B must be > 0");
  return std::pow(exp23_integral(lambda, T), 1.5) / std::sqrt(B);
}

std::vector<double> optimal_profile(double lambda, double T, double B,
                                    std::span<const double> grid) {
  if (!(B > 0.0)) throw std::invalid_argument("optimal_profile: B must be > 0");
  const double kappa = std::sqrt(exp23_integral(lambda, T) / B);
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w[i] = kappa * std::exp(-lambda * (T - grid[i]) / 3.0);
  }
  return w;
}

double induced_error_for_density(const std::function<double(double)>& rho,
                                 double lambda, double T, double B,
                                 int n_quad) {
  if (!(B > 0.0) || !(T > 0.0)) {
    throw std::invalid_argument("induced_error_for_density: B, T must be > 0");
  }
  if (n_quad < 100) {
    throw std::invalid_argument("induced_error_for_density: n_quad too small");
  }
  const double dt = T / n_quad;
  std::vector<double> rv(static_cast<std::size_t>(n_quad) + 1);
  for (int k = 0; k <= n_quad; ++k) {
    const double value = rho(dt * k);
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::domain_error(
          "induced_error_for_density: rho must be positive and finite on the "
          "quadrature grid");
    }
    rv[static_cast<std::size_t>(k)] = value;
  }
  auto trapezoid = [&](auto&& f) {
    double acc = 0.5 * (f(0) + f(n_quad));
    for (int k = 1; k < n_quad; ++k) acc += f(k);
    return acc * dt;
  };
  const double norm = trapezoid([&](int k) { return rv[static_cast<std::size_t>(k)]; });
  if (std::fabs(norm - 1.0) > 1e-3) {
    throw std::domain_error("induced_error_for_density: rho is not normalized");
  }
  const double sqrt_mass =
      trapezoid([&](int k) { return std::sqrt(rv[static_cast<std::size_t>(k)]); });
  const double c = std::sqrt(sqrt_mass / B);
  return trapezoid([&](int k) {
    const double t = dt * k;
    return std::exp(lambda * (T - t)) * c *
           std::pow(rv[static_cast<std::size_t>(k)], -0.25);
  });
}

OracleResult discrete_budget_oracle(
    const BudgetProblem& bp, const std::function<double(double)>& kernel) {
  validate(bp);
  const int n = bp.n_grid;
  const double delta = bp.T / n;
  OracleResult out;
  out.grid.resize(static_cast<std::size_t>(n));
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.grid[static_cast<std::size_t>(i)] = delta * (i + 0.5);
    const double ki = kernel(out.grid[static_cast<std::size_t>(i)]);
    if (!(ki > 0.0) || !std::isfinite(ki)) {
      throw std::domain_error(
          "discrete_budget_oracle: kernel must be positive on (0,T)");
    }
    k[static_cast<std::size_t>(i)] = ki;
  }

  // Stationarity of the Lagrangian gives w_i = (2 mu / k_i)^{1/3}; the
  // budget residual is strictly decreasing in mu, so bisection applies.
  auto budget_residual = [&](double mu) {
    double used = 0.0;
    for (double ki : k) used += delta * std::pow(ki / (2.0 * mu), 2.0 / 3.0);
    return used - bp.budget;
  };

  double lo = 1.0, hi = 1.0;
  int guard = 0;
  while (budget_residual(lo) < 0.0) {
    lo *= 0.5;
    if (++guard > 2000) {
      throw std::runtime_error("discrete_budget_oracle: bracketing failed");
    }
  }
  guard = 0;
  while (budget_residual(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 2000) {
      throw std::runtime_error("discrete_budget_oracle: bracketing failed");
    }
  }
  double mu = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mu = 0.5 * (lo + hi);
    if (budget_residual(mu) > 0.0) {
      lo = mu;
    } else {
      hi = mu;
    }
  }
  if (std::fabs(budget_residual(mu)) / bp.budget > 1e-8) {
    throw std::runtime_error(
        "discrete_budget_oracle: bisection did not converge");
  }

  out.profile.resize(static_cast<std::size_t>(n));
  double error = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wi = std::cbrt(2.0 * mu / k[static_cast<std::size_t>(i)]);
    out.profile[static_cast<std::size_t>(i)] = wi;
    error += k[static_cast<std::size_t>(i)] * wi * delta;
  }
  out.min_error = error;
  return out;
}

std::vector<double> integral_metric_density(double lambda, double T,
                                            std::span<const double> grid) {
  if (!(T > 0.0)) {
    throw std::invalid_argument("integral_metric_density: T must be > 0");
  }
  // Normalizer by composite trapezoid; the integrand vanishes at t = T.
  const int n = 10000;
  const double dt = T / n;
  double z = 0.5 * std::pow(integral_kernel(lambda, T, 0.0), 4.0 / 3.0);
  for (int s = 1; s < n; ++s) {
    z += std::pow(integral_kernel(lambda, T, dt * s), 4.0 / 3.0);
  }
  z *= dt;

  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = std::pow(integral_kernel(lambda, T, grid[i]), 4.0 / 3.0) / z;
  }
  return out;
}

}  // namespace pinn::theory
