#ifndef PINN_THEORY_HPP
#define PINN_THEORY_HPP

#include <functional>
#include <span>
#include <vector>

namespace pinn::theory {

// |lambda| below this is evaluated through the analytic lambda -> 0 limit.
inline constexpr double kLambdaEps = 1e-10;

// Discretized budget-constrained error-profile problem on [0, T]:
// minimize sum_i kernel(t_i) w_i dt  subject to  sum_i dt / w_i^2 = B.
struct BudgetProblem {
  double lambda = 2.0;
  double T = 1.0;
  double budget = 100.0;
  int n_grid = 10000;
};

void validate(const BudgetProblem& bp);  // throws std::invalid_argument

// Smallest reachable final-time error under budget B:
// (1/sqrt(B)) (3 (e^{2 lambda T / 3} - 1) / (2 lambda))^{3/2},
// with the limit T^{3/2}/sqrt(B) at lambda = 0.
double error_bound(double lambda, double T, double B);

// The error profile attaining the bound: kappa e^{-lambda (T-t)/3} with
// kappa set analytically so that int 1/w^2 dt = B.
std::vector<double> optimal_profile(double lambda, double T, double B,
                                    std::span<const double> grid);

// Final-time error predicted for sampling density rho: the loss-minimizing
// profile under the budget is w = c rho^{-1/4} with c = sqrt(int sqrt(rho)/B);
// returns int e^{lambda (T-t)} w(t) dt by composite trapezoid on n_quad+1
// uniform points. rho must be positive at the quadrature nodes and integrate
// to 1 (checked to 1e-3).
double induced_error_for_density(const std::function<double(double)>& rho,
                                 double lambda, double T, double B,
                                 int n_quad = 10000);

struct OracleResult {
  double min_error = 0.0;
  std::vector<double> grid;     // midpoints of [0,T]
  std::vector<double> profile;  // argmin w on the grid
};

// Independent check of the closed forms: solves the discretized problem by
// the Lagrange stationarity condition w_i = (2 mu / kernel(t_i))^{1/3} with
// the multiplier found by bisection on the budget constraint. Does not use
// the closed-form optimum anywhere.
OracleResult discrete_budget_oracle(const BudgetProblem& bp,
                                    const std::function<double(double)>& kernel);

// Normalized density proportional to ((e^{lambda (T-t)} - 1)/lambda)^{4/3},
// the optimum for the time-integrated error metric. For lambda > 0 this
// equals (e^{-lambda t} - e^{-lambda T})^{4/3}/Z; the kernel form keeps the
// base positive for negative rates too, with limit (T-t)^{4/3} at lambda = 0.
// rho(T) = 0 exactly.
std::vector<double> integral_metric_density(double lambda, double T,
                                            std::span<const double> grid);

}  // namespace pinn::theory

#endif
