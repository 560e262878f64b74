#ifndef PINN_REFERENCE_HPP
#define PINN_REFERENCE_HPP

#include <array>
#include <variant>
#include <vector>

#include "pinn/net.hpp"
#include "pinn/problems.hpp"

namespace pinn::reference {

// Closed-form solution of u' = lambda u, u(0) = u0.
double exact_linear(const problems::LinearOdeSpec& ode, double t);

// Snapshots of the viscous Burgers solution on [0,T] x [-1,1]; queryable at
// arbitrary (t,x) by bilinear interpolation.
class BurgersField {
 public:
  BurgersField(std::vector<double> times, std::vector<double> xs,
               std::vector<double> field);

  double sample(double t, double x) const;

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& xs() const { return xs_; }
  double at(std::size_t it, std::size_t ix) const {
    return field_[it * xs_.size() + ix];
  }

 private:
  std::vector<double> times_;
  std::vector<double> xs_;
  std::vector<double> field_;  // times x xs, row-major
};

// Finite-difference Burgers solve: u(0,x) = -sin(pi x), u(t,+-1) = 0,
// conservative-form advection + central diffusion, explicit stepping with
// dt <= min(0.4 dx^2/nu, 0.4 dx/max|u|). n_grid counts intervals, so the
// mesh has n_grid+1 nodes and contains x = 0; doubling n_grid nests the
// grids for self-convergence checks. Throws on a non-finite field.
BurgersField solve_burgers_fd(double nu, int n_grid, double T,
                              int n_snapshots = 512);

// Dense Lorenz trajectory from classical RK4 with fixed step h; cubic
// Hermite interpolation between steps.
class LorenzTrajectory {
 public:
  LorenzTrajectory(double T, double h, std::vector<std::array<double, 3>> states,
                   std::vector<std::array<double, 3>> derivs);

  std::array<double, 3> sample(double t) const;

  double horizon() const { return T_; }

 private:
  double T_;
  double h_;
  std::vector<std::array<double, 3>> states_;
  std::vector<std::array<double, 3>> derivs_;
};

LorenzTrajectory solve_lorenz_rk4(const problems::LorenzSpec& lorenz, double h);

// Oracle bundle for a problem; the linear benchmark needs no solver.
using ReferenceSolution =
    std::variant<problems::LinearOdeSpec, BurgersField, LorenzTrajectory>;

struct ReferenceOptions {
  int burgers_n_grid = 1024;
  double lorenz_h = 1e-3;
};

ReferenceSolution build_reference(const problems::Problem& problem,
                                  const ReferenceOptions& opts = {});

struct ErrorMetrics {
  double final_error = 0.0;     // |u~(T) - u_ref(T)| (L2-in-x for Burgers)
  double integral_error = 0.0;  // trapezoid of the error norm over 256 times
};

ErrorMetrics error_metrics(const problems::Problem& problem,
                           const net::MlpSpec& spec,
                           const net::ParamVector& params,
                           const ReferenceSolution& ref);

}  // namespace pinn::reference

#endif
