#ifndef PINN_PROBLEMS_HPP
#define PINN_PROBLEMS_HPP

#include <array>
#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "pinn/net.hpp"
#include "pinn/sampling.hpp"

namespace pinn::problems {

// u'(t) = lambda u(t), u(0) = u0, on [0, T].
struct LinearOdeSpec {
  double lambda = 2.0;
  double u0 = std::sqrt(15.0);
  double T = 1.0;
};

// u_t + u u_x = nu u_xx on [0,T] x [-1,1], u(0,x) = -sin(pi x), u(t,+-1) = 0.
struct BurgersSpec {
  double nu = 0.01 / M_PI;
  double T = 1.0;
  double c_bc = 1.0;   // boundary penalty weight
  int n_space = 25;    // interior collocation columns
  int n_time = 50;     // time collocation rows
};

// x' = sigma (y - x), y' = x (rho - z) - y, z' = x y - beta z.
struct LorenzSpec {
  double sigma = 10.0;
  double rho_lorenz = 28.0;
  double beta = 8.0 / 3.0;
  std::array<double, 3> init{1.0, 1.0, 1.0};
  double T = 1.0;
  int n_time = 100;
};

using Problem = std::variant<LinearOdeSpec, BurgersSpec, LorenzSpec>;

void validate(const Problem& problem);  // throws std::invalid_argument

double horizon(const Problem& problem);

// Network spec matching a problem's input/output arity, with the given
// hidden topology.
net::MlpSpec mlp_for(const Problem& problem, int hidden_layers, int hidden_width);

// Residual collocation in time: either the deterministic quantile grid of a
// truncated exponential law, or uniform midpoints carrying that law's density
// as weights. Weights always sum to one.
struct QuantileGrid {
  sampling::TruncExpParams law;
  std::size_t n;
};
struct WeightedUniform {
  sampling::TruncExpParams law;
  std::size_t n;
};
using SamplingMode = std::variant<QuantileGrid, WeightedUniform>;

struct TimeSampling {
  std::vector<double> nodes;
  std::vector<double> weights;
};
TimeSampling realize(const SamplingMode& mode);

// Initial condition of the Burgers benchmark and its x-derivatives.
double burgers_u0(double x);
double burgers_u0_dx(double x);
double burgers_u0_dxx(double x);

// Network output with the initial-condition shift applied:
//   ODE/Lorenz:  u~(t)   = U(t)   - U(0)   + u0
//   Burgers:     u~(t,x) = U(t,x) - U(0,x) + u0(x)
// so u~(0, .) equals the initial condition exactly for any parameters. The
// returned jet carries the shift corrections in its dx/dxx slots; dt is the
// raw network dt (the shift term is constant in t).
net::EvalJet shifted_eval(const Problem& problem, const net::MlpSpec& spec,
                          const net::ParamVector& params,
                          std::span<const double> input,
                          const net::DerivWant& want);

// Equation error of each benchmark at one collocation point.
double residual_linear(const LinearOdeSpec& ode, const net::MlpSpec& spec,
                       const net::ParamVector& params, double t);
double residual_burgers(const BurgersSpec& burgers, const net::MlpSpec& spec,
                        const net::ParamVector& params, double t, double x);
std::array<double, 3> residual_lorenz(const LorenzSpec& lorenz,
                                      const net::MlpSpec& spec,
                                      const net::ParamVector& params, double t);

// Prebuilt collocation set and loss functional for one (problem, sampling)
// pair; eval() is what the trainer calls every iteration.
class LossAssembly {
 public:
  LossAssembly(const Problem& problem, const net::MlpSpec& spec,
               const SamplingMode& mode);

  // Loss and exact parameter gradient. Throws DivergedError on a non-finite
  // loss or gradient.
  net::LossGradient eval(const net::ParamVector& params) const;

  double value(const net::ParamVector& params) const;

  std::span<const net::Point> points() const { return points_; }
  const net::DerivWant& want() const { return want_; }
  const net::JetLoss& functional() const { return loss_; }

 private:
  net::MlpSpec spec_;
  std::vector<net::Point> points_;
  net::DerivWant want_;
  net::JetLoss loss_;
};

// One-shot convenience around LossAssembly.
net::LossGradient assemble_loss(const Problem& problem,
                                const net::MlpSpec& spec,
                                const net::ParamVector& params,
                                const SamplingMode& mode);

}  // namespace pinn::problems

#endif
