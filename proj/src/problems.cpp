#include "pinn/problems.hpp"

#include <cmath>
#include <stdexcept>

#include "pinn/errors.hpp"

namespace pinn::problems {

namespace {

struct ValidateVisitor {
  void operator()(const LinearOdeSpec& s) const {
    if (!(s.T > 0.0)) throw std::invalid_argument("LinearOdeSpec: T must be > 0");
  }
  void operator()(const BurgersSpec& s) const {
    if (!(s.nu > 0.0)) throw std::invalid_argument("BurgersSpec: nu must be > 0");
    if (!(s.T > 0.0)) throw std::invalid_argument("BurgersSpec: T must be > 0");
    if (s.c_bc < 0.0) throw std::invalid_argument("BurgersSpec: c_bc must be >= 0");
    if (s.n_space < 2 || s.n_time < 2) {
      throw std::invalid_argument("BurgersSpec: n_space and n_time must be >= 2");
    }
  }
  void operator()(const LorenzSpec& s) const {
    if (!(s.T > 0.0)) throw std::invalid_argument("LorenzSpec: T must be > 0");
    if (s.n_time < 2) throw std::invalid_argument("LorenzSpec: n_time must be >= 2");
  }
};

double interior_x(int j, int n_space) {
  return -1.0 + 2.0 * (static_cast<double>(j) + 0.5) / n_space;
}

}  // namespace

void validate(const Problem& problem) { std::visit(ValidateVisitor{}, problem); }

double horizon(const Problem& problem) {
  return std::visit([](const auto& s) { return s.T; }, problem);
}

net::MlpSpec mlp_for(const Problem& problem, int hidden_layers,
                     int hidden_width) {
  net::MlpSpec spec;
  spec.hidden_layers = hidden_layers;
  spec.hidden_width = hidden_width;
  spec.input_dim = std::holds_alternative<BurgersSpec>(problem) ? 2 : 1;
  spec.output_dim = std::holds_alternative<LorenzSpec>(problem) ? 3 : 1;
  net::validate(spec);
  return spec;
}

TimeSampling realize(const SamplingMode& mode) {
  TimeSampling ts;
  if (const auto* qg = std::get_if<QuantileGrid>(&mode)) {
    ts.nodes = sampling::quantile_grid(qg->law, qg->n);
    ts.weights.assign(qg->n, 1.0 / static_cast<double>(qg->n));
  } else {
    const auto& wu = std::get<WeightedUniform>(mode);
    if (wu.n == 0) throw std::domain_error("WeightedUniform: n must be >= 1");
    ts.nodes.resize(wu.n);
    for (std::size_t i = 0; i < wu.n; ++i) {
      const double q =
          (static_cast<double>(i) + 0.5) / static_cast<double>(wu.n);
      ts.nodes[i] = wu.law.a + q * (wu.law.b - wu.law.a);
    }
    ts.weights = sampling::density_weights(wu.law, ts.nodes);
  }
  return ts;
}

double burgers_u0(double x) { return -std::sin(M_PI * x); }
double burgers_u0_dx(double x) { return -M_PI * std::cos(M_PI * x); }
double burgers_u0_dxx(double x) { return M_PI * M_PI * std::sin(M_PI * x); }

net::EvalJet shifted_eval(const Problem& problem, const net::MlpSpec& spec,
                          const net::ParamVector& params,
                          std::span<const double> input,
                          const net::DerivWant& want) {
  validate(problem);
  net::EvalJet at = net::evaluate(spec, params, input, want);

  // Difference first: at t = 0 the two evaluations are identical, so the
  // subtraction cancels exactly and the initial condition holds bitwise.
  if (const auto* burgers = std::get_if<BurgersSpec>(&problem)) {
    (void)burgers;
    const double x = input[1];
    const double origin[2] = {0.0, x};
    const net::EvalJet at0 = net::evaluate(spec, params, origin, want);
    for (std::size_t k = 0; k < at.value.size(); ++k) {
      at.value[k] = (at.value[k] - at0.value[k]) + burgers_u0(x);
    }
    for (std::size_t k = 0; k < at.dx.size(); ++k) {
      at.dx[k] = (at.dx[k] - at0.dx[k]) + burgers_u0_dx(x);
    }
    for (std::size_t k = 0; k < at.dxx.size(); ++k) {
      at.dxx[k] = (at.dxx[k] - at0.dxx[k]) + burgers_u0_dxx(x);
    }
    return at;  // dt unchanged: the shift is constant in t
  }

  const double origin[1] = {0.0};
  const net::EvalJet at0 = net::evaluate(spec, params, origin, want);
  if (const auto* lorenz = std::get_if<LorenzSpec>(&problem)) {
    for (std::size_t k = 0; k < at.value.size(); ++k) {
      at.value[k] = (at.value[k] - at0.value[k]) + lorenz->init[k];
    }
  } else {
    const auto& ode = std::get<LinearOdeSpec>(problem);
    at.value[0] = (at.value[0] - at0.value[0]) + ode.u0;
  }
  return at;
}

double residual_linear(const LinearOdeSpec& ode, const net::MlpSpec& spec,
                       const net::ParamVector& params, double t) {
  const double input[1] = {t};
  const net::EvalJet jet =
      shifted_eval(ode, spec, params, input, net::DerivWant{.dt = true});
  return jet.dt[0] - ode.lambda * jet.value[0];
}

double residual_burgers(const BurgersSpec& burgers, const net::MlpSpec& spec,
                        const net::ParamVector& params, double t, double x) {
  const double input[2] = {t, x};
  const net::EvalJet jet = shifted_eval(
      burgers, spec, params, input,
      net::DerivWant{.dt = true, .dx = true, .dxx = true});
  return jet.dt[0] + jet.value[0] * jet.dx[0] - burgers.nu * jet.dxx[0];
}

std::array<double, 3> residual_lorenz(const LorenzSpec& lorenz,
                                      const net::MlpSpec& spec,
                                      const net::ParamVector& params,
                                      double t) {
  const double input[1] = {t};
  const net::EvalJet jet =
      shifted_eval(lorenz, spec, params, input, net::DerivWant{.dt = true});
  const double x = jet.value[0], y = jet.value[1], z = jet.value[2];
  return {
      jet.dt[0] - lorenz.sigma * (y - x),
      jet.dt[1] - (x * (lorenz.rho_lorenz - z) - y),
      jet.dt[2] - (x * y - lorenz.beta * z),
  };
}

namespace {

// Collocation layout and adjoint-seeded loss for the linear ODE:
// points = [ (0), (t_0), ..., (t_{n-1}) ],
// loss = sum_i w_i (U'(t_i) - lambda u~(t_i))^2.
void build_linear(const LinearOdeSpec& ode, const TimeSampling& ts,
                  std::vector<net::Point>& points, net::DerivWant& want,
                  net::JetLoss& loss) {
  points.clear();
  points.push_back({0.0});
  for (double t : ts.nodes) points.push_back({t});
  want = net::DerivWant{.dt = true};

  const double lam = ode.lambda;
  const double u0 = ode.u0;
  const std::vector<double> w = ts.weights;
  loss = [lam, u0, w](std::span<const net::EvalJet> jets,
                      std::span<net::JetAdjoint> adj) {
    double total = 0.0;
    const double base = jets[0].value[0];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const net::EvalJet& jet = jets[1 + i];
      const double shifted = jet.value[0] - base + u0;
      const double f = jet.dt[0] - lam * shifted;
      total += w[i] * f * f;
      const double g = 2.0 * w[i] * f;
      adj[1 + i].dt[0] += g;
      adj[1 + i].value[0] -= g * lam;
      adj[0].value[0] += g * lam;
    }
    return total;
  };
}

// Burgers collocation: interior grid {t_i} x {x_j}, one shared shift column
// (0, x_j), boundary rows (t_i, -1/+1) and their shift points (0, -1/+1).
void build_burgers(const BurgersSpec& burgers, const TimeSampling& ts,
                   std::vector<net::Point>& points, net::DerivWant& want,
                   net::JetLoss& loss) {
  const int nt = static_cast<int>(ts.nodes.size());
  const int ns = burgers.n_space;
  points.clear();
  points.reserve(static_cast<std::size_t>(nt) * ns + ns + 2 * nt + 2);
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < ns; ++j) {
      points.push_back({ts.nodes[static_cast<std::size_t>(i)], interior_x(j, ns)});
    }
  }
  const std::size_t shift0 = points.size();
  for (int j = 0; j < ns; ++j) points.push_back({0.0, interior_x(j, ns)});
  const std::size_t bnd0 = points.size();
  for (int i = 0; i < nt; ++i) {
    points.push_back({ts.nodes[static_cast<std::size_t>(i)], -1.0});
    points.push_back({ts.nodes[static_cast<std::size_t>(i)], 1.0});
  }
  const std::size_t bshift0 = points.size();
  points.push_back({0.0, -1.0});
  points.push_back({0.0, 1.0});

  want = net::DerivWant{.dt = true, .dx = true, .dxx = true};

  const double nu = burgers.nu;
  const double c_bc = burgers.c_bc;
  const std::vector<double> w = ts.weights;
  std::vector<double> u0(ns), u0x(ns), u0xx(ns);
  for (int j = 0; j < ns; ++j) {
    const double x = interior_x(j, ns);
    u0[j] = burgers_u0(x);
    u0x[j] = burgers_u0_dx(x);
    u0xx[j] = burgers_u0_dxx(x);
  }
  const double u0b[2] = {burgers_u0(-1.0), burgers_u0(1.0)};

  loss = [nu, c_bc, w, nt, ns, shift0, bnd0, bshift0, u0, u0x, u0xx, u0b](
             std::span<const net::EvalJet> jets,
             std::span<net::JetAdjoint> adj) {
    double total = 0.0;
    const double sw = 1.0 / static_cast<double>(ns);
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < ns; ++j) {
        const std::size_t p = static_cast<std::size_t>(i) * ns + j;
        const std::size_t sp = shift0 + static_cast<std::size_t>(j);
        const net::EvalJet& jet = jets[p];
        const net::EvalJet& sj = jets[sp];
        const double v = jet.value[0] - sj.value[0] + u0[j];
        const double vt = jet.dt[0];
        const double vx = jet.dx[0] - sj.dx[0] + u0x[j];
        const double vxx = jet.dxx[0] - sj.dxx[0] + u0xx[j];
        const double f = vt + v * vx - nu * vxx;
        const double wij = w[static_cast<std::size_t>(i)] * sw;
        total += wij * f * f;
        const double g = 2.0 * wij * f;
        adj[p].dt[0] += g;
        adj[p].value[0] += g * vx;
        adj[sp].value[0] -= g * vx;
        adj[p].dx[0] += g * v;
        adj[sp].dx[0] -= g * v;
        adj[p].dxx[0] -= g * nu;
        adj[sp].dxx[0] += g * nu;
      }
    }
    if (c_bc > 0.0) {
      for (int i = 0; i < nt; ++i) {
        for (int s = 0; s < 2; ++s) {
          const std::size_t p = bnd0 + static_cast<std::size_t>(i) * 2 + s;
          const std::size_t sp = bshift0 + static_cast<std::size_t>(s);
          const double v = jets[p].value[0] - jets[sp].value[0] + u0b[s];
          const double wi = c_bc * w[static_cast<std::size_t>(i)] * 0.5;
          total += wi * v * v;
          const double g = 2.0 * wi * v;
          adj[p].value[0] += g;
          adj[sp].value[0] -= g;
        }
      }
    }
    return total;
  };
}

// Lorenz collocation: points = [ (0), (t_0), ..., (t_{n-1}) ],
// loss = sum_i w_i |residual(t_i)|^2 with the shifted state.
void build_lorenz(const LorenzSpec& lorenz, const TimeSampling& ts,
                  std::vector<net::Point>& points, net::DerivWant& want,
                  net::JetLoss& loss) {
  points.clear();
  points.push_back({0.0});
  for (double t : ts.nodes) points.push_back({t});
  want = net::DerivWant{.dt = true};

  const double sg = lorenz.sigma;
  const double rho = lorenz.rho_lorenz;
  const double beta = lorenz.beta;
  const std::array<double, 3> init = lorenz.init;
  const std::vector<double> w = ts.weights;
  loss = [sg, rho, beta, init, w](std::span<const net::EvalJet> jets,
                                  std::span<net::JetAdjoint> adj) {
    double total = 0.0;
    const net::EvalJet& j0 = jets[0];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const net::EvalJet& jet = jets[1 + i];
      const double x = jet.value[0] - j0.value[0] + init[0];
      const double y = jet.value[1] - j0.value[1] + init[1];
      const double z = jet.value[2] - j0.value[2] + init[2];
      const double r0 = jet.dt[0] - sg * (y - x);
      const double r1 = jet.dt[1] - (x * (rho - z) - y);
      const double r2 = jet.dt[2] - (x * y - beta * z);
      total += w[i] * (r0 * r0 + r1 * r1 + r2 * r2);
      const double g0 = 2.0 * w[i] * r0;
      const double g1 = 2.0 * w[i] * r1;
      const double g2 = 2.0 * w[i] * r2;
      adj[1 + i].dt[0] += g0;
      adj[1 + i].dt[1] += g1;
      adj[1 + i].dt[2] += g2;
      const double vx = g0 * sg - g1 * (rho - z) - g2 * y;
      const double vy = -g0 * sg + g1 + (-g2 * x);
      const double vz = g1 * x + g2 * beta;
      adj[1 + i].value[0] += vx;
      adj[1 + i].value[1] += vy;
      adj[1 + i].value[2] += vz;
      adj[0].value[0] -= vx;
      adj[0].value[1] -= vy;
      adj[0].value[2] -= vz;
    }
    return total;
  };
}

}  // namespace

LossAssembly::LossAssembly(const Problem& problem, const net::MlpSpec& spec,
                           const SamplingMode& mode)
    : spec_(spec) {
  validate(problem);
  net::validate(spec);
  const TimeSampling ts = realize(mode);
  if (const auto* ode = std::get_if<LinearOdeSpec>(&problem)) {
    if (spec.input_dim != 1 || spec.output_dim != 1) {
      throw std::invalid_argument("linear ODE needs a 1 -> 1 network");
    }
    build_linear(*ode, ts, points_, want_, loss_);
  } else if (const auto* burgers = std::get_if<BurgersSpec>(&problem)) {
    if (spec.input_dim != 2 || spec.output_dim != 1) {
      throw std::invalid_argument("Burgers needs a 2 -> 1 network");
    }
    build_burgers(*burgers, ts, points_, want_, loss_);
  } else {
    if (spec.input_dim != 1 || spec.output_dim != 3) {
      throw std::invalid_argument("Lorenz needs a 1 -> 3 network");
    }
    build_lorenz(std::get<LorenzSpec>(problem), ts, points_, want_, loss_);
  }
}

net::LossGradient LossAssembly::eval(const net::ParamVector& params) const {
  net::LossGradient lg =
      net::loss_gradient(spec_, params, points_, want_, loss_);
  if (!std::isfinite(lg.loss)) {
    throw DivergedError("non-finite loss");
  }
  for (double g : lg.grad) {
    if (!std::isfinite(g)) throw DivergedError("non-finite gradient");
  }
  return lg;
}

double LossAssembly::value(const net::ParamVector& params) const {
  return net::loss_value(spec_, params, points_, want_, loss_);
}

net::LossGradient assemble_loss(const Problem& problem,
                                const net::MlpSpec& spec,
                                const net::ParamVector& params,
                                const SamplingMode& mode) {
  return LossAssembly(problem, spec, mode).eval(params);
}

}  // namespace pinn::problems
