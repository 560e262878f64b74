#include "pinn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinn::reference {

double exact_linear(const problems::LinearOdeSpec& ode, double t) {
  return ode.u0 * std::exp(ode.lambda * t);
}

BurgersField::BurgersField(std::vector<double> times, std::vector<double> xs,
                           std::vector<double> field)
    : times_(std::move(times)), xs_(std::move(xs)), field_(std::move(field)) {
  if (times_.size() < 2 || xs_.size() < 2 ||
      field_.size() != times_.size() * xs_.size()) {
    throw std::invalid_argument("BurgersField: inconsistent snapshot shape");
  }
}

namespace {

// Index of the cell containing v in a sorted uniform-ish grid; clamped.
std::size_t bracket(const std::vector<double>& grid, double v) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), v);
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  if (hi <= 1) return 0;
  if (hi >= grid.size()) return grid.size() - 2;
  return hi - 1;
}

}  // namespace

double BurgersField::sample(double t, double x) const {
  const std::size_t it = bracket(times_, t);
  const std::size_t ix = bracket(xs_, x);
  const double ft =
      std::clamp((t - times_[it]) / (times_[it + 1] - times_[it]), 0.0, 1.0);
  const double fx = std::clamp((x - xs_[ix]) / (xs_[ix + 1] - xs_[ix]), 0.0, 1.0);
  const double a = at(it, ix) * (1.0 - fx) + at(it, ix + 1) * fx;
  const double b = at(it + 1, ix) * (1.0 - fx) + at(it + 1, ix + 1) * fx;
  return a * (1.0 - ft) + b * ft;
}

BurgersField solve_burgers_fd(double nu, int n_grid, double T,
                              int n_snapshots) {
  if (!(nu > 0.0) || !(T > 0.0)) {
    throw std::invalid_argument("solve_burgers_fd: nu and T must be > 0");
  }
  if (n_grid < 256) {
    throw std::invalid_argument("solve_burgers_fd: n_grid must be >= 256");
  }
  if (n_snapshots < 2) {
    throw std::invalid_argument("solve_burgers_fd: n_snapshots must be >= 2");
  }
  const int nx = n_grid + 1;
  const double dx = 2.0 / n_grid;
  std::vector<double> xs(nx);
  for (int i = 0; i < nx; ++i) xs[i] = -1.0 + dx * i;

  std::vector<double> u(nx), unew(nx);
  for (int i = 0; i < nx; ++i) u[i] = problems::burgers_u0(xs[i]);
  u.front() = 0.0;
  u.back() = 0.0;

  std::vector<double> times(n_snapshots + 1);
  for (int k = 0; k <= n_snapshots; ++k) times[k] = T * k / n_snapshots;
  std::vector<double> field(times.size() * static_cast<std::size_t>(nx));
  std::copy(u.begin(), u.end(), field.begin());

  double t = 0.0;
  int next_snap = 1;
  while (next_snap <= n_snapshots) {
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::fabs(v));
    umax = std::max(umax, 1e-12);
    // The nu/umax^2 cap keeps the explicit advection-diffusion step inside
    // its combined stability region on coarse grids.
    double dt = std::min({0.4 * dx * dx / nu, 0.4 * dx / umax, nu / (umax * umax)});
    bool hit_snapshot = false;
    if (t + dt >= times[next_snap]) {
      dt = times[next_snap] - t;
      hit_snapshot = true;
    }

    const double dif = nu / (dx * dx);
    const double adv = 1.0 / (2.0 * dx);
    unew.front() = 0.0;
    unew.back() = 0.0;
    for (int i = 1; i + 1 < nx; ++i) {
      const double flux =
          (0.5 * u[i + 1] * u[i + 1] - 0.5 * u[i - 1] * u[i - 1]) * adv;
      const double diff = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * dif;
      unew[i] = u[i] + dt * (diff - flux);
    }
    u.swap(unew);
    t += dt;

    if (hit_snapshot) {
      t = times[next_snap];
      for (int i = 0; i < nx; ++i) {
        const double v = u[i];
        if (!std::isfinite(v)) {
          throw std::runtime_error("solve_burgers_fd: field diverged");
        }
        field[static_cast<std::size_t>(next_snap) * nx + i] = v;
      }
      ++next_snap;
    }
  }
  return BurgersField(std::move(times), std::move(xs), std::move(field));
}

namespace {

std::array<double, 3> lorenz_rhs(const problems::LorenzSpec& s,
                                 const std::array<double, 3>& y) {
  return {
      s.sigma * (y[1] - y[0]),
      y[0] * (s.rho_lorenz - y[2]) - y[1],
      y[0] * y[1] - s.beta * y[2],
  };
}

std::array<double, 3> axpy(const std::array<double, 3>& y, double a,
                           const std::array<double, 3>& d) {
  return {y[0] + a * d[0], y[1] + a * d[1], y[2] + a * d[2]};
}

}  // namespace

LorenzTrajectory::LorenzTrajectory(double T, double h,
                                   std::vector<std::array<double, 3>> states,
                                   std::vector<std::array<double, 3>> derivs)
    : T_(T), h_(h), states_(std::move(states)), derivs_(std::move(derivs)) {
  if (states_.size() < 2 || states_.size() != derivs_.size()) {
    throw std::invalid_argument("LorenzTrajectory: inconsistent node data");
  }
}

std::array<double, 3> LorenzTrajectory::sample(double t) const {
  const double pos = std::clamp(t, 0.0, T_) / h_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i >= states_.size() - 1) i = states_.size() - 2;
  const double s = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
  // Cubic Hermite on [t_i, t_i + h] using the stored derivatives.
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    out[k] = h00 * states_[i][k] + h10 * h_ * derivs_[i][k] +
             h01 * states_[i + 1][k] + h11 * h_ * derivs_[i + 1][k];
  }
  return out;
}

LorenzTrajectory solve_lorenz_rk4(const problems::LorenzSpec& lorenz,
                                  double h) {
  if (!(h > 0.0)) throw std::invalid_argument("solve_lorenz_rk4: h must be > 0");
  const auto n = static_cast<std::size_t>(std::ceil(lorenz.T / h - 1e-12));
  std::vector<std::array<double, 3>> states(n + 1), derivs(n + 1);
  states[0] = lorenz.init;
  derivs[0] = lorenz_rhs(lorenz, states[0]);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& y = states[k];
    const auto k1 = lorenz_rhs(lorenz, y);
    const auto k2 = lorenz_rhs(lorenz, axpy(y, 0.5 * h, k1));
    const auto k3 = lorenz_rhs(lorenz, axpy(y, 0.5 * h, k2));
    const auto k4 = lorenz_rhs(lorenz, axpy(y, h, k3));
    for (int c = 0; c < 3; ++c) {
      states[k + 1][c] =
          y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    derivs[k + 1] = lorenz_rhs(lorenz, states[k + 1]);
  }
  return LorenzTrajectory(lorenz.T, h, std::move(states), std::move(derivs));
}

ReferenceSolution build_reference(const problems::Problem& problem,
                                  const ReferenceOptions& opts) {
  if (const auto* ode = std::get_if<problems::LinearOdeSpec>(&problem)) {
    return *ode;
  }
  if (const auto* burgers = std::get_if<problems::BurgersSpec>(&problem)) {
    return solve_burgers_fd(burgers->nu, opts.burgers_n_grid, burgers->T);
  }
  return solve_lorenz_rk4(std::get<problems::LorenzSpec>(problem),
                          opts.lorenz_h);
}

namespace {

constexpr int kMetricTimes = 256;
constexpr int kMetricXs = 256;

// L2-in-x distance between the shifted network and the reference field at
// one time, midpoint rule on kMetricXs points.
double burgers_l2_at(const problems::Problem& problem,
                     const net::MlpSpec& spec, const net::ParamVector& params,
                     const BurgersField& ref, double t) {
  double acc = 0.0;
  const double dxm = 2.0 / kMetricXs;
  for (int j = 0; j < kMetricXs; ++j) {
    const double x = -1.0 + dxm * (j + 0.5);
    const double input[2] = {t, x};
    const net::EvalJet jet =
        problems::shifted_eval(problem, spec, params, input, net::DerivWant{});
    const double d = jet.value[0] - ref.sample(t, x);
    acc += d * d * dxm;
  }
  return std::sqrt(acc);
}

double trapezoid_integral(const std::vector<double>& ts,
                          const std::vector<double>& vs) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    acc += 0.5 * (vs[i] + vs[i + 1]) * (ts[i + 1] - ts[i]);
  }
  return acc;
}

}  // namespace

ErrorMetrics error_metrics(const problems::Problem& problem,
                           const net::MlpSpec& spec,
                           const net::ParamVector& params,
                           const ReferenceSolution& ref) {
  const double T = problems::horizon(problem);
  std::vector<double> ts(kMetricTimes);
  for (int i = 0; i < kMetricTimes; ++i) {
    ts[static_cast<std::size_t>(i)] = T * i / (kMetricTimes - 1);
  }
  std::vector<double> errs(ts.size());

  ErrorMetrics out;
  if (const auto* ode = std::get_if<problems::LinearOdeSpec>(&ref)) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double input[1] = {ts[i]};
      const net::EvalJet jet =
          problems::shifted_eval(problem, spec, params, input, net::DerivWant{});
      errs[i] = std::fabs(jet.value[0] - exact_linear(*ode, ts[i]));
    }
    out.final_error = errs.back();
  } else if (const auto* field = std::get_if<BurgersField>(&ref)) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      errs[i] = burgers_l2_at(problem, spec, params, *field, ts[i]);
    }
    out.final_error = errs.back();
  } else {
    const auto& traj = std::get<LorenzTrajectory>(ref);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double input[1] = {ts[i]};
      const net::EvalJet jet =
          problems::shifted_eval(problem, spec, params, input, net::DerivWant{});
      const auto want = traj.sample(ts[i]);
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double d = jet.value[static_cast<std::size_t>(k)] - want[static_cast<std::size_t>(k)];
        acc += d * d;
      }
      errs[i] = std::sqrt(acc);
    }
    out.final_error = errs.back();
  }
  out.integral_error = trapezoid_integral(ts, errs);
  return out;
}

}  // namespace pinn::reference
