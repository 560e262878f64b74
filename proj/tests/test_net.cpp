#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "pinn/net.hpp"
#include "pinn/prng.hpp"
#include "support.hpp"

using namespace pinn::net;
using testsupport::rel_err;

namespace {

// Squared first output at the first point: the simplest smooth functional.
double value_sq_loss(std::span<const EvalJet> jets,
                     std::span<JetAdjoint> adj) {
  const double v = jets[0].value[0];
  adj[0].value[0] += 2.0 * v;
  return v * v;
}

std::vector<Point> one_point(double t) { return {Point{t}}; }

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(validate(MlpSpec{3, 1, 5, 10}), std::invalid_argument);
  CHECK_THROWS_AS(validate(MlpSpec{1, 2, 5, 10}), std::invalid_argument);
  CHECK_THROWS_AS(validate(MlpSpec{1, 1, 0, 10}), std::invalid_argument);
  CHECK(param_count(MlpSpec{1, 1, 5, 10}) == 20 + 4 * 110 + 11);
}

TEST_CASE("init_glorot: deterministic, bounded, zero biases") {
  const MlpSpec spec{1, 1, 5, 10};
  const ParamVector a = init_glorot(spec, 42);
  const ParamVector b = init_glorot(spec, 42);
  CHECK(a == b);
  CHECK(init_glorot(spec, 43) != a);

  // 10 -> 10 layers: |w| < sqrt(6/20) = 0.5477...
  const double limit = std::sqrt(6.0 / 20.0);
  // layer 2 weights occupy [20, 120) in the flat layout
  for (std::size_t i = 20; i < 120; ++i) {
    CHECK(std::fabs(a[i]) <= limit);
  }
  // biases: first layer bias at [10,20), others after each weight block
  const MlpSpec wide{2, 3, 2, 7};
  const ParamVector w = init_glorot(wide, 7);
  // offsets: W0 14, b0 7, W1 49, b1 7, W2 21, b2 3
  auto all_zero = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      if (w[i] != 0.0) return false;
    }
    return true;
  };
  CHECK(all_zero(14, 21));
  CHECK(all_zero(70, 77));
  CHECK(all_zero(98, 101));
}

TEST_CASE("evaluate matches the single-neuron closed form") {
  // U(t) = c tanh(w t + b), params laid out as [w, b, c, b_out].
  const MlpSpec spec{1, 1, 1, 1};
  ParamVector params = {1.5, -0.2, 2.0, 0.0};
  const double t = 0.3;
  const EvalJet jet = evaluate(spec, params, Point{t}, DerivWant{.dt = true});
  const double z = 1.5 * t - 0.2;
  const double v = std::tanh(z);
  CHECK(std::fabs(jet.value[0] - 2.0 * v) < 1e-14);
  CHECK(std::fabs(jet.dt[0] - 2.0 * 1.5 * (1.0 - v * v)) < 1e-14);

  // Two inputs: U(t,x) = c tanh(wt t + wx x + b); checks dx and dxx against
  // tanh' = 1 - tanh^2 and tanh'' = -2 tanh (1 - tanh^2).
  const MlpSpec spec2{2, 1, 1, 1};
  const double wt = 0.7, wx = -1.1, bb = 0.4, c = 1.3;
  ParamVector params2 = {wt, wx, bb, c, 0.0};
  const double x = -0.6;
  const EvalJet jet2 = evaluate(spec2, params2, Point{t, x},
                                DerivWant{.dt = true, .dx = true, .dxx = true});
  const double z2 = wt * t + wx * x + bb;
  const double v2 = std::tanh(z2);
  const double s2 = 1.0 - v2 * v2;
  CHECK(std::fabs(jet2.value[0] - c * v2) < 1e-13);
  CHECK(std::fabs(jet2.dt[0] - c * wt * s2) < 1e-13);
  CHECK(std::fabs(jet2.dx[0] - c * wx * s2) < 1e-13);
  CHECK(std::fabs(jet2.dxx[0] - c * wx * wx * (-2.0 * v2 * s2)) < 1e-13);
}

TEST_CASE("evaluate: zero parameters give the zero function") {
  const MlpSpec spec{2, 1, 3, 8};
  const ParamVector zero(param_count(spec), 0.0);
  const EvalJet jet = evaluate(spec, zero, Point{0.4, 0.2},
                               DerivWant{.dt = true, .dx = true, .dxx = true});
  CHECK(jet.value[0] == 0.0);
  CHECK(jet.dt[0] == 0.0);
  CHECK(jet.dx[0] == 0.0);
  CHECK(jet.dxx[0] == 0.0);
}

TEST_CASE("evaluate rejects mismatched inputs") {
  const MlpSpec spec{1, 1, 2, 4};
  const ParamVector params = init_glorot(spec, 0);
  CHECK_THROWS_AS(evaluate(spec, params, Point{0.1, 0.2}, DerivWant{}),
                  std::domain_error);
  CHECK_THROWS_AS(
      evaluate(spec, params, Point{0.1}, DerivWant{.dt = true, .dx = true}),
      std::domain_error);
}

TEST_CASE("input derivatives match finite differences on a 5x10 net") {
  const MlpSpec spec{1, 1, 5, 10};
  const ParamVector params = init_glorot(spec, 3);
  const double t = 0.37;
  const EvalJet jet = evaluate(spec, params, Point{t}, DerivWant{.dt = true});
  auto value_at = [&](double tt) {
    return evaluate(spec, params, Point{tt}, DerivWant{}).value[0];
  };
  const double h = 1e-5;
  const double fd = (value_at(t + h) - value_at(t - h)) / (2.0 * h);
  CHECK(rel_err(jet.dt[0], fd) < 1e-6);

  const MlpSpec spec2{2, 1, 5, 10};
  const ParamVector params2 = init_glorot(spec2, 5);
  const double x = -0.25;
  const EvalJet jet2 = evaluate(spec2, params2, Point{t, x},
                                DerivWant{.dt = true, .dx = true, .dxx = true});
  auto value2 = [&](double tt, double xx) {
    return evaluate(spec2, params2, Point{tt, xx}, DerivWant{}).value[0];
  };
  const double fdx = (value2(t, x + h) - value2(t, x - h)) / (2.0 * h);
  CHECK(rel_err(jet2.dx[0], fdx) < 1e-6);
  const double h2 = 1e-4;
  const double fdxx =
      (value2(t, x + h2) - 2.0 * value2(t, x) + value2(t, x - h2)) / (h2 * h2);
  CHECK(rel_err(jet2.dxx[0], fdxx) < 1e-4);
}

TEST_CASE("evaluate is bit-deterministic") {
  const MlpSpec spec{2, 3, 4, 12};
  const ParamVector params = init_glorot(spec, 11);
  const auto a = evaluate(spec, params, Point{0.3, 0.7},
                          DerivWant{.dt = true, .dx = true, .dxx = true});
  const auto b = evaluate(spec, params, Point{0.3, 0.7},
                          DerivWant{.dt = true, .dx = true, .dxx = true});
  CHECK(a.value == b.value);
  CHECK(a.dt == b.dt);
  CHECK(a.dx == b.dx);
  CHECK(a.dxx == b.dxx);
}

TEST_CASE("output layer is linear: doubled head doubles every jet slot") {
  const MlpSpec spec{2, 1, 3, 6};
  ParamVector params = init_glorot(spec, 9);
  const auto before = evaluate(spec, params, Point{0.2, 0.5},
                               DerivWant{.dt = true, .dx = true, .dxx = true});
  // final layer: 6 weights + 1 bias at the tail of the layout
  for (std::size_t i = params.size() - 7; i < params.size(); ++i) {
    params[i] *= 2.0;
  }
  const auto after = evaluate(spec, params, Point{0.2, 0.5},
                              DerivWant{.dt = true, .dx = true, .dxx = true});
  CHECK(after.value[0] == 2.0 * before.value[0]);
  CHECK(after.dt[0] == 2.0 * before.dt[0]);
  CHECK(after.dx[0] == 2.0 * before.dx[0]);
  CHECK(after.dxx[0] == 2.0 * before.dxx[0]);
}

TEST_CASE("loss_gradient: zero network, zero gradient") {
  const MlpSpec spec{1, 1, 2, 5};
  const ParamVector zero(param_count(spec), 0.0);
  const auto points = one_point(0.4);
  const auto lg = loss_gradient(spec, zero, points, DerivWant{}, value_sq_loss);
  CHECK(lg.loss == 0.0);
  for (double g : lg.grad) CHECK(g == 0.0);
}

TEST_CASE("loss_gradient matches directional finite differences") {
  const MlpSpec spec{1, 1, 5, 10};
  const ParamVector params = init_glorot(spec, 1);
  const auto points = one_point(0.6);
  const double err = grad_check(spec, params, points, DerivWant{},
                                value_sq_loss, 20, 1e-6, 99);
  CHECK(err < 1e-5);

  // A jet-heavy functional: mixes value, dt, dx, dxx with products.
  const MlpSpec spec2{2, 1, 4, 8};
  const ParamVector params2 = init_glorot(spec2, 2);
  const std::vector<Point> pts2 = {Point{0.1, -0.4}, Point{0.8, 0.3}};
  auto mixed = [](std::span<const EvalJet> jets, std::span<JetAdjoint> adj) {
    double total = 0.0;
    for (std::size_t p = 0; p < jets.size(); ++p) {
      const double v = jets[p].value[0], vt = jets[p].dt[0];
      const double vx = jets[p].dx[0], vxx = jets[p].dxx[0];
      const double r = vt + v * vx - 0.05 * vxx;
      total += r * r;
      const double g = 2.0 * r;
      adj[p].dt[0] += g;
      adj[p].value[0] += g * vx;
      adj[p].dx[0] += g * v;
      adj[p].dxx[0] -= g * 0.05;
    }
    return total;
  };
  const double err2 =
      grad_check(spec2, params2, pts2,
                 DerivWant{.dt = true, .dx = true, .dxx = true}, mixed, 20,
                 1e-6, 7);
  CHECK(err2 < 1e-5);
}

TEST_CASE("loss_gradient scales linearly with the loss") {
  const MlpSpec spec{1, 1, 3, 7};
  const ParamVector params = init_glorot(spec, 21);
  const auto points = one_point(0.25);
  const double kappa = 3.75;
  auto scaled = [kappa](std::span<const EvalJet> jets,
                        std::span<JetAdjoint> adj) {
    const double v = jets[0].value[0];
    adj[0].value[0] += kappa * 2.0 * v;
    return kappa * v * v;
  };
  const auto base = loss_gradient(spec, params, points, DerivWant{}, value_sq_loss);
  const auto big = loss_gradient(spec, params, points, DerivWant{}, scaled);
  CHECK(big.loss == doctest::Approx(kappa * base.loss).epsilon(1e-15));
  for (std::size_t i = 0; i < base.grad.size(); ++i) {
    CHECK(big.grad[i] == doctest::Approx(kappa * base.grad[i]).epsilon(1e-14));
  }
}

TEST_CASE("directional_fd_check: exact for a linear function of theta") {
  pinn::SplitMix64 rng(5);
  ParamVector at(40);
  std::vector<double> coeff(40);
  for (auto& v : at) v = rng.next_uniform(-1.0, 1.0);
  for (auto& c : coeff) c = rng.next_uniform(-2.0, 2.0);
  auto linear = [&coeff](const ParamVector& theta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) acc += coeff[i] * theta[i];
    return acc;
  };
  CHECK(directional_fd_check(linear, coeff, at, 20, 1e-6, 3) <= 1e-10);
}

TEST_CASE("central differences show the O(h^2) trend") {
  const MlpSpec spec{1, 1, 5, 10};
  const ParamVector params = init_glorot(spec, 13);
  const auto points = one_point(0.45);
  const double coarse = grad_check(spec, params, points, DerivWant{},
                                   value_sq_loss, 10, 1e-2, 4);
  const double fine = grad_check(spec, params, points, DerivWant{},
                                 value_sq_loss, 10, 1e-3, 4);
  CHECK(fine < coarse);
  const double finest = grad_check(spec, params, points, DerivWant{},
                                   value_sq_loss, 10, 1e-6, 4);
  CHECK(finest < 1e-5);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  const MlpSpec spec{1, 3, 2, 6};
  Checkpoint ck{spec, 77, 1234, init_glorot(spec, 77)};
  const auto path = std::filesystem::temp_directory_path() / "pinn_ck_test.bin";
  save_checkpoint(path, ck);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.spec == spec);
  CHECK(back.seed == 77);
  CHECK(back.iteration == 1234);
  CHECK(back.params == ck.params);
  std::filesystem::remove(path);
}
