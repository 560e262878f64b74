#include "pinn/trainer.hpp"

#include <cmath>
#include <stdexcept>

namespace pinn::trainer {

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  }
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw std::invalid_argument("TrainConfig: betas must lie in [0,1)");
  }
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("TrainConfig: epsilon must be > 0");
  }
  if (cfg.history_stride == 0) {
    throw std::invalid_argument("TrainConfig: history_stride must be >= 1");
  }
}

AdamState make_adam_state(std::size_t n_params) {
  return AdamState{std::vector<double>(n_params, 0.0),
                   std::vector<double>(n_params, 0.0), 0};
}

void adam_step(AdamState& state, net::ParamVector& params,
               std::span<const double> grad, const TrainConfig& cfg) {
  if (state.m.size() != params.size() || grad.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    if (!std::isfinite(params[i])) {
      throw DivergedError("adam_step: non-finite parameter", state.step);
    }
  }
}

TrainResult train(const problems::Problem& problem, const net::MlpSpec& spec,
                  const problems::SamplingMode& mode, const TrainConfig& cfg,
                  const reference::ReferenceSolution* oracle) {
  validate(cfg);
  const problems::LossAssembly assembly(problem, spec, mode);

  TrainResult result;
  result.params = net::init_glorot(spec, cfg.seed);
  AdamState state = make_adam_state(result.params.size());

  auto record = [&](std::uint64_t iteration, double loss) {
    TrainRecord rec;
    rec.iteration = iteration;
    rec.loss = loss;
    if (oracle != nullptr) {
      const auto metrics =
          reference::error_metrics(problem, spec, result.params, *oracle);
      rec.final_error = metrics.final_error;
      rec.integral_error = metrics.integral_error;
    }
    result.history.push_back(rec);
  };

  net::ParamVector last_finite = result.params;
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    net::LossGradient lg;
    try {
      lg = assembly.eval(result.params);
      if (it % cfg.history_stride == 0) record(it, lg.loss);
      adam_step(state, result.params, lg.grad, cfg);
    } catch (const DivergedError& err) {
      throw TrainDivergedError(err.what(), it, std::move(last_finite),
                               std::move(result.history));
    }
    last_finite = result.params;
  }
  // Closing record: the loss of the returned parameters.
  try {
    const double closing = assembly.value(result.params);
    if (!std::isfinite(closing)) {
      throw DivergedError("non-finite loss", cfg.iterations);
    }
    record(cfg.iterations, closing);
  } catch (const DivergedError& err) {
    throw TrainDivergedError(err.what(), cfg.iterations, std::move(last_finite),
                             std::move(result.history));
  }
  return result;
}

}  // namespace pinn::trainer
