#ifndef PINN_TRAINER_HPP
#define PINN_TRAINER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pinn/errors.hpp"
#include "pinn/net.hpp"
#include "pinn/problems.hpp"
#include "pinn/reference.hpp"

namespace pinn::trainer {

struct TrainConfig {
  std::uint64_t iterations = 500;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;  // the TensorFlow default, not the 1e-8 of the paper trail
  std::uint64_t seed = 0;
  std::uint64_t history_stride = 10;
};

void validate(const TrainConfig& cfg);  // throws std::invalid_argument

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

AdamState make_adam_state(std::size_t n_params);

// One bias-corrected Adam update in place. Throws DivergedError if the
// update produces a non-finite parameter.
void adam_step(AdamState& state, net::ParamVector& params,
               std::span<const double> grad, const TrainConfig& cfg);

struct TrainRecord {
  std::uint64_t iteration = 0;
  double loss = 0.0;
  std::optional<double> final_error;
  std::optional<double> integral_error;
};

struct TrainResult {
  net::ParamVector params;
  std::vector<TrainRecord> history;
};

// Raised when training hits a non-finite value; carries the last finite
// iterate and the history recorded so far.
class TrainDivergedError : public DivergedError {
 public:
  TrainDivergedError(const std::string& what, std::uint64_t iteration,
                     net::ParamVector last_params,
                     std::vector<TrainRecord> history)
      : DivergedError(what, iteration),
        last_params_(std::move(last_params)),
        history_(std::move(history)) {}

  const net::ParamVector& last_params() const noexcept { return last_params_; }
  const std::vector<TrainRecord>& history() const noexcept { return history_; }

 private:
  net::ParamVector last_params_;
  std::vector<TrainRecord> history_;
};

// Full-batch Adam on the assembled residual loss, starting from
// init_glorot(spec, cfg.seed). History records land every history_stride
// iterations plus iteration 0 and the final iteration; error fields are
// filled when an oracle is supplied. Deterministic: identical inputs give
// bit-identical parameters and history.
TrainResult train(const problems::Problem& problem, const net::MlpSpec& spec,
                  const problems::SamplingMode& mode, const TrainConfig& cfg,
                  const reference::ReferenceSolution* oracle = nullptr);

}  // namespace pinn::trainer

#endif
