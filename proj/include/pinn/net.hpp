#ifndef PINN_NET_HPP
#define PINN_NET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace pinn::net {

// Fully connected tanh network: `hidden_layers` tanh layers of width
// `hidden_width`, then one linear output layer.
struct MlpSpec {
  int input_dim = 1;      // 1 (t) or 2 (t, x)
  int output_dim = 1;     // 1 or 3
  int hidden_layers = 5;
  int hidden_width = 10;
};

void validate(const MlpSpec& spec);  // throws std::invalid_argument

bool operator==(const MlpSpec& a, const MlpSpec& b);

// Flat trainable state. Layout: for each layer in order, the weight matrix
// row-major (fan_out x fan_in), then the bias vector (fan_out).
using ParamVector = std::vector<double>;

std::size_t param_count(const MlpSpec& spec);

// Glorot-uniform weights, zero biases. Weights are drawn per layer in
// row-major order from SplitMix64(seed), uniform on (-L, L) with
// L = sqrt(6 / (fan_in + fan_out)). Same (spec, seed) gives bit-identical
// parameters on every platform.
ParamVector init_glorot(const MlpSpec& spec, std::uint64_t seed);

// Which input derivatives a forward pass should carry. dxx implies dx; dx
// and dxx require input_dim == 2.
struct DerivWant {
  bool dt = false;
  bool dx = false;
  bool dxx = false;
};

// Network outputs plus requested input derivatives at one point. Requested
// vectors have length output_dim; the others are empty.
struct EvalJet {
  std::vector<double> value;
  std::vector<double> dt;
  std::vector<double> dx;
  std::vector<double> dxx;
};

// Partial derivatives of a scalar loss w.r.t. the components of one EvalJet.
using JetAdjoint = EvalJet;

// One collocation input; length must equal spec.input_dim.
// Convention: input[0] = t, input[1] = x.
using Point = std::vector<double>;

// Exact value and input derivatives at one point, by forward-propagated jets
// (value, dt, dx, dxx triples through every layer) -- no truncation error.
EvalJet evaluate(const MlpSpec& spec, const ParamVector& params,
                 std::span<const double> input, const DerivWant& want);

// A scalar loss over the jets at a fixed point set. The callable returns the
// loss and fills `adjoints` (supplied zero-initialized, shapes matching
// `jets`) with d(loss)/d(jet component).
using JetLoss = std::function<double(std::span<const EvalJet> jets,
                                     std::span<JetAdjoint> adjoints)>;

struct LossGradient {
  double loss = 0.0;
  ParamVector grad;
};

// Loss and its exact parameter gradient: jets forward per point, adjoint
// seeds from the loss functional, reverse accumulation through the
// jet-augmented pass. Points are reduced in index order, so results are
// reproducible bit-for-bit.
LossGradient loss_gradient(const MlpSpec& spec, const ParamVector& params,
                           std::span<const Point> points, const DerivWant& want,
                           const JetLoss& loss);

// Loss only (adjoints are computed into scratch and discarded).
double loss_value(const MlpSpec& spec, const ParamVector& params,
                  std::span<const Point> points, const DerivWant& want,
                  const JetLoss& loss);

// Compares an analytic gradient of f at `at` against central finite
// differences along random unit directions; returns the worst relative
// error.
double directional_fd_check(const std::function<double(const ParamVector&)>& f,
                            std::span<const double> grad,
                            const ParamVector& at, int directions, double h,
                            std::uint64_t seed);

// Worst relative error between loss_gradient and central finite differences
// of the loss along `directions` random unit directions (step h).
double grad_check(const MlpSpec& spec, const ParamVector& params,
                  std::span<const Point> points, const DerivWant& want,
                  const JetLoss& loss, int directions, double h,
                  std::uint64_t seed);

// Checkpoint format: one JSON header line {spec, seed, iteration} followed
// by the raw parameter array as little-endian IEEE-754 doubles.
struct Checkpoint {
  MlpSpec spec;
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  ParamVector params;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pinn::net

#endif
