#include "pinn/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "pinn/prng.hpp"
#include <json.hpp>

namespace pinn::net {

namespace {

// Jet component slots. The active prefix is decided by DerivWant:
// 1 = value, 2 = +dt, 3 = +dx, 4 = +dxx.
constexpr int kVal = 0;
constexpr int kDt = 1;
constexpr int kDx = 2;
constexpr int kDxx = 3;

int ncomp_for(const DerivWant& want) {
  if (want.dxx) return 4;
  if (want.dx) return 3;
  if (want.dt) return 2;
  return 1;
}

std::vector<int> layer_widths(const MlpSpec& spec) {
  std::vector<int> w;
  w.reserve(static_cast<std::size_t>(spec.hidden_layers) + 2);
  w.push_back(spec.input_dim);
  for (int l = 0; l < spec.hidden_layers; ++l) w.push_back(spec.hidden_width);
  w.push_back(spec.output_dim);
  return w;
}

struct Layout {
  std::vector<int> widths;          // input, hidden..., output
  std::vector<std::size_t> w_off;   // weight offset per affine layer
  std::vector<std::size_t> b_off;   // bias offset per affine layer
  std::size_t total = 0;
};

Layout make_layout(const MlpSpec& spec) {
  Layout lay;
  lay.widths = layer_widths(spec);
  const std::size_t n_aff = lay.widths.size() - 1;
  lay.w_off.resize(n_aff);
  lay.b_off.resize(n_aff);
  std::size_t off = 0;
  for (std::size_t l = 0; l < n_aff; ++l) {
    const auto fan_in = static_cast<std::size_t>(lay.widths[l]);
    const auto fan_out = static_cast<std::size_t>(lay.widths[l + 1]);
    lay.w_off[l] = off;
    off += fan_in * fan_out;
    lay.b_off[l] = off;
    off += fan_out;
  }
  lay.total = off;
  return lay;
}

void check_params(const MlpSpec& spec, const ParamVector& params) {
  if (params.size() != param_count(spec)) {
    throw std::invalid_argument("ParamVector length " +
                                std::to_string(params.size()) +
                                " does not match spec (expected " +
                                std::to_string(param_count(spec)) + ")");
  }
}

void check_want(const MlpSpec& spec, const DerivWant& want) {
  if ((want.dx || want.dxx) && spec.input_dim != 2) {
    throw std::domain_error("dx/dxx derivatives require input_dim == 2");
  }
}

// z = W h + b (bias on the value slot only; derivative slots are linear).
void affine_forward(const double* w, const double* b, const double* h,
                    int fan_in, int fan_out, int nc, double* z) {
  for (int i = 0; i < fan_out; ++i) {
    const double* wrow = w + static_cast<std::size_t>(i) * fan_in;
    for (int c = 0; c < nc; ++c) {
      double acc = (c == kVal) ? b[i] : 0.0;
      for (int j = 0; j < fan_in; ++j) acc += wrow[j] * h[j * nc + c];
      z[i * nc + c] = acc;
    }
  }
}

// h = tanh-jet(z):
//   v   = tanh(z0)           s = 1 - v^2
//   h_t = s z_t,  h_x = s z_x,  h_xx = s z_xx - 2 v s z_x^2
void tanh_forward(const double* z, int width, int nc, double* h) {
  for (int i = 0; i < width; ++i) {
    const double* zi = z + static_cast<std::size_t>(i) * nc;
    double* hi = h + static_cast<std::size_t>(i) * nc;
    const double v = std::tanh(zi[kVal]);
    const double s = 1.0 - v * v;
    hi[kVal] = v;
    if (nc > kDt) hi[kDt] = s * zi[kDt];
    if (nc > kDx) hi[kDx] = s * zi[kDx];
    if (nc > kDxx) hi[kDxx] = s * zi[kDxx] - 2.0 * v * s * zi[kDx] * zi[kDx];
  }
}

// Reverse of tanh_forward: hbar -> zbar given the stored (z, h) pair.
void tanh_backward(const double* z, const double* h, const double* hbar,
                   int width, int nc, double* zbar) {
  for (int i = 0; i < width; ++i) {
    const double* zi = z + static_cast<std::size_t>(i) * nc;
    const double* hi = h + static_cast<std::size_t>(i) * nc;
    const double* hb = hbar + static_cast<std::size_t>(i) * nc;
    double* zb = zbar + static_cast<std::size_t>(i) * nc;
    const double v = hi[kVal];
    const double s = 1.0 - v * v;
    double z0 = hb[kVal] * s;
    if (nc > kDt) {
      z0 += hb[kDt] * (-2.0 * v * s) * zi[kDt];
      zb[kDt] = hb[kDt] * s;
    }
    if (nc > kDx) {
      z0 += hb[kDx] * (-2.0 * v * s) * zi[kDx];
      zb[kDx] = hb[kDx] * s;
    }
    if (nc > kDxx) {
      z0 += hb[kDxx] *
            (-2.0 * v * s * zi[kDxx] - 2.0 * s * (s - 2.0 * v * v) * zi[kDx] * zi[kDx]);
      zb[kDx] += hb[kDxx] * (-4.0 * v * s * zi[kDx]);
      zb[kDxx] = hb[kDxx] * s;
    }
    zb[kVal] = z0;
  }
}

// Accumulates wbar/bbar from zbar and the layer input h, and computes hbar.
void affine_backward(const double* w, const double* h, const double* zbar,
                     int fan_in, int fan_out, int nc, double* wbar,
                     double* bbar, double* hbar) {
  for (int j = 0; j < fan_in; ++j) {
    for (int c = 0; c < nc; ++c) hbar[j * nc + c] = 0.0;
  }
  for (int i = 0; i < fan_out; ++i) {
    const double* wrow = w + static_cast<std::size_t>(i) * fan_in;
    double* wbrow = wbar + static_cast<std::size_t>(i) * fan_in;
    const double* zb = zbar + static_cast<std::size_t>(i) * nc;
    bbar[i] += zb[kVal];
    for (int j = 0; j < fan_in; ++j) {
      double acc = 0.0;
      for (int c = 0; c < nc; ++c) {
        acc += zb[c] * h[j * nc + c];
        hbar[j * nc + c] += wrow[j] * zb[c];
      }
      wbrow[j] += acc;
    }
  }
}

// Per-point forward trace: activations A[0..L+1] (input jets, post-tanh
// hidden jets, output jets) and pre-activations Z[1..L] for the hidden
// layers, all width x nc row-major, concatenated.
struct TraceLayout {
  std::vector<std::size_t> a_off;  // per layer 0..L+1
  std::vector<std::size_t> z_off;  // per hidden layer 1..L (index l-1)
  std::size_t size = 0;
};

TraceLayout make_trace_layout(const Layout& lay, int nc) {
  TraceLayout tl;
  const std::size_t n_layers = lay.widths.size();
  tl.a_off.resize(n_layers);
  tl.z_off.resize(n_layers - 2);
  std::size_t off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    tl.a_off[l] = off;
    off += static_cast<std::size_t>(lay.widths[l]) * nc;
  }
  for (std::size_t l = 0; l + 2 < n_layers; ++l) {
    tl.z_off[l] = off;
    off += static_cast<std::size_t>(lay.widths[l + 1]) * nc;
  }
  tl.size = off;
  return tl;
}

void seed_input_jets(std::span<const double> input, int input_dim, int nc,
                     double* a0) {
  for (int j = 0; j < input_dim; ++j) {
    double* aj = a0 + static_cast<std::size_t>(j) * nc;
    aj[kVal] = input[static_cast<std::size_t>(j)];
    if (nc > kDt) aj[kDt] = (j == 0) ? 1.0 : 0.0;
    if (nc > kDx) aj[kDx] = (j == 1) ? 1.0 : 0.0;
    if (nc > kDxx) aj[kDxx] = 0.0;
  }
}

// Runs the jet-augmented forward pass, filling the trace buffer.
void forward_trace(const Layout& lay, const TraceLayout& tl,
                   const ParamVector& params, std::span<const double> input,
                   int nc, double* trace) {
  const std::size_t n_aff = lay.widths.size() - 1;
  seed_input_jets(input, lay.widths[0], nc, trace + tl.a_off[0]);
  for (std::size_t l = 0; l < n_aff; ++l) {
    const int fan_in = lay.widths[l];
    const int fan_out = lay.widths[l + 1];
    const double* w = params.data() + lay.w_off[l];
    const double* b = params.data() + lay.b_off[l];
    const double* h = trace + tl.a_off[l];
    const bool last = (l + 1 == n_aff);
    if (last) {
      affine_forward(w, b, h, fan_in, fan_out, nc, trace + tl.a_off[l + 1]);
    } else {
      double* z = trace + tl.z_off[l];
      affine_forward(w, b, h, fan_in, fan_out, nc, z);
      tanh_forward(z, fan_out, nc, trace + tl.a_off[l + 1]);
    }
  }
}

EvalJet jet_from_trace(const Layout& lay, const TraceLayout& tl,
                       const double* trace, int nc, const DerivWant& want) {
  EvalJet jet;
  const int out_dim = lay.widths.back();
  const double* out = trace + tl.a_off.back();
  jet.value.resize(out_dim);
  if (want.dt) jet.dt.resize(out_dim);
  if (want.dx) jet.dx.resize(out_dim);
  if (want.dxx) jet.dxx.resize(out_dim);
  for (int k = 0; k < out_dim; ++k) {
    const double* ok = out + static_cast<std::size_t>(k) * nc;
    jet.value[static_cast<std::size_t>(k)] = ok[kVal];
    if (want.dt) jet.dt[static_cast<std::size_t>(k)] = ok[kDt];
    if (want.dx) jet.dx[static_cast<std::size_t>(k)] = ok[kDx];
    if (want.dxx) jet.dxx[static_cast<std::size_t>(k)] = ok[kDxx];
  }
  return jet;
}

JetAdjoint zero_adjoint(const EvalJet& jet) {
  JetAdjoint adj;
  adj.value.assign(jet.value.size(), 0.0);
  adj.dt.assign(jet.dt.size(), 0.0);
  adj.dx.assign(jet.dx.size(), 0.0);
  adj.dxx.assign(jet.dxx.size(), 0.0);
  return adj;
}

// Reverse pass for one point; accumulates into grad.
void backward_trace(const Layout& lay, const TraceLayout& tl,
                    const ParamVector& params, const double* trace, int nc,
                    const JetAdjoint& adj, double* grad, double* abar,
                    double* zbar) {
  const std::size_t n_aff = lay.widths.size() - 1;
  const int out_dim = lay.widths.back();

  // Seed output adjoint from the loss functional's jet adjoint.
  for (int k = 0; k < out_dim; ++k) {
    double* ak = abar + static_cast<std::size_t>(k) * nc;
    const auto ks = static_cast<std::size_t>(k);
    ak[kVal] = ks < adj.value.size() ? adj.value[ks] : 0.0;
    if (nc > kDt) ak[kDt] = ks < adj.dt.size() ? adj.dt[ks] : 0.0;
    if (nc > kDx) ak[kDx] = ks < adj.dx.size() ? adj.dx[ks] : 0.0;
    if (nc > kDxx) ak[kDxx] = ks < adj.dxx.size() ? adj.dxx[ks] : 0.0;
  }

  for (std::size_t l = n_aff; l-- > 0;) {
    const int fan_in = lay.widths[l];
    const int fan_out = lay.widths[l + 1];
    const double* w = params.data() + lay.w_off[l];
    const double* h = trace + tl.a_off[l];
    const bool last = (l + 1 == n_aff);
    if (last) {
      // Linear output layer: the z-adjoint is the output adjoint itself.
      std::copy(abar, abar + static_cast<std::size_t>(fan_out) * nc, zbar);
    } else {
      tanh_backward(trace + tl.z_off[l], trace + tl.a_off[l + 1], abar,
                    fan_out, nc, zbar);
    }
    // abar is rewritten in place as the adjoint of the layer input.
    affine_backward(w, h, zbar, fan_in, fan_out, nc, grad + lay.w_off[l],
                    grad + lay.b_off[l], abar);
  }
}

}  // namespace

void validate(const MlpSpec& spec) {
  if (spec.input_dim != 1 && spec.input_dim != 2) {
    throw std::invalid_argument("MlpSpec: input_dim must be 1 or 2");
  }
  if (spec.output_dim != 1 && spec.output_dim != 3) {
    throw std::invalid_argument("MlpSpec: output_dim must be 1 or 3");
  }
  if (spec.hidden_layers < 1 || spec.hidden_width < 1) {
    throw std::invalid_argument(
        "MlpSpec: hidden_layers and hidden_width must be >= 1");
  }
}

bool operator==(const MlpSpec& a, const MlpSpec& b) {
  return a.input_dim == b.input_dim && a.output_dim == b.output_dim &&
         a.hidden_layers == b.hidden_layers && a.hidden_width == b.hidden_width;
}

std::size_t param_count(const MlpSpec& spec) {
  validate(spec);
  return make_layout(spec).total;
}

ParamVector init_glorot(const MlpSpec& spec, std::uint64_t seed) {
  validate(spec);
  const Layout lay = make_layout(spec);
  ParamVector params(lay.total, 0.0);
  SplitMix64 rng(seed);
  const std::size_t n_aff = lay.widths.size() - 1;
  for (std::size_t l = 0; l < n_aff; ++l) {
    const auto fan_in = static_cast<double>(lay.widths[l]);
    const auto fan_out = static_cast<double>(lay.widths[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    const std::size_t nw =
        static_cast<std::size_t>(lay.widths[l]) * lay.widths[l + 1];
    for (std::size_t k = 0; k < nw; ++k) {
      params[lay.w_off[l] + k] = rng.next_uniform(-limit, limit);
    }
    // biases stay zero
  }
  return params;
}

EvalJet evaluate(const MlpSpec& spec, const ParamVector& params,
                 std::span<const double> input, const DerivWant& want) {
  validate(spec);
  check_params(spec, params);
  check_want(spec, want);
  if (input.size() != static_cast<std::size_t>(spec.input_dim)) {
    throw std::domain_error("evaluate: input length " +
                            std::to_string(input.size()) +
                            " does not match input_dim");
  }
  const int nc = ncomp_for(want);
  const Layout lay = make_layout(spec);
  const TraceLayout tl = make_trace_layout(lay, nc);
  std::vector<double> trace(tl.size);
  forward_trace(lay, tl, params, input, nc, trace.data());
  return jet_from_trace(lay, tl, trace.data(), nc, want);
}

LossGradient loss_gradient(const MlpSpec& spec, const ParamVector& params,
                           std::span<const Point> points,
                           const DerivWant& want, const JetLoss& loss) {
  validate(spec);
  check_params(spec, params);
  check_want(spec, want);
  const int nc = ncomp_for(want);
  const Layout lay = make_layout(spec);
  const TraceLayout tl = make_trace_layout(lay, nc);

  std::vector<double> traces(tl.size * points.size());
  std::vector<EvalJet> jets(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (points[p].size() != static_cast<std::size_t>(spec.input_dim)) {
      throw std::domain_error("loss_gradient: point length mismatch");
    }
    double* trace = traces.data() + tl.size * p;
    forward_trace(lay, tl, params, points[p], nc, trace);
    jets[p] = jet_from_trace(lay, tl, trace, nc, want);
  }

  std::vector<JetAdjoint> adjoints(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    adjoints[p] = zero_adjoint(jets[p]);
  }

  LossGradient out;
  out.loss = loss(jets, adjoints);
  out.grad.assign(lay.total, 0.0);

  const std::size_t max_width =
      static_cast<std::size_t>(*std::max_element(lay.widths.begin(), lay.widths.end()));
  std::vector<double> abar(max_width * nc), zbar(max_width * nc);
  for (std::size_t p = 0; p < points.size(); ++p) {
    backward_trace(lay, tl, params, traces.data() + tl.size * p, nc,
                   adjoints[p], out.grad.data(), abar.data(), zbar.data());
  }
  return out;
}

double loss_value(const MlpSpec& spec, const ParamVector& params,
                  std::span<const Point> points, const DerivWant& want,
                  const JetLoss& loss) {
  validate(spec);
  check_params(spec, params);
  check_want(spec, want);
  const int nc = ncomp_for(want);
  const Layout lay = make_layout(spec);
  const TraceLayout tl = make_trace_layout(lay, nc);
  std::vector<double> trace(tl.size);
  std::vector<EvalJet> jets(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (points[p].size() != static_cast<std::size_t>(spec.input_dim)) {
      throw std::domain_error("loss_value: point length mismatch");
    }
    forward_trace(lay, tl, params, points[p], nc, trace.data());
    jets[p] = jet_from_trace(lay, tl, trace.data(), nc, want);
  }
  std::vector<JetAdjoint> scratch(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    scratch[p] = zero_adjoint(jets[p]);
  }
  return loss(jets, scratch);
}

double directional_fd_check(const std::function<double(const ParamVector&)>& f,
                            std::span<const double> grad,
                            const ParamVector& at, int directions, double h,
                            std::uint64_t seed) {
  if (directions < 1) {
    throw std::domain_error("directional_fd_check: directions >= 1");
  }
  if (!(h > 0.0)) {
    throw std::domain_error("directional_fd_check: h must be positive");
  }
  if (grad.size() != at.size()) {
    throw std::invalid_argument("directional_fd_check: shape mismatch");
  }
  SplitMix64 rng(seed);
  double worst = 0.0;
  ParamVector shifted(at.size());
  std::vector<double> dir(at.size());
  for (int d = 0; d < directions; ++d) {
    double norm2 = 0.0;
    for (auto& di : dir) {
      di = rng.next_uniform(-1.0, 1.0);
      norm2 += di * di;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& di : dir) di *= inv;

    for (std::size_t i = 0; i < at.size(); ++i) shifted[i] = at[i] + h * dir[i];
    const double lp = f(shifted);
    for (std::size_t i = 0; i < at.size(); ++i) shifted[i] = at[i] - h * dir[i];
    const double lm = f(shifted);
    const double fd = (lp - lm) / (2.0 * h);

    double gd = 0.0;
    for (std::size_t i = 0; i < at.size(); ++i) gd += grad[i] * dir[i];

    const double denom = std::max(std::fabs(fd), std::fabs(gd));
    const double err =
        denom < 1e-14 ? std::fabs(gd - fd) : std::fabs(gd - fd) / denom;
    worst = std::max(worst, err);
  }
  return worst;
}

double grad_check(const MlpSpec& spec, const ParamVector& params,
                  std::span<const Point> points, const DerivWant& want,
                  const JetLoss& loss, int directions, double h,
                  std::uint64_t seed) {
  const LossGradient lg = loss_gradient(spec, params, points, want, loss);
  return directional_fd_check(
      [&](const ParamVector& theta) {
        return loss_value(spec, theta, points, want, loss);
      },
      lg.grad, params, directions, h, seed);
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  nlohmann::json header = {
      {"spec",
       {{"input_dim", ck.spec.input_dim},
        {"output_dim", ck.spec.output_dim},
        {"hidden_layers", ck.spec.hidden_layers},
        {"hidden_width", ck.spec.hidden_width}}},
      {"seed", ck.seed},
      {"iteration", ck.iteration},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << header.dump() << '\n';
  for (double v : ck.params) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
      bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    }
    out.write(bytes, 8);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = nlohmann::json::parse(line);
  Checkpoint ck;
  ck.spec.input_dim = header.at("spec").at("input_dim").get<int>();
  ck.spec.output_dim = header.at("spec").at("output_dim").get<int>();
  ck.spec.hidden_layers = header.at("spec").at("hidden_layers").get<int>();
  ck.spec.hidden_width = header.at("spec").at("hidden_width").get<int>();
  ck.seed = header.at("seed").get<std::uint64_t>();
  ck.iteration = header.at("iteration").get<std::uint64_t>();
  const std::size_t n = param_count(ck.spec);
  ck.params.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    char bytes[8];
    in.read(bytes, 8);
    if (!in) throw std::runtime_error("truncated checkpoint: " + path.string());
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i]))
              << (8 * i);
    }
    ck.params[k] = std::bit_cast<double>(bits);
  }
  return ck;
}

}  // namespace pinn::net
