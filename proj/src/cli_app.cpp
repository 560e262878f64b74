#include "pinn/cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinn/errors.hpp"
#include "pinn/io.hpp"
#include "pinn/net.hpp"
#include "pinn/problems.hpp"
#include "pinn/reference.hpp"
#include "pinn/sampling.hpp"
#include "pinn/theory.hpp"
#include "pinn/trainer.hpp"

namespace pinn::cli {

namespace {

namespace fs = std::filesystem;
using io::format_double;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string problem = "linear";
  double lambda = 2.0;
  double rate = 0.0;
  double T = 1.0;
  std::uint64_t iters = 0;   // resolved per problem when unset
  std::uint64_t seed = 0;
  std::string out = ".";
  int layers = 0;            // resolved per problem when unset
  int width = 0;
  std::uint64_t npoints = 0;
  bool weighted = false;
  std::string rates = "-4:6:1";
  double budget = 100.0;
  int grid = 10000;
  int nx = 1024;
  double h = 1e-3;

  // which flags were given explicitly
  bool iters_set = false, layers_set = false, width_set = false,
       npoints_set = false, weighted_set = false;
};

// Per-problem defaults: linear follows the 5x10 net with 100 quantile
// points and 500 iterations; Burgers a 9x20 net on a 25x50 grid; Lorenz a
// 5x20 net with density weighting and 10'000 iterations.
void resolve_defaults(Options& opt) {
  if (opt.problem == "linear") {
    if (!opt.iters_set) opt.iters = 500;
    if (!opt.layers_set) opt.layers = 5;
    if (!opt.width_set) opt.width = 10;
    if (!opt.npoints_set) opt.npoints = 100;
    if (!opt.weighted_set) opt.weighted = false;
  } else if (opt.problem == "burgers") {
    if (!opt.iters_set) opt.iters = 10000;
    if (!opt.layers_set) opt.layers = 9;
    if (!opt.width_set) opt.width = 20;
    if (!opt.npoints_set) opt.npoints = 50;
    if (!opt.weighted_set) opt.weighted = false;
  } else if (opt.problem == "lorenz") {
    if (!opt.iters_set) opt.iters = 10000;
    if (!opt.layers_set) opt.layers = 5;
    if (!opt.width_set) opt.width = 20;
    if (!opt.npoints_set) opt.npoints = 100;
    if (!opt.weighted_set) opt.weighted = true;
  } else {
    throw CLI::ValidationError("--problem must be linear, burgers or lorenz");
  }
}

problems::Problem make_problem(const Options& opt) {
  if (opt.problem == "linear") {
    problems::LinearOdeSpec ode;
    ode.lambda = opt.lambda;
    ode.T = opt.T;
    return ode;
  }
  if (opt.problem == "burgers") {
    problems::BurgersSpec burgers;
    burgers.T = opt.T;
    burgers.n_time = static_cast<int>(opt.npoints);
    return burgers;
  }
  problems::LorenzSpec lorenz;
  lorenz.T = opt.T;
  lorenz.n_time = static_cast<int>(opt.npoints);
  return lorenz;
}

problems::SamplingMode make_mode(const Options& opt, double rate) {
  const sampling::TruncExpParams law(0.0, opt.T, rate);
  if (opt.weighted) {
    return problems::WeightedUniform{law, opt.npoints};
  }
  return problems::QuantileGrid{law, opt.npoints};
}

trainer::TrainConfig make_train_config(const Options& opt) {
  trainer::TrainConfig cfg;
  cfg.iterations = opt.iters;
  cfg.seed = opt.seed;
  return cfg;
}

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--problem", opt.problem, "Benchmark: linear|burgers|lorenz")
      ->check(CLI::IsMember({"linear", "burgers", "lorenz"}));
  cmd->add_option("--lambda", opt.lambda, "Growth rate of the linear ODE");
  cmd->add_option("--rate", opt.rate, "Truncated-exponential sampling rate r");
  cmd->add_option("--T", opt.T, "Time horizon");
  cmd->add_option("--iters", opt.iters, "Training iterations")
      ->each([&](const std::string&) { opt.iters_set = true; });
  cmd->add_option("--seed", opt.seed, "Initialization seed");
  cmd->add_option("--out", opt.out, "Output directory");
  cmd->add_option("--layers", opt.layers, "Hidden tanh layers")
      ->each([&](const std::string&) { opt.layers_set = true; });
  cmd->add_option("--width", opt.width, "Neurons per hidden layer")
      ->each([&](const std::string&) { opt.width_set = true; });
  cmd->add_option("--npoints", opt.npoints, "Time collocation points")
      ->each([&](const std::string&) { opt.npoints_set = true; });
  cmd->add_flag("--weighted,!--no-weighted", opt.weighted,
                "Uniform grid weighted by the sampling density instead of "
                "quantile collocation (Lorenz default)")
      ->each([&](const std::string&) { opt.weighted_set = true; });
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

std::vector<double> parse_rate_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw CLI::ValidationError("--rates expects lo:hi:step with step > 0");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::vector<double> rates(count);
  for (std::size_t k = 0; k < count; ++k) rates[k] = parts[0] + parts[2] * static_cast<double>(k);
  return rates;
}

void write_history_csv(const fs::path& path,
                       const std::vector<trainer::TrainRecord>& history) {
  std::ofstream out = open_out(path);
  out << "iteration,loss,final_error,integral_error\n";
  for (const auto& rec : history) {
    out << rec.iteration << ',' << format_double(rec.loss) << ',';
    if (rec.final_error) out << format_double(*rec.final_error);
    out << ',';
    if (rec.integral_error) out << format_double(*rec.integral_error);
    out << '\n';
  }
}

int cmd_train(Options& opt) {
  resolve_defaults(opt);
  const problems::Problem problem = make_problem(opt);
  const net::MlpSpec spec = problems::mlp_for(problem, opt.layers, opt.width);
  const problems::SamplingMode mode = make_mode(opt, opt.rate);
  const trainer::TrainConfig cfg = make_train_config(opt);
  const reference::ReferenceSolution oracle =
      reference::build_reference(problem);

  fs::create_directories(opt.out);
  try {
    const trainer::TrainResult result =
        trainer::train(problem, spec, mode, cfg, &oracle);
    write_history_csv(fs::path(opt.out) / "history.csv", result.history);
    net::save_checkpoint(fs::path(opt.out) / "checkpoint.bin",
                         {spec, opt.seed, opt.iters, result.params});
    const auto& last = result.history.back();
    nlohmann::json summary = {
        {"final_error", last.final_error.value()},
        {"integral_error", last.integral_error.value()},
        {"final_loss", last.loss},
    };
    std::ofstream out = open_out(fs::path(opt.out) / "summary.json");
    out << summary.dump(2) << '\n';
    std::cout << summary.dump(2) << std::endl;
    return kExitOk;
  } catch (const trainer::TrainDivergedError& err) {
    write_history_csv(fs::path(opt.out) / "history.csv", err.history());
    std::cerr << "training diverged at iteration " << err.iteration() << ": "
              << err.what() << std::endl;
    return kExitNumerical;
  }
}

int cmd_sweep(Options& opt) {
  resolve_defaults(opt);
  const problems::Problem problem = make_problem(opt);
  const net::MlpSpec spec = problems::mlp_for(problem, opt.layers, opt.width);
  const trainer::TrainConfig cfg = make_train_config(opt);
  const reference::ReferenceSolution oracle =
      reference::build_reference(problem);
  const std::vector<double> rates = parse_rate_range(opt.rates);

  struct Row {
    double rate;
    bool diverged = false;
    double final_error = 0.0, integral_error = 0.0, final_loss = 0.0;
  };
  std::vector<Row> rows;
  rows.reserve(rates.size());
  for (const double rate : rates) {
    Row row{rate};
    try {
      const trainer::TrainResult result =
          trainer::train(problem, spec, make_mode(opt, rate), cfg, nullptr);
      const auto metrics =
          reference::error_metrics(problem, spec, result.params, oracle);
      row.final_error = metrics.final_error;
      row.integral_error = metrics.integral_error;
      row.final_loss = result.history.back().loss;
    } catch (const trainer::TrainDivergedError&) {
      row.diverged = true;
    }
    rows.push_back(row);
  }

  fs::create_directories(opt.out);
  std::ofstream out = open_out(fs::path(opt.out) / "sweep.csv");
  out << "rate,final_error,integral_error,final_loss,iterations,seed\n";
  std::optional<double> best_rate;
  double best_error = 0.0;
  for (const Row& row : rows) {
    out << format_double(row.rate) << ',';
    if (row.diverged) {
      out << "diverged,diverged,diverged";
    } else {
      out << format_double(row.final_error) << ','
          << format_double(row.integral_error) << ','
          << format_double(row.final_loss);
      if (!best_rate || row.final_error < best_error) {
        best_rate = row.rate;
        best_error = row.final_error;
      }
    }
    out << ',' << opt.iters << ',' << opt.seed << '\n';
  }
  out << "# argmin_rate=" << (best_rate ? format_double(*best_rate) : "none")
      << '\n';
  if (best_rate) {
    std::cout << "argmin_rate=" << format_double(*best_rate)
              << " final_error=" << format_double(best_error) << std::endl;
  }
  return kExitOk;
}

int cmd_theory(Options& opt) {
  const double lam = opt.lambda;
  const double T = opt.T;
  const double B = opt.budget;
  if (!(T > 0.0) || !(B > 0.0)) {
    throw CLI::ValidationError("--T and --budget must be positive");
  }

  const double bound = theory::error_bound(lam, T, B);
  const theory::BudgetProblem bp{lam, T, B, opt.grid};
  const auto oracle = theory::discrete_budget_oracle(
      bp, [lam, T](double t) { return std::exp(lam * (T - t)); });

  std::vector<double> rates;
  for (double r = -6.0; r <= 6.0 + 1e-9; r += 0.05) rates.push_back(r);
  std::vector<double> errors(rates.size());
  double best_rate = rates.front();
  double best_error = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const sampling::TruncExpParams law(0.0, T, rates[i]);
    errors[i] = theory::induced_error_for_density(
        [&law](double t) { return sampling::density(law, t); }, lam, T, B);
    if (i == 0 || errors[i] < best_error) {
      best_error = errors[i];
      best_rate = rates[i];
    }
  }

  fs::create_directories(opt.out);
  std::ofstream out = open_out(fs::path(opt.out) / "theory.csv");
  out << "# error_bound=" << format_double(bound) << '\n';
  out << "# discrete_oracle_min_error=" << format_double(oracle.min_error)
      << '\n';
  out << "# argmin_rate=" << format_double(best_rate) << '\n';
  out << "rate,induced_error\n";
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out << format_double(rates[i]) << ',' << format_double(errors[i]) << '\n';
  }
  std::cout << "error_bound=" << format_double(bound)
            << " discrete_oracle_min_error=" << format_double(oracle.min_error)
            << " argmin_rate=" << format_double(best_rate) << std::endl;
  return kExitOk;
}

int cmd_reference(Options& opt) {
  resolve_defaults(opt);
  const problems::Problem problem = make_problem(opt);
  fs::create_directories(opt.out);
  std::ofstream out = open_out(fs::path(opt.out) / "reference.csv");

  const std::size_t nt = std::max<std::uint64_t>(opt.npoints_set ? opt.npoints : 101, 2);
  if (const auto* ode = std::get_if<problems::LinearOdeSpec>(&problem)) {
    out << "t,u\n";
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = ode->T * static_cast<double>(i) / static_cast<double>(nt - 1);
      out << format_double(t) << ',' << format_double(reference::exact_linear(*ode, t))
          << '\n';
    }
    return kExitOk;
  }
  if (const auto* burgers = std::get_if<problems::BurgersSpec>(&problem)) {
    const auto field = reference::solve_burgers_fd(burgers->nu, opt.nx, burgers->T);
    out << "t,x,u\n";
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = burgers->T * static_cast<double>(i) / static_cast<double>(nt - 1);
      for (std::size_t j = 0; j < nt; ++j) {
        const double x = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(nt - 1);
        out << format_double(t) << ',' << format_double(x) << ','
            << format_double(field.sample(t, x)) << '\n';
      }
    }
    return kExitOk;
  }
  const auto& lorenz = std::get<problems::LorenzSpec>(problem);
  const auto traj = reference::solve_lorenz_rk4(lorenz, opt.h);
  out << "t,x,y,z\n";
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = lorenz.T * static_cast<double>(i) / static_cast<double>(nt - 1);
    const auto y = traj.sample(t);
    out << format_double(t) << ',' << format_double(y[0]) << ','
        << format_double(y[1]) << ',' << format_double(y[2]) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "Physics-informed neural network trainer with truncated-exponential "
      "time sampling, plus numerical checks of the sampling optimality "
      "theory"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* train = app.add_subcommand("train", "Train one network");
  add_common_flags(train, opt);
  CLI::App* sweep =
      app.add_subcommand("sweep", "Train one network per sampling rate");
  add_common_flags(sweep, opt);
  sweep->add_option("--rates", opt.rates, "Rate range lo:hi:step");
  CLI::App* theory_cmd = app.add_subcommand(
      "theory", "Verify the optimal-sampling theory numerically");
  theory_cmd->add_option("--lambda", opt.lambda, "Growth rate");
  theory_cmd->add_option("--T", opt.T, "Time horizon");
  theory_cmd->add_option("--budget", opt.budget, "Computational budget B");
  theory_cmd->add_option("--grid", opt.grid, "Discretization size")
      ->check(CLI::PositiveNumber);
  theory_cmd->add_option("--out", opt.out, "Output directory");
  CLI::App* ref = app.add_subcommand("reference", "Dump an oracle solution");
  add_common_flags(ref, opt);
  ref->add_option("--nx", opt.nx, "Burgers solver intervals")
      ->check(CLI::PositiveNumber);
  ref->add_option("--h", opt.h, "Lorenz RK4 step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (train->parsed()) return cmd_train(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (theory_cmd->parsed()) return cmd_theory(opt);
    return cmd_reference(opt);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const DivergedError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid arguments: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitNumerical;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("pinnexp");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace pinn::cli
