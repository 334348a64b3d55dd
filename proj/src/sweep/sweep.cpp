#include "nlcoh/sweep/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "nlcoh/blend/blend.hpp"
#include "nlcoh/error.hpp"
#include "nlcoh/nn/adam.hpp"
#include "nlcoh/simulate/rng.hpp"

namespace nlcoh {

std::vector<double> default_schedule() {
  std::vector<double> s{0.001};
  constexpr int steps = 20;
  for (int i = 0; i < steps; ++i) {
    const double ratio = std::pow(10.0, -2.0 + 4.0 * i / (steps - 1));
    s.push_back(ratio / (1.0 + ratio));
  }
  return s;
}

void SweepConfig::validate() const {
  if (schedule.empty()) throw InvalidInput("lambda schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0 && schedule[i] < 1.0))
      throw InvalidInput("lambda schedule values must lie in (0, 1); entry " + std::to_string(i) + " is " +
                         std::to_string(schedule[i]));
    if (i > 0 && !(schedule[i] > schedule[i - 1]))
      throw InvalidInput("lambda schedule must be strictly increasing at entry " + std::to_string(i));
  }
  if (!(threshold > 0.0)) throw InvalidInput("threshold must be positive");
  if (!(fallback_lambda > 0.0 && fallback_lambda < 1.0)) throw InvalidInput("fallback lambda must lie in (0, 1)");
  if (initial_epochs == 0 || epochs_per_step == 0) throw InvalidInput("epoch counts must be positive");
  if (window == 0) throw InvalidInput("averaging window must be positive");
  if (control_points < 2) throw InvalidInput("K needs at least 2 control points");
  if (!(learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
}

std::vector<double> read_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read schedule " + path.string());
  std::vector<double> s;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    double v = 0.0;
    auto res = std::from_chars(line.data() + first, line.data() + last + 1, v);
    if (res.ec != std::errc{} || res.ptr != line.data() + last + 1)
      throw DataError(path.string() + ": bad lambda '" + line + "'");
    s.push_back(v);
  }
  return s;
}

LambdaSelection select_lambda(std::span<const double> lambdas, std::span<const double> averaged,
                              double threshold, double fallback_lambda) {
  if (lambdas.empty()) throw InvalidInput("lambda schedule is empty");
  if (averaged.size() > lambdas.size()) throw InvalidInput("more losses than schedule steps");
  LambdaSelection sel;
  sel.lambda = fallback_lambda;
  double running_min = 0.0;
  for (std::size_t j = 0; j < averaged.size(); ++j) {
    if (j > 0 && averaged[j] > running_min + threshold) {
      sel.crossing = j;
      sel.chosen = j - 1;
      sel.lambda = lambdas[j - 1];
      return sel;
    }
    running_min = j == 0 ? averaged[0] : std::min(running_min, averaged[j]);
  }
  return sel;
}

LambdaSelection reselect(const SweepTrace& trace, double threshold, double fallback_lambda) {
  std::vector<double> lambdas, vals;
  for (const SweepStep& s : trace.steps) {
    lambdas.push_back(s.lambda);
    vals.push_back(s.val_lx);
  }
  return select_lambda(lambdas, vals, threshold, fallback_lambda);
}

SweepResult run_sweep(const FramedDataset& ds, const SweepConfig& config, std::uint64_t seed,
                      const SweepProgress& progress) {
  config.validate();
  const BlendObjective objective(ds);
  const DatasetSplit& split = ds.manifest.split;
  const auto train_rows = split.train();
  const auto val_rows = split.validation();
  if (ds.manifest.frames < split.n_train + split.n_val)
    throw DataError("dataset has fewer frames than the train and validation splits");

  Conv1dNet net = default_reverse_net();
  net.initialize(seed);
  KCurve k(ds.manifest.length, config.control_points);
  const AdamConfig adam{config.learning_rate};
  AdamState net_opt(net.parameter_count(), adam);
  AdamState k_opt(k.control_points(), adam);
  std::vector<double> net_grad(net.parameter_count()), k_grad(k.control_points());
  const std::uint64_t shuffle_seed = derive_seed(seed, Stream::shuffle);

  SweepResult result;
  SweepTrace& trace = result.trace;
  std::vector<double> averaged;
  std::size_t global_epoch = 0;
  for (std::size_t step = 0; step < config.schedule.size(); ++step) {
    const double lambda = config.schedule[step];
    const std::size_t epochs = step == 0 ? config.initial_epochs : config.epochs_per_step;
    const std::size_t window = std::min(config.window, epochs);
    double val_sum = 0.0, lx_sum = 0.0, ly_sum = 0.0;
    for (std::size_t e = 0; e < epochs; ++e, ++global_epoch) {
      double lx = 0.0, ly = 0.0;
      for (std::size_t row : shuffled_rows(train_rows, shuffle_seed, global_epoch)) {
        const std::size_t one[] = {row};
        const BlendLossTerms t = objective.gradient(net, k, lambda, one, net_grad, k_grad);
        lx += t.l_x;
        ly += t.l_y;
        try {
          adam_step(net_opt, net.parameters(), net_grad);
          adam_step(k_opt, k.raw(), k_grad);
        } catch (const DivergenceError& err) {
          throw DivergenceError(std::string(err.what()) + " (sweep step " + std::to_string(step) + ", lambda " +
                                std::to_string(lambda) + ")");
        }
      }
      const double val = objective.evaluate(net, k, lambda, val_rows).l_x / static_cast<double>(val_rows.size());
      if (!std::isfinite(val))
        throw DivergenceError("validation loss diverged at sweep step " + std::to_string(step));
      trace.epoch_val_lx.push_back(val);
      if (e + window >= epochs) {
        val_sum += val;
        lx_sum += lx / static_cast<double>(train_rows.size());
        ly_sum += ly / static_cast<double>(train_rows.size());
      }
    }
    SweepStep s;
    s.lambda = lambda;
    s.epochs = epochs;
    const double inv = 1.0 / static_cast<double>(window);
    s.val_lx = val_sum * inv;
    s.train_lx = lx_sum * inv;
    s.train_ly = ly_sum * inv;
    s.k_controls.assign(k.raw().begin(), k.raw().end());
    s.net_parameters.assign(net.parameters().begin(), net.parameters().end());
    trace.steps.push_back(std::move(s));
    averaged.push_back(trace.steps.back().val_lx);
    if (progress) progress(trace.steps.back(), step);

    const LambdaSelection sel = select_lambda(config.schedule, averaged, config.threshold, config.fallback_lambda);
    if (sel.crossing && !config.run_to_end) break;
  }

  trace.selection = select_lambda(config.schedule, averaged, config.threshold, config.fallback_lambda);
  result.lambda = trace.selection.lambda;
  result.fallback = !trace.selection.chosen.has_value();
  const SweepStep& pick = result.fallback ? trace.steps.back() : trace.steps[*trace.selection.chosen];
  result.k = k;
  std::copy(pick.k_controls.begin(), pick.k_controls.end(), result.k.raw().begin());
  result.net = net;
  std::copy(pick.net_parameters.begin(), pick.net_parameters.end(), result.net.parameters().begin());
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_sweep_trace_csv(const std::filesystem::path& path, const SweepTrace& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "step,lambda,ratio,epochs,val_lx,train_lx,train_ly\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const SweepStep& s = trace.steps[i];
    out << i << ',' << fmt(s.lambda) << ',' << fmt(s.ratio()) << ',' << s.epochs << ',' << fmt(s.val_lx) << ','
        << fmt(s.train_lx) << ',' << fmt(s.train_ly) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void write_lambda_plot_csv(const std::filesystem::path& path, const SweepTrace& trace) {
  if (trace.steps.empty()) throw InvalidInput("sweep trace is empty");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "kind,lambda,ratio,val_lx\n";
  for (const SweepStep& s : trace.steps)
    out << "trace," << fmt(s.lambda) << ',' << fmt(s.ratio()) << ',' << fmt(s.val_lx) << '\n';
  if (trace.selection.crossing) {
    const SweepStep& s = trace.steps[*trace.selection.crossing];
    out << "crossing," << fmt(s.lambda) << ',' << fmt(s.ratio()) << ',' << fmt(s.val_lx) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace nlcoh
