#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nlcoh/cli/commands.hpp"
#include "nlcoh/error.hpp"

namespace {

using nlcoh::RunConfig;

// CLI flags that map one-to-one onto config keys.
struct Setting {
  std::string flag;
  std::string key;
  std::string help;
  std::string value;
};

class SettingSet {
 public:
  SettingSet(CLI::App* app, std::vector<Setting> settings) : settings_(std::move(settings)) {
    app->add_option("--config", config_path_, "Run config file (key = value); flags override it");
    for (Setting& s : settings_) app->add_option(s.flag, s.value, s.help);
  }

  RunConfig resolve(CLI::App* app) const {
    RunConfig c = config_path_.empty() ? RunConfig{} : nlcoh::read_run_config(config_path_);
    // data and system first, so forward-model flags refine the right preset
    for (const Setting& s : settings_)
      if ((s.key == "data" || s.key == "system") && app->count(s.flag) > 0) nlcoh::apply_setting(c, s.key, s.value);
    nlcoh::infer_system(c);
    for (const Setting& s : settings_)
      if (s.key != "data" && s.key != "system" && app->count(s.flag) > 0) nlcoh::apply_setting(c, s.key, s.value);
    return c;
  }

 private:
  std::vector<Setting> settings_;
  std::string config_path_;
};

std::vector<Setting> data_settings() {
  return {{"--data", "data", "Dataset directory", ""},
          {"--out", "out", "Output directory", ""},
          {"--system", "system", "poly | sat | friction | external (sets forward-model defaults)", ""}};
}

std::vector<Setting> forward_settings() {
  return {{"--kernel-width", "forward.kernel_width", "Forward model kernel width", ""},
          {"--layers", "forward.layers", "Forward model layers", ""},
          {"--features", "forward.features", "Forward model hidden features", ""},
          {"--epochs", "forward.epochs", "Forward model epochs", ""},
          {"--forward-lr", "forward.learning_rate", "Forward model learning rate", ""},
          {"--forward-seed", "forward.seed", "Forward model seed", ""}};
}

std::vector<Setting> sweep_settings() {
  return {{"--schedule", "sweep.schedule", "default, or a file with one lambda per line", ""},
          {"--threshold", "sweep.threshold", "Rise in averaged validation L_x that stops the sweep", ""},
          {"--seed", "sweep.seed", "Sweep seed (reverse network init and shuffling)", ""},
          {"--initial-epochs", "sweep.initial_epochs", "Epochs at the first lambda", ""},
          {"--epochs-per-step", "sweep.epochs_per_step", "Epochs at every later lambda", ""},
          {"--window", "sweep.window", "Epochs averaged per step", ""},
          {"--control-points", "sweep.control_points", "Control points of K", ""},
          {"--lr", "sweep.learning_rate", "Sweep learning rate", ""},
          {"--run-to-end", "sweep.run_to_end", "true: train the whole schedule", ""},
          {"--sensitivity", "sweep.sensitivity", "true: also report the lambda chosen at thresholds 0.005 and 0.02", ""}};
}

template <class... Lists>
std::vector<Setting> join(Lists... lists) {
  std::vector<Setting> out;
  (out.insert(out.end(), lists.begin(), lists.end()), ...);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear coherence estimation from input/output frames"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Simulate a benchmark dataset");
  std::string preset_name = "paper";
  simulate->add_option("--preset", preset_name, "Parameter preset (paper)");
  SettingSet sim_settings(simulate, {{"--system", "system", "poly | sat | friction", ""},
                                     {"--noise", "noise", "none | low | moderate | high | explicit", ""},
                                     {"--noise-scale", "noise_scale", "Noise rms for --noise explicit", ""},
                                     {"--frames", "frames", "Number of frames", ""},
                                     {"--length", "length", "Samples per frame", ""},
                                     {"--lead-in", "lead_in", "Discarded start-up samples per frame", ""},
                                     {"--seed", "seed", "Input seed", ""},
                                     {"--noise-seed", "noise_seed", "Noise seed", ""},
                                     {"--format", "format", "binary | csv", ""},
                                     {"--out", "out", "Dataset directory to create", ""}});

  auto* train = app.add_subcommand("train-forward", "Train the forward model and store y_z with the data");
  SettingSet train_settings(train, join(data_settings(), forward_settings()));

  auto* sweep = app.add_subcommand("sweep", "Run the lambda sweep");
  SettingSet sweep_settings_set(sweep, join(data_settings(), sweep_settings()));

  auto* estimate = app.add_subcommand("estimate", "Forward model, sweep and coherence report");
  SettingSet estimate_settings(estimate, join(data_settings(), forward_settings(), sweep_settings()));

  auto* report = app.add_subcommand("report", "Figure data and text summary of a finished run");
  std::string run_dir;
  report->add_option("--run", run_dir, "Run directory written by estimate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? nlcoh::exit_ok : nlcoh::exit_usage;
  }

  try {
    if (simulate->parsed()) {
      if (preset_name != "paper") throw nlcoh::InvalidInput("unknown preset '" + preset_name + "' (expected paper)");
      nlcoh::cmd_simulate(sim_settings.resolve(simulate), std::cerr);
    } else if (train->parsed()) {
      nlcoh::cmd_train_forward(train_settings.resolve(train), std::cerr);
    } else if (sweep->parsed()) {
      nlcoh::cmd_sweep(sweep_settings_set.resolve(sweep), std::cerr);
    } else if (estimate->parsed()) {
      nlcoh::cmd_estimate(estimate_settings.resolve(estimate), std::cerr);
    } else if (report->parsed()) {
      nlcoh::cmd_report(run_dir, std::cout);
    }
  } catch (const nlcoh::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nlcoh::exit_usage;
  } catch (const nlcoh::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return nlcoh::exit_data;
  } catch (const nlcoh::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return nlcoh::exit_divergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nlcoh::exit_failure;
  }
  return nlcoh::exit_ok;
}
