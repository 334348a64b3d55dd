// Acceptance suite: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Exits nonzero when any selected criterion fails.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlcoh/blend/blend.hpp"
#include "nlcoh/blend/kcurve.hpp"
#include "nlcoh/cli/commands.hpp"
#include "nlcoh/cli/run_config.hpp"
#include "nlcoh/coherence/coherence.hpp"
#include "nlcoh/nn/conv_net.hpp"
#include "nlcoh/signals/fft.hpp"
#include "nlcoh/signals/spectra.hpp"
#include "nlcoh/simulate/dataset.hpp"
#include "nlcoh/simulate/oscillator.hpp"

namespace fs = std::filesystem;
using namespace nlcoh;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int precision = 4) {
  std::ostringstream o;
  o.precision(precision);
  o << v;
  return o.str();
}

std::complex<double> complex_normal(std::mt19937_64& g, double power) {
  std::normal_distribution<double> d(0.0, std::sqrt(power / 2.0));
  const double re = d(g);
  return {re, d(g)};
}

// 1. Closed-form K against a brute-force grid search of the Monte-Carlo blend
// error. Error magnitudes are stratified (exponential quantiles) and every
// noise draw is paired with its negation; both leave the distributions
// untouched and keep the sampling error of the argmin far below the grid step.
Outcome optimal_k_oracle() {
  constexpr std::size_t pairs = 50, bins = 8, samples = 1 << 15;
  constexpr double grid = 1e-3;
  std::mt19937_64 g(101);
  std::uniform_real_distribution<double> u01(0.0, 1.0), log_psd(-2.0, 2.0);
  const auto stratified_power = [&](double psd) {
    std::vector<double> p(samples);
    for (std::size_t i = 0; i < samples; ++i)
      p[i] = -psd * std::log1p(-(static_cast<double>(i) + u01(g)) / static_cast<double>(samples));
    std::shuffle(p.begin(), p.end(), g);
    return p;
  };

  double worst = 0.0;
  std::size_t failures = 0;
  for (std::size_t pair = 0; pair < pairs; ++pair) {
    std::vector<double> s_nn(bins), s_zz(bins);
    for (std::size_t j = 0; j < bins; ++j) {
      s_nn[j] = std::pow(10.0, log_psd(g));
      s_zz[j] = std::pow(10.0, log_psd(g));
    }
    const OptimalK closed = optimal_k_closed_form(s_nn, s_zz);
    for (std::size_t j = 0; j < bins; ++j) {
      const auto pn = stratified_power(s_nn[j]);
      const auto pz = stratified_power(s_zz[j]);
      // The sample mean of |K En + (1-K) Ez|^2 is K^2 a + (1-K)^2 b + 2K(1-K) c
      // with the sample moments below, so the grid search is exact and cheap.
      double a = 0.0, b = 0.0, c = 0.0;
      for (std::size_t i = 0; i < samples; ++i) {
        const Complex n = std::polar(std::sqrt(pn[i]), 2.0 * M_PI * u01(g));
        const Complex z = std::polar(std::sqrt(pz[i]), 2.0 * M_PI * u01(g));
        for (const Complex& e : {n, -n}) {
          a += std::norm(e);
          b += std::norm(z);
          c += (e * std::conj(z)).real();
        }
      }
      double best_k = 0.0, best_cost = INFINITY;
      for (int step = 0; step <= 1000; ++step) {
        const double k = step * grid;
        const double cost = k * k * a + (1.0 - k) * (1.0 - k) * b + 2.0 * k * (1.0 - k) * c;
        if (cost < best_cost) {
          best_cost = cost;
          best_k = k;
        }
      }
      const double err = std::abs(best_k - closed.k[j]);
      worst = std::max(worst, err);
      if (err > grid) ++failures;
    }
  }
  return {failures == 0, "max |K - grid argmin| = " + num(worst) + " over " + std::to_string(pairs * bins) +
                             " bins (tol 1e-3)"};
}

// 2. S_yy and gamma^2 from the true error ratio on synthetic spectra with a
// model error correlated with Y and independent measurement noise.
Outcome coherence_chain_identity() {
  constexpr std::size_t frames = 10000, bins = 32;
  std::mt19937_64 g(202);
  std::uniform_real_distribution<double> u(0.2, 5.0), r(0.1, 0.6);
  std::vector<double> s_yy(bins), s_en(bins), s_ez(bins), rho(bins), s_ind(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    s_yy[k] = u(g);
    s_en[k] = u(g) * s_yy[k] / 10.0;
    rho[k] = r(g);
    s_ind[k] = 0.3 * u(g);
    s_ez[k] = rho[k] * rho[k] * s_yy[k] + s_ind[k];
  }
  std::vector<SpectrumFrame> yn(frames), yz(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    yn[i].bins.resize(bins);
    yz[i].bins.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const Complex y = complex_normal(g, s_yy[k]);
      yn[i].bins[k] = y + complex_normal(g, s_en[k]);
      yz[i].bins[k] = y - rho[k] * y + complex_normal(g, s_ind[k]);
    }
  }
  std::vector<double> k(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    const double c = s_ez[j] / s_en[j];
    k[j] = c / (1.0 + c);
  }
  const ErrorRatio c = error_ratio(k);
  const RealCurve s_nn = power_spectral_density(yn);
  const SignalPsdEstimate est =
      estimate_signal_psd(c.c, c.infinite, s_nn, power_spectral_density(yz), cross_spectral_density(yn, yz));
  const NonlinearCoherence gamma = nonlinear_coherence(est.psd, s_nn);
  double err = 0.0;
  for (std::size_t j = 0; j < bins; ++j) err += std::abs(gamma.gamma2.values[j] - s_yy[j] / (s_yy[j] + s_en[j]));
  err /= static_cast<double>(bins);
  return {err < 0.02, "band-mean |gamma2 - true| = " + num(err) + " (tol 0.02)"};
}

// Free decay of the linear benchmark oscillator against its analytic solution.
double decay_error(const OscillatorSpec& s, double dt, double duration, bool relative) {
  const double wd = std::sqrt(s.alpha1 - s.zeta * s.zeta);
  OscillatorState st{1.0, 0.0};
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    st = rk4_step(st, dt, s, {});
    const double t = static_cast<double>(i) * dt;
    const double exact = std::exp(-s.zeta * t) * (std::cos(wd * t) + s.zeta / wd * std::sin(wd * t));
    err = std::max(err, std::abs(st.y - exact));
    peak = std::max(peak, std::abs(exact));
  }
  return relative ? err / std::max(peak, 1.0) : err;
}

// 3. Convergence order and absolute accuracy of the integrator.
Outcome rk4_order() {
  OscillatorSpec s = preset(SystemKind::polynomial_stiffness);
  s.alpha2 = 0.0;
  s.alpha3 = 0.0;
  const double e1 = decay_error(s, 0.01, 1.0, false);
  const double e2 = decay_error(s, 0.005, 1.0, false);
  const double e3 = decay_error(s, 0.0025, 1.0, false);
  const double r1 = e1 / e2, r2 = e2 / e3;
  const double period = 2.0 * M_PI / std::sqrt(s.alpha1 - s.zeta * s.zeta);
  const double rel = decay_error(s, s.dt, period, true);
  const bool order_ok = std::abs(r1 - 16.0) <= 3.0 && std::abs(r2 - 16.0) <= 3.0;
  const bool accuracy_ok = rel < 1e-6;
  return {order_ok && accuracy_ok, "error ratios " + num(r1) + ", " + num(r2) + " (16 +- 3); relative error over one period at dt " +
                                       num(s.dt) + " = " + num(rel, 3) + " (tol 1e-6)"};
}

// 4. Directional derivative of the blend objective, through the transforms,
// the blend and the reverse network, against central differences.
Outcome gradient_check() {
  constexpr std::size_t m = 256;
  FramedDataset ds = simulate_dataset(preset(SystemKind::polynomial_stiffness), 24, m, 404, {}, 300);
  NoiseSpec noise;
  noise.level = NoiseLevel::moderate;
  noise.seed = 405;
  ds = add_output_noise(std::move(ds), noise);
  ds.y_z = ds.y;
  std::mt19937_64 g(406);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (double& v : ds.y_z.data()) v *= 0.9;
  for (std::size_t i = 0; i < ds.y_z.data().size(); ++i) ds.y_z.data()[i] += 0.05 * ds.y_n.data()[i] * nd(g);

  const BlendObjective obj(ds);
  Conv1dNet net = default_reverse_net();
  net.initialize(407);
  KCurve k(m, 50);
  for (double& v : k.raw()) v = nd(g);
  const std::vector<std::size_t> rows = {0, 3, 7};

  double worst = 0.0;
  for (double lambda : {0.0, 0.3, 0.9}) {
    std::vector<double> gn(net.parameter_count()), gk(k.control_points());
    obj.gradient(net, k, lambda, rows, gn, gk);
    std::vector<double> dn(gn.size()), dk(gk.size());
    double analytic = 0.0;
    for (std::size_t i = 0; i < dn.size(); ++i) analytic += gn[i] * (dn[i] = nd(g));
    for (std::size_t i = 0; i < dk.size(); ++i) analytic += gk[i] * (dk[i] = nd(g));
    const auto loss = [&](double h) {
      Conv1dNet n2 = net;
      KCurve k2 = k;
      for (std::size_t i = 0; i < dn.size(); ++i) n2.parameters()[i] += h * dn[i];
      for (std::size_t i = 0; i < dk.size(); ++i) k2.raw()[i] += h * dk[i];
      return obj.evaluate(n2, k2, lambda, rows).total();
    };
    const double h = 1e-5;
    const double fd = (loss(h) - loss(-h)) / (2.0 * h);
    worst = std::max(worst, std::abs(analytic - fd) / std::max(std::abs(fd), 1e-12));
  }
  return {worst < 1e-4, "max relative difference = " + num(worst, 3) + " (tol 1e-4)"};
}

struct Workspace {
  fs::path root;
  std::ofstream log;

  explicit Workspace(fs::path dir) : root(std::move(dir)) {
    fs::create_directories(root);
    log.open(root / "acceptance.log", std::ios::app);
  }

  RunConfig config(const std::string& system, NoiseLevel noise, const std::string& name) {
    RunConfig c;
    c.system = system;
    c.noise = noise;
    c.data = root / name / "data";
    c.out = root / name / "run";
    return c;
  }

  // Simulates unless the directory already holds data from the same config.
  void simulate(const RunConfig& c) {
    const fs::path cfg = c.data / "simulate.cfg";
    RunConfig sim = c;
    sim.out = c.data;
    if (fs::exists(cfg)) {
      RunConfig stored = read_run_config(cfg);
      stored.data = sim.data = c.data;
      if (serialize(stored) == serialize(sim)) return;
      fs::remove_all(c.data);
    }
    cmd_simulate(sim, log);
  }
};

const std::vector<std::pair<std::string, SystemKind>> systems = {{"poly", SystemKind::polynomial_stiffness},
                                                                  {"sat", SystemKind::saturating_stiffness},
                                                                  {"friction", SystemKind::coulomb_friction}};

// 5. Share of the noise-free response captured by the equivalent linear
// system and by the forward network trained on 10 frames.
Outcome capture_fractions(Workspace& w) {
  const std::map<std::string, std::pair<double, double>> target = {
      {"poly", {0.88, 0.94}}, {"sat", {0.58, 0.65}}, {"friction", {0.91, 0.88}}};
  bool pass = true;
  std::string detail;
  for (const auto& [name, kind] : systems) {
    RunConfig c = w.config(name, NoiseLevel::none, name + "_none");
    w.simulate(c);
    const FramedDataset ds = load_dataset(c.data);
    const double lin = linearized_response(ds, preset(kind)).capture_fraction;
    std::cerr << "  " << name << ": linearized capture " << lin << ", training forward model\n";
    const ForwardModelResult fwd = cmd_train_forward(c, w.log);
    const double cnn = fwd.capture_fraction.value_or(NAN);
    const auto [lin_t, cnn_t] = target.at(name);
    const bool ok = std::abs(lin - lin_t) <= 0.05 && std::abs(cnn - cnn_t) <= 0.07;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + name + " linear " + num(lin, 3) + " (" + num(lin_t) + "+-0.05) cnn " +
              num(cnn, 3) + " (" + num(cnn_t) + "+-0.07)";
  }
  return {pass, detail};
}

CoherenceSummary estimate_and_report(Workspace& w, const RunConfig& c) {
  const CoherenceSummary s = cmd_estimate(c, w.log);
  cmd_report(c.out, w.log);
  return s;
}

// 6. End-to-end estimates against the simulator's true coherence.
Outcome end_to_end(Workspace& w) {
  bool pass = true;
  std::string detail;
  for (const auto& [name, kind] : systems) {
    for (NoiseLevel level : {NoiseLevel::low, NoiseLevel::moderate}) {
      const std::string tag = name + "_" + std::string(noise_level_name(level));
      RunConfig c = w.config(name, level, tag);
      w.simulate(c);
      std::cerr << "  " << tag << '\n';
      const CoherenceSummary s = estimate_and_report(w, c);
      const double err = s.band_mean_abs_error.value_or(INFINITY);
      const bool ok = err < 0.10 && s.band_mean_improvement >= 0.0 && s.max_raw_estimate <= 1.02;
      pass = pass && ok;
      detail += (detail.empty() ? "" : "; ") + tag + " err " + num(err, 3) + " gain " + num(s.band_mean_improvement, 3) +
                " raw max " + num(s.max_raw_estimate, 4) + (ok ? "" : " [fail]");
    }
  }
  RunConfig c = w.config("sat", NoiseLevel::high, "sat_high");
  w.simulate(c);
  std::cerr << "  sat_high\n";
  const CoherenceSummary s = estimate_and_report(w, c);
  const CoherenceReport r = read_report_csv(c.out / "coherence.csv");
  double worst_below = INFINITY, worst_above = -INFINITY;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (!r.in_band[j]) continue;
    worst_below = std::min(worst_below, r.gamma2[j] - (r.lower_bound[j] - 0.05));
    worst_above = std::max(worst_above, r.gamma2[j]);
  }
  const bool ok = worst_below >= 0.0 && worst_above <= 1.0;
  pass = pass && ok;
  detail += "; sat_high err " + num(s.band_mean_abs_error.value_or(NAN), 3) + " band-mean est - lb " +
            num(s.band_mean_improvement, 3) + " per-bin min(est - (lb - 0.05)) " +
            num(worst_below, 3) + " max est " + num(worst_above, 4) + (ok ? "" : " [fail]");
  return {pass, detail};
}

// 7. Without added noise the sweep runs to the end and the estimate is near 1.
Outcome noiseless(Workspace& w) {
  RunConfig c = w.config("poly", NoiseLevel::none, "poly_none");
  w.simulate(c);
  if (!load_dataset(c.data).has_forward_prediction()) cmd_train_forward(c, w.log);
  const CoherenceSummary s = estimate_and_report(w, c);
  const bool ok = std::abs(s.lambda - 0.99) < 1e-9 && s.band_mean_estimate >= 0.97;
  return {ok, "lambda " + num(s.lambda, 6) + " (0.99), band-mean estimate " + num(s.band_mean_estimate, 4) + " (>= 0.97)"};
}

// 8. Two repeats of the same inputs with independent noise at 1:1 power.
Outcome controlled_inputs() {
  const OscillatorSpec spec = preset(SystemKind::polynomial_stiffness);
  const FramedDataset ds = simulate_dataset(spec, 1000, 6000, 808, {}, 1000);
  double power = 0.0;
  for (double v : ds.y.data()) power += v * v;
  const double rms = std::sqrt(power / static_cast<double>(ds.y.data().size()));
  FrameSet a = ds.y, b = ds.y;
  for (std::size_t i = 0; i < ds.y.frames(); ++i) {
    const TimeFrame na = bandlimited_noise(rms, spec.band, ds.y.length(), spec.dt, 2 * i + 1000);
    const TimeFrame nb = bandlimited_noise(rms, spec.band, ds.y.length(), spec.dt, 2 * i + 1001);
    for (std::size_t t = 0; t < ds.y.length(); ++t) {
      a.frame(i)[t] += na.samples[t];
      b.frame(i)[t] += nb.samples[t];
    }
  }
  const RealCurve truth = power_spectral_density(half_spectra(ds.y));
  const RealCurve est = controlled_inputs_psd(half_spectra(a), half_spectra(b));
  const double peak = *std::max_element(truth.values.begin(), truth.values.end());
  double worst = 0.0;
  std::size_t bins = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (truth.values[j] < 0.5 * peak) continue;
    ++bins;
    worst = std::max(worst, std::abs(est.values[j] / truth.values[j] - 1.0));
  }
  return {worst < 0.10, "max relative S_yy error " + num(worst, 3) + " over " + std::to_string(bins) +
                            " resonance bins (tol 0.10)"};
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 9. Two independent runs of simulate + estimate from the same config.
Outcome determinism(Workspace& w) {
  std::vector<std::string> compared;
  bool same = true;
  std::vector<fs::path> dirs;
  for (int rep = 0; rep < 2; ++rep) {
    RunConfig c = w.config("friction", NoiseLevel::moderate, "determinism_" + std::to_string(rep));
    fs::remove_all(c.data.parent_path());
    c.frames = 200;
    c.forward = forward_preset(SystemKind::coulomb_friction);
    c.forward->epochs = 30;
    c.sweep.initial_epochs = 60;
    c.sweep.epochs_per_step = 10;
    c.sweep.window = 10;
    w.simulate(c);
    estimate_and_report(w, c);
    dirs.push_back(c.data.parent_path());
  }
  for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dirs[0]);
    const std::string name = rel.filename().string();
    if (name == "run.cfg" || name == "simulate.cfg" || name == "manifest.json") continue;  // hold their own paths
    compared.push_back(rel.string());
    if (file_bytes(entry.path()) != file_bytes(dirs[1] / rel)) {
      same = false;
      compared.back() += " [differs]";
    }
  }
  const bool has_core = std::any_of(compared.begin(), compared.end(),
                                    [](const std::string& s) { return s.find("kcurve.csv") != std::string::npos; });
  std::string differing;
  for (const auto& s : compared)
    if (s.find("[differs]") != std::string::npos) differing += " " + s;
  return {same && has_core, std::to_string(compared.size()) + " artifacts compared byte for byte" +
                                (differing.empty() ? "" : ", differing:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  std::string work = (fs::temp_directory_path() / "nlcoh_acceptance").string();
  app.add_option("--only", only, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--work", work, "Directory for simulated datasets and run outputs");
  CLI11_PARSE(app, argc, argv);
  if (only.empty()) only = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  Workspace w(work);
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"optimal-K oracle", optimal_k_oracle}},
      {2, {"coherence chain identity", coherence_chain_identity}},
      {3, {"RK4 order and accuracy", rk4_order}},
      {4, {"full-pipeline gradient", gradient_check}},
      {5, {"capture fractions", [&] { return capture_fractions(w); }}},
      {6, {"end-to-end estimation", [&] { return end_to_end(w); }}},
      {7, {"noiseless behaviour", [&] { return noiseless(w); }}},
      {8, {"controlled-inputs estimator", controlled_inputs}},
      {9, {"determinism", [&] { return determinism(w); }}},
  };

  int failed = 0;
  for (int id : only) {
    const auto& [name, run] = criteria.at(id);
    std::cerr << "criterion " << id << ": " << name << '\n';
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << name << ": " << o.detail << " [" << num(secs, 3)
              << " s]" << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
