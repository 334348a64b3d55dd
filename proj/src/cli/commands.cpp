#include "nlcoh/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlcoh/error.hpp"
#include "nlcoh/nn/checkpoint.hpp"
#include "nlcoh/simulate/oscillator.hpp"

namespace fs = std::filesystem;

namespace nlcoh {
namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw InvalidInput(std::string("missing ") + what + " directory");
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw DataError("cannot create " + p.string() + ": " + ec.message());
}

FramedDataset load_checked(const RunConfig& c) {
  require_path(c.data, "--data");
  FramedDataset ds = load_dataset(c.data);
  if (ds.x.empty() || ds.y_n.empty()) throw DataError(c.data.string() + ": dataset needs both x and y_n");
  return ds;
}

void write_forward_artifacts(const fs::path& dir, const ForwardModelResult& r) {
  save_checkpoint(dir / "forward.ckpt", r.net, &r.optimizer);
  std::ofstream out(dir / "forward_loss.csv");
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < r.epoch_loss.size(); ++i) out << i << ',' << fmt(r.epoch_loss[i]) << '\n';
  if (!out) throw DataError("cannot write forward_loss.csv in " + dir.string());
}

ForwardModelResult train_and_store_forward(FramedDataset& ds, const RunConfig& c, std::ostream& log) {
  ForwardModelConfig cfg = c.forward_config();
  if (!c.forward && c.system.empty() && ds.manifest.oscillator) cfg = forward_preset(ds.manifest.oscillator->kind);
  log << "training forward model: kernel " << cfg.kernel_width << ", " << cfg.layers << " layers, "
      << cfg.features << " features, " << cfg.epochs << " epochs\n";
  ForwardModelResult r = train_forward_model(ds, cfg);
  save_forward_prediction(c.data, ds);
  write_forward_artifacts(c.data, r);
  if (r.capture_fraction) log << "forward capture on test frames: " << fixed3(*r.capture_fraction) << '\n';
  return r;
}

void write_sweep_artifacts(const fs::path& out, const SweepResult& r, const RunConfig& c, const SweepConfig& cfg,
                           double df) {
  write_sweep_trace_csv(out / "sweep_trace.csv", r.trace);
  write_lambda_plot_csv(out / "lambda_plot.csv", r.trace);
  write_kcurve_csv(out / "kcurve.csv", r.k, df);
  write_kcurve_controls(out / "k_controls.csv", r.k);
  save_checkpoint(out / "reverse_net.ckpt", r.net);

  const fs::path snaps = out / "snapshots";
  ensure_dir(snaps);
  for (std::size_t i = 0; i < r.trace.steps.size(); ++i) {
    const SweepStep& s = r.trace.steps[i];
    char name[32];
    std::snprintf(name, sizeof name, "step_%02zu", i);
    Conv1dNet net = r.net;
    std::copy(s.net_parameters.begin(), s.net_parameters.end(), net.parameters().begin());
    save_checkpoint(snaps / (std::string(name) + ".ckpt"), net);
    KCurve k = r.k;
    std::copy(s.k_controls.begin(), s.k_controls.end(), k.raw().begin());
    write_kcurve_controls(snaps / (std::string(name) + "_k.csv"), k);
  }
  {
    std::ofstream e(out / "epoch_val_lx.csv");
    e << "epoch,val_lx\n";
    for (std::size_t i = 0; i < r.trace.epoch_val_lx.size(); ++i) e << i << ',' << fmt(r.trace.epoch_val_lx[i]) << '\n';
  }

  nlohmann::ordered_json j;
  j["lambda"] = r.lambda;
  j["fallback"] = r.fallback;
  j["threshold"] = cfg.threshold;
  j["steps_run"] = r.trace.steps.size();
  j["crossing_step"] = r.trace.selection.crossing ? nlohmann::json(*r.trace.selection.crossing) : nlohmann::json();
  j["chosen_step"] = r.trace.selection.chosen ? nlohmann::json(*r.trace.selection.chosen) : nlohmann::json();
  j["seed"] = c.sweep_seed;
  if (c.sensitivity) {
    nlohmann::ordered_json s = nlohmann::json::array();
    for (double t : {0.005, cfg.threshold, 0.02}) {
      const LambdaSelection sel = reselect(r.trace, t, cfg.fallback_lambda);
      s.push_back({{"threshold", t}, {"lambda", sel.lambda}, {"fallback", !sel.chosen.has_value()}});
    }
    j["sensitivity"] = s;
  }
  std::ofstream o(out / "sweep_summary.json");
  o << j.dump(2) << '\n';
  if (!o) throw DataError("cannot write sweep_summary.json in " + out.string());
}

SweepResult run_and_store_sweep(const FramedDataset& ds, const RunConfig& c, std::ostream& log) {
  const SweepConfig cfg = c.sweep_config();
  log << "lambda sweep: " << cfg.schedule.size() << " steps, threshold " << cfg.threshold << '\n';
  SweepResult r = run_sweep(ds, cfg, c.sweep_seed, [&](const SweepStep& s, std::size_t i) {
    log << "  step " << i << "  lambda " << s.lambda << "  ratio " << s.ratio() << "  L_x^V " << s.val_lx << '\n';
  });
  log << "chosen lambda " << r.lambda << (r.fallback ? " (no threshold crossing)" : "") << '\n';
  ensure_dir(c.out);
  write_sweep_artifacts(c.out, r, c, cfg, ds.df());
  return r;
}

}  // namespace

FramedDataset cmd_simulate(const RunConfig& c, std::ostream& log) {
  require_path(c.out, "--out");
  if (c.external()) throw InvalidInput("simulate needs a system preset, not 'external'");
  const OscillatorSpec spec = preset(parse_system_kind(c.system.empty() ? "poly" : c.system));
  log << "simulating " << c.frames << " frames of " << c.length << " samples (" << system_kind_name(spec.kind) << ")\n";
  FramedDataset ds = simulate_dataset(spec, c.frames, c.length, c.seed, {}, c.lead_in);
  NoiseSpec noise;
  noise.level = c.noise;
  noise.scale = c.noise_scale;
  noise.seed = c.noise_seed;
  ds = add_output_noise(std::move(ds), noise);
  ds.manifest.format = c.format;
  ensure_dir(c.out);
  save_dataset(c.out, ds);
  RunConfig saved = c;
  saved.data = c.out;
  write_run_config(c.out / "simulate.cfg", saved);
  log << "noise scale " << ds.manifest.noise_scale << '\n';
  return ds;
}

ForwardModelResult cmd_train_forward(const RunConfig& c, std::ostream& log) {
  FramedDataset ds = load_checked(c);
  return train_and_store_forward(ds, c, log);
}

SweepResult cmd_sweep(const RunConfig& c, std::ostream& log) {
  require_path(c.out, "--out");
  const FramedDataset ds = load_checked(c);
  if (!ds.has_forward_prediction())
    throw DataError(c.data.string() + ": no forward prediction y_z; run train-forward first");
  ensure_dir(c.out);
  write_run_config(c.out / "run.cfg", c);
  return run_and_store_sweep(ds, c, log);
}

CoherenceSummary cmd_estimate(const RunConfig& c, std::ostream& log) {
  require_path(c.out, "--out");
  FramedDataset ds = load_checked(c);
  ensure_dir(c.out);
  write_run_config(c.out / "run.cfg", c);
  if (!ds.has_forward_prediction()) train_and_store_forward(ds, c, log);
  const SweepResult sweep = run_and_store_sweep(ds, c, log);
  const CoherenceReport report = build_coherence_report(ds, sweep.k.evaluate_half(), sweep.lambda);
  const CoherenceSummary summary = summarize(report);
  write_report_csv(c.out / "coherence.csv", report);
  write_summary_json(c.out / "summary.json", summary);
  log << "band-mean estimated coherence " << fixed3(summary.band_mean_estimate) << ", lower bound "
      << fixed3(summary.band_mean_lower_bound);
  if (summary.band_mean_abs_error) log << ", |error| vs truth " << fixed3(*summary.band_mean_abs_error);
  log << '\n';
  return summary;
}

std::vector<fs::path> missing_run_artifacts(const fs::path& run_dir) {
  std::vector<fs::path> missing;
  for (const char* name : {"coherence.csv", "lambda_plot.csv", "kcurve.csv", "summary.json", "run.cfg"})
    if (!fs::exists(run_dir / name)) missing.push_back(run_dir / name);
  return missing;
}

void cmd_report(const fs::path& run_dir, std::ostream& log) {
  require_path(run_dir, "--run");
  const auto missing = missing_run_artifacts(run_dir);
  if (!missing.empty()) {
    std::string msg = "incomplete run directory " + run_dir.string() + "; missing:";
    for (const auto& p : missing) msg += " " + p.filename().string();
    throw DataError(msg);
  }
  CoherenceReport r = read_report_csv(run_dir / "coherence.csv");
  {
    std::ifstream in(run_dir / "summary.json");
    try {
      r.lambda = nlohmann::json::parse(in).at("lambda").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(run_dir.string() + "/summary.json: " + e.what());
    }
  }
  const CoherenceSummary s = summarize(r);

  {
    std::ofstream o(run_dir / "fig_coherence.csv");
    o << "frequency,";
    if (r.gamma2_true) o << "gamma2_true,";
    o << "gamma2_est,lower_bound\n";
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!r.in_band[j]) continue;
      o << fmt(r.frequency(j)) << ',';
      if (r.gamma2_true) o << fmt((*r.gamma2_true)[j]) << ',';
      o << fmt(r.gamma2[j]) << ',' << fmt(r.lower_bound[j]) << '\n';
    }
  }
  {
    std::ifstream in(run_dir / "lambda_plot.csv");
    std::ofstream o(run_dir / "fig_lambda.csv");
    std::string line;
    std::getline(in, line);
    o << "ratio,val_lx,crossing\n";
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string kind, lambda, ratio, val;
      std::getline(ss, kind, ',');
      std::getline(ss, lambda, ',');
      std::getline(ss, ratio, ',');
      std::getline(ss, val, ',');
      o << ratio << ',' << val << ',' << (kind == "crossing" ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream o(run_dir / "fig_kcurve.csv");
    o << "frequency,K,C\n";
    for (std::size_t j = 0; j < r.size(); ++j)
      o << fmt(r.frequency(j)) << ',' << fmt(r.k[j]) << ',' << (std::isinf(r.c[j]) ? std::string("inf") : fmt(r.c[j]))
        << '\n';
  }
  {
    std::ofstream o(run_dir / "fig_psd.csv");
    o << "frequency,S_xx,S_ynyn,S_yzyz,S_yy_est\n";
    for (std::size_t j = 0; j < r.size(); ++j)
      o << fmt(r.frequency(j)) << ',' << fmt(r.s_xx[j]) << ',' << fmt(r.s_nn[j]) << ',' << fmt(r.s_zz[j]) << ','
        << fmt(std::clamp(r.s_yy_raw[j], 0.0, r.s_nn[j])) << '\n';
  }
  std::ostringstream t;
  t << "chosen lambda: " << fmt(r.lambda) << '\n'
    << "in-band bins: " << s.bins_in_band << '\n'
    << "band-mean estimated coherence: " << fixed3(s.band_mean_estimate) << '\n'
    << "band-mean lower bound Co(Yz,Yn): " << fixed3(s.band_mean_lower_bound) << '\n'
    << "band-mean improvement over lower bound: " << fixed3(s.band_mean_improvement) << '\n';
  if (s.band_mean_true) {
    t << "band-mean true coherence: " << fixed3(*s.band_mean_true) << '\n'
      << "band-mean |estimated - true|: " << fixed3(*s.band_mean_abs_error) << '\n';
  }
  t << "figures: fig_coherence.csv fig_lambda.csv fig_kcurve.csv fig_psd.csv\n";
  std::ofstream o(run_dir / "summary.txt");
  o << t.str();
  if (!o) throw DataError("cannot write summary.txt in " + run_dir.string());
  log << "run: " << fs::absolute(run_dir).string() << '\n' << t.str();
}

}  // namespace nlcoh
