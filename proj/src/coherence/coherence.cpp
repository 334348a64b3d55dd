#include "nlcoh/coherence/coherence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nlcoh/error.hpp"
#include "nlcoh/signals/fft.hpp"
#include "nlcoh/signals/spectra.hpp"

namespace nlcoh {

ErrorRatio error_ratio(std::span<const double> k) {
  ErrorRatio out{std::vector<double>(k.size()), std::vector<bool>(k.size(), false)};
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (!(k[j] >= 0.0 && k[j] <= 1.0))
      throw InvalidInput("K must lie in [0, 1]; bin " + std::to_string(j) + " has " + std::to_string(k[j]));
    if (k[j] == 1.0) {
      out.c[j] = std::numeric_limits<double>::infinity();
      out.infinite[j] = true;
    } else {
      out.c[j] = k[j] / (1.0 - k[j]);
    }
  }
  return out;
}

SignalPsdEstimate estimate_signal_psd(std::span<const double> c, const std::vector<bool>& c_infinite,
                                      const RealCurve& s_nn, const RealCurve& s_zz,
                                      const CrossSpectrum& s_nz) {
  const std::size_t n = c.size();
  if (s_nn.size() != n || s_zz.size() != n || s_nz.size() != n || (!c_infinite.empty() && c_infinite.size() != n))
    throw InvalidInput("estimate_signal_psd: curves are on different grids");
  SignalPsdEstimate out{RealCurve{std::vector<double>(n), s_nn.df}, std::vector<double>(n),
                        std::vector<bool>(n, false), std::vector<bool>(n, false)};
  for (std::size_t j = 0; j < n; ++j) {
    const bool inf = (!c_infinite.empty() && c_infinite[j]) || std::isinf(c[j]);
    if (!inf && !(c[j] >= 0.0)) throw InvalidInput("error ratio must be non-negative");
    const double raw = inf ? s_nn.values[j]
                           : (c[j] * s_nn.values[j] - s_zz.values[j] + 2.0 * s_nz.values[j].real()) / (c[j] + 1.0);
    out.raw[j] = raw;
    double v = raw;
    if (v < 0.0) {
      v = 0.0;
      out.floored[j] = true;
    } else if (v > s_nn.values[j]) {
      v = s_nn.values[j];
      out.ceilinged[j] = true;
    }
    out.psd.values[j] = v;
  }
  return out;
}

NonlinearCoherence nonlinear_coherence(const RealCurve& s_yy, const RealCurve& s_nn, std::vector<bool> in_band) {
  const std::size_t n = s_yy.size();
  if (s_nn.size() != n) throw InvalidInput("nonlinear_coherence: curves are on different grids");
  if (in_band.empty()) {
    in_band.resize(n);
    for (std::size_t j = 0; j < n; ++j) in_band[j] = s_nn.values[j] > 0.0;
  }
  if (in_band.size() != n) throw InvalidInput("nonlinear_coherence: band mask has the wrong length");
  NonlinearCoherence out{RealCurve{std::vector<double>(n, 0.0), s_yy.df}, std::vector<double>(n, 0.0),
                         std::move(in_band)};
  for (std::size_t j = 0; j < n; ++j) {
    if (!out.in_band[j]) continue;
    if (!(s_nn.values[j] > 0.0))
      throw DataError("measured PSD is zero at in-band bin " + std::to_string(j));
    out.raw[j] = s_yy.values[j] / s_nn.values[j];
    out.gamma2.values[j] = std::clamp(out.raw[j], 0.0, 1.0);
  }
  return out;
}

RealCurve lower_bound_coherence(std::span<const SpectrumFrame> yz, std::span<const SpectrumFrame> yn) {
  return linear_coherence(yz, yn);
}

CoherenceReport build_coherence_report(const FramedDataset& ds, std::span<const double> k_half, double lambda) {
  if (!ds.has_forward_prediction())
    throw DataError("dataset has no forward prediction y_z; run train-forward first");
  const auto rows = ds.manifest.split.test(ds.manifest.frames);
  if (rows.size() < 2) throw DataError("the test split needs at least 2 frames");
  const auto sx = half_spectra(ds.x, rows);
  const auto sn = half_spectra(ds.y_n, rows);
  const auto sz = half_spectra(ds.y_z, rows);
  if (k_half.size() != sn.front().size())
    throw InvalidInput("K has " + std::to_string(k_half.size()) + " bins, spectra have " +
                       std::to_string(sn.front().size()));

  const RealCurve s_xx = power_spectral_density(sx);
  const RealCurve s_nn = power_spectral_density(sn);
  const RealCurve s_zz = power_spectral_density(sz);
  const CrossSpectrum s_nz = cross_spectral_density(sn, sz);

  CoherenceReport r;
  r.df = s_nn.df;
  r.frames = rows.size();
  r.lambda = lambda;
  r.s_xx = s_xx.values;
  r.s_nn = s_nn.values;
  r.s_zz = s_zz.values;
  r.in_band = in_band_mask(s_xx);
  r.k.assign(k_half.begin(), k_half.end());
  const ErrorRatio c = error_ratio(k_half);
  r.c = c.c;
  const SignalPsdEstimate s_yy = estimate_signal_psd(c.c, c.infinite, s_nn, s_zz, s_nz);
  r.s_yy_raw = s_yy.raw;

  RealCurve raw_curve{s_yy.raw, s_nn.df};
  const NonlinearCoherence g = nonlinear_coherence(s_yy.psd, s_nn, r.in_band);
  const NonlinearCoherence g_raw = nonlinear_coherence(raw_curve, s_nn, r.in_band);
  r.gamma2 = g.gamma2.values;
  r.gamma2_raw = g_raw.raw;
  r.lower_bound = lower_bound_coherence(sz, sn).values;
  if (ds.true_coherence && ds.true_coherence->size() == r.size()) r.gamma2_true = ds.true_coherence->values;
  return r;
}

CoherenceSummary summarize(const CoherenceReport& r) {
  CoherenceSummary s;
  s.lambda = r.lambda;
  s.min_margin_over_bound = std::numeric_limits<double>::infinity();
  s.max_raw_estimate = -std::numeric_limits<double>::infinity();
  double err = 0.0, truth = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (!r.in_band[j]) continue;
    ++s.bins_in_band;
    s.band_mean_estimate += r.gamma2[j];
    s.band_mean_lower_bound += r.lower_bound[j];
    s.min_margin_over_bound = std::min(s.min_margin_over_bound, r.gamma2[j] - r.lower_bound[j]);
    s.max_raw_estimate = std::max(s.max_raw_estimate, r.gamma2_raw[j]);
    if (r.s_yy_raw[j] < 0.0) ++s.floored_bins;
    if (r.gamma2_true) {
      truth += (*r.gamma2_true)[j];
      err += std::abs(r.gamma2[j] - (*r.gamma2_true)[j]);
    }
  }
  if (s.bins_in_band == 0) throw DataError("no bins fall inside the excitation band");
  const double n = static_cast<double>(s.bins_in_band);
  s.band_mean_estimate /= n;
  s.band_mean_lower_bound /= n;
  s.band_mean_improvement = s.band_mean_estimate - s.band_mean_lower_bound;
  if (r.gamma2_true) {
    s.band_mean_true = truth / n;
    s.band_mean_abs_error = err / n;
  }
  return s;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw DataError(path.string() + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_report_csv(const std::filesystem::path& path, const CoherenceReport& r) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "frequency,gamma2_est,lower_bound";
  if (r.gamma2_true) out << ",gamma2_true";
  out << ",K,C,gamma2_raw,S_yy_raw,S_xx,S_nn,S_zz,in_band\n";
  for (std::size_t j = 0; j < r.size(); ++j) {
    out << fmt(r.frequency(j)) << ',' << fmt(r.gamma2[j]) << ',' << fmt(r.lower_bound[j]);
    if (r.gamma2_true) out << ',' << fmt((*r.gamma2_true)[j]);
    out << ',' << fmt(r.k[j]) << ',' << (std::isinf(r.c[j]) ? std::string("inf") : fmt(r.c[j])) << ','
        << fmt(r.gamma2_raw[j]) << ',' << fmt(r.s_yy_raw[j]) << ',' << fmt(r.s_xx[j]) << ',' << fmt(r.s_nn[j])
        << ',' << fmt(r.s_zz[j]) << ',' << (r.in_band[j] ? 1 : 0) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

CoherenceReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const char* required[] = {"frequency", "gamma2_est", "lower_bound", "K",    "C",
                            "gamma2_raw", "S_yy_raw",   "S_xx",        "S_nn", "S_zz", "in_band"};
  for (const char* name : required)
    if (column(name) < 0) throw DataError(path.string() + ": missing column " + name);
  const std::ptrdiff_t truth_col = column("gamma2_true");

  CoherenceReport r;
  if (truth_col >= 0) r.gamma2_true.emplace();
  std::vector<double> freq;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw DataError(path.string() + ": ragged row");
    auto at = [&](const char* name) { return parse_double(cells[static_cast<std::size_t>(column(name))], path); };
    freq.push_back(at("frequency"));
    r.gamma2.push_back(at("gamma2_est"));
    r.lower_bound.push_back(at("lower_bound"));
    r.k.push_back(at("K"));
    r.c.push_back(at("C"));
    r.gamma2_raw.push_back(at("gamma2_raw"));
    r.s_yy_raw.push_back(at("S_yy_raw"));
    r.s_xx.push_back(at("S_xx"));
    r.s_nn.push_back(at("S_nn"));
    r.s_zz.push_back(at("S_zz"));
    r.in_band.push_back(at("in_band") != 0.0);
    if (truth_col >= 0) r.gamma2_true->push_back(parse_double(cells[static_cast<std::size_t>(truth_col)], path));
  }
  if (freq.size() < 2) throw DataError(path.string() + ": fewer than two bins");
  r.df = freq[1] - freq[0];
  return r;
}

void write_summary_json(const std::filesystem::path& path, const CoherenceSummary& s) {
  nlohmann::ordered_json j;
  j["lambda"] = s.lambda;
  j["bins_in_band"] = s.bins_in_band;
  j["band_mean_gamma2_est"] = s.band_mean_estimate;
  j["band_mean_lower_bound"] = s.band_mean_lower_bound;
  j["band_mean_improvement_over_bound"] = s.band_mean_improvement;
  j["min_margin_over_bound"] = s.min_margin_over_bound;
  j["max_gamma2_raw"] = s.max_raw_estimate;
  j["floored_bins"] = s.floored_bins;
  if (s.band_mean_true) j["band_mean_gamma2_true"] = *s.band_mean_true;
  if (s.band_mean_abs_error) j["band_mean_abs_error"] = *s.band_mean_abs_error;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace nlcoh
