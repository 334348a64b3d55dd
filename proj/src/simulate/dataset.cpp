#include "nlcoh/simulate/dataset.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlcoh/error.hpp"
#include "nlcoh/signals/fft.hpp"
#include "nlcoh/signals/spectra.hpp"
#include "nlcoh/simulate/rng.hpp"

namespace nlcoh {

std::string_view noise_level_name(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::none: return "none";
    case NoiseLevel::low: return "low";
    case NoiseLevel::moderate: return "moderate";
    case NoiseLevel::high: return "high";
    case NoiseLevel::explicit_scale: return "explicit";
  }
  return "unknown";
}

NoiseLevel parse_noise_level(std::string_view name) {
  if (name == "none") return NoiseLevel::none;
  if (name == "low") return NoiseLevel::low;
  if (name == "moderate") return NoiseLevel::moderate;
  if (name == "high") return NoiseLevel::high;
  if (name == "explicit") return NoiseLevel::explicit_scale;
  throw InvalidInput("unknown noise level '" + std::string(name) +
                     "' (expected none, low, moderate or high)");
}

double target_coherence(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::none: return 1.0;
    case NoiseLevel::low: return 0.9;
    case NoiseLevel::moderate: return 0.6;
    case NoiseLevel::high: return 0.3;
    case NoiseLevel::explicit_scale: break;
  }
  throw InvalidInput("explicit noise has no target coherence");
}

std::vector<std::size_t> DatasetSplit::train() const {
  std::vector<std::size_t> r(n_train);
  for (std::size_t i = 0; i < n_train; ++i) r[i] = i;
  return r;
}

std::vector<std::size_t> DatasetSplit::validation() const {
  std::vector<std::size_t> r(n_val);
  for (std::size_t i = 0; i < n_val; ++i) r[i] = n_train + i;
  return r;
}

std::vector<std::size_t> DatasetSplit::test(std::size_t total) const {
  std::vector<std::size_t> r;
  for (std::size_t i = n_train + n_val; i < total; ++i) r.push_back(i);
  return r;
}

TimeFrame bandlimited_noise(double rms, Band band, std::size_t length, double dt,
                            std::uint64_t seed) {
  if (length < 2) throw InvalidInput("bandlimited_noise: length must be at least 2");
  if (!(dt > 0.0)) throw InvalidInput("bandlimited_noise: dt must be positive");
  if (!(band.lo > 0.0 && band.lo < band.hi && band.hi < 0.5 / dt))
    throw InvalidInput("bandlimited_noise: band must satisfy 0 < lo < hi < Nyquist");
  if (rms < 0.0) throw InvalidInput("bandlimited_noise: rms must be non-negative");
  TimeFrame out{std::vector<double>(length, 0.0), dt};
  if (rms == 0.0) return out;

  RealFft plan(length);
  const double df = 1.0 / (static_cast<double>(length) * dt);
  std::vector<Complex> spectrum(plan.half_length(), Complex{});
  Rng rng(seed);
  std::size_t used = 0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < band.lo || f > band.hi) continue;
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    spectrum[k] = std::polar(1.0, phase);
    ++used;
  }
  if (used == 0) throw InvalidInput("bandlimited_noise: band contains no frequency bins");
  plan.inverse(spectrum, out.samples);
  double energy = 0.0;
  for (double v : out.samples) energy += v * v;
  const double scale = rms / std::sqrt(energy / static_cast<double>(length));
  for (double& v : out.samples) v *= scale;
  return out;
}

std::vector<double> input_record(const DatasetManifest& m, std::size_t frame) {
  if (!m.oscillator) throw DataError("dataset has no oscillator description");
  const OscillatorSpec& spec = *m.oscillator;
  return bandlimited_noise(spec.tau, spec.band, m.length + m.lead_in, spec.dt,
                           derive_seed(m.seed, Stream::input, frame))
      .samples;
}

FramedDataset simulate_dataset(const OscillatorSpec& spec, std::size_t n_frames,
                               std::size_t length, std::uint64_t seed, DatasetSplit split,
                               std::size_t lead_in) {
  validate(spec);
  if (length < 2) throw InvalidInput("frame length must be at least 2");
  if (n_frames < split.minimum_frames())
    throw InvalidInput("need at least " + std::to_string(split.minimum_frames()) +
                       " frames (train + validation + 1), got " + std::to_string(n_frames));
  FramedDataset ds;
  DatasetManifest& m = ds.manifest;
  m.frames = n_frames;
  m.length = length;
  m.dt = spec.dt;
  m.split = split;
  m.seed = seed;
  m.lead_in = lead_in;
  m.oscillator = spec;
  ds.x = FrameSet(n_frames, length, spec.dt);
  ds.y = FrameSet(n_frames, length, spec.dt);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::vector<double> input = input_record(m, i);
    const std::vector<double> response = integrate(spec, input, i);
    std::copy(input.begin() + static_cast<std::ptrdiff_t>(lead_in), input.end(), ds.x.frame(i).begin());
    std::copy(response.begin() + static_cast<std::ptrdiff_t>(lead_in), response.end(),
              ds.y.frame(i).begin());
  }
  ds.y_n = ds.y;
  ds.noise = FrameSet(n_frames, length, spec.dt);
  return ds;
}

RealCurve true_coherence(const FramedDataset& ds) {
  if (!ds.has_ground_truth()) throw DataError("dataset has no noise-free response");
  const auto rows = ds.manifest.split.test(ds.manifest.frames);
  const auto sy = half_spectra(ds.y, rows);
  const auto syn = half_spectra(ds.y_n, rows);
  const RealCurve s_yy = power_spectral_density(sy);
  const RealCurve s_nn = power_spectral_density(syn);
  RealCurve out{std::vector<double>(s_yy.size(), 0.0), s_yy.df};
  for (std::size_t k = 0; k < out.size(); ++k)
    if (s_nn.values[k] > 0.0) out.values[k] = s_yy.values[k] / s_nn.values[k];
  return out;
}

namespace {

// Unit-rms noise scale giving the requested band-mean coherence, assuming the
// signal/noise cross-spectrum averages out.
double calibrate_noise_scale(const FramedDataset& ds, const FrameSet& unit_noise, double target) {
  const auto rows = ds.manifest.split.test(ds.manifest.frames);
  const RealCurve s_yy = power_spectral_density(half_spectra(ds.y, rows));
  const RealCurve s_ee = power_spectral_density(half_spectra(unit_noise, rows));
  const auto mask = in_band_mask(power_spectral_density(half_spectra(ds.x, rows)));
  auto coherence_at = [&](double scale) {
    std::vector<double> c(s_yy.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double den = s_yy.values[k] + scale * scale * s_ee.values[k];
      c[k] = den > 0.0 ? s_yy.values[k] / den : 0.0;
    }
    return band_mean(c, mask);
  };
  double lo = std::log(1e-12), hi = std::log(1e12);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (coherence_at(std::exp(mid)) > target)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace

FramedDataset add_output_noise(FramedDataset ds, const NoiseSpec& noise) {
  if (!ds.has_ground_truth()) throw DataError("add_output_noise needs the noise-free response y");
  DatasetManifest& m = ds.manifest;
  NoiseSpec spec = noise;
  if (spec.band.hi <= 0.0) {
    if (!m.oscillator) throw InvalidInput("noise band must be given for datasets without a system");
    spec.band = m.oscillator->band;
  }
  if (!(spec.band.lo > 0.0 && spec.band.lo < spec.band.hi && spec.band.hi < 0.5 / m.dt))
    throw InvalidInput("noise band must satisfy 0 < lo < hi < Nyquist");

  FrameSet unit(m.frames, m.length, m.dt);
  if (spec.level != NoiseLevel::none) {
    for (std::size_t i = 0; i < m.frames; ++i) {
      const TimeFrame e = bandlimited_noise(1.0, spec.band, m.length, m.dt,
                                            derive_seed(spec.seed, Stream::noise, i));
      std::copy(e.samples.begin(), e.samples.end(), unit.frame(i).begin());
    }
  }
  double scale = 0.0;
  switch (spec.level) {
    case NoiseLevel::none: break;
    case NoiseLevel::explicit_scale: scale = spec.scale; break;
    default: scale = calibrate_noise_scale(ds, unit, target_coherence(spec.level)); break;
  }
  ds.y_n = FrameSet(m.frames, m.length, m.dt);
  ds.noise = FrameSet(m.frames, m.length, m.dt);
  for (std::size_t j = 0; j < ds.y.data().size(); ++j) {
    ds.y_n.data()[j] = ds.y.data()[j] + scale * unit.data()[j];
    ds.noise.data()[j] = ds.y_n.data()[j] - ds.y.data()[j];
  }
  m.noise = spec;
  m.noise_scale = scale;
  ds.y_z = FrameSet();
  m.forward_capture.reset();
  ds.true_coherence = true_coherence(ds);
  return ds;
}

double capture_fraction(const FrameSet& reference, const FrameSet& prediction,
                        std::span<const std::size_t> rows, std::size_t edge_start,
                        std::size_t edge_end) {
  if (reference.length() != prediction.length())
    throw InvalidInput("capture_fraction: frame lengths differ");
  const std::size_t n = reference.length();
  if (edge_start + edge_end >= n) throw InvalidInput("capture_fraction: edges cover the whole frame");
  double err = 0.0, energy = 0.0;
  for (std::size_t r : rows) {
    auto a = reference.frame(r);
    auto b = prediction.frame(r);
    for (std::size_t t = edge_start; t < n - edge_end; ++t) {
      const double d = a[t] - b[t];
      err += d * d;
      energy += a[t] * a[t];
    }
  }
  if (energy <= 0.0) throw InvalidInput("capture_fraction: reference has no energy");
  return 1.0 - err / energy;
}

LinearizedResponse linearized_response(const FramedDataset& ds, const OscillatorSpec& spec) {
  const DatasetManifest& m = ds.manifest;
  if (!m.oscillator) throw DataError("linearized_response needs a simulated dataset");
  // Least-squares fit of the nonlinear force on (y, y') over the retained samples.
  double syy = 0.0, syv = 0.0, svv = 0.0, sfy = 0.0, sfv = 0.0;
  std::vector<std::vector<double>> inputs(m.frames);
  for (std::size_t i = 0; i < m.frames; ++i) {
    inputs[i] = input_record(m, i);
    std::vector<double> vel;
    const std::vector<double> y = integrate(spec, inputs[i], i, &vel);
    for (std::size_t t = m.lead_in; t < y.size(); ++t) {
      const double f = nonlinear_force(spec, y[t], vel[t]);
      syy += y[t] * y[t];
      syv += y[t] * vel[t];
      svv += vel[t] * vel[t];
      sfy += f * y[t];
      sfv += f * vel[t];
    }
  }
  const double det = syy * svv - syv * syv;
  double k = 0.0, c = 0.0;
  if (det > 0.0) {
    k = (sfy * svv - sfv * syv) / det;
    c = (sfv * syy - sfy * syv) / det;
  }
  LinearizedResponse out;
  out.linear_spec = spec;
  out.linear_spec.nonlinear = false;
  out.linear_spec.linear_stiffness = k;
  out.linear_spec.linear_damping = c;
  out.frames = FrameSet(m.frames, m.length, m.dt);
  for (std::size_t i = 0; i < m.frames; ++i) {
    const std::vector<double> y = integrate(out.linear_spec, inputs[i], i);
    std::copy(y.begin() + static_cast<std::ptrdiff_t>(m.lead_in), y.end(), out.frames.frame(i).begin());
  }
  std::vector<std::size_t> all(m.frames);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  out.capture_fraction = capture_fraction(ds.y, out.frames, all);
  return out;
}

}  // namespace nlcoh
