#include "nlcoh/simulate/oscillator.hpp"

#include <cmath>
#include <string>

#include "nlcoh/error.hpp"

namespace nlcoh {

std::string_view system_kind_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::polynomial_stiffness: return "polynomial_stiffness";
    case SystemKind::saturating_stiffness: return "saturating_stiffness";
    case SystemKind::coulomb_friction: return "coulomb_friction";
  }
  return "unknown";
}

SystemKind parse_system_kind(std::string_view name) {
  if (name == "poly" || name == "polynomial_stiffness") return SystemKind::polynomial_stiffness;
  if (name == "sat" || name == "saturating_stiffness") return SystemKind::saturating_stiffness;
  if (name == "friction" || name == "coulomb_friction") return SystemKind::coulomb_friction;
  throw InvalidInput("unknown system '" + std::string(name) + "' (expected poly, sat or friction)");
}

OscillatorSpec preset(SystemKind kind) {
  OscillatorSpec s;
  s.kind = kind;
  switch (kind) {
    case SystemKind::polynomial_stiffness:
      s.zeta = 4.5;
      s.alpha1 = 5e3;
      s.alpha2 = -10.0;
      s.alpha3 = 3e3;
      s.tau = 1e3;
      s.dt = 0.0025;
      s.band = {0.5, 50.0};  // linear resonance ~11.3 Hz
      break;
    case SystemKind::saturating_stiffness:
      s.zeta = 3.0;
      s.alpha1 = 1e4;
      s.alpha2 = 5e3;
      s.tau = 6e3;
      s.dt = 0.005;
      s.band = {1.0, 40.0};  // linear resonance ~15.9 Hz
      break;
    case SystemKind::coulomb_friction:
      s.alpha1 = 1e5;
      s.alpha2 = 0.5;
      s.tau = 5.0;
      s.dt = 0.002;
      s.band = {1.0, 150.0};  // resonance ~50.3 Hz
      break;
  }
  return s;
}

void validate(const OscillatorSpec& spec) {
  if (!(spec.tau > 0.0)) throw InvalidInput("oscillator input rms tau must be positive");
  if (!(spec.dt > 0.0)) throw InvalidInput("oscillator time step must be positive");
  const double nyquist = 0.5 / spec.dt;
  if (!(spec.band.lo > 0.0 && spec.band.lo < spec.band.hi && spec.band.hi < nyquist))
    throw InvalidInput("excitation band [" + std::to_string(spec.band.lo) + ", " +
                       std::to_string(spec.band.hi) + "] must satisfy 0 < lo < hi < " +
                       std::to_string(nyquist));
}

double nonlinear_force(const OscillatorSpec& spec, double y, double v) {
  switch (spec.kind) {
    case SystemKind::polynomial_stiffness: return spec.alpha2 * y * y + spec.alpha3 * y * y * y;
    case SystemKind::saturating_stiffness: return spec.alpha2 * std::tanh(1e4 * y);
    case SystemKind::coulomb_friction: return spec.alpha2 * std::tanh(1e4 * v);
  }
  return 0.0;
}

double acceleration(const OscillatorSpec& spec, double y, double v, double x) {
  double a = x - 2.0 * spec.zeta * v - spec.alpha1 * y;
  if (spec.nonlinear) a -= nonlinear_force(spec, y, v);
  if (spec.linear_stiffness != 0.0 || spec.linear_damping != 0.0)
    a -= spec.linear_stiffness * y + spec.linear_damping * v;
  return a;
}

OscillatorState rk4_step(OscillatorState s, double dt, const OscillatorSpec& spec,
                         const StepInput& in) {
  const double h = 0.5 * dt;
  const double k1y = s.v;
  const double k1v = acceleration(spec, s.y, s.v, in.start);
  const double k2y = s.v + h * k1v;
  const double k2v = acceleration(spec, s.y + h * k1y, s.v + h * k1v, in.mid);
  const double k3y = s.v + h * k2v;
  const double k3v = acceleration(spec, s.y + h * k2y, s.v + h * k2v, in.mid);
  const double k4y = s.v + dt * k3v;
  const double k4v = acceleration(spec, s.y + dt * k3y, s.v + dt * k3v, in.end);
  return {s.y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
          s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

std::vector<double> integrate(const OscillatorSpec& spec, std::span<const double> input,
                              std::size_t frame_index, std::vector<double>* velocity) {
  const std::size_t n = input.size();
  std::vector<double> y(n);
  if (velocity) velocity->assign(n, 0.0);
  OscillatorState s;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = s.y;
    if (velocity) (*velocity)[i] = s.v;
    const double x0 = input[i];
    const double x1 = i + 1 < n ? input[i + 1] : input[i];
    s = rk4_step(s, spec.dt, spec, {x0, 0.5 * (x0 + x1), x1});
    if (!std::isfinite(s.y) || !std::isfinite(s.v))
      throw DivergenceError("integration diverged in frame " + std::to_string(frame_index) +
                            " at step " + std::to_string(i));
  }
  return y;
}

}  // namespace nlcoh
