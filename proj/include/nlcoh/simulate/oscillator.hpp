#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nlcoh/signals/types.hpp"

namespace nlcoh {

enum class SystemKind { polynomial_stiffness, saturating_stiffness, coulomb_friction };

std::string_view system_kind_name(SystemKind kind);
// Accepts the long names and the CLI short forms poly / sat / friction.
SystemKind parse_system_kind(std::string_view name);

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Band&) const = default;
};

// Single-degree-of-freedom oscillator driven by x:
//   polynomial:  y'' + 2 zeta y' + a1 y + a2 y^2 + a3 y^3      = x
//   saturating:  y'' + 2 zeta y' + a1 y + a2 tanh(1e4 y)       = x
//   friction:    y''             + a1 y + a2 tanh(1e4 y')      = x
// The linear_* terms hold an equivalent linear stiffness / damping that is
// added on top; they are zero for the physical systems and set by
// linearisation.
struct OscillatorSpec {
  SystemKind kind = SystemKind::polynomial_stiffness;
  double zeta = 0.0;
  double alpha1 = 1.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double tau = 1.0;  // input rms
  double dt = 1e-3;
  Band band;
  double linear_stiffness = 0.0;
  double linear_damping = 0.0;
  bool nonlinear = true;

  bool operator==(const OscillatorSpec&) const = default;
};

// Benchmark parameters for each system, including the excitation band.
OscillatorSpec preset(SystemKind kind);

// Validates positivity of tau/dt and the band against Nyquist.
void validate(const OscillatorSpec& spec);

struct OscillatorState {
  double y = 0.0;
  double v = 0.0;
};

// Input values at the start, midpoint and end of one step.
struct StepInput {
  double start = 0.0;
  double mid = 0.0;
  double end = 0.0;
};

double nonlinear_force(const OscillatorSpec& spec, double y, double v);
double acceleration(const OscillatorSpec& spec, double y, double v, double x);

// One classical fourth-order Runge-Kutta step.
OscillatorState rk4_step(OscillatorState state, double dt, const OscillatorSpec& spec,
                         const StepInput& input);

// Integrates from rest over the whole input record (sample spacing spec.dt,
// midpoint inputs by linear interpolation) and returns y at every sample.
// Optionally also returns the velocity. Throws DivergenceError naming
// `frame_index` and the step when the state stops being finite.
std::vector<double> integrate(const OscillatorSpec& spec, std::span<const double> input,
                              std::size_t frame_index = 0, std::vector<double>* velocity = nullptr);

}  // namespace nlcoh
