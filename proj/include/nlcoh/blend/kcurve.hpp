#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace nlcoh {

double sigmoid(double x);

// Learnable blend weight K(f): raw values at evenly spaced control points over
// the non-negative-frequency bins 0..M/2, linearly interpolated to every bin,
// squashed by a sigmoid, and mirrored so K[k] == K[M-k].
class KCurve {
 public:
  KCurve() = default;
  KCurve(std::size_t length, std::size_t control_points, double initial_raw = 0.0);

  std::size_t length() const { return length_; }
  std::size_t half_length() const { return length_ / 2 + 1; }
  std::size_t control_points() const { return raw_.size(); }

  std::span<double> raw() { return raw_; }
  std::span<const double> raw() const { return raw_; }

  // Control-point coordinate of half-spectrum bin j, in [0, control_points-1].
  double position(std::size_t bin) const;

  std::vector<double> raw_half() const;       // interpolated, before the sigmoid
  std::vector<double> evaluate_half() const;  // bins 0..M/2
  std::vector<double> evaluate() const;       // all M bins

  // Chains dL/dK over the half-spectrum bins back to the control points.
  void backpropagate(std::span<const double> k_half, std::span<const double> grad_k_half,
                     std::span<double> grad_raw) const;

  bool operator==(const KCurve&) const = default;

 private:
  std::size_t length_ = 0;
  std::vector<double> raw_;
};

// CSV with one row per half-spectrum bin: frequency, interpolated raw value, K.
void write_kcurve_csv(const std::filesystem::path& path, const KCurve& k, double df);
// Control values as a one-column CSV (round-trip precision) for resuming.
void write_kcurve_controls(const std::filesystem::path& path, const KCurve& k);
KCurve read_kcurve_controls(const std::filesystem::path& path, std::size_t length);

}  // namespace nlcoh
