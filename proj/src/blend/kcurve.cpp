#include "nlcoh/blend/kcurve.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "nlcoh/error.hpp"

namespace nlcoh {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

KCurve::KCurve(std::size_t length, std::size_t control_points, double initial_raw)
    : length_(length), raw_(control_points, initial_raw) {
  if (control_points < 2) throw InvalidInput("a K curve needs at least 2 control points");
  if (length < 2) throw InvalidInput("K curve length must be at least 2");
  if (control_points > length / 2 + 1)
    throw InvalidInput("more control points than non-negative frequency bins");
}

double KCurve::position(std::size_t bin) const {
  const double span = static_cast<double>(half_length() - 1);
  return static_cast<double>(bin) * static_cast<double>(raw_.size() - 1) / span;
}

namespace {

struct Segment {
  std::size_t index;
  double weight;
};

Segment locate(double u, std::size_t controls) {
  std::size_t i = static_cast<std::size_t>(std::floor(u));
  if (i > controls - 2) i = controls - 2;
  return {i, u - static_cast<double>(i)};
}

}  // namespace

std::vector<double> KCurve::raw_half() const {
  std::vector<double> r(half_length());
  for (std::size_t j = 0; j < r.size(); ++j) {
    const Segment s = locate(position(j), raw_.size());
    r[j] = raw_[s.index] * (1.0 - s.weight) + raw_[s.index + 1] * s.weight;
  }
  return r;
}

std::vector<double> KCurve::evaluate_half() const {
  std::vector<double> r = raw_half();
  for (double& v : r) v = sigmoid(v);
  return r;
}

std::vector<double> KCurve::evaluate() const {
  const std::vector<double> half = evaluate_half();
  std::vector<double> full(length_);
  for (std::size_t k = 0; k < length_; ++k) full[k] = half[std::min(k, length_ - k)];
  return full;
}

void KCurve::backpropagate(std::span<const double> k_half, std::span<const double> grad_k_half,
                           std::span<double> grad_raw) const {
  if (k_half.size() != half_length() || grad_k_half.size() != half_length() ||
      grad_raw.size() != raw_.size())
    throw InvalidInput("KCurve::backpropagate: size mismatch");
  std::fill(grad_raw.begin(), grad_raw.end(), 0.0);
  for (std::size_t j = 0; j < k_half.size(); ++j) {
    const double g = grad_k_half[j] * k_half[j] * (1.0 - k_half[j]);
    const Segment s = locate(position(j), raw_.size());
    grad_raw[s.index] += g * (1.0 - s.weight);
    grad_raw[s.index + 1] += g * s.weight;
  }
}

void write_kcurve_csv(const std::filesystem::path& path, const KCurve& k, double df) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const auto raw = k.raw_half();
  const auto kv = k.evaluate_half();
  out.precision(17);
  out << "frequency,raw,K\n";
  for (std::size_t j = 0; j < kv.size(); ++j)
    out << static_cast<double>(j) * df << ',' << raw[j] << ',' << kv[j] << '\n';
}

void write_kcurve_controls(const std::filesystem::path& path, const KCurve& k) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "raw\n";
  char buf[64];
  for (double v : k.raw()) {
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, r.ptr - buf);
    out.put('\n');
  }
}

KCurve read_kcurve_controls(const std::filesystem::path& path, std::size_t length) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v = 0.0;
    auto r = std::from_chars(line.data(), line.data() + line.size(), v);
    if (r.ec != std::errc()) throw DataError(path.string() + ": bad control value");
    values.push_back(v);
  }
  KCurve k(length, values.size());
  std::copy(values.begin(), values.end(), k.raw().begin());
  return k;
}

}  // namespace nlcoh
