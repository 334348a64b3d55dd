#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nlcoh/signals/types.hpp"

namespace test {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(g);
  return v;
}

// Circular complex Gaussian with E|z|^2 = power.
inline std::complex<double> complex_normal(std::mt19937_64& g, double power) {
  std::normal_distribution<double> d(0.0, std::sqrt(power / 2.0));
  const double re = d(g);
  const double im = d(g);
  return {re, im};
}

// O(M^2) textbook DFT, independent of the library's transform.
inline std::vector<std::complex<double>> direct_dft(const std::vector<double>& x) {
  const std::size_t m = x.size();
  std::vector<std::complex<double>> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::complex<double> acc{};
    for (std::size_t t = 0; t < m; ++t) {
      const double ang = -2.0 * M_PI * static_cast<double>((k * t) % m) / static_cast<double>(m);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("nlcoh_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace test
