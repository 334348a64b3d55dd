#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "nlcoh/error.hpp"
#include "nlcoh/simd/kernels.hpp"

using namespace nlcoh::simd;

namespace {

void check_against_scalar(const KernelTable& v) {
  const KernelTable& s = detail::scalar_table();
  for (std::size_t n : {1u, 3u, 4u, 7u, 33u, 257u}) {
    for (std::size_t taps : {1u, 5u, 7u}) {
      for (std::size_t stride : {1u, 2u, 8u}) {
        const std::size_t len = n + (taps - 1) * stride;
        const auto in = test::random_vector(len, 11 + n);
        const auto w = test::random_vector(taps, 12 + taps);
        auto out_s = test::random_vector(n, 13);
        auto out_v = out_s;
        s.fir_accumulate(out_s.data(), in.data(), w.data(), taps, stride, n);
        v.fir_accumulate(out_v.data(), in.data(), w.data(), taps, stride, n);
        CHECK(test::max_abs_diff(out_s, out_v) <= 1e-12);

        const auto g = test::random_vector(n, 14);
        std::vector<double> gw_s(taps, 0.5), gw_v(taps, 0.5);
        s.fir_weight_grad(gw_s.data(), g.data(), in.data(), taps, stride, n);
        v.fir_weight_grad(gw_v.data(), g.data(), in.data(), taps, stride, n);
        CHECK(test::max_abs_diff(gw_s, gw_v) <= 1e-11);
      }
    }
    const auto a = test::random_vector(n, 21);
    const auto b = test::random_vector(n, 22);
    CHECK(std::abs(s.dot(a.data(), b.data(), n) - v.dot(a.data(), b.data(), n)) <= 1e-11);
    CHECK(std::abs(s.squared_distance(a.data(), b.data(), n) - v.squared_distance(a.data(), b.data(), n)) <= 1e-11);
    auto y_s = b, y_v = b;
    s.axpy(0.37, a.data(), y_s.data(), n);
    v.axpy(0.37, a.data(), y_v.data(), n);
    CHECK(test::max_abs_diff(y_s, y_v) <= 1e-14);

    std::vector<std::complex<double>> ca(n), cb(n), acc_s(n, {1.0, -1.0}), acc_v(n, {1.0, -1.0});
    for (std::size_t i = 0; i < n; ++i) {
      ca[i] = {a[i], b[i]};
      cb[i] = {b[i] * 0.5, -a[i]};
    }
    s.cross_accumulate(acc_s.data(), ca.data(), cb.data(), n);
    v.cross_accumulate(acc_v.data(), ca.data(), cb.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(acc_s[i] - acc_v[i]) <= 1e-13);
  }

  std::vector<double> xs = {0.0, -0.0, 1e-300, -1e-8, 0.3, 0.6249999, 0.625, -0.625, 0.7, 1.0,
                            -2.5, 5.0, 18.9, 19.5, -30.0, 700.0, -1e300, INFINITY, -INFINITY};
  for (int i = -4000; i <= 4000; ++i) xs.push_back(i * 0.00537);
  auto t_s = xs, t_v = xs;
  s.tanh_inplace(t_s.data(), t_s.size());
  v.tanh_inplace(t_v.data(), t_v.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CAPTURE(xs[i]);
    CHECK(std::abs(t_s[i] - t_v[i]) <= 4e-16 * std::max(std::abs(t_s[i]), 1e-300) + 1e-300);
    CHECK(std::signbit(t_s[i]) == std::signbit(t_v[i]));
  }
  double nans[4] = {0.1, std::nan(""), -0.1, 0.2};
  v.tanh_inplace(nans, 4);
  CHECK(std::isnan(nans[1]));
}

}  // namespace

TEST_CASE("scalar kernels match hand-computed values") {
  const KernelTable& s = detail::scalar_table();
  const double in[] = {1, 2, 3, 4, 5, 6};
  const double w[] = {1, -1};
  double out[3] = {0, 0, 0};
  s.fir_accumulate(out, in, w, 2, 2, 3);  // in[t] - in[t+2]
  CHECK(out[0] == -2.0);
  CHECK(out[1] == -2.0);
  CHECK(out[2] == -2.0);
  const std::complex<double> a[] = {{1, 2}}, b[] = {{3, -1}};
  std::complex<double> acc[] = {{0, 0}};
  s.cross_accumulate(acc, a, b, 1);
  CHECK(acc[0] == std::complex<double>(1, 2) * std::complex<double>(3, 1));
}

TEST_CASE("vector kernels agree with the scalar reference") {
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_supported(isa)) continue;
    CAPTURE(isa_name(isa));
    check_against_scalar(kernels(isa));
  }
}

TEST_CASE("isa names parse and unsupported selections are rejected") {
  CHECK(parse_isa("scalar") == Isa::scalar);
  CHECK(parse_isa("avx2") == Isa::avx2);
  CHECK_THROWS_AS(parse_isa("sse9"), nlcoh::InvalidInput);
  CHECK(isa_supported(Isa::scalar));
  const Isa before = active_isa();
  set_active_isa(Isa::scalar);
  CHECK(kernels().isa == Isa::scalar);
  set_active_isa(before);
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (!isa_supported(isa)) CHECK_THROWS(set_active_isa(isa));
}
