#include <doctest.h>

#include <random>

#include "reference/reference_values.hpp"
#include "support/oracles.hpp"
#include "wdfp/filters.hpp"

using namespace wdfp;

namespace {

ImagePlane random_plane(std::size_t rows, std::size_t cols, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, sd);
  ImagePlane p(rows, cols);
  for (double& v : p.values()) v = n(rng);
  return p;
}

ComplexPlane random_complex(std::size_t rows, std::size_t cols, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, sd);
  ComplexPlane p(rows, cols);
  for (auto& z : p.values()) z = {n(rng), n(rng)};
  return p;
}

double max_abs_diff(const ImagePlane& a, const ImagePlane& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double energy(const ImagePlane& p) {
  double e = 0.0;
  for (double v : p.values()) e += v * v;
  return e;
}

}  // namespace

TEST_CASE("config validation") {
  FilterConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.window_sides = {3, 4};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = FilterConfig{};
  cfg.sigma_n2 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = FilterConfig{};
  cfg.window_sides = {1};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("local variance on constant planes") {
  FilterConfig cfg;
  for (double v : values_of(local_variance_min(ImagePlane(16, 16, 0.0), cfg).values())) CHECK(v == 0.0);
  const VarianceMap two = local_variance_min(ImagePlane(16, 16, 2.0), cfg);
  for (double v : values_of(two.values())) CHECK(v == doctest::Approx(0.76).epsilon(1e-12));
  for (double v : values_of(local_variance_min(ImagePlane(16, 16, 1.0), cfg).values())) CHECK(v == 0.0);
}

TEST_CASE("window larger than the plane") {
  try {
    local_variance_min(ImagePlane(8, 16, 1.0), FilterConfig{});
    FAIL("expected WindowTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooLarge);
  }
}

TEST_CASE("wiener shrink arithmetic") {
  const ImagePlane w(1, 1, 2.0);
  CHECK(wiener_shrink(ImagePlane(1, 1, 5.0), VarianceMap(ImagePlane(1, 1, 0.0)), 3.24)(0, 0) == 0.0);
  CHECK(wiener_shrink(w, VarianceMap(ImagePlane(1, 1, 3.24)), 3.24)(0, 0) == 1.0);
  CHECK(wiener_shrink(w, VarianceMap(ImagePlane(1, 1, 3.24e6)), 3.24)(0, 0) ==
        doctest::Approx(1.999998).epsilon(1e-12));
  CHECK_THROWS_AS(wiener_shrink(w, VarianceMap(ImagePlane(2, 1)), 3.24), Error);
}

TEST_CASE("mihcak filter on constant planes") {
  FilterConfig cfg;
  for (double v : values_of(mihcak_filter(ImagePlane(16, 16, 0.0), cfg))) CHECK(v == 0.0);
  for (double v : values_of(mihcak_filter(ImagePlane(16, 16, 2.0), cfg))) {
    CHECK(v == doctest::Approx(0.38).epsilon(1e-12));
  }
}

TEST_CASE("mihcak filter equals the naive per-pixel loop exactly") {
  std::mt19937_64 rng(31);
  for (double sd : {0.5, 2.0, 8.0}) {
    const ImagePlane w = random_plane(19, 23, sd, rng);
    FilterConfig cfg;
    CHECK(mihcak_filter(w, cfg) == oracle::mihcak(w, cfg.sigma_n2, cfg.window_sides));
    cfg.sigma_n2 = 10.4976;
    cfg.window_sides = {5, 3};
    CHECK(mihcak_filter(w, cfg) == oracle::mihcak(w, cfg.sigma_n2, cfg.window_sides));
  }
}

TEST_CASE("shrinkage never grows a coefficient and noise part is the complement") {
  std::mt19937_64 rng(32);
  const ImagePlane w = random_plane(32, 32, 3.0, rng);
  FilterConfig cfg;
  const ImagePlane est = mihcak_filter(w, cfg);
  const ImagePlane noise = mihcak_noise(w, cfg);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::abs(est.data()[i]) <= std::abs(w.data()[i]));
    CHECK(std::abs(est.data()[i] + noise.data()[i] - w.data()[i]) < 1e-12);
  }
}

TEST_CASE("local variance is antitone in the noise variance") {
  std::mt19937_64 rng(33);
  const ImagePlane w = random_plane(24, 24, 2.0, rng);
  FilterConfig lo, hi;
  hi.sigma_n2 = 5.0;
  const auto a = local_variance_min(w, lo), b = local_variance_min(w, hi);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(b.values().data()[i] <= a.values().data()[i]);
    CHECK(a.values().data()[i] >= 0.0);
  }
}

TEST_CASE("complex shrinkage") {
  FilterConfig cfg;
  for (const auto& z : values_of(mihcak_filter_complex(ComplexPlane(16, 16), cfg))) CHECK(z == 0.0);

  std::mt19937_64 rng(34);
  const ImagePlane re = random_plane(16, 16, 2.0, rng);
  const ComplexPlane as_complex = to_complex(re);
  CHECK(real_part(mihcak_filter_complex(as_complex, cfg)) == mihcak_filter(re, cfg));

  // Constant magnitude 2, varying phase.
  ComplexPlane ring(16, 16);
  std::uniform_real_distribution<double> phase(-3.1, 3.1);
  for (auto& z : ring.values()) z = std::polar(2.0, phase(rng));
  const ComplexPlane out = mihcak_filter_complex(ring, cfg);
  for (std::size_t i = 0; i < ring.size(); ++i) {
    CHECK(std::abs(out.data()[i]) == doctest::Approx(0.38).epsilon(1e-9));
    CHECK(std::abs(std::arg(out.data()[i]) - std::arg(ring.data()[i])) < 1e-12);
  }

  const ComplexPlane noisy = random_complex(20, 20, 3.0, rng);
  const ComplexPlane filtered = mihcak_filter_complex(noisy, cfg);
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const auto ratio = filtered.data()[i] / noisy.data()[i];
    CHECK(std::abs(ratio.imag()) < 1e-12);
    CHECK(ratio.real() >= 0.0);
  }
}

TEST_CASE("fourier wiener matches the direct DFT oracle") {
  namespace ref = wdfp::reference;
  struct Case {
    const double* data;
    std::size_t n;
    std::vector<int> sides;
  };
  for (const Case& c : {Case{ref::kNormal8, 8, {3, 5, 7}}, Case{ref::kNormal16, 16, {3, 5, 7, 9}}}) {
    const ImagePlane x(c.n, c.n, std::vector<double>(c.data, c.data + c.n * c.n));
    FilterConfig cfg;
    cfg.window_sides = c.sides;
    const double sn = sample_variance(x);
    const ComplexPlane expect = oracle::fourier_wiener(to_complex(x), c.sides, sn);
    CHECK(max_abs_diff(fourier_wiener(x, cfg), real_part(expect)) < 1e-9);
    const ComplexPlane expect_noise = oracle::fourier_wiener(to_complex(x), c.sides, sn, true);
    CHECK(max_abs_diff(fourier_wiener_noise(x, cfg), real_part(expect_noise)) < 1e-9);

    cfg.fourier_noise_power = 0.25;
    const ComplexPlane fixed = oracle::fourier_wiener(to_complex(x), c.sides, 0.25);
    CHECK(max_abs_diff(fourier_wiener(x, cfg), real_part(fixed)) < 1e-9);
  }
}

TEST_CASE("complex fourier wiener") {
  std::mt19937_64 rng(35);
  FilterConfig cfg;
  for (const auto& z : values_of(fourier_wiener_complex(ComplexPlane(16, 16), cfg))) CHECK(z == 0.0);

  const ImagePlane re = random_plane(16, 16, 1.0, rng);
  const ComplexPlane expect = oracle::fourier_wiener(to_complex(re), cfg.window_sides,
                                                     oracle::sample_variance(to_complex(re)));
  const ComplexPlane got = fourier_wiener_complex(to_complex(re), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got.data()[i] - expect.data()[i]));
  CHECK(worst < 1e-9);

  const ComplexPlane z = random_complex(16, 12 + 4, 2.0, rng);
  const ComplexPlane ez = oracle::fourier_wiener(z, cfg.window_sides, oracle::sample_variance(z), true);
  const ComplexPlane gz = fourier_wiener_noise_complex(z, cfg);
  worst = 0.0;
  double ein = 0.0, eout = 0.0;
  for (std::size_t i = 0; i < gz.size(); ++i) {
    worst = std::max(worst, std::abs(gz.data()[i] - ez.data()[i]));
    ein += std::norm(z.data()[i]);
    eout += std::norm(gz.data()[i]);
  }
  CHECK(worst < 1e-9);
  CHECK(eout <= ein);
}

TEST_CASE("fourier wiener maps zero to zero and never adds energy") {
  FilterConfig cfg;
  for (double v : values_of(fourier_wiener(ImagePlane(16, 16), cfg))) CHECK(v == 0.0);
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 5; ++trial) {
    const ImagePlane x = random_plane(32, 24, 4.0, rng);
    CHECK(energy(fourier_wiener(x, cfg)) <= energy(x));
    CHECK(energy(fourier_wiener_noise(x, cfg)) <= energy(x));
  }
}

TEST_CASE("zero mean") {
  const ImagePlane z = zero_mean(ImagePlane(2, 2, std::vector<double>{1, 2, 3, 4}));
  for (double v : z.values()) CHECK(v == 0.0);
  for (double v : values_of(zero_mean(ImagePlane(5, 3, 7.0)))) CHECK(v == 0.0);

  std::mt19937_64 rng(37);
  const ImagePlane x = random_plane(13, 17, 5.0, rng);
  const ImagePlane y = zero_mean(x);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    double s = 0.0;
    for (double v : y.row(r)) s += v;
    CHECK(std::abs(s / y.cols()) < 1e-12);
  }
  for (std::size_t c = 0; c < y.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < y.rows(); ++r) s += y(r, c);
    CHECK(std::abs(s / y.rows()) < 1e-12);
  }
  CHECK(max_abs_diff(zero_mean(y), y) < 1e-12);
}

TEST_CASE("sample variance") {
  CHECK(sample_variance(ImagePlane(1, 4, std::vector<double>{1, 2, 3, 4})) ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(sample_variance(ImagePlane(1, 1, 3.0)) == 0.0);
}
