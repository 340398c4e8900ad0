#pragma once

#include <optional>
#include <vector>

#include "wdfp/plane.hpp"

namespace wdfp {

/// Noise model shared by the wavelet-domain and Fourier-domain filters.
struct FilterConfig {
  double sigma_n2 = 3.24;  // 1.8^2
  std::vector<int> window_sides{3, 5, 7, 9};
  /// Noise power for the Fourier-domain stage; when unset each call uses the
  /// sample variance of the plane it filters.
  std::optional<double> fourier_noise_power;

  void validate() const;
};

/// Per-coefficient local signal variance (sigma-hat squared); never negative.
class VarianceMap {
 public:
  VarianceMap() = default;
  explicit VarianceMap(ImagePlane values) : values_(std::move(values)) {}

  const ImagePlane& values() const noexcept { return values_; }
  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_(r, c); }

 private:
  ImagePlane values_;
};

/// min over window sides s of max(0, mean_{s x s}(w^2) - sigma_n2), with
/// half-sample symmetric extension at the borders.
VarianceMap local_variance_min(const ImagePlane& sub, const FilterConfig& cfg);

/// Same estimator driven by precomputed energies (w^2 or |w|^2).
VarianceMap local_variance_min_energy(const ImagePlane& energy, double noise_variance,
                                      const std::vector<int>& window_sides);

/// w * v / (v + sigma_n2): the Wiener estimate of the clean coefficient.
ImagePlane wiener_shrink(const ImagePlane& sub, const VarianceMap& vmap, double sigma_n2);

/// Locally adaptive (Mihcak) shrinkage: local_variance_min then wiener_shrink.
ImagePlane mihcak_filter(const ImagePlane& sub, const FilterConfig& cfg);
/// The part the shrinkage removes, w - mihcak_filter(w) = w * sigma_n2 / (v + sigma_n2).
/// This is the sensor-noise estimate the fingerprint pipelines keep.
ImagePlane mihcak_noise(const ImagePlane& sub, const FilterConfig& cfg);

/// Complex variants: variance from |w|^2, real gain applied, phase untouched.
ComplexPlane mihcak_filter_complex(const ComplexPlane& sub, const FilterConfig& cfg);
ComplexPlane mihcak_noise_complex(const ComplexPlane& sub, const FilterConfig& cfg);

/// Fourier-domain Wiener filter. The local power spectrum is estimated with
/// local_variance_min on the orthonormally scaled magnitudes |F|/sqrt(MN),
/// and each DFT coefficient is scaled by S/(S + Sn). The real part of the
/// inverse DFT is returned.
ImagePlane fourier_wiener(const ImagePlane& sub, const FilterConfig& cfg);
/// Complementary gain Sn/(S + Sn): keeps the flat (noise-like) spectrum and
/// suppresses peaks from periodic artifacts.
ImagePlane fourier_wiener_noise(const ImagePlane& sub, const FilterConfig& cfg);

ComplexPlane fourier_wiener_complex(const ComplexPlane& sub, const FilterConfig& cfg);
ComplexPlane fourier_wiener_noise_complex(const ComplexPlane& sub, const FilterConfig& cfg);

/// Subtract every row mean, then every column mean of the result.
ImagePlane zero_mean(const ImagePlane& plane);

/// Unbiased sample variance (n - 1 denominator); 0 for fewer than two samples.
double sample_variance(const ImagePlane& plane);
double sample_variance(const ComplexPlane& plane);

}  // namespace wdfp
