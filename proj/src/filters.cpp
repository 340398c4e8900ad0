#include "wdfp/filters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <fftw3.h>

namespace wdfp {
namespace {

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t period = 2 * m;
  std::ptrdiff_t k = i % period;
  if (k < 0) k += period;
  return static_cast<std::size_t>(k < m ? k : period - 1 - k);
}

ImagePlane pad_symmetric(const ImagePlane& in, std::size_t pad) {
  ImagePlane out(in.rows() + 2 * pad, in.cols() + 2 * pad);
  const auto p = static_cast<std::ptrdiff_t>(pad);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto src = in.row(reflect(static_cast<std::ptrdiff_t>(r) - p, in.rows()));
    auto dst = out.row(r);
    for (std::size_t c = 0; c < out.cols(); ++c) {
      dst[c] = src[reflect(static_cast<std::ptrdiff_t>(c) - p, in.cols())];
    }
  }
  return out;
}

// Gain applied to each coefficient given its local variance estimate.
enum class Keep { Signal, Noise };

inline double gain(Keep keep, double variance, double noise) {
  const double denom = variance + noise;
  if (denom <= 0.0) return 0.0;
  return keep == Keep::Signal ? variance / denom : noise / denom;
}

ImagePlane energy_of(const ImagePlane& sub) {
  ImagePlane e(sub.rows(), sub.cols());
  for (std::size_t i = 0; i < sub.size(); ++i) e.data()[i] = sub.data()[i] * sub.data()[i];
  return e;
}

ImagePlane energy_of(const ComplexPlane& sub) {
  ImagePlane e(sub.rows(), sub.cols());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const double re = sub.data()[i].real(), im = sub.data()[i].imag();
    e.data()[i] = re * re + im * im;
  }
  return e;
}

template <typename T>
Plane<T> apply_gain(const Plane<T>& sub, const VarianceMap& vmap, double noise, Keep keep) {
  if (sub.rows() != vmap.rows() || sub.cols() != vmap.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "variance map does not match subband");
  }
  Plane<T> out(sub.rows(), sub.cols());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    out.data()[i] = sub.data()[i] * gain(keep, vmap.values().data()[i], noise);
  }
  return out;
}

template <typename T>
Plane<T> adaptive(const Plane<T>& sub, const FilterConfig& cfg, Keep keep) {
  cfg.validate();
  const VarianceMap vmap = local_variance_min_energy(energy_of(sub), cfg.sigma_n2, cfg.window_sides);
  return apply_gain(sub, vmap, cfg.sigma_n2, keep);
}

// FFTW planning is not thread-safe; execution with the new-array interface is.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  std::pair<fftw_plan, fftw_plan> get(std::size_t rows, std::size_t cols) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({rows, cols});
    if (it != plans_.end()) return it->second;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * rows * cols));
    const int r = static_cast<int>(rows), c = static_cast<int>(cols);
    fftw_plan fwd = fftw_plan_dft_2d(r, c, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_2d(r, c, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    return plans_[{rows, cols}] = {fwd, inv};
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<fftw_plan, fftw_plan>> plans_;
};

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

ComplexPlane fourier_attenuate(const ComplexPlane& sub, const FilterConfig& cfg, double noise_power,
                               Keep keep) {
  cfg.validate();
  if (sub.empty()) throw Error(ErrorCode::BadDimensions, "Fourier filter on an empty plane");
  const std::size_t rows = sub.rows(), cols = sub.cols(), n = sub.size();
  auto [fwd, inv] = FftPlans::instance().get(rows, cols);

  FftwBuffer buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    buf.data[i][0] = sub.data()[i].real();
    buf.data[i][1] = sub.data()[i].imag();
  }
  fftw_execute_dft(fwd, buf.data, buf.data);

  // Orthonormal scaling puts the spectrum on the same footing as the
  // sample-domain noise power.
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ImagePlane magnitude(rows, cols);
  for (std::size_t i = 0; i < n; ++i) {
    magnitude.data()[i] = std::hypot(buf.data[i][0], buf.data[i][1]) * scale;
  }
  const VarianceMap spectrum =
      local_variance_min_energy(energy_of(magnitude), noise_power, cfg.window_sides);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = gain(keep, spectrum.values().data()[i], noise_power);
    buf.data[i][0] *= g;
    buf.data[i][1] *= g;
  }
  fftw_execute_dft(inv, buf.data, buf.data);

  ComplexPlane out(rows, cols);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.data()[i] = {buf.data[i][0] * inv_n, buf.data[i][1] * inv_n};
  }
  return out;
}

double noise_power_for(const FilterConfig& cfg, double variance) {
  return cfg.fourier_noise_power.value_or(variance);
}

}  // namespace

void FilterConfig::validate() const {
  if (!std::isfinite(sigma_n2) || sigma_n2 <= 0.0) {
    throw Error(ErrorCode::InvalidConfig, "sigma_n2 must be finite and positive");
  }
  if (window_sides.empty()) throw Error(ErrorCode::InvalidConfig, "no window sizes given");
  for (int s : window_sides) {
    if (s < 3 || s % 2 == 0) {
      throw Error(ErrorCode::InvalidConfig, "window side " + std::to_string(s) + " must be odd and >= 3");
    }
  }
  if (fourier_noise_power && (!std::isfinite(*fourier_noise_power) || *fourier_noise_power < 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "Fourier noise power must be finite and non-negative");
  }
}

VarianceMap local_variance_min_energy(const ImagePlane& energy, double noise_variance,
                                      const std::vector<int>& window_sides) {
  const int largest = *std::max_element(window_sides.begin(), window_sides.end());
  const auto largest_side = static_cast<std::size_t>(largest);
  if (energy.rows() < largest_side || energy.cols() < largest_side) {
    throw Error(ErrorCode::WindowTooLarge,
                std::to_string(largest) + "-wide window on a " + std::to_string(energy.rows()) +
                    "x" + std::to_string(energy.cols()) + " subband");
  }
  const std::size_t pad = largest_side / 2;
  const ImagePlane padded = pad_symmetric(energy, pad);
  const std::size_t rows = energy.rows(), cols = energy.cols();

  ImagePlane result(rows, cols);
  std::vector<double> acc(cols);
  bool first = true;
  for (int side : window_sides) {
    const std::size_t s = static_cast<std::size_t>(side);
    const std::size_t offset = pad - s / 2;
    const double count = static_cast<double>(s * s);
    for (std::size_t r = 0; r < rows; ++r) {
      std::fill(acc.begin(), acc.end(), 0.0);
      // Window terms are accumulated in row-major order for every pixel.
      for (std::size_t di = 0; di < s; ++di) {
        const double* src = padded.row(r + offset + di).data() + offset;
        for (std::size_t dj = 0; dj < s; ++dj) {
          const double* shifted = src + dj;
          for (std::size_t c = 0; c < cols; ++c) acc[c] += shifted[c];
        }
      }
      auto out = result.row(r);
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = std::max(0.0, acc[c] / count - noise_variance);
        out[c] = first ? v : std::min(out[c], v);
      }
    }
    first = false;
  }
  return VarianceMap(std::move(result));
}

VarianceMap local_variance_min(const ImagePlane& sub, const FilterConfig& cfg) {
  cfg.validate();
  return local_variance_min_energy(energy_of(sub), cfg.sigma_n2, cfg.window_sides);
}

ImagePlane wiener_shrink(const ImagePlane& sub, const VarianceMap& vmap, double sigma_n2) {
  return apply_gain(sub, vmap, sigma_n2, Keep::Signal);
}

ImagePlane mihcak_filter(const ImagePlane& sub, const FilterConfig& cfg) {
  return adaptive(sub, cfg, Keep::Signal);
}

ImagePlane mihcak_noise(const ImagePlane& sub, const FilterConfig& cfg) {
  return adaptive(sub, cfg, Keep::Noise);
}

ComplexPlane mihcak_filter_complex(const ComplexPlane& sub, const FilterConfig& cfg) {
  return adaptive(sub, cfg, Keep::Signal);
}

ComplexPlane mihcak_noise_complex(const ComplexPlane& sub, const FilterConfig& cfg) {
  return adaptive(sub, cfg, Keep::Noise);
}

ImagePlane fourier_wiener(const ImagePlane& sub, const FilterConfig& cfg) {
  const double sn = noise_power_for(cfg, sample_variance(sub));
  return real_part(fourier_attenuate(to_complex(sub), cfg, sn, Keep::Signal));
}

ImagePlane fourier_wiener_noise(const ImagePlane& sub, const FilterConfig& cfg) {
  const double sn = noise_power_for(cfg, sample_variance(sub));
  return real_part(fourier_attenuate(to_complex(sub), cfg, sn, Keep::Noise));
}

ComplexPlane fourier_wiener_complex(const ComplexPlane& sub, const FilterConfig& cfg) {
  return fourier_attenuate(sub, cfg, noise_power_for(cfg, sample_variance(sub)), Keep::Signal);
}

ComplexPlane fourier_wiener_noise_complex(const ComplexPlane& sub, const FilterConfig& cfg) {
  return fourier_attenuate(sub, cfg, noise_power_for(cfg, sample_variance(sub)), Keep::Noise);
}

ImagePlane zero_mean(const ImagePlane& plane) {
  if (plane.empty()) throw Error(ErrorCode::BadDimensions, "zero_mean on an empty plane");
  ImagePlane out = plane;
  const std::size_t rows = out.rows(), cols = out.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = out.row(r);
    double sum = 0.0;
    for (double v : row) sum += v;
    const double mean = sum / static_cast<double>(cols);
    for (double& v : row) v -= mean;
  }
  std::vector<double> col_sum(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = out.row(r);
    for (std::size_t c = 0; c < cols; ++c) col_sum[c] += row[c];
  }
  for (double& s : col_sum) s /= static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < cols; ++c) row[c] -= col_sum[c];
  }
  return out;
}

double sample_variance(const ImagePlane& plane) {
  const std::size_t n = plane.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : plane.values()) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : plane.values()) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(n - 1);
}

double sample_variance(const ComplexPlane& plane) {
  const std::size_t n = plane.size();
  if (n < 2) return 0.0;
  std::complex<double> mean = 0.0;
  for (const auto& v : plane.values()) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const auto& v : plane.values()) {
    const std::complex<double> d = v - mean;
    ss += d.real() * d.real() + d.imag() * d.imag();
  }
  return ss / static_cast<double>(n - 1);
}

}  // namespace wdfp
