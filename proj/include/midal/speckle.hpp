#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "midal/error.hpp"
#include "midal/image.hpp"

namespace midal {

struct SpeckleParams {
  double looks = 1.0;  // M
  std::uint64_t seed = 0;
};

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: the k-th word of stream s under seed is a pure
/// function mix(key(seed, s) ^ k * C). Each pixel owns stream s = pixel index,
/// so a noise field does not depend on the order pixels are generated in.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(detail::mix64(detail::mix64(seed) + 0x9E3779B97F4A7C15ULL * (stream + 1))) {}

  std::uint64_t next_u64() noexcept {
    return detail::mix64(key_ ^ (0xD1B54A32D192ED03ULL * ++counter_));
  }

  // Uniform on the open interval (0, 1).
  double next_open01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_open01()));
    const double theta = 2.0 * std::numbers::pi * next_open01();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline void validate(const SpeckleParams& p) {
  if (!(p.looks >= 1.0) || !std::isfinite(p.looks)) {
    throw InvalidArgument("speckle: looks must be a finite number >= 1, got " +
                          std::to_string(p.looks));
  }
}

/// One draw of unit-mean Gamma(M, 1/M) noise.
///
/// Integer M sums M unit exponentials; other M use Marsaglia-Tsang rejection.
inline double draw_unit_gamma(double looks, CounterRng& rng) {
  if (looks == std::floor(looks) && looks <= 1024.0) {
    const int m = static_cast<int>(looks);
    double acc = 0.0;
    for (int k = 0; k < m; ++k) acc -= std::log(rng.next_open01());
    return acc / looks;
  }
  const double d = looks - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.next_open01();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / looks;
  }
}

inline ImageGrid sample_gamma_noise(const SpeckleParams& params, std::size_t height,
                                    std::size_t width) {
  validate(params);
  ImageGrid out(height, width, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CounterRng rng(params.seed, i);
    out[i] = draw_unit_gamma(params.looks, rng);
  }
  return out;
}

/// y = x * n with n ~ Gamma(M, 1/M) per pixel.
inline ImageGrid apply_speckle(const ImageGrid& clean, const SpeckleParams& params) {
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (!(clean[i] > 0.0)) {
      throw InvalidArgument("apply_speckle: non-positive clean pixel at index " +
                            std::to_string(i));
    }
  }
  ImageGrid noisy = sample_gamma_noise(params, clean.height(), clean.width());
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] *= clean[i];
  return noisy;
}

/// Affine map of [min(img), max(img)] onto [xmin, xmax]. The extrema land on
/// the targets exactly.
inline ImageGrid rescale_image(const ImageGrid& img, double xmin, double xmax) {
  if (!(xmin > 0.0) || !(xmax > xmin)) {
    throw InvalidArgument("rescale_image: need xmax > xmin > 0");
  }
  const auto [lo_it, hi_it] = std::minmax_element(img.values().begin(), img.values().end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw InvalidArgument("rescale_image: constant input image");
  const double scale = (xmax - xmin) / (hi - lo);
  ImageGrid out = img;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = img[i];
    if (v == lo) {
      out[i] = xmin;
    } else if (v == hi) {
      out[i] = xmax;
    } else {
      out[i] = std::clamp(xmin + (v - lo) * scale, xmin, xmax);
    }
  }
  return out;
}

}  // namespace midal
