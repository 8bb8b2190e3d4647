#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "midal/error.hpp"

namespace midal {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const noexcept { return height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width);
}

inline void require_same_shape(const Shape& a, const Shape& b, const char* where) {
  if (a != b) {
    throw InvalidArgument(std::string(where) + ": shape mismatch " + to_string(a) + " vs " +
                          to_string(b));
  }
}

/// Dense row-major grid of real pixel values.
///
/// Carries every image-like quantity of the solver: the observation, its log,
/// the split variables and the scaled dual. Construction rejects empty shapes
/// and non-finite values; after that the grid is an ordinary value type.
class ImageGrid {
 public:
  ImageGrid() = default;

  ImageGrid(std::size_t height, std::size_t width, double fill = 0.0)
      : shape_{height, width}, data_(height * width, fill) {
    check_shape();
    if (!std::isfinite(fill)) throw InvalidArgument("ImageGrid: non-finite fill value");
  }

  ImageGrid(std::size_t height, std::size_t width, std::vector<double> data)
      : shape_{height, width}, data_(std::move(data)) {
    check_shape();
    if (data_.size() != shape_.size()) {
      throw InvalidArgument("ImageGrid: data length " + std::to_string(data_.size()) +
                            " does not match " + to_string(shape_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw InvalidArgument("ImageGrid: non-finite value at index " + std::to_string(i));
      }
    }
  }

  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t size() const noexcept { return data_.size(); }
  const Shape& shape() const noexcept { return shape_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.width + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.width + c]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  void check_shape() const {
    if (shape_.height == 0 || shape_.width == 0) {
      throw InvalidArgument("ImageGrid: height and width must be positive");
    }
  }

  Shape shape_;
  std::vector<double> data_;
};

/// Horizontal and vertical forward differences of an image. Also used as the
/// dual field of the TV proximity operator, which has the same layout.
struct GradientField {
  GradientField() = default;
  explicit GradientField(const Shape& s) : shape(s), dh(s.size(), 0.0), dv(s.size(), 0.0) {}

  Shape shape;
  std::vector<double> dh;
  std::vector<double> dv;
};

using DualField = GradientField;

// Forward differences, zero across the last column / last row.
inline void gradient_into(const ImageGrid& img, GradientField& out) {
  const std::size_t h = img.height(), w = img.width();
  if (out.shape != img.shape()) out = GradientField(img.shape());
  const auto x = img.values();
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t row = r * w;
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = row + c;
      out.dh[i] = c + 1 < w ? x[i + 1] - x[i] : 0.0;
      out.dv[i] = r + 1 < h ? x[i + w] - x[i] : 0.0;
    }
  }
}

inline GradientField gradient(const ImageGrid& img) {
  GradientField g(img.shape());
  gradient_into(img, g);
  return g;
}

// Negative adjoint of gradient_into: <grad u, p> = -<u, div p>.
inline void divergence_into(const GradientField& p, ImageGrid& out) {
  const std::size_t h = p.shape.height, w = p.shape.width;
  if (out.shape() != p.shape) out = ImageGrid(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t row = r * w;
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = row + c;
      double dx = 0.0;
      if (w > 1) {
        if (c == 0) {
          dx = p.dh[i];
        } else if (c + 1 == w) {
          dx = -p.dh[i - 1];
        } else {
          dx = p.dh[i] - p.dh[i - 1];
        }
      }
      double dy = 0.0;
      if (h > 1) {
        if (r == 0) {
          dy = p.dv[i];
        } else if (r + 1 == h) {
          dy = -p.dv[i - w];
        } else {
          dy = p.dv[i] - p.dv[i - w];
        }
      }
      out[i] = dx + dy;
    }
  }
}

inline ImageGrid divergence(const GradientField& p) {
  ImageGrid out(p.shape.height, p.shape.width);
  divergence_into(p, out);
  return out;
}

/// Isotropic discrete total variation: sum over pixels of |grad img|.
inline double tv_value(const ImageGrid& img) {
  const std::size_t h = img.height(), w = img.width();
  double total = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double dh = c + 1 < w ? img(r, c + 1) - img(r, c) : 0.0;
      const double dv = r + 1 < h ? img(r + 1, c) - img(r, c) : 0.0;
      total += std::sqrt(dh * dh + dv * dv);
    }
  }
  return total;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const ImageGrid& a, const ImageGrid& b) {
  require_same_shape(a.shape(), b.shape(), "dot");
  return dot(a.values(), b.values());
}

inline double dot(const GradientField& a, const GradientField& b) {
  require_same_shape(a.shape, b.shape, "dot");
  return dot(a.dh, b.dh) + dot(a.dv, b.dv);
}

inline double squared_norm(const ImageGrid& a) { return dot(a.values(), a.values()); }

inline double squared_distance(const ImageGrid& a, const ImageGrid& b) {
  require_same_shape(a.shape(), b.shape(), "squared_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double mean(const ImageGrid& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return s / static_cast<double>(a.size());
}

}  // namespace midal
