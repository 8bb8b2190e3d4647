#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "midal/image.hpp"
#include "midal/speckle.hpp"

namespace midal {

/// Piecewise-constant synthetic test image in [0, 1].
///
/// Stands in for reference images that are not publicly distributed. The
/// layout (rectangles, disks, ellipses at a handful of gray levels) is a
/// deterministic function of name and shape.
inline ImageGrid make_phantom(std::string_view name, std::size_t height, std::size_t width) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char ch : name) h = (h ^ ch) * 0x100000001B3ULL;
  CounterRng rng(h, 0);

  ImageGrid img(height, width, 0.25);
  const double H = static_cast<double>(height), W = static_cast<double>(width);
  const int shapes = 10 + static_cast<int>(rng.next_u64() % 8);
  for (int s = 0; s < shapes; ++s) {
    const int kind = static_cast<int>(rng.next_u64() % 3);
    // The first shape is always bright so the image is never constant.
    const double level = s == 0 ? 1.0 : std::round(rng.next_open01() * 4.0) / 4.0;
    const double cy = rng.next_open01() * H, cx = rng.next_open01() * W;
    const double ry = (0.05 + 0.2 * rng.next_open01()) * H;
    const double rx = (0.05 + 0.2 * rng.next_open01()) * W;
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const double dy = (static_cast<double>(r) + 0.5 - cy) / ry;
        const double dx = (static_cast<double>(c) + 0.5 - cx) / rx;
        bool inside = false;
        switch (kind) {
          case 0: inside = std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0; break;
          case 1: inside = dx * dx + dy * dy * (ry * ry) / (rx * rx) <= 1.0; break;  // disk of radius rx
          default: inside = dx * dx + dy * dy <= 1.0; break;
        }
        if (inside) img(r, c) = level;
      }
    }
  }
  return img;
}

}  // namespace midal
