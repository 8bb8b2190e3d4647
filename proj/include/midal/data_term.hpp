#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "midal/error.hpp"
#include "midal/image.hpp"

namespace midal {

/// Log-domain Gamma likelihood. g holds log of the observed image.
struct LikelihoodParams {
  double looks = 1.0;
  ImageGrid g;
};

/// M * sum_s (z_s + exp(g_s - z_s)), additive constants dropped.
inline double neg_log_likelihood(const ImageGrid& z, const LikelihoodParams& params) {
  require_same_shape(z.shape(), params.g.shape(), "neg_log_likelihood");
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double e = std::exp(params.g[i] - z[i]);
    if (!std::isfinite(e)) {
      throw NumericRangeError("neg_log_likelihood: exp(g - z) overflows at pixel " +
                                  std::to_string(i),
                              static_cast<std::ptrdiff_t>(i));
    }
    s += z[i] + e;
  }
  return params.looks * s;
}

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
};

namespace detail {

// h'(z) = 1 - exp(g - z) + a (z - zp); strictly increasing in z.
struct PixelDerivative {
  double g, zp, a;
  double first(double z) const { return 1.0 - std::exp(g - z) + a * (z - zp); }
};

}  // namespace detail

/// Scalar minimizer of z + exp(g - z) + (a/2)(z - zp)^2 by safeguarded Newton.
///
/// The root of h' lies in [min(zp, g), max(zp, g)]: at the upper end both
/// 1 - exp(g - z) and a (z - zp) are >= 0, at the lower end both are <= 0.
/// Newton starts from the upper end and falls back to bisection whenever a
/// step would leave the current bracket, so exp is only ever evaluated at
/// g - z in [g - max, g - min]. Returns false if max_iter is exhausted.
inline bool solve_pixel(double g, double zp, double a, const NewtonOptions& opt, double& z) {
  const detail::PixelDerivative hp{g, zp, a};
  double lo = std::min(zp, g);
  double hi = std::max(zp, g);
  z = hi;
  for (int it = 0; it < opt.max_iter; ++it) {
    const double e = std::exp(g - z);
    const double f = 1.0 - e + a * (z - zp);
    if (std::abs(f) <= opt.tol) return true;
    if (f > 0.0) {
      hi = z;
    } else {
      lo = z;
    }
    // Bracket collapsed to machine resolution: f cannot get any smaller.
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) {
      return true;
    }
    const double step = f / (e + a);
    // Correction below the spacing of doubles near z: rounding in exp and in
    // a (z - zp) can keep |f| above tol when a is large.
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) {
      return true;
    }
    double next = z - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == z) return true;
    z = next;
  }
  return std::abs(hp.first(z)) <= opt.tol;
}

/// Per-pixel minimizer of sum_s (z_s + exp(g_s - z_s)) + (mu / 2M) ||z - zp||^2.
inline void z_update_into(const ImageGrid& z_prime, const LikelihoodParams& params, double mu,
                          double tol, ImageGrid& out) {
  if (!(mu > 0.0)) throw InvalidArgument("z_update: mu must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("z_update: tol must be positive");
  require_same_shape(z_prime.shape(), params.g.shape(), "z_update");
  if (out.shape() != z_prime.shape()) out = ImageGrid(z_prime.height(), z_prime.width());
  const double a = mu / params.looks;
  const NewtonOptions opt{tol, 50};
  for (std::size_t i = 0; i < z_prime.size(); ++i) {
    double z = 0.0;
    if (!solve_pixel(params.g[i], z_prime[i], a, opt, z)) {
      throw ConvergenceError("z_update: Newton did not converge at pixel " + std::to_string(i),
                             i);
    }
    out[i] = z;
  }
}

inline ImageGrid z_update(const ImageGrid& z_prime, const LikelihoodParams& params, double mu,
                          double tol) {
  ImageGrid out(z_prime.height(), z_prime.width());
  z_update_into(z_prime, params, mu, tol, out);
  return out;
}

/// Reference scalar minimizer by plain bisection on h'. Independent of the
/// Newton path; used to check it.
inline double z_update_oracle(double g, double z_prime, double a) {
  if (!(a > 0.0)) throw InvalidArgument("z_update_oracle: a must be positive");
  const detail::PixelDerivative hp{g, z_prime, a};
  // Any interval with h'(lo) <= 0 <= h'(hi) works; widen a symmetric guess
  // instead of reusing the analytic bracket of the Newton solver.
  double lo = z_prime - 1.0, hi = z_prime + 1.0;
  while (hp.first(lo) > 0.0) lo -= 2.0 * (hi - lo);
  while (hp.first(hi) < 0.0) hi += 2.0 * (hi - lo);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hp.first(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace midal
