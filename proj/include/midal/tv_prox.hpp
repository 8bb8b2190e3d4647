#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "midal/error.hpp"
#include "midal/image.hpp"

namespace midal {

struct ProxParams {
  double gamma = 0.0;  // lambda / mu inside the solver
  int inner_iters = 20;
  double tau = 0.248;
};

inline void validate(const ProxParams& p) {
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) {
    throw InvalidArgument("tv_prox: gamma must be finite and non-negative");
  }
  if (p.inner_iters < 1) throw InvalidArgument("tv_prox: inner_iters must be >= 1");
  if (!(p.tau > 0.0 && p.tau <= 0.25)) throw InvalidArgument("tv_prox: tau must be in (0, 1/4]");
}

/// Dual variables of the TV proximity operator, kept between calls so each
/// call resumes where the previous one stopped.
class ProxState {
 public:
  ProxState() = default;
  explicit ProxState(const Shape& shape) : dual(shape) {}

  DualField dual;
  double last_gamma = 0.0;

  // Per-call work buffers, reused to avoid reallocation. Not part of the state.
  struct Scratch {
    ImageGrid div;
    GradientField grad;
  } scratch;

  // Clears the dual field back to the cold-start state.
  void reset() {
    std::fill(dual.dh.begin(), dual.dh.end(), 0.0);
    std::fill(dual.dv.begin(), dual.dv.end(), 0.0);
  }
};

struct NoObserver {
  void operator()(int, const DualField&) const noexcept {}
};

/// prox of gamma * TV at u_prime: argmin_u 1/2 ||u - u_prime||^2 + gamma TV(u).
///
/// Runs inner_iters sweeps of
///   p <- (p + tau grad(div p - u'/gamma)) / (1 + tau |grad(div p - u'/gamma)|)
/// from state.dual and returns u' - gamma div p. Every sweep reads only the
/// previous p. observer(iteration, p) is called after each sweep.
template <typename Observer = NoObserver>
ImageGrid tv_prox(const ImageGrid& u_prime, const ProxParams& params, ProxState& state,
                  Observer&& observer = {}) {
  validate(params);
  if (state.dual.shape != u_prime.shape()) {
    throw InvalidArgument("tv_prox: dual state " + to_string(state.dual.shape) +
                          " does not match image " + to_string(u_prime.shape()));
  }
  state.last_gamma = params.gamma;
  if (params.gamma == 0.0) return u_prime;

  const std::size_t n = u_prime.size();
  const double inv_gamma = 1.0 / params.gamma;
  const double tau = params.tau;
  ImageGrid& w = state.scratch.div;
  GradientField& gw = state.scratch.grad;
  DualField& p = state.dual;

  for (int it = 0; it < params.inner_iters; ++it) {
    divergence_into(p, w);
    for (std::size_t i = 0; i < n; ++i) w[i] -= u_prime[i] * inv_gamma;
    gradient_into(w, gw);
    for (std::size_t i = 0; i < n; ++i) {
      const double gh = gw.dh[i], gv = gw.dv[i];
      const double denom = 1.0 + tau * std::sqrt(gh * gh + gv * gv);
      p.dh[i] = (p.dh[i] + tau * gh) / denom;
      p.dv[i] = (p.dv[i] + tau * gv) / denom;
    }
    observer(it, static_cast<const DualField&>(p));
  }

  divergence_into(p, w);
  ImageGrid u = u_prime;
  for (std::size_t i = 0; i < n; ++i) u[i] -= params.gamma * w[i];
  return u;
}

/// Primal objective at u minus the dual objective at state.dual.
///
/// Dual objective: 1/2||u'||^2 - 1/2||u' - gamma div p||^2, expanded as
/// gamma <u', div p> - gamma^2/2 ||div p||^2 to avoid cancellation.
inline double prox_duality_gap(const ImageGrid& u, const ImageGrid& u_prime,
                               const ProxParams& params, const ProxState& state) {
  require_same_shape(u.shape(), u_prime.shape(), "prox_duality_gap");
  require_same_shape(state.dual.shape, u_prime.shape(), "prox_duality_gap");
  const double primal = 0.5 * squared_distance(u, u_prime) + params.gamma * tv_value(u);
  const ImageGrid div = divergence(state.dual);
  const double dual =
      params.gamma * dot(u_prime, div) - 0.5 * params.gamma * params.gamma * squared_norm(div);
  return primal - dual;
}

}  // namespace midal
