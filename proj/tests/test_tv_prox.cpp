#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "midal/tv_prox.hpp"
#include "oracles.hpp"

namespace midal {
namespace {

ImageGrid random_image(std::size_t h, std::size_t w, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> ud(0.0, scale);
  std::vector<double> v(h * w);
  for (double& x : v) x = ud(rng);
  return ImageGrid(h, w, std::move(v));
}

oracle::Grid to_grid(const ImageGrid& img) {
  return {img.height(), img.width(), {img.values().begin(), img.values().end()}};
}

TEST(TvProx, ZeroGammaIsIdentity) {
  std::mt19937_64 rng(1);
  const ImageGrid u = random_image(5, 6, rng);
  ProxState st(u.shape());
  EXPECT_EQ(tv_prox(u, {0.0, 20, 0.248}, st), u);
}

TEST(TvProx, ConstantInputIsFixed) {
  const ImageGrid u(7, 9, -1.75);
  for (double gamma : {0.01, 1.0, 50.0}) {
    ProxState st(u.shape());
    const ImageGrid out = tv_prox(u, {gamma, 100, 0.248}, st);
    for (double v : out.values()) EXPECT_NEAR(v, -1.75, 1e-10);
  }
}

TEST(TvProx, RejectsInvalidParameters) {
  const ImageGrid u(4, 4, 1.0);
  ProxState st(u.shape());
  EXPECT_THROW(tv_prox(u, {-0.1, 20, 0.248}, st), InvalidArgument);
  EXPECT_THROW(tv_prox(u, {0.1, 0, 0.248}, st), InvalidArgument);
  EXPECT_THROW(tv_prox(u, {0.1, 20, 0.3}, st), InvalidArgument);
  EXPECT_THROW(tv_prox(u, {0.1, 20, 0.0}, st), InvalidArgument);
  ProxState wrong(Shape{4, 5});
  EXPECT_THROW(tv_prox(u, {0.1, 20, 0.248}, wrong), InvalidArgument);
}

// The fixed point is the prox. The sweep count is generous on purpose: at
// gamma = 0.3 this image still sits 2e-4 off after 2000 sweeps (O(1/k) tail).
TEST(TvProx, ConvergesToProjectedDualOracle) {
  std::mt19937_64 rng(2);
  const ImageGrid u = random_image(8, 8, rng);
  ProxState st(u.shape());
  const ImageGrid out = tv_prox(u, {0.3, 20000, 0.248}, st);
  const std::vector<double> ref = oracle::tv_prox_projected(to_grid(u), 0.3, 100000);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], ref[i], 1e-6) << "pixel " << i;
}

TEST(TvProx, DualStaysFeasibleEveryIteration) {
  std::mt19937_64 rng(3);
  const ImageGrid u = random_image(12, 10, rng, 5.0);
  ProxState st(u.shape());
  int calls = 0;
  double worst = 0.0;
  tv_prox(u, {0.7, 200, 0.248}, st, [&](int, const DualField& p) {
    ++calls;
    for (std::size_t i = 0; i < p.dh.size(); ++i) {
      worst = std::max(worst, std::hypot(p.dh[i], p.dv[i]));
    }
  });
  EXPECT_EQ(calls, 200);
  EXPECT_LE(worst, 1.0 + 1e-12);
}

TEST(TvProx, PreservesMean) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const ImageGrid u = random_image(9, 11, rng, 3.0);
    ProxState st(u.shape());
    const ImageGrid out = tv_prox(u, {0.5, 37, 0.248}, st);
    EXPECT_LE(std::abs(mean(out) - mean(u)), 1e-9 * std::abs(mean(u)) + 1e-12);
  }
}

TEST(TvProx, Nonexpansive) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const ImageGrid a = random_image(8, 8, rng), b = random_image(8, 8, rng);
    ProxState sa(a.shape()), sb(b.shape());
    const ProxParams pp{0.4, 3000, 0.248};
    const ImageGrid pa = tv_prox(a, pp, sa), pb = tv_prox(b, pp, sb);
    EXPECT_LE(std::sqrt(squared_distance(pa, pb)), std::sqrt(squared_distance(a, b)) + 1e-3);
  }
}

// Warm starting: two calls of n sweeps equal one call of 2n sweeps.
TEST(TvProx, StatePersistsAcrossCalls) {
  std::mt19937_64 rng(6);
  const ImageGrid u = random_image(6, 7, rng);
  ProxState split(u.shape()), whole(u.shape());
  tv_prox(u, {0.3, 15, 0.248}, split);
  const ImageGrid a = tv_prox(u, {0.3, 15, 0.248}, split);
  const ImageGrid b = tv_prox(u, {0.3, 30, 0.248}, whole);
  EXPECT_EQ(a, b);
  EXPECT_EQ(split.last_gamma, 0.3);
  split.reset();
  for (double v : split.dual.dh) EXPECT_EQ(v, 0.0);
}

TEST(ProxDualityGap, ZeroAtConstantInput) {
  const ImageGrid u(5, 5, 0.8);
  ProxState st(u.shape());
  EXPECT_NEAR(prox_duality_gap(u, u, {2.0, 20, 0.248}, st), 0.0, 1e-12);
}

TEST(ProxDualityGap, ShrinksWithMoreIterations) {
  std::mt19937_64 rng(7);
  const ImageGrid u = random_image(16, 16, rng, 2.0);
  const ProxParams few{0.5, 20, 0.248}, many{0.5, 2000, 0.248};
  ProxState s1(u.shape()), s2(u.shape());
  const ImageGrid a = tv_prox(u, few, s1);
  const ImageGrid b = tv_prox(u, many, s2);
  const double gap_few = prox_duality_gap(a, u, few, s1);
  const double gap_many = prox_duality_gap(b, u, many, s2);
  EXPECT_LE(gap_many, gap_few);
  EXPECT_LT(gap_many, 1e-3);
}

TEST(ProxDualityGap, NonnegativeOnRandomInputs) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    const ImageGrid up = random_image(6, 6, rng, 4.0);
    const ImageGrid u = random_image(6, 6, rng, 4.0);
    ProxState st(up.shape());
    const ProxParams pp{0.1 + 0.1 * t, 1 + t, 0.248};
    tv_prox(up, pp, st);
    EXPECT_GE(prox_duality_gap(u, up, pp, st), -1e-12);
  }
}

}  // namespace
}  // namespace midal
