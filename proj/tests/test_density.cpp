#include <cmath>

#include "d4/density.hpp"
#include "d4/rng.hpp"
#include "doctest.h"

using namespace d4;
using namespace d4::density;

TEST_CASE("h symmetries and basic values") {
  std::uint64_t seed = 11;
  for (int i = 0; i < 100000; ++i) {
    double x = 10.0 * (2.0 * rng::uniform(seed, 0, 3 * i) - 1.0);
    double y = 10.0 * (2.0 * rng::uniform(seed, 0, 3 * i + 1) - 1.0);
    double t = 10.0 * (2.0 * rng::uniform(seed, 0, 3 * i + 2) - 1.0);
    // h is symmetric in x <-> y and invariant under negating all arguments.
    CHECK(h(x, y, t) == h(y, x, t));
    CHECK(h(x, y, t) == doctest::Approx(h(-x, -y, -t)).epsilon(1e-14));
    CHECK(h(x, y, t) >= 0);
  }
  CHECK(h(1, 1, 1) == 1.0);
  CHECK(h(0, 0, 1) == 1.0);  // t^2 |x+y-t| term
}

TEST_CASE("g1: support, bound, and hand-checked value") {
  CHECK(g1(0.5, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(g1(2.0, 1.0) == 0.0);  // |y| > 1/t^2
  CHECK_THROWS_AS(g1(0.0, 0.0), std::invalid_argument);
  std::uint64_t seed = 5;
  for (int i = 0; i < 2000; ++i) {
    double t = 0.05 + 1.6 * rng::uniform(seed, 1, 2 * i);
    double y = 6.0 * (2.0 * rng::uniform(seed, 1, 2 * i + 1) - 1.0) / (t * t);
    double v = g1(y, t);
    CHECK(v >= 0);
    CHECK(v <= 2.0 / (t * t) + 1e-9);
    if (std::abs(y) * t * t > 1.0) CHECK(v == 0.0);
  }
}

TEST_CASE("g1 matches a dense scan oracle") {
  // Riemann scan of the indicator {h <= 1} in x.
  auto oracle = [](double y, double t) {
    double r = 1.0 / (t * t);
    double lo = std::max(-r, t - y - r), hi = std::min(r, t - y + r);
    if (hi <= lo) return 0.0;
    const int n = 2000000;
    double step = (hi - lo) / n;
    long long cnt = 0;
    for (int i = 0; i < n; ++i) {
      double x = lo + (i + 0.5) * step;
      if (h(x, y, t) <= 1.0) ++cnt;
    }
    return cnt * step;
  };
  for (auto [y, t] : {std::pair{0.5, 1.0}, {1.7, 0.9}, {-0.8, 1.2}, {3.0, 0.55}}) {
    CHECK(g1(y, t) == doctest::Approx(oracle(y, t)).epsilon(1e-4));
  }
}

TEST_CASE("g2: support and cross-checked values") {
  CHECK(g2(2.0) == 0.0);
  CHECK(g2(1.4422495703074083) == 0.0);
  // At t = 1 the region {h <= 1} is small enough for a direct 2D scan.
  double t = 1.0;
  const int n = 4000;
  double r = 1.0 / (t * t), span = 2.5;
  double step = 2.0 * span / n;
  long long cnt = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double x = -span + (i + 0.5) * step;
      double y = -span + (j + 0.5) * step;
      if (std::abs(x) <= r && std::abs(y) <= r && h(x, y, t) <= 1.0) ++cnt;
    }
  }
  CHECK(g2(1.0) == doctest::Approx(cnt * step * step).epsilon(2e-3));
  // Monotone decreasing on a coarse grid (the region shrinks with t).
  double prev = g2(0.3);
  for (double tt : {0.6, 0.9, 1.2, 1.4}) {
    double cur = g2(tt);
    CHECK(cur <= prev + 1e-9);
    prev = cur;
  }
}

TEST_CASE("omega_infinity: dual methods agree within 0.5%") {
  QuadratureConfig cfg;
  cfg.mc_samples = 1u << 22;  // trimmed for unit-test latency
  auto om = omega_infinity(cfg, 4);
  CHECK(om.agree);
  CHECK(om.relative_disagreement < 0.005);
  CHECK(om.quadrature == doctest::Approx(33.77).epsilon(0.01));
  CHECK_THROWS_AS(omega_infinity(QuadratureConfig{.mc_samples = 100}, 1),
                  std::invalid_argument);
}

TEST_CASE("omega_infinity is deterministic across thread counts") {
  QuadratureConfig cfg;
  cfg.mc_samples = 1u << 18;
  auto a = omega_infinity(cfg, 1);
  auto b = omega_infinity(cfg, 4);
  CHECK(a.monte_carlo == b.monte_carlo);
  CHECK(a.quadrature == b.quadrature);
}

TEST_CASE("omega_p values") {
  CHECK(omega_p(2) == Rat(Int(19), Int(4)));
  CHECK(omega_p(3) == Rat(Int(31), Int(9)));
  CHECK(omega_p(5) == Rat(Int(61), Int(25)));
  CHECK_THROWS_AS(omega_p(4), std::invalid_argument);
}

TEST_CASE("Euler products: values and tail contracts") {
  CHECK_THROWS_AS(euler_product_omega_H(50), std::invalid_argument);
  auto e1 = euler_product_omega_H(1000);
  auto e2 = euler_product_omega_H(100000);
  CHECK(std::abs(e1.value - e2.value) <= e1.error + e2.error);
  CHECK(e2.error < e1.error);
  auto u1 = upsilon(1000);
  auto u2 = upsilon(100000);
  CHECK(std::abs(u1.value - u2.value) <= u1.error + u2.error);
  // Upsilon = prod (1 - 3/p^2 + 2/p^3): the p = 2 factor alone is 1/2.
  CHECK(u2.value < 0.5);
  CHECK(u2.value > 0.25);
}

TEST_CASE("theta values on small arguments") {
  // theta1(e1, e234) = psi_{e234}(e1): for e1 = 2, e234 = 1 there is no prime
  // dividing e1 to gate on... psi ranges over p | e1.
  CHECK(theta1(1, 1) == Rat(1));
  CHECK(theta1(3, 1) == Rat(Int(2), Int(9)));   // (3-1)(3-2)/9
  CHECK(theta1(3, 3) == Rat(1));                // the prime 3 divides e234
  CHECK(theta1(2, 1) == Rat(0));                // p = 2 factor vanishes
  CHECK(theta2(2, 1, 1, 1, 1, 1) == Rat(Int(1), Int(4)));  // (1/2)*(1/2)
  CHECK(Theta(2, 1, 1, 1, 1, 1) ==
        theta2(2, 1, 1, 1, 1, 1) * arith::phi_star(1) * arith::phi_curlyvee(2));
  CHECK(Theta(2, 2, 1, 1, 1, 1) == Rat(0));  // violates gcd(e2 e5, e3 ...) = 1
  CHECK(Theta(1, 3, 1, 1, 1, 3) == Rat(0));  // violates gcd(e3 e6, e4 e7) = 1
}

TEST_CASE("local factor matches the closed form for small primes") {
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    double truncated = local_factor_Theta(p);
    double closed = to_double(local_factor_Theta_closed(p));
    CHECK(std::abs(truncated - closed) < 1e-10);
  }
  CHECK_THROWS_AS(local_factor_Theta(6), std::invalid_argument);
}

TEST_CASE("per-prime identity: (1-1/p)^6 local factor = phi_curlyvee (1-1/p)^7 omega_p") {
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 101ull}) {
    Int pp(p);
    Rat one_minus(pp - 1, pp);
    Rat lhs = local_factor_Theta_closed(p);
    for (int i = 0; i < 6; ++i) lhs = lhs * one_minus;
    Rat rhs = omega_p(p) * arith::phi_curlyvee(p);
    for (int i = 0; i < 7; ++i) rhs = rhs * one_minus;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("psi-weighted sum check produces a bounded ratio") {
  auto g = [](double t) { return 1.0 / (t * t); };
  auto rep = psi_weighted_sum_check(1, 1, 10.0, 400.0, g, 0.5, 1, 10000);
  CHECK(rep.lhs > 0);
  CHECK(rep.main_term > 0);
  CHECK(rep.envelope > 0);
  CHECK(std::isfinite(rep.ratio));
}

TEST_CASE("peyre_constant assembles the pieces consistently") {
  QuadratureConfig cfg;
  cfg.mc_samples = 1u << 20;
  auto bd = peyre_constant(cfg, 10000, 4);
  CHECK(bd.alpha == Rat(Int(1), Int(23040)));
  CHECK(bd.beta == Rat(1));
  CHECK(bd.c_VH ==
        doctest::Approx(to_double(bd.alpha) * bd.omega_inf * bd.euler_value));
  CHECK(bd.c_VH > 0);
  CHECK(bd.c_VH_err < 0.01 * bd.c_VH);
}
