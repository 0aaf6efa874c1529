#include <cmath>
#include <complex>

#include "d4/congruence.hpp"
#include "d4/rng.hpp"
#include "doctest.h"

using namespace d4;
using namespace d4::congruence;

namespace {

// Literal double loop over (alpha, beta), kept only as a test oracle.
std::complex<double> exp_sum_oracle(const CongruenceInstance& inst, long long r,
                                    long long s) {
  constexpr double kPi = 3.14159265358979323846;
  long long q = inst.q;
  std::complex<double> sum(0, 0);
  for (long long alpha = 1; alpha <= q; ++alpha) {
    for (long long beta = 1; beta <= q; ++beta) {
      if (arith::gcd_ll(alpha, q) != 1 || arith::gcd_ll(beta, q) != 1) continue;
      if (arith::mod_pos(inst.a1 * alpha + inst.a2 * beta - inst.b_mod, q) != 0) continue;
      double angle = 2.0 * kPi * static_cast<double>(arith::mod_pos(r * alpha + s * beta, q)) /
                     static_cast<double>(q);
      sum += std::complex<double>(std::cos(angle), std::sin(angle));
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("CongruenceInstance validates its invariants") {
  CHECK_THROWS_AS(CongruenceInstance(0, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(CongruenceInstance(3, 0, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(CongruenceInstance(6, 2, 1, 6), std::invalid_argument);  // gcd(a1,q)>1
  CHECK_THROWS_AS(CongruenceInstance(6, 1, 1, 3), std::invalid_argument);  // rad(6)=6 ∤ 3
  CongruenceInstance ok(6, 5, 7, 12);
  CHECK(ok.b_mod == 0);
  CongruenceInstance neg(5, -2, 3, -5);
  CHECK(neg.b_mod == 0);
}

TEST_CASE("IntegerRange endpoints respect openness") {
  IntegerRange closed{1.0, 3.0, false, false};
  CHECK(closed.first_int() == 1);
  CHECK(closed.last_int() == 3);
  CHECK(closed.count_ints() == 3);
  IntegerRange open{1.0, 3.0, true, true};
  CHECK(open.first_int() == 2);
  CHECK(open.last_int() == 2);
  IntegerRange frac{-2.5, 4.7, true, true};
  CHECK(frac.first_int() == -2);
  CHECK(frac.last_int() == 4);
  IntegerRange empty{2.2, 2.8, false, false};
  CHECK(empty.count_ints() == 0);
}

TEST_CASE("exp_sum direct form matches the literal double loop") {
  for (long long q = 1; q <= 20; ++q) {
    long long rad = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q)));
    for (long long a1 : {1LL, 2LL, q - 1}) {
      if (a1 < 1 || arith::gcd_ll(a1, q) != 1) continue;
      CongruenceInstance inst(q, a1, 1, rad);
      for (long long r = 0; r < q; ++r) {
        for (long long s = 0; s < q; ++s) {
          auto direct = exp_sum_S_direct(inst, r, s);
          auto oracle = exp_sum_oracle(inst, r, s);
          CHECK(std::abs(direct - oracle) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("exp_sum closed form matches the direct sum") {
  std::uint64_t seed = 2026;
  for (int trial = 0; trial < 200; ++trial) {
    long long q = rng::uniform_int(seed, 0, trial, 1, 30);
    long long rad = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q)));
    long long a1 = 0, a2 = 0;
    for (int i = 1;; ++i) {
      a1 = rng::uniform_int(seed, 1, trial * 100 + i, -q, q);
      if (a1 != 0 && arith::gcd_ll(a1, q) == 1) break;
    }
    for (int i = 1;; ++i) {
      a2 = rng::uniform_int(seed, 2, trial * 100 + i, -q, q);
      if (a2 != 0 && arith::gcd_ll(a2, q) == 1) break;
    }
    long long b = rad * rng::uniform_int(seed, 3, trial, -3, 3);
    CongruenceInstance inst(q, a1, a2, b);
    long long r = rng::uniform_int(seed, 4, trial, -q, q);
    long long s = rng::uniform_int(seed, 5, trial, -q, q);
    CHECK(std::abs(exp_sum_S_direct(inst, r, s) - exp_sum_S_closed(inst, r, s)) < 1e-8);
  }
}

TEST_CASE("count_N on the worked example") {
  IntegerRange I{1.0, 3.0, false, false};
  CongruenceInstance inst(3, 1, 1, 3);
  CHECK(count_N(I, I, inst) == 2);
  CHECK(count_N(I, I, inst, false) == 2);  // u-coprimality is redundant here
  CHECK(count_N_star(I, I, 3) == Rat(2));
}

TEST_CASE("dropping the u-coprimality condition never changes count_N") {
  std::uint64_t seed = 7;
  for (int trial = 0; trial < 100; ++trial) {
    long long q = rng::uniform_int(seed, 0, trial, 1, 20);
    long long rad = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q)));
    long long a1 = 0, a2 = 0;
    for (int i = 1;; ++i) {
      a1 = rng::uniform_int(seed, 1, trial * 100 + i, 1, q);
      if (arith::gcd_ll(a1, q) == 1) break;
    }
    for (int i = 1;; ++i) {
      a2 = rng::uniform_int(seed, 2, trial * 100 + i, 1, q);
      if (arith::gcd_ll(a2, q) == 1) break;
    }
    CongruenceInstance inst(q, a1, a2, rad);
    double lo1 = rng::uniform_int(seed, 3, trial, -30, 10);
    double lo2 = rng::uniform_int(seed, 4, trial, -30, 10);
    IntegerRange I{lo1, lo1 + 25.0, false, false};
    IntegerRange J{lo2, lo2 + 25.0, false, false};
    CHECK(count_N(I, J, inst, true) == count_N(I, J, inst, false));
  }
}

TEST_CASE("averaging count_N over a2 recovers phi(q) count_N_star exactly") {
  std::uint64_t seed = 42;
  for (int trial = 0; trial < 50; ++trial) {
    long long q = rng::uniform_int(seed, 10, trial, 1, 30);
    long long rad = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q)));
    long long a1 = 0;
    for (int i = 1;; ++i) {
      a1 = rng::uniform_int(seed, 11, trial * 100 + i, 1, q);
      if (arith::gcd_ll(a1, q) == 1) break;
    }
    long long b = rad * rng::uniform_int(seed, 12, trial, 1, 4);
    double lo1 = rng::uniform_int(seed, 13, trial, -20, 5);
    double lo2 = rng::uniform_int(seed, 14, trial, -20, 5);
    IntegerRange I{lo1, lo1 + 17.0, false, false};
    IntegerRange J{lo2, lo2 + 13.0, false, false};
    Int total = 0;
    for (long long a2 = 1; a2 <= q; ++a2) {
      if (arith::gcd_ll(a2, q) != 1) continue;
      total += count_N(I, J, CongruenceInstance(q, a1, a2, b));
    }
    Int phi = Int(arith::euler_phi(static_cast<std::uint64_t>(q)));
    CHECK(Rat(total) == Rat(phi) * count_N_star(I, J, q));
  }
}

TEST_CASE("RegionS: the two membership characterizations agree") {
  CHECK_THROWS_AS(RegionS(0.5, 1, 1, 1), std::invalid_argument);
  std::uint64_t seed = 99;
  RegionS regions[] = {RegionS(10, 5, 1, 1), RegionS(50, 20, 2, 3), RegionS(8, 24, 1, 1),
                       RegionS(100, 1, 4, 1)};
  for (int ri = 0; ri < 4; ++ri) {
    const RegionS& S = regions[ri];
    double span = 2.0 * S.X;
    for (int i = 0; i < 2500; ++i) {
      double x = (2.0 * rng::uniform(seed, ri, 2 * i) - 1.0) * span;
      double y = (2.0 * rng::uniform(seed, ri, 2 * i + 1) - 1.0) * span;
      // Skip points too close to the boundary for floating-point agreement.
      double margin = std::abs(S.A1 * std::abs(x) * S.A2 * std::abs(y) *
                                   std::abs(S.A1 * x + S.A2 * y - S.T) -
                               S.T * S.T * S.X);
      if (margin < 1e-6 * S.T * S.T * S.X) continue;
      CHECK(S.contains(x, y) == S.contains_h_form(x, y));
    }
  }
}

TEST_CASE("RegionS is empty when T > 3X") {
  RegionS S(5, 16, 1, 1);  // T > 3X
  std::uint64_t seed = 3;
  for (int i = 0; i < 2000; ++i) {
    double x = (2.0 * rng::uniform(seed, 0, 2 * i) - 1.0) * 20.0;
    double y = (2.0 * rng::uniform(seed, 0, 2 * i + 1) - 1.0) * 20.0;
    CHECK_FALSE(S.contains(x, y));
  }
  CHECK(count_D(S, CongruenceInstance(2, 1, 1, 2)) == 0);
}

TEST_CASE("count_D matches a brute-force scan") {
  std::uint64_t seed = 17;
  for (int trial = 0; trial < 20; ++trial) {
    double X = 10.0 + rng::uniform_int(seed, 20, trial, 0, 40);
    double T = 1.0 + rng::uniform_int(seed, 21, trial, 0, static_cast<long long>(3 * X) - 1);
    RegionS S(X, T, 1.0 + (trial % 3), 1.0 + (trial % 2));
    long long q = rng::uniform_int(seed, 22, trial, 1, 12);
    long long rad = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q)));
    long long a1 = 0, a2 = 0;
    for (int i = 1;; ++i) {
      a1 = rng::uniform_int(seed, 23, trial * 100 + i, 1, q);
      if (arith::gcd_ll(a1, q) == 1) break;
    }
    for (int i = 1;; ++i) {
      a2 = rng::uniform_int(seed, 24, trial * 100 + i, 1, q);
      if (arith::gcd_ll(a2, q) == 1) break;
    }
    CongruenceInstance inst(q, a1, a2, rad);
    long long brute = 0;
    long long span = static_cast<long long>(X) + 1;
    for (long long u = -span; u <= span; ++u) {
      for (long long v = -span; v <= span; ++v) {
        if (u == 0 || v == 0) continue;
        if (arith::gcd_ll(u, q) != 1 || arith::gcd_ll(v, q) != 1) continue;
        if (arith::mod_pos(a1 * u + a2 * v - inst.b_mod, q) != 0) continue;
        if (S.contains(static_cast<double>(u), static_cast<double>(v))) ++brute;
      }
    }
    CHECK(count_D(S, inst) == brute);
  }
}

TEST_CASE("error functionals: closed forms and edge cases") {
  CHECK(error_E1(1) == 0.0);
  CHECK(error_E1(2) == doctest::Approx(8.0 * std::log(2.0) * std::log(2.0)));
  // E2(6) = (6/2) (1 + 2^{-1/2} + 3^{-1/2} + 6^{-1/2})(1 + 1/2 + 1/3 + 1/6).
  double e2 = 3.0 * (1 + 1 / std::sqrt(2.0) + 1 / std::sqrt(3.0) + 1 / std::sqrt(6.0)) * 2.0;
  CHECK(error_E2(6) == doctest::Approx(e2));
  CHECK(error_E0(CongruenceInstance(1, 1, 1, 0)) == 0.0);
  CHECK_THROWS_AS(error_E0(CongruenceInstance(2048, 1, 1, 0)), std::invalid_argument);

  // E0 against a literal reimplementation for a couple of instances.
  for (long long q : {4LL, 6LL, 9LL}) {
    CongruenceInstance inst(q, 1, static_cast<long long>(q - 1),
                            static_cast<long long>(arith::rad(q)));
    double literal = 0.0;
    long long half = q / 2;
    for (long long d = 1; d <= q; ++d) {
      if (q % d != 0 || arith::mu(static_cast<std::uint64_t>(q / d)) == 0) continue;
      for (long long r = -half; r <= half; ++r) {
        for (long long s = -half; s <= half; ++s) {
          if (r == 0 || s == 0) continue;
          if (arith::mod_pos(inst.a1 * s - inst.a2 * r, d) != 0) continue;
          literal += static_cast<double>(d) / std::abs(static_cast<double>(r) * s);
        }
      }
    }
    CHECK(error_E0(inst) == doctest::Approx(literal).epsilon(1e-12));
  }
}

TEST_CASE("E is independent of b") {
  CongruenceInstance i1(12, 5, 7, 6 * 1);
  CongruenceInstance i2(12, 5, 7, 6 * 5);
  CHECK(error_E(i1) == error_E(i2));
}

TEST_CASE("heath_brown_count on hand-checked vectors") {
  CHECK(heath_brown_count({{1, 1, 1}, {1, 1, 1}}) == 6);
  CHECK(heath_brown_count({{1, 0, 0}, {1, 1, 1}}) == 8);
  CHECK_THROWS_AS(heath_brown_count({{2, 4, 6}, {1, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(heath_brown_count({{1, 1, 1}, {0.5, 1, 1}}), std::invalid_argument);
  // The bound holds on the hand-checked cases.
  CHECK(heath_brown_count({{1, 1, 1}, {1, 1, 1}}) <=
        heath_brown_bound({{1, 1, 1}, {1, 1, 1}}));
}

TEST_CASE("quadratic interval count and bound") {
  // |y^2| in (0, 4]: y in {-2, -1, 1, 2}.
  CHECK(count_quadratic_interval(0, 4, 0) == 4);
  // |y^2 + 2y| in (0, 3]: y = -3, -1, 1 give 3, 1, 3 (y = -2, 0 give 0).
  CHECK(count_quadratic_interval(0, 3, 1) == 3);
  CHECK(quadratic_interval_bound(1.0, 4.0, 4.0, 0.0) == doctest::Approx(9.0));
}

TEST_CASE("dyadic_error_sum respects its preconditions and is finite") {
  CHECK_THROWS_AS(dyadic_error_sum(2, 2, 6, 2, 1), std::invalid_argument);
  auto r = dyadic_error_sum(3, 4, 6, 5, 7);
  CHECK(r.lhs >= 0);
  CHECK(r.bound > 0);
  CHECK(std::isfinite(r.lhs));
}

TEST_CASE("main_term_D approximates count_D for a mild instance") {
  // Not a tight test: just a smoke check that the main term has the right
  // scale against the exact count on a sizable region with q = 1.
  RegionS S(400, 60, 1, 1);
  CongruenceInstance inst(1, 1, 1, 0);
  double main = main_term_D(S, 1);
  long long exact = count_D(S, inst);
  CHECK(main > 0);
  CHECK(std::abs(static_cast<double>(exact) - main) < 0.25 * main + 200.0);
}
