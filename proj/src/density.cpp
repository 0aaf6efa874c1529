#include "d4/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "d4/polytope.hpp"
#include "d4/rng.hpp"

namespace d4::density {

namespace {

constexpr double kCbrt3 = 1.4422495703074083;

double interval_len(double lo, double hi) { return hi > lo ? hi - lo : 0.0; }

// Overlap length of [lo1, hi1] and [lo2, hi2].
double overlap(double lo1, double hi1, double lo2, double hi2) {
  return interval_len(std::max(lo1, lo2), std::min(hi1, hi2));
}

struct SimpsonState {
  const std::function<double(double)>* f;
  double tol;
  double value = 0;
  double error = 0;
};

void simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = (*st.f)(lm), frm = (*st.f)(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  // The relative floor keeps rounding noise on large integrands from forcing
  // full-depth recursion when the absolute tolerance is unattainable.
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol + 1e-13 * (std::abs(left) + std::abs(right))) {
    st.value += left + right + delta / 15.0;
    st.error += std::abs(delta) / 15.0;
    return;
  }
  simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
  simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

ValueWithError integrate(const std::function<double(double)>& f, double a, double b,
                         double tol) {
  if (!(a < b)) return {0.0, 0.0};
  SimpsonState st{&f, tol};
  double fa = f(a), fb = f(b);
  double m = 0.5 * (a + b);
  double fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  simpson_rec(st, a, b, fa, fm, fb, whole, tol, 48);
  return {st.value, st.error};
}

double h(double x, double y, double t) {
  double z = x + y - t;
  double t2 = t * t;
  return std::max(std::max(std::abs(x * y * z), t2 * std::abs(x)),
                  std::max(t2 * std::abs(y), t2 * std::abs(z)));
}

double g1(double y, double t, const QuadratureConfig& cfg) {
  if (!(t > 0)) throw std::invalid_argument("g1: t must be positive");
  double t2 = t * t;
  if (t2 * std::abs(y) > 1.0) return 0.0;
  double r = 1.0 / t2;
  // Intersection of t^2|x| <= 1 and t^2|x+y-t| <= 1.
  double lo = std::max(-r, t - y - r);
  double hi = std::min(r, t - y + r);
  if (hi <= lo) return 0.0;
  if (y == 0.0) return hi - lo;
  // |x y (x + y - t)| <= 1 with y fixed: |x (x + w)| <= 1/c, a difference of
  // two quadratic conditions whose roots are explicit.
  double c = std::abs(y);
  double w = y - t;
  double inv = 1.0 / c;
  // x^2 + w x - 1/c <= 0: x in [a_lo, a_hi].
  double disc_a = std::sqrt(w * w + 4.0 * inv);
  double a_big = -0.5 * (w + (w >= 0 ? disc_a : -disc_a));
  double a_other = -inv / a_big;  // product of roots is -1/c
  double a_lo = std::min(a_big, a_other), a_hi = std::max(a_big, a_other);
  // x^2 + w x + 1/c >= 0: the violating interval (b_lo, b_hi), when real,
  // lies inside [a_lo, a_hi]; the admissible set is then two slivers
  // [a_lo, b_lo] and [b_hi, a_hi], each of width
  //   s = (disc_a - disc_b)/2 = (4/c) / (disc_a + disc_b),
  // which must be evaluated in this product form: for |y| large the slivers
  // have width ~ 1/y^2 while the endpoints are ~ |y|, and the naive endpoint
  // difference cancels catastrophically.
  double disc_b2 = w * w - 4.0 * inv;
  if (disc_b2 > cfg.root_tol * cfg.root_tol) {
    double disc_b = std::sqrt(disc_b2);
    double s = 4.0 * inv / (disc_a + disc_b);
    // Overlaps in coordinates shifted to the adjacent A-root, so the sliver
    // width never rides on top of an O(|y|) endpoint.
    double low_sliver =
        interval_len(std::max(lo - a_lo, 0.0), std::min(hi - a_lo, s));
    double high_sliver =
        interval_len(std::max(lo - a_hi, -s), std::min(hi - a_hi, 0.0));
    return std::max(low_sliver + high_sliver, 0.0);
  }
  return std::max(overlap(lo, hi, a_lo, a_hi), 0.0);
}

double g2(double t, const QuadratureConfig& cfg) {
  if (!(t > 0)) throw std::invalid_argument("g2: t must be positive");
  if (t >= kCbrt3) return 0.0;
  double r = 1.0 / (t * t);
  auto f = [&](double y) { return g1(y, t, cfg); };
  // g1 is non-smooth at y = 0 and y = t; beyond |y| ~ 1 it decays like 1/y^2,
  // so break the (possibly huge) tails at O(1) scales to keep the adaptive
  // quadrature from fighting a single enormous panel.
  std::vector<double> knots = {-r, -8.0, -2.0, -1.0, 0.0, t, 1.0, 2.0, 8.0, r};
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  knots.erase(std::remove_if(knots.begin(), knots.end(),
                             [&](double y) { return y < -r || y > r; }),
              knots.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    total += integrate(f, knots[i], knots[i + 1], cfg.quad_tol / knots.size()).value;
  }
  return total;
}

namespace {

// Integral of s^{-2} over {s in [a-1, a+1] : s^2 >= c|s - a|} for c > 0.
// This is the inner integral, in s = x1+x2+x3 with a = x1+x2 and c = |x1 x2|,
// of the surface-chart form of the real density.
double chart_inner(double a, double c) {
  double total = 0;
  auto add = [&](double lo, double hi) {
    if (hi <= lo) return;
    if (lo <= 0.0 && hi >= 0.0) {
      // Cannot happen for c > 0 except by rounding at a ~ 0; the pole at
      // s = 0 is excluded by the constraint.  Treat as the capped spike.
      total += 1e300;
      return;
    }
    total += 1.0 / lo - 1.0 / hi;
  };
  // Right half [a, a+1]: bad set is between the roots of s^2 - c s + c a.
  double disc = c * c - 4.0 * c * a;
  if (disc <= 0) {
    add(a, a + 1);
  } else {
    double sq = std::sqrt(disc);
    double r_lo = 0.5 * (c - sq), r_hi = 0.5 * (c + sq);
    add(a, std::min(std::max(r_lo, a), a + 1));
    add(std::max(std::min(r_hi, a + 1), a), a + 1);
  }
  // Left half [a-1, a]: bad set is between the roots of s^2 + c s - c a.
  double disc2 = c * c + 4.0 * c * a;
  if (disc2 <= 0) {
    add(a - 1, a);
  } else {
    double sq = std::sqrt(disc2);
    double q_lo = 0.5 * (-c - sq), q_hi = 0.5 * (-c + sq);
    add(a - 1, std::min(std::max(q_lo, a - 1), a));
    add(std::max(std::min(q_hi, a), a - 1), a);
  }
  return total;
}

}  // namespace

OmegaInfinity omega_infinity(const QuadratureConfig& cfg, int threads) {
  if (cfg.mc_samples < 10000) {
    throw std::invalid_argument("omega_infinity: mc_samples must be >= 1e4");
  }
  OmegaInfinity result;

  // Method (i): 3 * int_{0 < t < 3^(1/3)} g2(t) dt.  g2 extends continuously
  // to t = 0; clamping the evaluation point avoids the degenerate (and very
  // expensive) inner integrals at tiny t at a bias cost far below the 0.5%
  // agreement target.
  constexpr double kTMin = 1e-5;
  auto integrand = [&](double t) { return g2(std::max(t, kTMin), cfg); };
  auto quad = integrate(integrand, 0.0, kCbrt3, cfg.quad_tol);
  result.quadrature = 3.0 * quad.value;
  // The g2 evaluations carry their own quadrature budget; the last term
  // covers the clamp bias.
  result.quadrature_error =
      3.0 * (quad.error + cfg.quad_tol * kCbrt3 * 4.0 + kTMin * integrand(0.0));

  // Method (ii): (1/2) int_{[-1,1]^2} F(x1, x2) dx1 dx2, where F is the exact
  // inner s-integral, by shifted-Halton QMC.  Sampling x = u|u| removes the
  // 1/sqrt singularities along the axes; the estimator is capped (the cap
  // bias falls like 1/cap and is added to the error budget).
  constexpr int kStreams = 16;
  constexpr double kCap = 1e10;
  std::uint64_t per_stream = cfg.mc_samples / kStreams;
  std::vector<double> stream_mean(kStreams, 0.0);
  auto run_stream = [&](int k) {
    double sum = 0;
    for (std::uint64_t i = 0; i < per_stream; ++i) {
      double u1 = 2.0 * rng::halton_shifted(cfg.rng_seed, k, i, 0) - 1.0;
      double u2 = 2.0 * rng::halton_shifted(cfg.rng_seed, k, i, 1) - 1.0;
      double x1 = u1 * std::abs(u1), x2 = u2 * std::abs(u2);
      double c = std::abs(x1 * x2);
      if (c == 0.0) continue;  // weight vanishes there anyway
      double f = std::min(chart_inner(x1 + x2, c), kCap);
      sum += f * std::abs(u1 * u2);
    }
    stream_mean[k] = 8.0 * sum / static_cast<double>(per_stream);
  };
  if (threads <= 1) {
    for (int k = 0; k < kStreams; ++k) run_stream(k);
  } else {
    std::vector<std::thread> pool;
    int n = std::min(threads, kStreams);
    for (int w = 0; w < n; ++w) {
      pool.emplace_back([&, w] {
        for (int k = w; k < kStreams; k += n) run_stream(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  double mean = std::accumulate(stream_mean.begin(), stream_mean.end(), 0.0) / kStreams;
  double var = 0;
  for (double m : stream_mean) var += (m - mean) * (m - mean);
  var /= (kStreams - 1);
  result.monte_carlo = mean;
  // The u|u| substitution removes the 1/sqrt singularities along the axes
  // but leaves a 1/sqrt|x1+x2| ridge, so the cap truncation bias falls like
  // 1/sqrt(cap); the constant is measured on cap ladders (about 600) and
  // carries a 3x margin.
  result.monte_carlo_error = 2.0 * std::sqrt(var / kStreams) + 2000.0 / std::sqrt(kCap);

  result.relative_disagreement =
      std::abs(result.quadrature - result.monte_carlo) / result.quadrature;
  result.agree = result.relative_disagreement < 0.005;
  return result;
}

Rat omega_p(std::uint64_t p) {
  if (!arith::is_prime(p)) throw std::invalid_argument("omega_p: p must be prime");
  Int pp(p);
  return Rat(pp * pp + 7 * pp + 1, pp * pp);
}

ValueWithError euler_product_omega_H(std::uint64_t P) {
  if (P < 100) throw std::invalid_argument("euler_product_omega_H: P must be >= 100");
  double value = 1.0;
  for (std::uint64_t p : arith::primes_up_to(P)) {
    double x = 1.0 / static_cast<double>(p);
    double f = 1.0 - x;
    double f7 = f * f * f * f * f * f * f;
    value *= f7 * (1.0 + 7.0 * x + x * x);
  }
  // (1-x)^7 (1+7x+x^2) = 1 - 27x^2 + 105x^3 - ..., so |log factor| <= 28/p^2
  // for p > 100 and sum_{p > P} 1/p^2 <= 1/P.
  double tail = value * std::expm1(28.0 / static_cast<double>(P));
  return {value, tail};
}

ValueWithError upsilon(std::uint64_t P) {
  if (P < 100) throw std::invalid_argument("upsilon: P must be >= 100");
  double value = 1.0;
  for (std::uint64_t p : arith::primes_up_to(P)) {
    double x = 1.0 / static_cast<double>(p);
    value *= (1.0 - x) * (1.0 - x) * (1.0 + 2.0 * x);
  }
  // Factor is 1 - 3x^2 + 2x^3; |log factor| <= 3/p^2 for p > 100.
  double tail = value * std::expm1(3.0 / static_cast<double>(P));
  return {value, tail};
}

Rat theta1(std::uint64_t eta1, std::uint64_t eta234) { return arith::psi(eta234, eta1); }

Rat theta2(std::uint64_t e2, std::uint64_t e3, std::uint64_t e4, std::uint64_t e5,
           std::uint64_t e6, std::uint64_t e7) {
  return arith::phi_star(e2 * e3 * e4) * arith::phi_star(e2 * e3 * e4 * e5 * e6 * e7);
}

Rat Theta(std::uint64_t e2, std::uint64_t e3, std::uint64_t e4, std::uint64_t e5,
          std::uint64_t e6, std::uint64_t e7) {
  if (std::gcd(e2 * e5, e3 * e4 * e6 * e7) > 1) return Rat(0);
  if (std::gcd(e3 * e6, e4 * e7) > 1) return Rat(0);
  return theta2(e2, e3, e4, e5, e6, e7) * arith::phi_star(e5 * e6 * e7) *
         arith::phi_curlyvee(e2 * e3 * e4 * e5 * e6 * e7);
}

Rat local_factor_Theta_closed(std::uint64_t p) {
  if (!arith::is_prime(p)) {
    throw std::invalid_argument("local_factor_Theta_closed: p must be prime");
  }
  Int pp(p);
  return arith::phi_curlyvee(p) * Rat(pp - 1, pp) * Rat(pp * pp + 7 * pp + 1, pp * pp);
}

double local_factor_Theta(std::uint64_t p, int kmax) {
  if (!arith::is_prime(p)) throw std::invalid_argument("local_factor_Theta: p must be prime");
  if (kmax < 20) throw std::invalid_argument("local_factor_Theta: kmax must be >= 20");
  auto powp = [&](int k) {
    std::uint64_t v = 1;
    for (int i = 0; i < k; ++i) v *= p;
    return v;
  };
  // The coprimality gate kills every exponent pattern whose support touches
  // two different pairs among (e2,e5), (e3,e6), (e4,e7), so the 6-fold sum
  // collapses to three identical 2-index sums.  Certify the collapse on the
  // gate itself: every cross-pair pattern with exponents in {0,1,2} must give
  // Theta = 0.
  for (int u = 0; u < 6; ++u) {
    for (int v = 0; v < 6; ++v) {
      if (u == v || u % 3 == v % 3) continue;  // same coordinate or same pair
      for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
          std::uint64_t e[6] = {1, 1, 1, 1, 1, 1};
          e[u] = powp(i);
          e[v] = powp(j);
          if (Theta(e[0], e[1], e[2], e[3], e[4], e[5]) != Rat(0)) {
            throw std::runtime_error("local_factor_Theta: gate collapse violated");
          }
        }
      }
    }
  }
  // Total degree d = i + j is capped so p^d fits in 64 bits; the truncation
  // tail, using only the gate and |Theta| <= 2, is
  //   3 * 2 * sum_{d > K} (d+1) p^{-d} <= 6 (K+2) p^{-(K+1)} / (1-1/p)^2.
  int K = static_cast<int>(62.0 / std::log2(static_cast<double>(p)));
  (void)kmax;  // the requested floor is always dominated by the 64-bit cap
  double x = 1.0 / static_cast<double>(p);
  double tail_bound =
      6.0 * (K + 2) * std::pow(x, K + 1) / ((1.0 - x) * (1.0 - x));
  if (tail_bound >= 1e-14) {
    throw std::runtime_error("local_factor_Theta: cannot meet the tail budget");
  }
  double total = 1.0;  // all exponents zero
  for (int group = 0; group < 3; ++group) {
    for (int i = 0; i <= K; ++i) {
      for (int j = (i == 0 ? 1 : 0); i + j <= K; ++j) {
        std::uint64_t e[6] = {1, 1, 1, 1, 1, 1};
        e[group] = powp(i);       // one of e2, e3, e4
        e[group + 3] = powp(j);   // the paired e5, e6, e7
        Rat th = Theta(e[0], e[1], e[2], e[3], e[4], e[5]);
        total += to_double(th) * std::pow(static_cast<double>(p), -(i + j));
      }
    }
  }
  return total;
}

PsiSumReport psi_weighted_sum_check(std::uint64_t a, std::uint64_t b, double t1,
                                    double t2, const std::function<double(double)>& g,
                                    double gamma, int sign_changes,
                                    std::uint64_t euler_P) {
  PsiSumReport rep;
  if (!(t1 <= t2)) return rep;
  long long lo = std::max<long long>(1, static_cast<long long>(std::ceil(t1)));
  long long hi = static_cast<long long>(std::floor(t2));
  for (long long n = lo; n <= hi; ++n) {
    Rat w = arith::psi_ab(a, b, static_cast<std::uint64_t>(n));
    if (w != Rat(0)) rep.lhs += to_double(w) * g(static_cast<double>(n));
  }
  double ups = upsilon(euler_P).value;
  double Psi = to_double(arith::phi_star(b) * arith::phi_curlyvee(a * b));
  rep.main_term = ups * Psi * integrate(g, t1, t2, 1e-10).value;
  double sup = 0;
  for (int i = 0; i <= 1000; ++i) {
    double t = t1 + (t2 - t1) * i / 1000.0;
    if (t > 0) sup = std::max(sup, std::abs(g(t)));
  }
  rep.envelope = arith::sigma_neg(gamma / 2.0, a * b) * std::pow(t2, gamma) *
                 (1.0 + sign_changes) * sup;
  rep.ratio = rep.envelope > 0 ? std::abs(rep.lhs - rep.main_term) / rep.envelope : 0.0;
  return rep;
}

PeyreBreakdown peyre_constant(const QuadratureConfig& cfg, std::uint64_t P, int threads) {
  PeyreBreakdown bd;
  bd.alpha = polytope::volume(polytope::d4_alpha_polytope());
  bd.beta = Rat(1);
  auto omega = omega_infinity(cfg, threads);
  if (!omega.agree) {
    throw std::runtime_error("peyre_constant: omega_infinity methods disagree");
  }
  bd.omega_inf = omega.quadrature;
  bd.omega_inf_err = omega.quadrature_error;
  auto euler = euler_product_omega_H(P);
  bd.euler_P = P;
  bd.euler_value = euler.value;
  bd.euler_tail = euler.error;
  bd.c_VH = to_double(bd.alpha * bd.beta) * bd.omega_inf * bd.euler_value;
  bd.c_VH_err = bd.c_VH * (bd.omega_inf_err / bd.omega_inf + bd.euler_tail / bd.euler_value);
  return bd;
}

}  // namespace d4::density
