#pragma once

// Archimedean and p-adic densities: the function h and its fibered measures
// g1/g2, the real density omega_infinity (computed by two independent
// methods), the Euler products, the Theta family of arithmetic functions with
// its local-factor identity, and the final assembly of the leading constant.

#include <cstdint>
#include <functional>

#include "d4/arith.hpp"

namespace d4::density {

struct QuadratureConfig {
  // Bisection tolerance for the interval endpoints inside g1.
  double root_tol = 1e-12;
  // Target absolute error for adaptive Simpson quadrature.
  double quad_tol = 1e-9;
  // Sample count for the quasi-Monte Carlo volume cross-check (>= 1e4).
  std::uint64_t mc_samples = 1u << 24;
  std::uint64_t rng_seed = 1;
};

// max{|xy||x+y-t|, t^2|x|, t^2|y|, t^2|x+y-t|}.
double h(double x, double y, double t);

// Lebesgue measure in x of {h(x, y, t) <= 1}; 0 for |y| > 1/t^2 and always
// <= 2/t^2.  Computed by exact interval analysis (the integrand is an
// indicator, so adaptive quadrature is the wrong tool).
double g1(double y, double t, const QuadratureConfig& cfg = {});

// Integral of g1 over y; vanishes for t > 3^(1/3).
double g2(double t, const QuadratureConfig& cfg = {});

struct ValueWithError {
  double value = 0;
  double error = 0;
};

// Adaptive Simpson integration of f over [a, b] with an error estimate.
ValueWithError integrate(const std::function<double(double)>& f, double a, double b,
                         double tol);

struct OmegaInfinity {
  double quadrature = 0;        // 3 * integral of g2 over t > 0
  double quadrature_error = 0;
  double monte_carlo = 0;       // (3/2) vol{h <= 1}, via the surface chart
  double monte_carlo_error = 0;
  double relative_disagreement = 0;
  bool agree = false;           // within 0.5% relative
  double value() const { return quadrature; }
};

// Two independent evaluations of the archimedean density.  The second method
// integrates the surface-chart form (1/2) int_{[-1,1]^3, |x1x2x3| <= s^2}
// s^{-2} dx (s = x1+x2+x3), with the s-integral done in closed form and
// quasi-Monte Carlo over the remaining two variables; this equals
// (3/2) vol{h <= 1} by the defining change of variables.
OmegaInfinity omega_infinity(const QuadratureConfig& cfg = {}, int threads = 1);

// 1 + 7/p + 1/p^2, exact; throws for non-prime p.
Rat omega_p(std::uint64_t p);

// prod_{p <= P} (1 - 1/p)^7 omega_p with a tail bound (P >= 100).
ValueWithError euler_product_omega_H(std::uint64_t P);

// prod_{p <= P} phi_curlyvee(p)^{-1} = prod (1 - 3/p^2 + 2/p^3), with tail
// bound (P >= 100).
ValueWithError upsilon(std::uint64_t P);

Rat theta1(std::uint64_t eta1, std::uint64_t eta234);
Rat theta2(std::uint64_t e2, std::uint64_t e3, std::uint64_t e4, std::uint64_t e5,
           std::uint64_t e6, std::uint64_t e7);
// theta2 * phi_star(e5 e6 e7) * phi_curlyvee(e2...e7), redefined to be 0 when
// gcd(e2 e5, e3 e4 e6 e7) > 1 or gcd(e3 e6, e4 e7) > 1.
Rat Theta(std::uint64_t e2, std::uint64_t e3, std::uint64_t e4, std::uint64_t e5,
          std::uint64_t e6, std::uint64_t e7);

// Truncated sum over k in [0, kmax]^6 of Theta(p^k2,...,p^k7)/p^(sum k);
// the truncation is extended internally until the geometric tail is < 1e-14.
double local_factor_Theta(std::uint64_t p, int kmax = 20);
// Closed form phi_curlyvee(p) (1 - 1/p) (1 + 7/p + 1/p^2).
Rat local_factor_Theta_closed(std::uint64_t p);

struct PsiSumReport {
  double lhs = 0;        // sum over n in I of psi_{a,b}(n) g(n)
  double main_term = 0;  // Upsilon * Psi(a,b) * int_I g
  double envelope = 0;   // sigma_{-gamma/2}(ab) * t2^gamma * M_I(g)
  double ratio = 0;      // |lhs - main_term| / envelope
};

// g must have a piecewise continuous derivative whose sign changes at most
// sign_changes times on [t1, t2].
PsiSumReport psi_weighted_sum_check(std::uint64_t a, std::uint64_t b, double t1,
                                    double t2, const std::function<double(double)>& g,
                                    double gamma, int sign_changes,
                                    std::uint64_t euler_P = 100000);

struct PeyreBreakdown {
  Rat alpha;               // exactly 1/23040, computed as a polytope volume
  Rat beta;                // 1 (the surface is split)
  double omega_inf = 0;
  double omega_inf_err = 0;
  std::uint64_t euler_P = 0;
  double euler_value = 0;
  double euler_tail = 0;
  double c_VH = 0;
  double c_VH_err = 0;
};

PeyreBreakdown peyre_constant(const QuadratureConfig& cfg = {}, std::uint64_t P = 100000,
                              int threads = 1);

}  // namespace d4::density
