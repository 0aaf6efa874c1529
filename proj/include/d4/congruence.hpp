#pragma once

// Lattice-point counts in congruence classes: the exponential sums S_q with
// their Ramanujan closed form, the rectangle counts N/N*, the region counts
// D/D* with their main term, the error functionals E0/E1/E2/E, the dyadic
// error sum, Heath-Brown's primitive-vector bound, and the quadratic-interval
// count.  Every estimate has both a definition-level count and the closed
// form/bound it is compared against.

#include <array>
#include <complex>
#include <cstdint>

#include "d4/arith.hpp"
#include "d4/density.hpp"

namespace d4::congruence {

struct CongruenceInstance {
  long long q;   // modulus >= 1
  long long a1;  // nonzero, gcd(a1 a2, q) = 1
  long long a2;
  long long b;       // rad(q) | b
  long long b_mod;   // b reduced to [0, q)
  // Validates the invariants; throws std::invalid_argument.
  CongruenceInstance(long long q, long long a1, long long a2, long long b);
};

struct IntegerRange {
  double lo = 0;
  double hi = 0;
  bool lo_open = false;
  bool hi_open = false;
  // Smallest/largest integer in the range (first > last when empty).
  long long first_int() const;
  long long last_int() const;
  long long count_ints() const;
};

// The planar region cut out by
//   (A) A1|x| A2|y| |A1 x + A2 y - T| <= T^2 X,
//   (B) |A1 x + A2 y - T| <= X,
//   (C) A1|x| <= X,
//   (D) A2|y| <= X,
// equivalently h(A1 x / (X^{1/3}T^{2/3}), A2 y / (X^{1/3}T^{2/3}),
// T^{1/3}/X^{1/3}) <= 1.  Nonempty only when T <= 3X.
struct RegionS {
  double X, T, A1, A2;
  RegionS(double X, double T, double A1, double A2);
  bool contains(double x, double y) const;        // conditions (A)-(D)
  bool contains_h_form(double x, double y) const; // via the function h
};

// S_q(r, s, a, b) = sum over alpha, beta in [1, q], gcd(alpha beta, q) = 1,
// a1 alpha + a2 beta = b (mod q), of e_q(r alpha + s beta).  For each
// admissible alpha the congruence pins beta, so the sum is a single loop.
std::complex<double> exp_sum_S_direct(const CongruenceInstance& inst, long long r,
                                      long long s);
// e_q(r a1^{-1} b) c_q(a1 s - a2 r); also evaluates the symmetric form
// e_q(s a2^{-1} b) c_q(a2 r - a1 s) and requires agreement within 1e-9.
std::complex<double> exp_sum_S_closed(const CongruenceInstance& inst, long long r,
                                      long long s);

// #{(u,v) in I x J, a1 u + a2 v = b (mod q), gcd(uv, q) = 1}.  With
// require_u_coprime = false the condition gcd(u, q) = 1 is dropped (the
// congruence makes it redundant).
long long count_N(const IntegerRange& I, const IntegerRange& J,
                  const CongruenceInstance& inst, bool require_u_coprime = true);
// (1/phi(q)) #{(u,v) in I x J, gcd(uv, q) = 1}, exact rational.
Rat count_N_star(const IntegerRange& I, const IntegerRange& J, long long q);

// E0 by the literal double sum (rejected for q > 2000: diagnostic quantity).
double error_E0(const CongruenceInstance& inst);
// (q/phi(q))^3 log(q)^2, with E1(1) = 0.
double error_E1(long long q);
// (q/phi(q)) sigma_{-1/2}(q) sigma_{-1}(q).
double error_E2(long long q);
// E0 + E1.
double error_E(const CongruenceInstance& inst);

// #{(u,v) in S, u,v nonzero integers, a1 u + a2 v = b (mod q), gcd(uv,q)=1}.
// v runs over the outer loop; u is stepped through its residue class.
long long count_D(const RegionS& S, const CongruenceInstance& inst);
// (1/phi(q)) #{(u,v) in S, u,v nonzero, gcd(uv,q) = 1}.
Rat count_D_star(const RegionS& S, long long q);
// (phi(q)/q^2) (X^{2/3} T^{4/3} / (A1 A2)) g2(T^{1/3}/X^{1/3}).
double main_term_D(const RegionS& S, long long q,
                   const density::QuadratureConfig& cfg = {});
// L^4 log(2X)^2 E(q,a)
//   + (X^{2/3}T^{4/3}/(A1 A2 q)) calL^{4/3} (calL/L + sqrt(A1/X) + sqrt(A2/X)) E2(q).
// Requires X/calL <= T.
double affine_error_bound(const RegionS& S, const CongruenceInstance& inst, double L,
                          double calL);

// #{y integer : Yp < |y^2 + 2 A y| <= Y}, exact scan.
long long count_quadratic_interval(double Yp, double Y, double A);
// nu^{1/2} M0^2 / M + 1 with M = max(|A|, sqrt(Y)).
double quadratic_interval_bound(double nu, double M0, double Y, double A);

struct PrimitiveVectorQuery {
  std::array<long long, 3> v;  // primitive
  std::array<double, 3> W;     // all >= 1
};
// Exact count of primitive w with |w_i| <= W_i and v . w = 0.
long long heath_brown_count(const PrimitiveVectorQuery& qv);
// 12 pi W1 W2 W3 / max_i |v_i| W_i + 4.
double heath_brown_bound(const PrimitiveVectorQuery& qv);

struct DyadicErrorSum {
  double lhs = 0;    // sum of E(q, (b1 c1^2, b2 c2^2)) over the dyadic box
  double bound = 0;  // (C1 C2 tau(q) + q) 2^omega(q) E1(q)
};
// Sum over C_i < c_i <= 2C_i with gcd(c1, c2) = 1 and c_i coprime to q.
// Requires gcd(b1 b2, q) = 1.
DyadicErrorSum dyadic_error_sum(double C1, double C2, long long q, long long b1,
                                long long b2);

}  // namespace d4::congruence
