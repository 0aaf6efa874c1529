#include "d4/congruence.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace d4::congruence {

namespace {

using arith::gcd_ll;
using arith::mod_pos;

constexpr double kPi = 3.14159265358979323846;

std::complex<double> e_q(long long num, long long q) {
  double angle = 2.0 * kPi * static_cast<double>(mod_pos(num, q)) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

// The exhaustive identity sweeps revisit the same small moduli millions of
// times; cache the unit roots, the coprimality mask and the Ramanujan sums
// per q.  Read-mostly: built once under a mutex, then shared.
struct ModulusTables {
  std::vector<std::complex<double>> roots;  // roots[k] = e_q(k)
  std::vector<unsigned char> coprime;       // coprime[k] = [gcd(k, q) = 1]
  std::vector<long long> cq;                // cq[n] = c_q(n), n in [0, q)
};

const ModulusTables& modulus_tables(long long q) {
  static std::mutex mu;
  static std::map<long long, std::unique_ptr<ModulusTables>> cache;
  std::scoped_lock lock(mu);
  auto& slot = cache[q];
  if (!slot) {
    auto t = std::make_unique<ModulusTables>();
    t->roots.resize(static_cast<std::size_t>(q));
    t->coprime.resize(static_cast<std::size_t>(q));
    t->cq.resize(static_cast<std::size_t>(q));
    for (long long k = 0; k < q; ++k) {
      t->roots[static_cast<std::size_t>(k)] = e_q(k, q);
      t->coprime[static_cast<std::size_t>(k)] = gcd_ll(k, q) == 1 ? 1 : 0;
      t->cq[static_cast<std::size_t>(k)] =
          arith::ramanujan_c(static_cast<std::uint64_t>(q), k);
    }
    slot = std::move(t);
  }
  return *slot;
}

// Number of integers n in [first, last] with n = c (mod q).
long long count_in_class(long long first, long long last, long long c, long long q) {
  if (first > last) return 0;
  long long shift = mod_pos(first - c, q);
  long long start = first + (shift == 0 ? 0 : q - shift);
  if (start > last) return 0;
  return (last - start) / q + 1;
}

}  // namespace

CongruenceInstance::CongruenceInstance(long long q_, long long a1_, long long a2_,
                                       long long b_)
    : q(q_), a1(a1_), a2(a2_), b(b_) {
  if (q < 1) throw std::invalid_argument("CongruenceInstance: q must be >= 1");
  if (a1 == 0 || a2 == 0) throw std::invalid_argument("CongruenceInstance: a_i nonzero");
  if (gcd_ll(a1, q) != 1 || gcd_ll(a2, q) != 1) {
    throw std::invalid_argument("CongruenceInstance: gcd(a1 a2, q) must be 1");
  }
  long long r = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q)));
  if (mod_pos(b, r) != 0) throw std::invalid_argument("CongruenceInstance: rad(q) | b required");
  b_mod = mod_pos(b, q);
}

long long IntegerRange::first_int() const {
  double c = std::ceil(lo);
  long long n = static_cast<long long>(c);
  if (lo_open && c == lo) ++n;
  return n;
}

long long IntegerRange::last_int() const {
  double f = std::floor(hi);
  long long n = static_cast<long long>(f);
  if (hi_open && f == hi) --n;
  return n;
}

long long IntegerRange::count_ints() const {
  long long a = first_int(), b = last_int();
  return a > b ? 0 : b - a + 1;
}

RegionS::RegionS(double X_, double T_, double A1_, double A2_)
    : X(X_), T(T_), A1(A1_), A2(A2_) {
  if (!(X >= 1 && T >= 1 && A1 >= 1 && A2 >= 1)) {
    throw std::invalid_argument("RegionS: parameters must be >= 1");
  }
}

bool RegionS::contains(double x, double y) const {
  double lx = A1 * std::abs(x), ly = A2 * std::abs(y);
  double lin = std::abs(A1 * x + A2 * y - T);
  return lx * ly * lin <= T * T * X && lin <= X && lx <= X && ly <= X;
}

bool RegionS::contains_h_form(double x, double y) const {
  double scale = std::cbrt(X) * std::cbrt(T) * std::cbrt(T);
  double t = std::cbrt(T) / std::cbrt(X);
  return density::h(A1 * x / scale, A2 * y / scale, t) <= 1.0 + 1e-12;
}

std::complex<double> exp_sum_S_direct(const CongruenceInstance& inst, long long r,
                                      long long s) {
  long long q = inst.q;
  long long a2inv = arith::mod_inverse(inst.a2, q);
  const ModulusTables& t = modulus_tables(q);
  long long rm = mod_pos(r, q), sm = mod_pos(s, q);
  long long a1m = mod_pos(inst.a1, q);
  std::complex<double> sum(0, 0);
  for (long long alpha = 1; alpha <= q; ++alpha) {
    if (!t.coprime[static_cast<std::size_t>(alpha % q)]) continue;
    long long beta = a2inv * mod_pos(inst.b_mod - a1m * alpha, q) % q;
    if (!t.coprime[static_cast<std::size_t>(beta)]) continue;
    sum += t.roots[static_cast<std::size_t>((rm * alpha + sm * beta) % q)];
  }
  return sum;
}

std::complex<double> exp_sum_S_closed(const CongruenceInstance& inst, long long r,
                                      long long s) {
  long long q = inst.q;
  long long a1inv = arith::mod_inverse(inst.a1, q);
  long long a2inv = arith::mod_inverse(inst.a2, q);
  const ModulusTables& t = modulus_tables(q);
  auto root = [&](long long n) { return t.roots[static_cast<std::size_t>(mod_pos(n, q))]; };
  auto cq = [&](long long n) {
    return static_cast<double>(t.cq[static_cast<std::size_t>(mod_pos(n, q))]);
  };
  std::complex<double> v1 = root(r * mod_pos(a1inv * (inst.b_mod % q), q)) *
                            cq(inst.a1 * s - inst.a2 * r);
  std::complex<double> v2 = root(s * mod_pos(a2inv * (inst.b_mod % q), q)) *
                            cq(inst.a2 * r - inst.a1 * s);
  if (std::abs(v1 - v2) > 1e-9) {
    throw std::logic_error("exp_sum_S_closed: symmetric forms disagree");
  }
  return v1;
}

long long count_N(const IntegerRange& I, const IntegerRange& J,
                  const CongruenceInstance& inst, bool require_u_coprime) {
  long long q = inst.q;
  long long a2inv = arith::mod_inverse(inst.a2, q);
  long long jf = J.first_int(), jl = J.last_int();
  long long total = 0;
  for (long long u = I.first_int(); u <= I.last_int(); ++u) {
    if (require_u_coprime && gcd_ll(u, q) != 1) continue;
    long long c = mod_pos(a2inv * mod_pos(inst.b_mod - inst.a1 * mod_pos(u, q), q), q);
    if (gcd_ll(c, q) != 1) continue;  // constant along the class
    total += count_in_class(jf, jl, c, q);
  }
  return total;
}

Rat count_N_star(const IntegerRange& I, const IntegerRange& J, long long q) {
  auto coprime_count = [&](const IntegerRange& range) {
    long long first = range.first_int(), last = range.last_int();
    long long total = 0;
    for (long long c = 0; c < q; ++c) {
      if (gcd_ll(c, q) != 1) continue;
      total += count_in_class(first, last, c, q);
    }
    return total;
  };
  Int count = Int(coprime_count(I)) * Int(coprime_count(J));
  return Rat(count, Int(arith::euler_phi(static_cast<std::uint64_t>(q))));
}

double error_E0(const CongruenceInstance& inst) {
  long long q = inst.q;
  if (q > 2000) throw std::invalid_argument("error_E0: q > 2000 rejected");
  if (q == 1) return 0.0;
  long long half = q / 2;
  double total = 0.0;
  for (long long d = 1; d <= q; ++d) {
    if (q % d != 0) continue;
    if (arith::mu(static_cast<std::uint64_t>(q / d)) == 0) continue;
    // s = a1^{-1} a2 r (mod d); gcd(a1, d) = 1 since d | q.
    long long a1inv_d = d == 1 ? 0 : arith::mod_inverse(inst.a1, d);
    double inner = 0.0;
    for (long long r = -half; r <= half; ++r) {
      if (r == 0) continue;
      long long c = d == 1 ? 0 : mod_pos(a1inv_d * mod_pos(inst.a2 * mod_pos(r, d), d), d);
      long long start = -half + mod_pos(c - (-half), d);
      double partial = 0.0;
      for (long long s = start; s <= half; s += d) {
        if (s == 0) continue;
        partial += 1.0 / std::abs(static_cast<double>(s));
      }
      inner += partial / std::abs(static_cast<double>(r));
    }
    total += static_cast<double>(d) * inner;
  }
  return total;
}

double error_E1(long long q) {
  if (q <= 1) return 0.0;
  double ratio = static_cast<double>(q) /
                 static_cast<double>(arith::euler_phi(static_cast<std::uint64_t>(q)));
  double lg = std::log(static_cast<double>(q));
  return ratio * ratio * ratio * lg * lg;
}

double error_E2(long long q) {
  double ratio = static_cast<double>(q) /
                 static_cast<double>(arith::euler_phi(static_cast<std::uint64_t>(q)));
  return ratio * arith::sigma_neg(0.5, static_cast<std::uint64_t>(q)) *
         arith::sigma_neg(1.0, static_cast<std::uint64_t>(q));
}

double error_E(const CongruenceInstance& inst) { return error_E0(inst) + error_E1(inst.q); }

long long count_D(const RegionS& S, const CongruenceInstance& inst) {
  long long q = inst.q;
  long long a1inv = arith::mod_inverse(inst.a1, q);
  long long vmax = static_cast<long long>(std::floor(S.X / S.A2));
  long long umax = static_cast<long long>(std::floor(S.X / S.A1));
  long long total = 0;
  for (long long v = -vmax; v <= vmax; ++v) {
    if (v == 0 || gcd_ll(v, q) != 1) continue;
    long long c = mod_pos(a1inv * mod_pos(inst.b_mod - inst.a2 * mod_pos(v, q), q), q);
    if (gcd_ll(c, q) != 1) continue;
    long long start = -umax + mod_pos(c - (-umax), q);
    for (long long u = start; u <= umax; u += q) {
      if (u == 0) continue;
      if (S.contains(static_cast<double>(u), static_cast<double>(v))) ++total;
    }
  }
  return total;
}

Rat count_D_star(const RegionS& S, long long q) {
  long long vmax = static_cast<long long>(std::floor(S.X / S.A2));
  long long umax = static_cast<long long>(std::floor(S.X / S.A1));
  Int total = 0;
  for (long long v = -vmax; v <= vmax; ++v) {
    if (v == 0 || gcd_ll(v, q) != 1) continue;
    for (long long u = -umax; u <= umax; ++u) {
      if (u == 0 || gcd_ll(u, q) != 1) continue;
      if (S.contains(static_cast<double>(u), static_cast<double>(v))) ++total;
    }
  }
  return Rat(total, Int(arith::euler_phi(static_cast<std::uint64_t>(q))));
}

double main_term_D(const RegionS& S, long long q, const density::QuadratureConfig& cfg) {
  double phi = static_cast<double>(arith::euler_phi(static_cast<std::uint64_t>(q)));
  double t = std::cbrt(S.T) / std::cbrt(S.X);
  double g2v = t >= 1.4422495703074083 ? 0.0 : density::g2(t, cfg);
  return phi / (static_cast<double>(q) * static_cast<double>(q)) *
         std::pow(S.X, 2.0 / 3.0) * std::pow(S.T, 4.0 / 3.0) / (S.A1 * S.A2) * g2v;
}

double affine_error_bound(const RegionS& S, const CongruenceInstance& inst, double L,
                          double calL) {
  if (L < 1 || calL < 1) throw std::invalid_argument("affine_error_bound: L, calL >= 1");
  if (S.X / calL > S.T) {
    throw std::invalid_argument("affine_error_bound: requires X/calL <= T");
  }
  double lg = std::log(2.0 * S.X);
  double first = L * L * L * L * lg * lg * error_E(inst);
  double second = std::pow(S.X, 2.0 / 3.0) * std::pow(S.T, 4.0 / 3.0) /
                  (S.A1 * S.A2 * static_cast<double>(inst.q)) * std::pow(calL, 4.0 / 3.0) *
                  (calL / L + std::sqrt(S.A1 / S.X) + std::sqrt(S.A2 / S.X)) *
                  error_E2(inst.q);
  return first + second;
}

long long count_quadratic_interval(double Yp, double Y, double A) {
  if (!(Y > 0)) throw std::invalid_argument("count_quadratic_interval: Y must be > 0");
  double radius = std::abs(A) + std::sqrt(Y + A * A) + 2.0;
  long long ymax = static_cast<long long>(radius);
  long long total = 0;
  for (long long y = -ymax; y <= ymax; ++y) {
    double value = std::abs(static_cast<double>(y) * static_cast<double>(y) +
                            2.0 * A * static_cast<double>(y));
    if (value > Yp && value <= Y) ++total;
  }
  return total;
}

double quadratic_interval_bound(double nu, double M0, double Y, double A) {
  double M = std::max(std::abs(A), std::sqrt(Y));
  return std::sqrt(nu) * M0 * M0 / M + 1.0;
}

long long heath_brown_count(const PrimitiveVectorQuery& qv) {
  long long g = gcd_ll(gcd_ll(qv.v[0], qv.v[1]), qv.v[2]);
  if (g != 1) throw std::invalid_argument("heath_brown_count: v must be primitive");
  for (double w : qv.W) {
    if (w < 1) throw std::invalid_argument("heath_brown_count: W_i >= 1 required");
  }
  // Pivot on the component of v with the largest modulus and solve for the
  // corresponding coordinate of w.
  int k = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(qv.v[i]) > std::abs(qv.v[k])) k = i;
  }
  int i = (k + 1) % 3, j = (k + 2) % 3;
  long long wi_max = static_cast<long long>(std::floor(qv.W[i]));
  long long wj_max = static_cast<long long>(std::floor(qv.W[j]));
  long long wk_max = static_cast<long long>(std::floor(qv.W[k]));
  long long total = 0;
  for (long long wi = -wi_max; wi <= wi_max; ++wi) {
    for (long long wj = -wj_max; wj <= wj_max; ++wj) {
      long long num = -(qv.v[i] * wi + qv.v[j] * wj);
      if (num % qv.v[k] != 0) continue;
      long long wk = num / qv.v[k];
      if (wk < -wk_max || wk > wk_max) continue;
      if (gcd_ll(gcd_ll(wi, wj), wk) != 1) continue;  // also excludes w = 0
      ++total;
    }
  }
  return total;
}

double heath_brown_bound(const PrimitiveVectorQuery& qv) {
  double num = qv.W[0] * qv.W[1] * qv.W[2];
  double den = 0;
  for (int i = 0; i < 3; ++i) {
    den = std::max(den, std::abs(static_cast<double>(qv.v[i])) * qv.W[i]);
  }
  return 12.0 * kPi * num / den + 4.0;
}

DyadicErrorSum dyadic_error_sum(double C1, double C2, long long q, long long b1,
                                long long b2) {
  if (C1 < 0.5 || C2 < 0.5) throw std::invalid_argument("dyadic_error_sum: C_i >= 1/2");
  if (b1 < 1 || b2 < 1 || gcd_ll(b1 * b2, q) != 1) {
    throw std::invalid_argument("dyadic_error_sum: need gcd(b1 b2, q) = 1");
  }
  DyadicErrorSum result;
  long long c1_lo = static_cast<long long>(std::floor(C1)) + 1;
  long long c1_hi = static_cast<long long>(std::floor(2.0 * C1));
  long long c2_lo = static_cast<long long>(std::floor(C2)) + 1;
  long long c2_hi = static_cast<long long>(std::floor(2.0 * C2));
  for (long long c1 = c1_lo; c1 <= c1_hi; ++c1) {
    if (gcd_ll(c1, q) != 1) continue;
    for (long long c2 = c2_lo; c2 <= c2_hi; ++c2) {
      if (gcd_ll(c2, q) != 1 || gcd_ll(c1, c2) != 1) continue;
      CongruenceInstance inst(q, b1 * c1 * c1, b2 * c2 * c2, 0);
      result.lhs += error_E(inst);
    }
  }
  double tau = static_cast<double>(arith::tau(static_cast<std::uint64_t>(q)));
  double pw = std::pow(2.0, arith::omega_count(static_cast<std::uint64_t>(q)));
  result.bound = (C1 * C2 * tau + static_cast<double>(q)) * pw * error_E1(q);
  return result;
}

}  // namespace d4::congruence
