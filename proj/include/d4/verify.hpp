#pragma once

// Verification suites shared by the CLI `verify` subcommand, the calibration
// tool and the acceptance tests.  Each suite exercises one proved estimate or
// identity: exact identities get hard thresholds, one-sided <<-estimates get
// an empirically calibrated constant C_cal (recorded once in
// fixtures/calibration.json); reruns must stay within 2 * C_cal.
//
// Everything here is deterministic: corpora are generated from counter-based
// streams, and parallel folds combine per-item results in index order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "d4/congruence.hpp"
#include "d4/density.hpp"
#include "d4/rng.hpp"
#include "d4/torsor.hpp"

namespace d4::verify {

struct SuiteResult {
  std::string suite;
  long long cases = 0;
  double statistic = 0;  // suite-specific: max abs difference or max ratio
  double threshold = 0;  // pass iff statistic <= threshold
  bool pass = false;
  std::string detail;
};

struct CorpusStat {
  long long cases = 0;
  long long exact_failures = 0;  // zero-bound instances that must match exactly
  double max_ratio = 0;
};

struct Calibration {
  std::uint64_t seed = 0;
  long long corpus = 0;
  double c_cal = 0;
};

using CalibrationMap = std::map<std::string, Calibration>;

inline CalibrationMap load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration fixture: " + path);
  nlohmann::json j;
  in >> j;
  CalibrationMap out;
  for (auto& [key, val] : j.items()) {
    out[key] = Calibration{val.at("seed").get<std::uint64_t>(),
                           val.at("corpus").get<long long>(),
                           val.at("c_cal").get<double>()};
  }
  return out;
}

struct PeyreFixture {
  std::string alpha;
  double omega_inf = 0, omega_inf_err = 0;
  std::uint64_t euler_P = 0;
  double euler_value = 0, euler_tail = 0;
  double c_VH = 0, c_VH_err = 0;
};

inline PeyreFixture load_peyre(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open peyre fixture: " + path);
  nlohmann::json j;
  in >> j;
  PeyreFixture f;
  f.alpha = j.at("alpha").get<std::string>();
  f.omega_inf = j.at("omega_inf").get<double>();
  f.omega_inf_err = j.at("omega_inf_err").get<double>();
  f.euler_P = j.at("euler_P").get<std::uint64_t>();
  f.euler_value = j.at("euler_value").get<double>();
  f.euler_tail = j.at("euler_tail").get<double>();
  f.c_VH = j.at("c_VH").get<double>();
  f.c_VH_err = j.at("c_VH_err").get<double>();
  return f;
}

namespace detail {

// Nonzero residue in [-q, q] coprime to q, drawn by rejection.
inline long long draw_coprime(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t& ctr, long long q) {
  for (;;) {
    long long a = rng::uniform_int(seed, stream, ctr++, -q, q);
    if (a != 0 && std::gcd(std::abs(a), q) == 1) return a;
  }
}

inline congruence::IntegerRange draw_range(std::uint64_t seed, std::uint64_t stream,
                                           std::uint64_t& ctr, long long span) {
  double a = static_cast<double>(rng::uniform_int(seed, stream, ctr++, -span, span));
  double b = static_cast<double>(rng::uniform_int(seed, stream, ctr++, -span, span));
  congruence::IntegerRange r;
  r.lo = std::min(a, b);
  r.hi = std::max(a, b);
  r.lo_open = rng::uniform_int(seed, stream, ctr++, 0, 1) == 1;
  r.hi_open = rng::uniform_int(seed, stream, ctr++, 0, 1) == 1;
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact identities.

// Closed form of the congruence exponential sum S_q versus the literal sum,
// exhaustively over q <= max_q, all coprime |a_i| <= q, all admissible
// b in [0, q), all 1 <= r, s <= q.  Returns the maximum absolute difference.
inline SuiteResult run_lemma1(long long max_q = 40, int threads = 1) {
  struct Item {
    long long q, a1;
  };
  std::vector<Item> items;
  for (long long q = 1; q <= max_q; ++q) {
    for (long long a1 = -q; a1 <= q; ++a1) {
      if (a1 != 0 && std::gcd(std::abs(a1), q) == 1) items.push_back({q, a1});
    }
  }
  std::vector<double> max_diff(items.size(), 0.0);
  std::vector<long long> counts(items.size(), 0);
  auto worker = [&](int w) {
    for (std::size_t i = w; i < items.size(); i += static_cast<std::size_t>(threads)) {
      auto [q, a1] = items[i];
      long long r0 = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q)));
      for (long long a2 = -q; a2 <= q; ++a2) {
        if (a2 == 0 || std::gcd(std::abs(a2), q) != 1) continue;
        for (long long b = 0; b < std::max<long long>(q, 1); b += r0) {
          congruence::CongruenceInstance inst(q, a1, a2, b);
          for (long long r = 1; r <= q; ++r) {
            for (long long s = 1; s <= q; ++s) {
              std::complex<double> direct = congruence::exp_sum_S_direct(inst, r, s);
              std::complex<double> closed = congruence::exp_sum_S_closed(inst, r, s);
              max_diff[i] = std::max(max_diff[i], std::abs(closed - direct));
              ++counts[i];
            }
          }
          if (q == 1) break;  // b = 0 is the only residue
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker, w);
  worker(0);
  for (auto& t : pool) t.join();

  SuiteResult res;
  res.suite = "lemma1";
  res.threshold = 1e-8;
  for (std::size_t i = 0; i < items.size(); ++i) {
    res.statistic = std::max(res.statistic, max_diff[i]);
    res.cases += counts[i];
  }
  res.pass = res.statistic < res.threshold;
  res.detail = "closed vs direct exponential sum, q <= " + std::to_string(max_q);
  return res;
}

// Ramanujan sums: divisor formula versus the literal exponential sum.
inline SuiteResult run_ramanujan(long long max_q = 100, long long max_n = 100) {
  SuiteResult res;
  res.suite = "ramanujan";
  res.threshold = 1e-6;
  for (long long q = 1; q <= max_q; ++q) {
    for (long long n = -max_n; n <= max_n; ++n) {
      long long exact = arith::ramanujan_c(static_cast<std::uint64_t>(q), n);
      std::complex<double> direct =
          arith::ramanujan_c_direct(static_cast<std::uint64_t>(q), n);
      double diff = std::abs(direct - std::complex<double>(
                                          static_cast<double>(exact), 0.0));
      res.statistic = std::max(res.statistic, diff);
      if (std::llround(direct.real()) != exact) res.statistic = 1.0;
      ++res.cases;
    }
  }
  res.pass = res.statistic < res.threshold;
  res.detail = "divisor formula vs literal sum, q <= " + std::to_string(max_q);
  return res;
}

// Averaging identity: the sum of count_N over a2 in (Z/q)* equals
// phi(q) * count_N_star, exactly.
inline SuiteResult run_averaging(std::uint64_t seed = 42, long long trials = 50) {
  SuiteResult res;
  res.suite = "averaging";
  res.threshold = 0;
  std::uint64_t ctr = 0;
  for (long long i = 0; i < trials; ++i) {
    long long q = rng::uniform_int(seed, 20, ctr++, 1, 30);
    long long a1 = detail::draw_coprime(seed, 20, ctr, q);
    long long b = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q))) *
                  rng::uniform_int(seed, 20, ctr++, -4, 4);
    auto I = detail::draw_range(seed, 20, ctr, 25);
    auto J = detail::draw_range(seed, 20, ctr, 25);
    Int total = 0;
    for (long long a2 = 1; a2 <= q; ++a2) {
      if (std::gcd(a2, q) != 1 && q > 1) continue;
      if (q == 1 && a2 != 1) break;
      total += count_N(I, J, congruence::CongruenceInstance(q, a1, a2, b));
    }
    Rat expected = Rat(Int(arith::euler_phi(static_cast<std::uint64_t>(q)))) *
                   congruence::count_N_star(I, J, q);
    if (Rat(total) != expected) res.statistic += 1.0;
    ++res.cases;
  }
  res.pass = res.statistic == 0;
  res.detail = "sum over a2 of N equals phi(q) N*, exact";
  return res;
}

// Primitive-vector count against the 12 pi W1 W2 W3 / max |v_i| W_i + 4 bound.
inline SuiteResult run_lemma8(std::uint64_t seed = 42, long long trials = 1000) {
  SuiteResult res;
  res.suite = "lemma8";
  res.threshold = 1.0;
  std::uint64_t ctr = 0;
  for (long long i = 0; i < trials; ++i) {
    congruence::PrimitiveVectorQuery qv;
    for (;;) {
      for (int k = 0; k < 3; ++k) qv.v[k] = rng::uniform_int(seed, 30, ctr++, -50, 50);
      long long g = std::gcd(std::gcd(std::abs(qv.v[0]), std::abs(qv.v[1])),
                             std::abs(qv.v[2]));
      if (g == 0) continue;
      for (int k = 0; k < 3; ++k) qv.v[k] /= g;
      break;
    }
    for (int k = 0; k < 3; ++k) {
      qv.W[k] = 1.0 + 29.0 * rng::uniform(seed, 31, ctr++);
    }
    double ratio = static_cast<double>(congruence::heath_brown_count(qv)) /
                   congruence::heath_brown_bound(qv);
    res.statistic = std::max(res.statistic, ratio);
    ++res.cases;
  }
  res.pass = res.statistic <= res.threshold;
  res.detail = "exhaustive primitive count <= bound, exact inequality";
  return res;
}

// g1/g2 envelope bounds plus refinement stability of g2.
inline SuiteResult run_lemma5(std::uint64_t seed = 42) {
  SuiteResult res;
  res.suite = "lemma5";
  res.threshold = 1e-9;
  std::uint64_t ctr = 0;
  for (int i = 0; i < 20000; ++i) {
    double t = 0.05 + 1.6 * rng::uniform(seed, 40, ctr++);
    double y = (2.0 * rng::uniform(seed, 40, ctr++) - 1.0) * 1.5 / (t * t);
    double v = density::g1(y, t);
    res.statistic = std::max(res.statistic, v - 2.0 / (t * t));
    if (std::abs(y) * t * t > 1.0) res.statistic = std::max(res.statistic, v);
    ++res.cases;
  }
  density::QuadratureConfig coarse, fine;
  fine.quad_tol = coarse.quad_tol / 10.0;
  fine.root_tol = coarse.root_tol / 10.0;
  for (double t : {0.2, 0.5, 0.8, 1.1, 1.4}) {
    double d = std::abs(density::g2(t, coarse) - density::g2(t, fine));
    res.statistic = std::max(res.statistic, d - 20.0 * coarse.quad_tol);
    ++res.cases;
  }
  res.pass = res.statistic <= res.threshold;
  res.detail = "g1 <= 2/t^2, support bounds, g2 stable under 10x refinement";
  return res;
}

// Local factor of the Theta sum versus its closed form.
inline SuiteResult run_localfactor() {
  SuiteResult res;
  res.suite = "localfactor";
  res.threshold = 1e-10;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    double diff = std::abs(density::local_factor_Theta(p) -
                           to_double(density::local_factor_Theta_closed(p)));
    res.statistic = std::max(res.statistic, diff);
    ++res.cases;
  }
  res.pass = res.statistic < res.threshold;
  res.detail = "truncated Theta sum vs closed form, p in {2,...,13}";
  return res;
}

// Pipeline bijection at a single height.
inline SuiteResult run_torsor_bijection(long long B = 50, int threads = 1) {
  auto rep = torsor::bijection_check(B, threads);
  SuiteResult res;
  res.suite = "lemma11";
  res.cases = rep.brute;
  res.statistic = static_cast<double>(std::llabs(rep.brute - rep.torsor) +
                                      static_cast<long long>(rep.missing.size()) +
                                      static_cast<long long>(rep.extra.size()));
  res.threshold = 0;
  res.pass = rep.ok();
  res.detail = "bijection at B = " + std::to_string(B) + ", N = " +
               std::to_string(rep.brute);
  return res;
}

// Sum of per-prefix fiber counts; must partition the torsor count exactly.
inline long long fiber_partition_total(long long B) {
  long long total = 0;
  auto cube = [](long long x) { return x * x * x; };
  for (long long e1 = 1; cube(e1) <= 3 * B; ++e1)
    for (long long e2 = 1; cube(e1) * e2 * e2 <= 3 * B; ++e2)
      for (long long e3 = 1; cube(e1) * e2 * e2 * e3 * e3 <= 3 * B; ++e3)
        for (long long e4 = 1; cube(e1) * e2 * e2 * e3 * e3 * e4 * e4 <= 3 * B; ++e4) {
          long long base = cube(e1) * e2 * e2 * e3 * e3 * e4 * e4;
          for (long long e5 = 1; base * e5 <= 3 * B; ++e5)
            for (long long e6 = 1; base * e5 * e6 <= 3 * B; ++e6)
              for (long long e7 = 1; base * e5 * e6 * e7 <= 3 * B; ++e7) {
                if (std::gcd(e1, e5 * e6 * e7) > 1) continue;
                if (std::gcd(e2 * e5, e3 * e4 * e6 * e7) > 1) continue;
                if (std::gcd(e3 * e6, e4 * e7) > 1) continue;
                total += torsor::fiber_count(
                    torsor::FiberContext({e1, e2, e3, e4, e5, e6, e7}, B), B);
              }
        }
  return total;
}

// ---------------------------------------------------------------------------
// Calibrated <<-estimates.  Each corpus returns the maximum observed ratio of
// the measured quantity to its proved envelope; the calibration run freezes
// that maximum as C_cal.

// |N - N*| against the error functional E = E0 + E1 (range-uniform).
inline CorpusStat lemma2_corpus(std::uint64_t seed, long long n) {
  CorpusStat st;
  std::uint64_t ctr = 0;
  for (long long i = 0; i < n; ++i) {
    long long q = rng::uniform_int(seed, 50, ctr++, 1, 60);
    long long a1 = detail::draw_coprime(seed, 50, ctr, q);
    long long a2 = detail::draw_coprime(seed, 50, ctr, q);
    long long b = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q))) *
                  rng::uniform_int(seed, 50, ctr++, -5, 5);
    auto I = detail::draw_range(seed, 50, ctr, 40);
    auto J = detail::draw_range(seed, 50, ctr, 40);
    congruence::CongruenceInstance inst(q, a1, a2, b);
    double diff = std::abs(static_cast<double>(count_N(I, J, inst)) -
                           to_double(congruence::count_N_star(I, J, q)));
    double env = congruence::error_E(inst);
    if (env == 0) {
      if (diff != 0) ++st.exact_failures;
    } else {
      st.max_ratio = std::max(st.max_ratio, diff / env);
    }
    ++st.cases;
  }
  return st;
}

// Quadratic-interval count against nu^{1/2} M0^2 / M + 1.
inline CorpusStat lemma4_corpus(std::uint64_t seed, long long n) {
  CorpusStat st;
  std::uint64_t ctr = 0;
  for (long long i = 0; i < n; ++i) {
    double A = 40.0 * rng::uniform(seed, 51, ctr++) - 20.0;
    double Y = 1.0 + 399.0 * rng::uniform(seed, 51, ctr++);
    double nu = (1.0 + static_cast<double>(rng::uniform_int(seed, 51, ctr++, 0, 999))) /
                1000.0;
    double M = std::max(std::abs(A), std::sqrt(Y));
    double M0 = M * (1.0 + 3.0 * rng::uniform(seed, 51, ctr++));
    double Yp = Y - nu * M0 * M0;  // Y - Y' = nu M0^2 by construction
    long long cnt = congruence::count_quadratic_interval(Yp, Y, A);
    double bound = congruence::quadratic_interval_bound(nu, M0, Y, A);
    st.max_ratio = std::max(st.max_ratio, static_cast<double>(cnt) / bound);
    ++st.cases;
  }
  return st;
}

// |D - main term| against the affine error bound (L, calL budget).
inline CorpusStat lemma6_corpus(std::uint64_t seed, long long n) {
  CorpusStat st;
  std::uint64_t ctr = 0;
  for (long long i = 0; i < n; ++i) {
    double X = 20.0 + 60.0 * rng::uniform(seed, 52, ctr++);
    double calL = 2.0;
    double T = (X / calL) * (1.0 + rng::uniform(seed, 52, ctr++));  // X/calL <= T <= X
    double A1 = static_cast<double>(rng::uniform_int(seed, 52, ctr++, 1, 3));
    double A2 = static_cast<double>(rng::uniform_int(seed, 52, ctr++, 1, 3));
    long long q = rng::uniform_int(seed, 52, ctr++, 1, 8);
    long long a1 = detail::draw_coprime(seed, 52, ctr, q);
    long long a2 = detail::draw_coprime(seed, 52, ctr, q);
    long long b = static_cast<long long>(arith::rad(static_cast<std::uint64_t>(q))) *
                  rng::uniform_int(seed, 52, ctr++, -3, 3);
    double L = 1.0 + rng::uniform(seed, 52, ctr++) * (calL - 1.0);
    congruence::RegionS S(X, T, A1, A2);
    congruence::CongruenceInstance inst(q, a1, a2, b);
    double diff = std::abs(static_cast<double>(congruence::count_D(S, inst)) -
                           congruence::main_term_D(S, q));
    double env = congruence::affine_error_bound(S, inst, L, calL);
    st.max_ratio = std::max(st.max_ratio, diff / env);
    ++st.cases;
  }
  return st;
}

// Dyadic sum of error functionals against (C1 C2 tau(q) + q) 2^omega(q) E1(q).
inline CorpusStat lemma9_corpus(std::uint64_t seed, long long n) {
  CorpusStat st;
  std::uint64_t ctr = 0;
  for (long long i = 0; i < n; ++i) {
    long long q = rng::uniform_int(seed, 53, ctr++, 1, 30);
    double C1 = 0.5 + 3.5 * rng::uniform(seed, 53, ctr++);
    double C2 = 0.5 + 3.5 * rng::uniform(seed, 53, ctr++);
    long long b1, b2;
    do {
      b1 = rng::uniform_int(seed, 53, ctr++, 1, 20);
      b2 = rng::uniform_int(seed, 53, ctr++, 1, 20);
    } while (std::gcd(b1 * b2, q) != 1);
    auto sum = congruence::dyadic_error_sum(C1, C2, q, b1, b2);
    if (sum.bound == 0) {
      if (sum.lhs != 0) ++st.exact_failures;
    } else {
      st.max_ratio = std::max(st.max_ratio, sum.lhs / sum.bound);
    }
    ++st.cases;
  }
  return st;
}

// Weighted psi-sums against the Upsilon Psi main term and its envelope.
inline CorpusStat lemma10_corpus(std::uint64_t seed, long long n) {
  CorpusStat st;
  std::uint64_t ctr = 0;
  for (long long i = 0; i < n; ++i) {
    std::uint64_t a = static_cast<std::uint64_t>(rng::uniform_int(seed, 54, ctr++, 1, 30));
    std::uint64_t b = static_cast<std::uint64_t>(rng::uniform_int(seed, 54, ctr++, 1, 30));
    double t1 = 1.0 + 49.0 * rng::uniform(seed, 54, ctr++);
    double t2 = t1 + 10.0 + 990.0 * rng::uniform(seed, 54, ctr++);
    long long kind = rng::uniform_int(seed, 54, ctr++, 0, 2);
    std::function<double(double)> g;
    if (kind == 0) {
      g = [](double t) { return 1.0 / (t * t); };
    } else if (kind == 1) {
      g = [](double t) { return 1.0 / t; };
    } else {
      g = [](double t) { return std::exp(-t / 200.0); };
    }
    auto rep = density::psi_weighted_sum_check(a, b, t1, t2, g, 0.5, 1);
    st.max_ratio = std::max(st.max_ratio, rep.ratio);
    ++st.cases;
  }
  return st;
}

using CorpusFn = CorpusStat (*)(std::uint64_t, long long);

inline const std::map<std::string, CorpusFn>& calibrated_suites() {
  static const std::map<std::string, CorpusFn> suites = {
      {"lemma2", &lemma2_corpus},  {"lemma4", &lemma4_corpus},
      {"lemma6", &lemma6_corpus},  {"lemma9", &lemma9_corpus},
      {"lemma10", &lemma10_corpus}};
  return suites;
}

// Rerun a calibrated corpus and compare against 2 * C_cal.
inline SuiteResult run_calibrated(const std::string& name, const Calibration& cal) {
  auto it = calibrated_suites().find(name);
  if (it == calibrated_suites().end()) {
    throw std::invalid_argument("unknown calibrated suite: " + name);
  }
  CorpusStat st = it->second(cal.seed, cal.corpus);
  SuiteResult res;
  res.suite = name;
  res.cases = st.cases;
  res.statistic = st.max_ratio;
  res.threshold = 2.0 * cal.c_cal;
  res.pass = st.exact_failures == 0 && st.max_ratio <= res.threshold;
  res.detail = "max ratio vs calibrated envelope (C_cal = " +
               std::to_string(cal.c_cal) + ")";
  return res;
}

}  // namespace d4::verify
