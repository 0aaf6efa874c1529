#include "d4/torsor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

namespace d4::torsor {

namespace {

using i128 = __int128;
using arith::gcd_ll;

i128 iabs128(i128 x) { return x < 0 ? -x : x; }

long long narrow(i128 x) {
  if (x > INT64_MAX || x < INT64_MIN) throw std::overflow_error("128-bit value out of range");
  return static_cast<long long>(x);
}

// e1^2 e2^2 e3 e4 e5^2 and friends; all bounded by 9 B^2 under the loop
// constraint e1^3 e2^2 e3^2 e4^2 e5 e6 e7 <= 3B, so plain i128 products are
// safe.
struct Prefix {
  long long e1, e2, e3, e4, e5, e6, e7;
};

// Enumerates (e8, e9, e10) completing the prefix: e8 free within (height2),
// e9 stepped through its residue class mod q10 within (height3), e10 pinned
// by the torsor equation; checks (height1), (height4), (gcd1)-(gcd3).
template <typename Visit>
long long fiber_scan(const Prefix& p, long long B, Visit&& visit) {
  i128 q8 = (i128)p.e2 * p.e5 * p.e5;
  i128 q9 = (i128)p.e3 * p.e6 * p.e6;
  i128 q10 = (i128)p.e4 * p.e7 * p.e7;
  i128 b = (i128)p.e1 * p.e2 * p.e3 * p.e4 * p.e5 * p.e6 * p.e7;
  i128 h2 = (i128)p.e1 * p.e1 * p.e2 * p.e2 * p.e3 * p.e4 * p.e5 * p.e5;
  i128 h3 = (i128)p.e1 * p.e1 * p.e2 * p.e3 * p.e3 * p.e4 * p.e6 * p.e6;
  i128 h4 = (i128)p.e1 * p.e1 * p.e2 * p.e3 * p.e4 * p.e4 * p.e7 * p.e7;
  if (h2 > B || h3 > B || h4 > B) return 0;
  long long H8 = narrow(B / h2), H9 = narrow(B / h3), H10 = narrow(B / h4);
  long long q10l = narrow(q10);
  long long q9inv = q10l == 1 ? 0 : arith::mod_inverse(arith::mod_pos128(q9, q10l), q10l);
  long long c1 = narrow((i128)p.e1 * p.e2 * p.e3 * p.e4);
  long long g_e8 = narrow((i128)c1 * p.e6 * p.e7);
  long long g_e9 = narrow((i128)c1 * p.e5 * p.e7);
  long long g_e10 = narrow((i128)c1 * p.e5 * p.e6);
  long long count = 0;
  for (long long a8 = 1; a8 <= H8; ++a8) {
    if (gcd_ll(a8, g_e8) != 1) continue;
    for (int s8 = 0; s8 < 2; ++s8) {
      long long e8 = s8 == 0 ? a8 : -a8;
      i128 rhs = b - q8 * e8;  // |rhs| <= 4B, exactly representable as double
      long long cls = 0;
      if (q10l > 1) {
        long long r = arith::mod_pos128(rhs, q10l);
        cls = narrow((i128)q9inv * r % q10l);
      }
      // Admissible e9 satisfy |e9 (rhs - q9 e9)| <= B q10 / |e8| (height1)
      // and |rhs - q9 e9| <= H10 q10 (height4): at most two intervals.  The
      // pruning below is float-based with an outward safety margin; every
      // exact condition is still re-checked inside, so it can only skip e9
      // values that provably fail.
      double rq9 = static_cast<double>(narrow(q9));
      double rhsd = static_cast<double>(narrow(rhs));
      double cap = static_cast<double>(B) * static_cast<double>(q10l) /
                   static_cast<double>(a8);
      double s1 = std::sqrt(rhsd * rhsd + 4.0 * rq9 * cap);
      double seg_lo[2] = {(rhsd - s1) / (2.0 * rq9), 0};
      double seg_hi[2] = {(rhsd + s1) / (2.0 * rq9), 0};
      int nseg = 1;
      double disc2 = rhsd * rhsd - 4.0 * rq9 * cap;
      if (disc2 > 0) {
        double s2 = std::sqrt(disc2);
        seg_hi[1] = seg_hi[0];
        seg_hi[0] = (rhsd - s2) / (2.0 * rq9);
        seg_lo[1] = (rhsd + s2) / (2.0 * rq9);
        nseg = 2;
      }
      double w10 = static_cast<double>(H10) * static_cast<double>(q10l);
      double lo10 = (rhsd - w10) / rq9, hi10 = (rhsd + w10) / rq9;
      auto margin = [](double x) { return 4.0 + 1e-9 * std::abs(x); };
      long long prev_hi = INT64_MIN;
      for (int seg = 0; seg < nseg; ++seg) {
        double flo = std::max({-static_cast<double>(H9), seg_lo[seg] - margin(seg_lo[seg]),
                               lo10 - margin(lo10)});
        double fhi = std::min({static_cast<double>(H9), seg_hi[seg] + margin(seg_hi[seg]),
                               hi10 + margin(hi10)});
        if (flo > fhi) continue;
        long long lo = static_cast<long long>(std::floor(flo));
        long long hi = static_cast<long long>(std::ceil(fhi));
        lo = std::max(lo, prev_hi + 1);  // never revisit an e9
        long long e9 = lo + arith::mod_pos(cls - lo, q10l);
        for (; e9 <= hi; e9 += q10l) {
          if (e9 == 0 || e9 < -H9 || e9 > H9) continue;
          if (gcd_ll(e9, g_e9) != 1) continue;
          i128 num = rhs - q9 * e9;
          i128 e10w = num / q10;
          if (e10w == 0) continue;
          if (iabs128(e10w) > H10) continue;
          long long e10 = narrow(e10w);
          if (iabs128((i128)e8 * e9 * e10) > B) continue;
          if (gcd_ll(e10, g_e10) != 1) continue;
          ++count;
          visit(e8, e9, e10);
        }
        prev_hi = hi;
      }
    }
  }
  return count;
}

struct NoVisit {
  void operator()(long long, long long, long long) const {}
};

// Loops e3..e7 under the fixed (e1, e2) block, with each coprimality filter
// applied at the innermost loop level where both arguments are known:
// (gcd4) = e1 vs e5 e6 e7, (gcd5) = e2 e5 vs e3 e4 e6 e7,
// (gcd6) = e3 e6 vs e4 e7.
template <typename Fn>
void scan_block(long long e1, long long e2, long long B, Fn&& fn) {
  i128 threeB = (i128)3 * B;
  i128 m2 = (i128)e1 * e1 * e1 * e2 * e2;
  for (long long e3 = 1; m2 * e3 * e3 <= threeB; ++e3) {
    if (gcd_ll(e3, e2) != 1) continue;
    i128 m3 = m2 * e3 * e3;
    for (long long e4 = 1; m3 * e4 * e4 <= threeB; ++e4) {
      if (gcd_ll(e4, e2) != 1 || gcd_ll(e4, e3) != 1) continue;
      i128 m4 = m3 * e4 * e4;
      for (long long e5 = 1; m4 * e5 <= threeB; ++e5) {
        if (gcd_ll(e5, e1) != 1 || gcd_ll(e5, e3) != 1 || gcd_ll(e5, e4) != 1) continue;
        i128 m5 = m4 * e5;
        for (long long e6 = 1; m5 * e6 <= threeB; ++e6) {
          if (gcd_ll(e6, e1) != 1 || gcd_ll(e6, e2) != 1 || gcd_ll(e6, e5) != 1 ||
              gcd_ll(e6, e4) != 1)
            continue;
          i128 m6 = m5 * e6;
          for (long long e7 = 1; m6 * e7 <= threeB; ++e7) {
            if (gcd_ll(e7, e1) != 1 || gcd_ll(e7, e2) != 1 || gcd_ll(e7, e5) != 1 ||
                gcd_ll(e7, e3) != 1 || gcd_ll(e7, e6) != 1)
              continue;
            fn(Prefix{e1, e2, e3, e4, e5, e6, e7});
          }
        }
      }
    }
  }
}

std::vector<std::pair<long long, long long>> prefix_blocks(long long B) {
  std::vector<std::pair<long long, long long>> blocks;
  i128 threeB = (i128)3 * B;
  for (long long e1 = 1; (i128)e1 * e1 * e1 <= threeB; ++e1) {
    i128 m1 = (i128)e1 * e1 * e1;
    for (long long e2 = 1; m1 * e2 * e2 <= threeB; ++e2) blocks.emplace_back(e1, e2);
  }
  return blocks;
}

// Sums fn(prefix) over all admissible prefixes, parallel over (e1, e2)
// blocks.  fn must be pure; the total is an integer sum, so the merge order
// cannot affect the result.
template <typename Fn>
long long parallel_prefix_sum(long long B, int threads, Fn&& fn) {
  if (B < 1) throw std::invalid_argument("height bound must be >= 1");
  if (B > (1LL << 40)) throw std::overflow_error("height bound beyond the guarded range");
  auto blocks = prefix_blocks(B);
  if (threads < 1) threads = 1;
  threads = std::min<std::size_t>(threads, blocks.size() ? blocks.size() : 1);
  std::vector<long long> partial(threads, 0);
  auto work = [&](int w) {
    long long local = 0;
    for (std::size_t k = w; k < blocks.size(); k += threads) {
      scan_block(blocks[k].first, blocks[k].second, B,
                 [&](const Prefix& p) { local += fn(p); });
    }
    partial[w] = local;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  long long total = 0;
  for (long long v : partial) total += v;
  return total;
}

SurfacePoint line_point(int line, long long u, long long v) {
  // Lines x0 = x_i = 0 (line 0..2) and x1+x2+x3 = x_i = 0 (line 3..5).
  switch (line) {
    case 0: return canonicalize(0, 0, u, v);
    case 1: return canonicalize(0, u, 0, v);
    case 2: return canonicalize(0, u, v, 0);
    case 3: return canonicalize(u, 0, v, -v);
    case 4: return canonicalize(u, v, 0, -v);
    default: return canonicalize(u, v, -v, 0);
  }
}

}  // namespace

SurfacePoint canonicalize(__int128 x0, __int128 x1, __int128 x2, __int128 x3) {
  i128 c[4] = {x0, x1, x2, x3};
  i128 g = 0;
  for (i128 v : c) {
    i128 a = iabs128(v);
    while (a != 0) {
      i128 t = g % a;
      g = a;
      a = t;
    }
  }
  if (g == 0) throw std::invalid_argument("canonicalize: zero quadruple");
  int sign = 1;
  for (i128 v : c) {
    if (v != 0) {
      sign = v > 0 ? 1 : -1;
      break;
    }
  }
  return {narrow(sign * c[0] / g), narrow(sign * c[1] / g), narrow(sign * c[2] / g),
          narrow(sign * c[3] / g)};
}

bool on_surface(const SurfacePoint& p) {
  i128 s = (i128)p.x1 + p.x2 + p.x3;
  return (i128)p.x0 * s * s == (i128)p.x1 * p.x2 * p.x3;
}

bool in_U(const SurfacePoint& p) {
  return p.x1 != 0 && p.x2 != 0 && p.x3 != 0 && p.x1 + p.x2 + p.x3 != 0;
}

long long height(const SurfacePoint& p) {
  return std::max({std::abs(p.x0), std::abs(p.x1), std::abs(p.x2), std::abs(p.x3)});
}

bool torsor_invariants(const TorsorPoint& t, long long B) {
  const auto& e = t.e;
  for (int i = 1; i <= 7; ++i) {
    if (e[i] < 1) return false;
  }
  if (e[8] == 0 || e[9] == 0 || e[10] == 0) return false;
  i128 lhs = (i128)e[2] * e[5] * e[5] * e[8] + (i128)e[3] * e[6] * e[6] * e[9] +
             (i128)e[4] * e[7] * e[7] * e[10];
  i128 b = (i128)e[1] * e[2] * e[3] * e[4] * e[5] * e[6] * e[7];
  if (lhs != b) return false;
  auto g = [](i128 a, i128 bb) {
    a = iabs128(a);
    bb = iabs128(bb);
    while (bb != 0) {
      i128 t2 = a % bb;
      a = bb;
      bb = t2;
    }
    return a;
  };
  if (g(e[10], (i128)e[1] * e[2] * e[3] * e[4] * e[5] * e[6]) != 1) return false;
  if (g(e[9], (i128)e[1] * e[2] * e[3] * e[4] * e[5] * e[7]) != 1) return false;
  if (g(e[8], (i128)e[1] * e[2] * e[3] * e[4] * e[6] * e[7]) != 1) return false;
  if (g(e[1], (i128)e[5] * e[6] * e[7]) != 1) return false;
  if (g((i128)e[2] * e[5], (i128)e[3] * e[4] * e[6] * e[7]) != 1) return false;
  if (g((i128)e[3] * e[6], (i128)e[4] * e[7]) != 1) return false;
  if (iabs128((i128)e[8] * e[9] * e[10]) > B) return false;
  if ((i128)e[1] * e[1] * e[2] * e[2] * e[3] * e[4] * e[5] * e[5] * iabs128(e[8]) > B)
    return false;
  if ((i128)e[1] * e[1] * e[2] * e[3] * e[3] * e[4] * e[6] * e[6] * iabs128(e[9]) > B)
    return false;
  if ((i128)e[1] * e[1] * e[2] * e[3] * e[4] * e[4] * e[7] * e[7] * iabs128(e[10]) > B)
    return false;
  return true;
}

BruteForceResult brute_force_count(long long B, bool include_lines, bool collect_points,
                                   int threads) {
  if (B < 1) throw std::invalid_argument("brute_force_count: B must be >= 1");
  if (B > 500) throw std::invalid_argument("brute_force_count: exhaustive cap is B = 500");
  if (threads < 1) threads = 1;
  std::vector<std::set<SurfacePoint>> local(threads);
  auto work = [&](int w) {
    for (long long x1 = -B + w; x1 <= B; x1 += threads) {
      if (x1 == 0) continue;
      for (long long x2 = -B; x2 <= B; ++x2) {
        if (x2 == 0) continue;
        for (long long x3 = -B; x3 <= B; ++x3) {
          if (x3 == 0) continue;
          long long s = x1 + x2 + x3;
          if (s == 0) continue;
          SurfacePoint p =
              canonicalize((i128)x1 * x2 * x3, (i128)x1 * s * s, (i128)x2 * s * s,
                           (i128)x3 * s * s);
          if (height(p) <= B) local[w].insert(p);
        }
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::set<SurfacePoint> all;
  for (auto& s : local) all.merge(s);
  if (include_lines) {
    for (int line = 0; line < 6; ++line) {
      for (long long u = -B; u <= B; ++u) {
        for (long long v = -B; v <= B; ++v) {
          if (u == 0 && v == 0) continue;
          SurfacePoint p = line_point(line, u, v);
          if (height(p) <= B) all.insert(p);
        }
      }
    }
  }
  BruteForceResult result;
  result.count = static_cast<long long>(all.size());
  if (collect_points) result.points.assign(all.begin(), all.end());
  return result;
}

long long torsor_count(long long B, int threads) {
  return parallel_prefix_sum(B, threads,
                             [&](const Prefix& p) { return fiber_scan(p, B, NoVisit{}); });
}

std::vector<TorsorPoint> torsor_points(long long B) {
  std::vector<TorsorPoint> out;
  parallel_prefix_sum(B, 1, [&](const Prefix& p) {
    return fiber_scan(p, B, [&](long long e8, long long e9, long long e10) {
      TorsorPoint t;
      t.e = {0, p.e1, p.e2, p.e3, p.e4, p.e5, p.e6, p.e7, e8, e9, e10};
      out.push_back(t);
    });
  });
  std::sort(out.begin(), out.end());
  return out;
}

SurfacePoint torsor_to_point(const TorsorPoint& t) {
  const auto& e = t.e;
  i128 x0 = (i128)e[8] * e[9] * e[10];
  i128 x1 = (i128)e[1] * e[1] * e[2] * e[2] * e[3] * e[4] * e[5] * e[5] * e[8];
  i128 x2 = (i128)e[1] * e[1] * e[2] * e[3] * e[3] * e[4] * e[6] * e[6] * e[9];
  i128 x3 = (i128)e[1] * e[1] * e[2] * e[3] * e[4] * e[4] * e[7] * e[7] * e[10];
  i128 g = 0;
  for (i128 v : {x0, x1, x2, x3}) {
    i128 a = iabs128(v);
    while (a != 0) {
      i128 r = g % a;
      g = a;
      a = r;
    }
  }
  if (g != 1) throw std::logic_error("torsor_to_point: image is not primitive");
  SurfacePoint p = canonicalize(x0, x1, x2, x3);
  if (!on_surface(p) || !in_U(p)) {
    throw std::logic_error("torsor_to_point: image violates the surface equation");
  }
  return p;
}

BijectionReport bijection_check(long long B, int threads) {
  BijectionReport report;
  auto brute = brute_force_count(B, false, true, threads);
  report.brute = brute.count;
  auto stream = torsor_points(B);
  report.torsor = static_cast<long long>(stream.size());
  std::set<SurfacePoint> images;
  for (const auto& t : stream) images.insert(torsor_to_point(t));
  report.injective = static_cast<long long>(images.size()) == report.torsor;
  std::set<SurfacePoint> bruteset(brute.points.begin(), brute.points.end());
  for (const auto& p : bruteset) {
    if (!images.count(p)) report.missing.push_back(p);
  }
  for (const auto& p : images) {
    if (!bruteset.count(p)) report.extra.push_back(p);
  }
  report.image_equals_brute = report.missing.empty() && report.extra.empty();
  return report;
}

std::array<long long, 7> squarefree_renormalize(const std::array<long long, 7>& eta) {
  for (long long v : eta) {
    if (v < 1) throw std::invalid_argument("squarefree_renormalize: positive inputs");
  }
  std::array<long long, 7> out = eta;
  long long sq2 = static_cast<long long>(arith::sq(static_cast<std::uint64_t>(eta[1])));
  long long sq3 = static_cast<long long>(arith::sq(static_cast<std::uint64_t>(eta[2])));
  long long sq4 = static_cast<long long>(arith::sq(static_cast<std::uint64_t>(eta[3])));
  out[1] = eta[1] / (sq2 * sq2);
  out[2] = eta[2] / (sq3 * sq3);
  out[3] = eta[3] / (sq4 * sq4);
  out[4] = eta[4] * sq2;
  out[5] = eta[5] * sq3;
  out[6] = eta[6] * sq4;
  out[0] = eta[0] * sq2 * sq3 * sq4;
  return out;
}

FiberContext::FiberContext(const std::array<long long, 7>& eta_, long long B) : eta(eta_) {
  for (long long v : eta) {
    if (v < 1) throw std::invalid_argument("FiberContext: coordinates must be >= 1");
  }
  long long e1 = eta[0], e2 = eta[1], e3 = eta[2], e4 = eta[3], e5 = eta[4], e6 = eta[5],
            e7 = eta[6];
  if (gcd_ll(e1, e5 * e6 * e7) != 1 || gcd_ll(e2 * e5, e3 * e4 * e6 * e7) != 1 ||
      gcd_ll(e3 * e6, e4 * e7) != 1) {
    throw std::invalid_argument("FiberContext: coprimality conditions fail");
  }
  q8 = e2 * e5 * e5;
  q9 = e3 * e6 * e6;
  q10 = e4 * e7 * e7;
  double Bd = static_cast<double>(B);
  Y = Bd / (static_cast<double>(e2) * e3 * e4);
  Z1 = std::cbrt(Bd) /
       (std::pow(static_cast<double>(e2) * e3 * e4, 2.0 / 3.0) *
        std::cbrt(static_cast<double>(e5) * e6 * e7));
}

bool FiberContext::in_region_V(double B) const {
  if (B <= std::exp(1.0)) throw std::invalid_argument("in_region_V: B too small");
  double ll = std::pow(std::log(std::log(B)), 2.0 / 3.0);
  return Y * ll >= static_cast<double>(q8) * Z1 * Z1 &&
         Y * ll >= static_cast<double>(q9) * Z1 * Z1 && Z1 >= std::pow(3.0, -1.0 / 3.0) &&
         q8 >= q10 && q9 >= q10;
}

long long fiber_count(const FiberContext& ctx, long long B) {
  Prefix p{ctx.eta[0], ctx.eta[1], ctx.eta[2], ctx.eta[3], ctx.eta[4], ctx.eta[5],
           ctx.eta[6]};
  return fiber_scan(p, B, NoVisit{});
}

double fiber_main_term(const FiberContext& ctx, long long B,
                       const density::QuadratureConfig& cfg) {
  double e234 = static_cast<double>(ctx.eta[1]) * ctx.eta[2] * ctx.eta[3];
  double e567 = static_cast<double>(ctx.eta[4]) * ctx.eta[5] * ctx.eta[6];
  double arg = static_cast<double>(ctx.eta[0]) / ctx.Z1;
  double g2v = arg >= 1.4422495703074083 ? 0.0 : density::g2(arg, cfg);
  if (g2v == 0.0) return 0.0;
  Rat th = density::theta1(static_cast<std::uint64_t>(ctx.eta[0]),
                           static_cast<std::uint64_t>(ctx.eta[1] * ctx.eta[2] * ctx.eta[3])) *
           density::theta2(ctx.eta[1], ctx.eta[2], ctx.eta[3], ctx.eta[4], ctx.eta[5],
                           ctx.eta[6]);
  return std::pow(static_cast<double>(B), 2.0 / 3.0) /
         (std::cbrt(e234) * std::pow(e567, 2.0 / 3.0)) * g2v * to_double(th);
}

DegenerateReport degenerate_count(long long B, int threads) {
  DegenerateReport report;
  report.count = parallel_prefix_sum(B, threads, [&](const Prefix& p) {
    i128 q8 = (i128)p.e2 * p.e5 * p.e5;
    i128 q9 = (i128)p.e3 * p.e6 * p.e6;
    i128 q10 = (i128)p.e4 * p.e7 * p.e7;
    if (q8 != q10 && q9 != q10) return 0LL;
    return fiber_scan(p, B, NoVisit{});
  });
  double lg = std::log(static_cast<double>(B));
  report.ratio = B > 1 ? static_cast<double>(report.count) / (static_cast<double>(B) * lg * lg * lg)
                       : 0.0;
  return report;
}

std::vector<AsymptoticRow> asymptotic_report(const std::vector<long long>& Bs, double c_VH,
                                             int threads) {
  std::vector<AsymptoticRow> rows;
  for (long long B : Bs) {
    AsymptoticRow row;
    row.B = B;
    row.N = torsor_count(B, threads);
    double lg = std::log(static_cast<double>(B));
    double denom = static_cast<double>(B) * std::pow(lg, 6.0);
    row.normalized = denom > 0 ? static_cast<double>(row.N) / denom : 0.0;
    row.ratio_to_c = c_VH != 0 ? row.normalized / c_VH : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace d4::torsor
