#pragma once

// The two point-counting pipelines on the split D4 cubic surface
// x0 (x1+x2+x3)^2 = x1 x2 x3 and the exact bijection between them:
// brute-force enumeration of rational points of height <= B, enumeration of
// the universal-torsor set T(B), the monomial map T(B) -> U(Q), the
// squarefree renormalization map, fiber counts, and degenerate-locus
// statistics.

#include <array>
#include <cstdint>
#include <vector>

#include "d4/density.hpp"

namespace d4::torsor {

// Canonical primitive representative: gcd of the four coordinates is 1 and
// the first nonzero coordinate is positive.
struct SurfacePoint {
  long long x0 = 0, x1 = 0, x2 = 0, x3 = 0;
  auto operator<=>(const SurfacePoint&) const = default;
};

// Canonicalize a projective quadruple (divide by the gcd, normalize the
// sign).  Throws std::invalid_argument on the zero quadruple.
SurfacePoint canonicalize(__int128 x0, __int128 x1, __int128 x2, __int128 x3);

// x0 (x1+x2+x3)^2 - x1 x2 x3 == 0, checked in 128-bit arithmetic.
bool on_surface(const SurfacePoint& p);
// x1 x2 x3 != 0 and x1+x2+x3 != 0 (off the six lines).
bool in_U(const SurfacePoint& p);
long long height(const SurfacePoint& p);

// e[1..7] positive, e[8..10] nonzero; e[0] is unused padding so that indices
// match the usual eta subscripts.
struct TorsorPoint {
  std::array<long long, 11> e{};
  auto operator<=>(const TorsorPoint&) const = default;
};

// Checks the torsor equation e2 e5^2 e8 + e3 e6^2 e9 + e4 e7^2 e10 =
// e1 e2 e3 e4 e5 e6 e7, the six coprimality conditions and the four height
// conditions at level B.
bool torsor_invariants(const TorsorPoint& t, long long B);

struct BruteForceResult {
  long long count = 0;
  std::vector<SurfacePoint> points;  // sorted, only filled when collected
};

// Exhaustive enumeration of the canonical points of U(Q) (or of the whole
// surface when include_lines is set) with height <= B.  Iterates the
// (x1, x2, x3) triple and reconstructs x0 projectively, deduplicating in a
// set.  Throws std::invalid_argument for B < 1 or B beyond the exhaustive cap
// of 500.
BruteForceResult brute_force_count(long long B, bool include_lines = false,
                                   bool collect_points = false, int threads = 1);

// #T(B): enumerates e1..e7 over e1^3 e2^2 e3^2 e4^2 e5 e6 e7 <= 3B with the
// coprimality filters applied at the earliest possible loop level, then
// completes each prefix by the fiber enumeration (e8 free, e9 in its residue
// class mod e4 e7^2, e10 pinned by the torsor equation).  Deterministic and
// independent of the thread count.
long long torsor_count(long long B, int threads = 1);

// The full point stream, sorted lexicographically on (e1, ..., e10).
std::vector<TorsorPoint> torsor_points(long long B);

// (e8 e9 e10 : e1^2 e2^2 e3 e4 e5^2 e8 : e1^2 e2 e3^2 e4 e6^2 e9 :
//  e1^2 e2 e3 e4^2 e7^2 e10), canonicalized.  Throws std::logic_error if the
// image fails the surface equation or is not already primitive: either would
// signal a wrong map or violated coprimality conditions.
SurfacePoint torsor_to_point(const TorsorPoint& t);

struct BijectionReport {
  long long brute = 0;
  long long torsor = 0;
  bool injective = false;
  bool image_equals_brute = false;
  std::vector<SurfacePoint> missing;  // brute-force points with no preimage
  std::vector<SurfacePoint> extra;    // torsor images outside the brute set
  bool ok() const { return injective && image_equals_brute && brute == torsor; }
};

// Verifies that torsor_to_point is injective on T(B) and that its image is
// exactly the brute-force point set.
BijectionReport bijection_check(long long B, int threads = 1);

// For i in {2,3,4} write e_i = e_i' e_i''^2 with e_i' squarefree; then
// e5' = e5 e2'', e6' = e6 e3'', e7' = e7 e4'', e1' = e1 e2'' e3'' e4''.
// Preserves the monomials e1^3 e2^2 e3^2 e4^2 e5 e6 e7, e2 e5^2, e3 e6^2 and
// e4 e7^2; idempotent.  Input and output are (e1, ..., e7).
std::array<long long, 7> squarefree_renormalize(const std::array<long long, 7>& eta);

// Fixed prefix (e1, ..., e7) together with the derived fiber data.
struct FiberContext {
  std::array<long long, 7> eta{};  // e1..e7
  long long q8 = 0, q9 = 0, q10 = 0;
  double Y = 0;   // B / (e2 e3 e4)
  double Z1 = 0;  // B^{1/3} / ((e2 e3 e4)^{2/3} (e5 e6 e7)^{1/3})
  // Throws std::invalid_argument if a coordinate is < 1 or one of the
  // coprimality conditions among e1..e7 fails.
  FiberContext(const std::array<long long, 7>& eta, long long B);
  // Y loglog(B)^{2/3} >= q8 Z1^2 and >= q9 Z1^2, Z1 >= 3^{-1/3},
  // q8 >= q10, q9 >= q10.
  bool in_region_V(double B) const;
};

// Number of (e8, e9, e10) completing the prefix to a member of T(B).  The
// sum over all admissible prefixes equals torsor_count(B) exactly.
long long fiber_count(const FiberContext& ctx, long long B);

// B^{2/3} / ((e2 e3 e4)^{1/3} (e5 e6 e7)^{2/3}) g2(e1/Z1) theta1 theta2.
double fiber_main_term(const FiberContext& ctx, long long B,
                       const density::QuadratureConfig& cfg = {});

struct DegenerateReport {
  long long count = 0;  // members of T(B) with q8 = q10 or q9 = q10
  double ratio = 0;     // count / (B log(B)^3)
};
DegenerateReport degenerate_count(long long B, int threads = 1);

struct AsymptoticRow {
  long long B = 0;
  long long N = 0;
  double normalized = 0;   // N / (B log(B)^6)
  double ratio_to_c = 0;   // normalized / c_VH
};
std::vector<AsymptoticRow> asymptotic_report(const std::vector<long long>& Bs,
                                             double c_VH, int threads = 1);

}  // namespace d4::torsor
