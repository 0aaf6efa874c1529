#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "d4/rng.hpp"
#include "d4/torsor.hpp"
#include "doctest.h"

using namespace d4;
using namespace d4::torsor;

TEST_CASE("canonicalize and point predicates") {
  SurfacePoint p = canonicalize(-2, 2, 2, -2);
  CHECK(p == SurfacePoint{1, -1, -1, 1});
  CHECK(on_surface(p));  // 1 * (-1)^2 = (-1)(-1)(1)
  CHECK(in_U(p));
  CHECK(height(p) == 1);
  CHECK(!in_U(SurfacePoint{0, 0, 1, -1}));
  CHECK_THROWS_AS(canonicalize(0, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("both pipelines reproduce the pinned counts") {
  const std::pair<long long, long long> expected[] = {
      {1, 3}, {5, 33}, {10, 127}, {25, 619}, {50, 1714}, {100, 5209}};
  for (auto [B, n] : expected) {
    CHECK(brute_force_count(B).count == n);
    CHECK(torsor_count(B) == n);
  }
}

TEST_CASE("brute force rejects out-of-range heights") {
  CHECK_THROWS_AS(brute_force_count(0), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_count(501), std::invalid_argument);
}

TEST_CASE("collected points satisfy all invariants") {
  auto res = brute_force_count(25, false, true);
  CHECK(static_cast<long long>(res.points.size()) == res.count);
  for (const auto& p : res.points) {
    CHECK(on_surface(p));
    CHECK(in_U(p));
    CHECK(height(p) <= 25);
    CHECK(canonicalize(p.x0, p.x1, p.x2, p.x3) == p);
  }
  // With the lines included the count can only grow, and the extra points are
  // exactly the non-U ones.
  auto lines = brute_force_count(25, true, true);
  CHECK(lines.count > res.count);
  long long off_u = 0;
  for (const auto& p : lines.points) {
    CHECK(on_surface(p));
    if (!in_U(p)) ++off_u;
  }
  CHECK(lines.count == res.count + off_u);
}

TEST_CASE("torsor points satisfy the invariants and map to the brute set") {
  auto pts = torsor_points(25);
  CHECK(static_cast<long long>(pts.size()) == torsor_count(25));
  for (const auto& t : pts) {
    CHECK(torsor_invariants(t, 25));
    // Tightening the height budget must eventually reject the point.
    CHECK(!torsor_invariants(t, 0));
    auto bad = t;
    bad.e[10] = 0;
    CHECK(!torsor_invariants(bad, 25));
  }
  auto rep = bijection_check(50);
  CHECK(rep.ok());
  CHECK(rep.brute == 1714);
  CHECK(rep.missing.empty());
  CHECK(rep.extra.empty());
}

TEST_CASE("torsor_to_point on a hand-checked tuple") {
  TorsorPoint t;
  t.e = {0, 1, 1, 1, 1, 1, 1, 1, 1, 1, -1};  // e8 + e9 + e10 = 1 = e1...e7
  CHECK(torsor_invariants(t, 1));
  CHECK(torsor_to_point(t) == SurfacePoint{1, -1, -1, 1});
  // A non-primitive image signals violated coprimality and must throw.
  TorsorPoint bad;
  bad.e = {0, 1, 2, 1, 1, 1, 1, 1, 2, 2, -2};  // shared factor 2 in the image
  CHECK_THROWS_AS(torsor_to_point(bad), std::logic_error);
}

TEST_CASE("squarefree renormalization") {
  std::array<long long, 7> a = {1, 4, 1, 1, 1, 1, 1};
  CHECK(squarefree_renormalize(a) == std::array<long long, 7>{2, 1, 1, 1, 2, 1, 1});
  std::array<long long, 7> b = {1, 12, 9, 1, 1, 1, 1};
  CHECK(squarefree_renormalize(b) == std::array<long long, 7>{6, 3, 1, 1, 2, 3, 1});

  std::uint64_t seed = 17;
  for (int i = 0; i < 500; ++i) {
    std::array<long long, 7> e;
    for (int j = 0; j < 7; ++j) e[j] = rng::uniform_int(seed, 2, 7 * i + j, 1, 30);
    auto r = squarefree_renormalize(e);
    auto mono = [](const std::array<long long, 7>& v) {
      auto cube = [](long long x) { return x * x * x; };
      auto sq = [](long long x) { return x * x; };
      return std::array<long long, 4>{
          cube(v[0]) * sq(v[1]) * sq(v[2]) * sq(v[3]) * v[4] * v[5] * v[6],
          v[1] * sq(v[4]), v[2] * sq(v[5]), v[3] * sq(v[6])};
    };
    CHECK(mono(r) == mono(e));
    CHECK(squarefree_renormalize(r) == r);  // idempotent
    for (int j = 1; j <= 3; ++j) CHECK(arith::sq(r[j]) == 1);
  }
}

TEST_CASE("FiberContext validates its prefix") {
  CHECK_THROWS_AS(FiberContext({0, 1, 1, 1, 1, 1, 1}, 100), std::invalid_argument);
  CHECK_THROWS_AS(FiberContext({2, 1, 1, 1, 2, 1, 1}, 100),
                  std::invalid_argument);  // gcd(e1, e5 e6 e7) = 2
  CHECK_THROWS_AS(FiberContext({1, 2, 1, 1, 1, 2, 1}, 100),
                  std::invalid_argument);  // gcd(e2 e5, e3 e4 e6 e7) = 2
  CHECK_THROWS_AS(FiberContext({1, 1, 3, 1, 1, 1, 3}, 100),
                  std::invalid_argument);  // gcd(e3 e6, e4 e7) = 3
  FiberContext ones({1, 1, 1, 1, 1, 1, 1}, 100);
  CHECK(ones.q8 == 1);
  CHECK(ones.q9 == 1);
  CHECK(ones.q10 == 1);
  CHECK(ones.Y == doctest::Approx(100.0));
  CHECK(ones.Z1 == doctest::Approx(std::cbrt(100.0)));
  CHECK(ones.in_region_V(100.0));
  CHECK_THROWS_AS(ones.in_region_V(2.0), std::invalid_argument);
  // q10 > q8 excludes the prefix from the region.
  FiberContext skew({1, 1, 1, 1, 1, 1, 2}, 100);
  CHECK(!skew.in_region_V(100.0));
}

TEST_CASE("fiber counts partition the torsor count") {
  const long long B = 100;
  long long total = 0;
  for (long long e1 = 1; e1 * e1 * e1 <= 3 * B; ++e1)
    for (long long e2 = 1; e1 * e1 * e1 * e2 * e2 <= 3 * B; ++e2)
      for (long long e3 = 1; e1 * e1 * e1 * e2 * e2 * e3 * e3 <= 3 * B; ++e3)
        for (long long e4 = 1; e1 * e1 * e1 * e2 * e2 * e3 * e3 * e4 * e4 <= 3 * B;
             ++e4) {
          long long base = e1 * e1 * e1 * e2 * e2 * e3 * e3 * e4 * e4;
          for (long long e5 = 1; base * e5 <= 3 * B; ++e5)
            for (long long e6 = 1; base * e5 * e6 <= 3 * B; ++e6)
              for (long long e7 = 1; base * e5 * e6 * e7 <= 3 * B; ++e7) {
                if (std::gcd(e1, e5 * e6 * e7) > 1) continue;
                if (std::gcd(e2 * e5, e3 * e4 * e6 * e7) > 1) continue;
                if (std::gcd(e3 * e6, e4 * e7) > 1) continue;
                total += fiber_count(FiberContext({e1, e2, e3, e4, e5, e6, e7}, B), B);
              }
        }
  CHECK(total == torsor_count(B));
}

TEST_CASE("fiber main term is finite and positive on the all-ones prefix") {
  const long long B = 1000000;
  FiberContext ctx({1, 1, 1, 1, 1, 1, 1}, B);
  double m = fiber_main_term(ctx, B);
  CHECK(std::isfinite(m));
  CHECK(m > 0);
  // Outside the support of g2 the main term vanishes: e1/Z1 >= 3^{1/3}.
  FiberContext big({100, 1, 1, 1, 1, 1, 1}, B);
  CHECK(fiber_main_term(big, B) == 0.0);
}

TEST_CASE("degenerate locus statistics") {
  auto one = degenerate_count(1);
  CHECK(one.count == 3);  // every height-1 torsor point has q8 = q9 = q10 = 1
  CHECK(one.ratio == 0.0);
  auto d100 = degenerate_count(100);
  CHECK(d100.count <= torsor_count(100));
  CHECK(d100.count >= one.count);
  CHECK(d100.ratio > 0);
}

TEST_CASE("counts are deterministic across thread counts") {
  CHECK(torsor_count(200, 1) == torsor_count(200, 3));
  CHECK(brute_force_count(100, false, false, 1).count ==
        brute_force_count(100, false, false, 4).count);
  auto a = degenerate_count(200, 1);
  auto b = degenerate_count(200, 4);
  CHECK(a.count == b.count);
}

TEST_CASE("export golden files at B = 10") {
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string points = "x0,x1,x2,x3\n";
  for (const auto& p : brute_force_count(10, false, true).points) {
    points += std::to_string(p.x0) + "," + std::to_string(p.x1) + "," +
              std::to_string(p.x2) + "," + std::to_string(p.x3) + "\n";
  }
  CHECK(points == slurp(std::string(D4_FIXTURE_DIR) + "/points_B10.csv"));

  std::string etas = "eta1,eta2,eta3,eta4,eta5,eta6,eta7,eta8,eta9,eta10\n";
  for (const auto& t : torsor_points(10)) {
    for (int i = 1; i <= 10; ++i) {
      etas += std::to_string(t.e[i]);
      etas += (i < 10) ? "," : "\n";
    }
  }
  CHECK(etas == slurp(std::string(D4_FIXTURE_DIR) + "/torsor_B10.csv"));
}

TEST_CASE("asymptotic report rows are self-consistent") {
  double c = 1.9316e-6;
  auto rows = asymptotic_report({10, 100, 1000}, c);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    double l = std::log(static_cast<double>(r.B));
    CHECK(r.normalized ==
          doctest::Approx(static_cast<double>(r.N) / (r.B * std::pow(l, 6))));
    CHECK(r.ratio_to_c == doctest::Approx(r.normalized / c));
  }
  CHECK(rows[2].N == 135403);
}
