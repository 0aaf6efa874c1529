#include "d4/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace d4 {

double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rat make_rat(long long num, long long den) { return Rat(Int(num), Int(den)); }

namespace arith {

namespace {

std::vector<std::uint32_t> sieve_primes(std::uint64_t bound) {
  std::vector<bool> composite(bound + 1, false);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

std::vector<std::uint32_t> load_or_build_primes() {
  const char* dir = std::getenv("MANIN_D4_CACHE_DIR");
  std::filesystem::path cache;
  if (dir && *dir) {
    cache = std::filesystem::path(dir) / "primes_1e6.bin";
    std::ifstream in(cache, std::ios::binary);
    if (in) {
      std::uint64_t count = 0;
      in.read(reinterpret_cast<char*>(&count), sizeof(count));
      if (in && count > 0 && count < kSieveBound) {
        std::vector<std::uint32_t> primes(count);
        in.read(reinterpret_cast<char*>(primes.data()),
                static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
        if (in && primes.back() < kSieveBound) return primes;
      }
    }
  }
  auto primes = sieve_primes(kSieveBound);
  if (!cache.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache.parent_path(), ec);
    std::ofstream out(cache, std::ios::binary);
    if (out) {
      std::uint64_t count = primes.size();
      out.write(reinterpret_cast<const char*>(&count), sizeof(count));
      out.write(reinterpret_cast<const char*>(primes.data()),
                static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
    }
  }
  return primes;
}

using u128 = unsigned __int128;

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((u128)a * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool miller_rabin(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Deterministic witness set for 64-bit integers.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i < r - 1; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

std::uint64_t pollard_rho(std::uint64_t n) {
  if ((n & 1) == 0) return 2;
  std::uint64_t c = 1;
  while (true) {
    std::uint64_t x = 2, y = 2, d = 1;
    auto f = [&](std::uint64_t v) { return (mulmod_u64(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      std::uint64_t diff = x > y ? x - y : y - x;
      d = std::gcd(diff, n);
    }
    if (d != n) return d;
    ++c;
  }
}

void factor_large(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (miller_rabin(n)) {
    out.push_back(n);
    return;
  }
  std::uint64_t d = pollard_rho(n);
  factor_large(d, out);
  factor_large(n / d, out);
}

}  // namespace

const std::vector<std::uint32_t>& small_primes() {
  static std::vector<std::uint32_t> primes;
  static std::once_flag flag;
  std::call_once(flag, [] { primes = load_or_build_primes(); });
  return primes;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  const auto& cached = small_primes();
  std::vector<std::uint64_t> primes;
  for (std::uint32_t p : cached) {
    if (p > limit) return primes;
    primes.push_back(p);
  }
  // Segmented sieve above the cached bound.
  std::uint64_t lo = kSieveBound + 1;
  constexpr std::uint64_t kSegment = 1 << 20;
  std::vector<bool> composite;
  while (lo <= limit) {
    std::uint64_t hi = std::min(limit, lo + kSegment - 1);
    composite.assign(hi - lo + 1, false);
    for (std::uint32_t p : cached) {
      std::uint64_t p64 = p;
      if (p64 * p64 > hi) break;
      std::uint64_t start = std::max(p64 * p64, (lo + p64 - 1) / p64 * p64);
      for (std::uint64_t j = start; j <= hi; j += p64) composite[j - lo] = true;
    }
    for (std::uint64_t i = lo; i <= hi; ++i) {
      if (!composite[i - lo]) primes.push_back(i);
    }
    lo = hi + 1;
  }
  return primes;
}

Factorization factor(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factor: n must be positive");
  Factorization f;
  f.value = n;
  std::uint64_t m = n;
  for (std::uint32_t p : small_primes()) {
    std::uint64_t p64 = p;
    if (p64 * p64 > m) break;
    if (m % p64 != 0) continue;
    int e = 0;
    while (m % p64 == 0) {
      m /= p64;
      ++e;
    }
    f.factors.emplace_back(p64, e);
  }
  if (m > 1) {
    if (m / kSieveBound < kSieveBound && miller_rabin(m)) {
      f.factors.emplace_back(m, 1);
    } else {
      std::vector<std::uint64_t> large;
      factor_large(m, large);
      std::sort(large.begin(), large.end());
      for (std::size_t i = 0; i < large.size();) {
        std::size_t j = i;
        while (j < large.size() && large[j] == large[i]) ++j;
        f.factors.emplace_back(large[i], static_cast<int>(j - i));
        i = j;
      }
    }
  }
  return f;
}

bool is_prime(std::uint64_t n) { return miller_rabin(n); }

std::uint64_t rad(std::uint64_t n) {
  std::uint64_t r = 1;
  for (const auto& [p, e] : factor(n).factors) r *= p;
  return r;
}

std::uint64_t sq(std::uint64_t n) {
  std::uint64_t s = 1;
  for (const auto& [p, e] : factor(n).factors) {
    for (int i = 0; i < e / 2; ++i) s *= p;
  }
  return s;
}

int mu(std::uint64_t n) {
  int sign = 1;
  for (const auto& [p, e] : factor(n).factors) {
    if (e > 1) return 0;
    sign = -sign;
  }
  return sign;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t result = n;
  for (const auto& [p, e] : factor(n).factors) result = result / p * (p - 1);
  return result;
}

std::uint64_t tau(std::uint64_t n) {
  std::uint64_t t = 1;
  for (const auto& [p, e] : factor(n).factors) t *= static_cast<std::uint64_t>(e) + 1;
  return t;
}

int omega_count(std::uint64_t n) { return static_cast<int>(factor(n).factors.size()); }

double sigma_neg(double lambda, std::uint64_t n) {
  if (lambda <= 0) throw std::invalid_argument("sigma_neg: lambda must be positive");
  // Multiplicative: per-prime geometric pieces.
  double result = 1.0;
  for (const auto& [p, e] : factor(n).factors) {
    double local = 1.0;
    double pk = 1.0;
    for (int i = 1; i <= e; ++i) {
      pk *= static_cast<double>(p);
      local += std::pow(pk, -lambda);
    }
    result *= local;
  }
  return result;
}

Rat phi_star(std::uint64_t n) {
  Rat r(1);
  for (const auto& [p, e] : factor(n).factors) r *= Rat(Int(p) - 1, Int(p));
  return r;
}

Rat phi_curlyvee(std::uint64_t n) {
  Rat r(1);
  for (const auto& [p, e] : factor(n).factors) {
    // (1 - 1/p)^{-2} (1 + 2/p)^{-1} = p^3 / ((p-1)^2 (p+2))
    Int pp(p);
    r *= Rat(pp * pp * pp, (pp - 1) * (pp - 1) * (pp + 2));
  }
  return r;
}

Rat psi(std::uint64_t a, std::uint64_t n) {
  Rat r(1);
  for (const auto& [p, e] : factor(n).factors) {
    if (a % p == 0) continue;
    if (p == 2) return Rat(0);  // factor 1 - 1/(2-1) = 0
    Int pp(p);
    // (1 - 1/p)^2 (1 - 1/(p-1)) = (p-1)(p-2)/p^2
    r *= Rat((pp - 1) * (pp - 2), pp * pp);
  }
  return r;
}

Rat psi_ab(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  if (std::gcd(n, b) > 1) return Rat(0);
  return psi(a, n);
}

long long ramanujan_c(std::uint64_t q, long long n) {
  std::uint64_t an = n >= 0 ? static_cast<std::uint64_t>(n) : static_cast<std::uint64_t>(-n);
  std::uint64_t g = an == 0 ? q : std::gcd(q, an);
  long long total = 0;
  for (std::uint64_t d = 1; d * d <= g; ++d) {
    if (g % d != 0) continue;
    total += mu(q / d) * static_cast<long long>(d);
    std::uint64_t e = g / d;
    if (e != d) total += mu(q / e) * static_cast<long long>(e);
  }
  return total;
}

std::complex<double> ramanujan_c_direct(std::uint64_t q, long long n) {
  std::complex<double> sum(0.0, 0.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::uint64_t alpha = 1; alpha <= q; ++alpha) {
    if (std::gcd(alpha, q) != 1) continue;
    long long r = mod_pos(static_cast<long long>(alpha % q) * (n % static_cast<long long>(q)),
                          static_cast<long long>(q));
    double angle = two_pi * static_cast<double>(r) / static_cast<double>(q);
    sum += std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return sum;
}

long long mod_inverse(long long a, long long q) {
  if (q < 1) throw std::invalid_argument("mod_inverse: modulus must be positive");
  long long r0 = q, r1 = mod_pos(a, q);
  long long t0 = 0, t1 = 1;
  while (r1 != 0) {
    long long k = r0 / r1;
    r0 -= k * r1;
    std::swap(r0, r1);
    t0 -= k * t1;
    std::swap(t0, t1);
  }
  if (r0 != 1) throw std::invalid_argument("mod_inverse: argument not invertible");
  long long inv = mod_pos(t0, q);
  return inv == 0 ? q : inv;  // q = 1 case maps to representative 1
}

long long gcd_ll(long long a, long long b) {
  return static_cast<long long>(std::gcd(a < 0 ? -static_cast<unsigned long long>(a) : a,
                                         b < 0 ? -static_cast<unsigned long long>(b) : b));
}

long long mod_pos(long long x, long long q) {
  long long r = x % q;
  return r < 0 ? r + q : r;
}

long long mod_pos128(__int128 x, long long q) {
  __int128 r = x % q;
  if (r < 0) r += q;
  return static_cast<long long>(r);
}

}  // namespace arith
}  // namespace d4
