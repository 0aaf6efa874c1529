#pragma once

// Exact integer arithmetic and the multiplicative functions used by the
// counting and density modules: factorization, rad/sq, mu/phi/tau/omega,
// sigma_{-lambda}, phi_star, phi_curlyvee, psi, Ramanujan sums and modular
// inverses.  Everything here is pure and safe to call concurrently once the
// prime sieve has been initialized (it is built lazily under std::once_flag).

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace d4 {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;

double to_double(const Rat& r);
Rat make_rat(long long num, long long den = 1);

namespace arith {

// Primes below this bound are sieved once and cached.
constexpr std::uint64_t kSieveBound = 1'000'000;

// Sorted primes <= kSieveBound.  Cached; honors MANIN_D4_CACHE_DIR if set.
const std::vector<std::uint32_t>& small_primes();

// Primes <= limit (limit may exceed kSieveBound; segmented extension).
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

struct Factorization {
  std::uint64_t value = 1;
  // (prime, exponent), primes strictly increasing, exponents >= 1.
  std::vector<std::pair<std::uint64_t, int>> factors;
};

// Trial division by cached primes, then Miller-Rabin + Pollard rho for any
// remaining cofactor.  Throws std::invalid_argument for n = 0.
Factorization factor(std::uint64_t n);

bool is_prime(std::uint64_t n);

std::uint64_t rad(std::uint64_t n);
// Largest s with s^2 | n and n/s^2 squarefree.
std::uint64_t sq(std::uint64_t n);

int mu(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);
std::uint64_t tau(std::uint64_t n);
int omega_count(std::uint64_t n);
// sigma_{-lambda}(n) = sum_{k | n} k^{-lambda}, lambda > 0.
double sigma_neg(double lambda, std::uint64_t n);

// prod_{p | n} (1 - 1/p); exact, phi_star(1) = 1.
Rat phi_star(std::uint64_t n);
// prod_{p | n} (1 - 1/p)^{-2} (1 + 2/p)^{-1}.
Rat phi_curlyvee(std::uint64_t n);
// prod_{p | n, p !| a} (1 - 1/p)^2 (1 - 1/(p-1)).  Vanishes when 2 | n, 2 !| a.
Rat psi(std::uint64_t a, std::uint64_t n);
// psi(a, n) gated to zero when gcd(n, b) > 1.
Rat psi_ab(std::uint64_t a, std::uint64_t b, std::uint64_t n);

// c_q(n) via the divisor formula sum_{d | gcd(q,n)} mu(q/d) d,
// with the convention gcd(q, 0) = q (so c_q(0) = phi(q)).
long long ramanujan_c(std::uint64_t q, long long n);
// c_q(n) as the literal exponential sum over residues coprime to q.
std::complex<double> ramanujan_c_direct(std::uint64_t q, long long n);

// Inverse of a modulo q in [1, q]; throws if gcd(a, q) != 1.
long long mod_inverse(long long a, long long q);

long long gcd_ll(long long a, long long b);
// |x| mod q in [0, q) for possibly negative x.
long long mod_pos(long long x, long long q);
long long mod_pos128(__int128 x, long long q);

}  // namespace arith
}  // namespace d4
