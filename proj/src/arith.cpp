#include "kfree/arith.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "kfree/numeric.hpp"

namespace kfree {

namespace {
std::uint64_t g_capacity = std::uint64_t(1) << 27;
}  // namespace

// Largest d with d^k <= n.
std::uint64_t kth_root_floor(std::uint64_t n, int k) {
  if (n == 0) return 0;
  auto pow_le = [&](std::uint64_t d) {
    // d^k <= n without overflow
    unsigned __int128 p = 1;
    for (int i = 0; i < k; ++i) {
      p *= d;
      if (p > n) return false;
    }
    return true;
  };
  std::uint64_t d = std::uint64_t(std::floor(std::pow(double(n), 1.0 / k)));
  while (d > 0 && !pow_le(d)) --d;
  while (pow_le(d + 1)) ++d;
  return d;
}

namespace {

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<std::uint64_t> primes;
  if (n < 2) return primes;
  std::vector<bool> composite(n + 1, false);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return primes;
}

}  // namespace

std::uint64_t sieve_capacity() { return g_capacity; }
void set_sieve_capacity(std::uint64_t n) { g_capacity = n; }

MobiusTable sieve_mobius(std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("sieve_mobius: n must be >= 1");
  if (n > g_capacity)
    throw std::length_error("sieve_mobius: n exceeds sieve capacity");

  MobiusTable table;
  table.limit = n;
  table.values.assign(n + 1, 0);
  table.values[1] = 1;

  // Linear sieve: each composite is struck once, via its smallest prime
  // factor, which also yields mu.
  std::vector<std::uint32_t> primes;
  std::vector<bool> composite(n + 1, false);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (!composite[i]) {
      primes.push_back(std::uint32_t(i));
      table.values[i] = -1;
    }
    for (std::uint32_t p : primes) {
      std::uint64_t m = p * i;
      if (m > n) break;
      composite[m] = true;
      if (i % p == 0) {
        table.values[m] = 0;
        break;
      }
      table.values[m] = -table.values[i];
    }
  }
  return table;
}

KFreeTable sieve_kfree(int k, std::uint64_t n) {
  if (k < 2) throw std::invalid_argument("sieve_kfree: k must be >= 2");
  if (n < 1) throw std::invalid_argument("sieve_kfree: n must be >= 1");
  if (n > g_capacity)
    throw std::length_error("sieve_kfree: n exceeds sieve capacity");

  KFreeTable table;
  table.k = k;
  table.limit = n;
  table.bits.assign((n >> 6) + 1, ~std::uint64_t(0));

  for (std::uint64_t p : primes_up_to(kth_root_floor(n, k))) {
    unsigned __int128 pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    for (std::uint64_t m = std::uint64_t(pk); m <= n; m += std::uint64_t(pk))
      table.bits[m >> 6] &= ~(std::uint64_t(1) << (m & 63));
  }
  return table;
}

std::uint64_t count_kfree(int k, std::uint64_t n) {
  KFreeTable table = sieve_kfree(k, n);
  std::uint64_t count = 0;
  for (std::uint64_t n_ = 1; n_ <= n; ++n_) count += table.test(n_);
  return count;
}

int band_value(std::int64_t n, const BandSpec& spec,
               const MobiusTable& mobius) {
  if (n == 0) return 0;  // b(0) = 0 by convention
  if (spec.y < 1 || spec.z <= spec.y)
    throw std::invalid_argument("band_value: need 1 <= y < z");
  std::uint64_t an = std::uint64_t(n < 0 ? -n : n);

  std::uint64_t d_lo = std::uint64_t(std::ceil(spec.y));
  if (double(d_lo) < spec.y) ++d_lo;  // guard ceil rounding
  if (d_lo < 1) d_lo = 1;

  int sum = 0;
  for (std::uint64_t d = d_lo; double(d) < spec.z; ++d) {
    if (d > mobius.limit)
      throw std::invalid_argument("band_value: mobius table too small");
    unsigned __int128 dk = 1;
    bool over = false;
    for (int i = 0; i < spec.k; ++i) {
      dk *= d;
      if (dk > an) {
        over = true;
        break;
      }
    }
    if (over) break;  // larger d cannot divide either
    if (an % std::uint64_t(dk) == 0) sum += mobius.mu(d);
  }
  return sum;
}

std::uint64_t window_band_energy(int k, std::uint64_t n_limit, double window_k,
                                 const BandSpec& spec) {
  if (spec.y < 1 || spec.z <= spec.y)
    throw std::invalid_argument("window_band_energy: need 1 <= y < z");
  if (window_k > double(n_limit))
    throw std::invalid_argument("window_band_energy: K must be <= N");

  // Window is the integers with N-K < n <= N, taken literally.
  double lo_real = double(n_limit) - window_k;
  std::int64_t n_lo = std::int64_t(std::floor(lo_real)) + 1;
  if (n_lo < 1) n_lo = 1;
  if (n_lo > std::int64_t(n_limit)) return 0;

  std::uint64_t lo = std::uint64_t(n_lo);
  std::uint64_t len = n_limit - lo + 1;
  std::vector<std::int16_t> window(len, 0);

  std::uint64_t d_max = kth_root_floor(n_limit, k);
  MobiusTable mobius = sieve_mobius(std::max<std::uint64_t>(d_max, 1));

  std::uint64_t d_lo = std::uint64_t(std::ceil(spec.y));
  if (double(d_lo) < spec.y) ++d_lo;
  for (std::uint64_t d = std::max<std::uint64_t>(d_lo, 1);
       double(d) < spec.z && d <= d_max; ++d) {
    int mu = mobius.mu(d);
    if (mu == 0) continue;
    unsigned __int128 dk128 = 1;
    for (int i = 0; i < k; ++i) dk128 *= d;
    std::uint64_t dk = std::uint64_t(dk128);
    std::uint64_t first = ((lo + dk - 1) / dk) * dk;
    for (std::uint64_t m = first; m <= n_limit; m += dk) {
      int v = window[m - lo] + mu;
      assert(v >= INT16_MIN && v <= INT16_MAX);
      window[m - lo] = std::int16_t(v);
    }
  }

  std::uint64_t energy = 0;
  for (std::int16_t b : window) energy += std::uint64_t(std::int64_t(b) * b);
  return energy;
}

std::uint64_t totient(std::uint64_t r) {
  if (r < 1) throw std::invalid_argument("totient: r must be >= 1");
  std::uint64_t result = r;
  std::uint64_t m = r;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    result -= result / p;
    while (m % p == 0) m /= p;
  }
  if (m > 1) result -= result / m;
  return result;
}

bool is_squarefree(std::uint64_t n) {
  if (n == 0) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return false;
  }
  return true;
}

double compute_cr(std::uint64_t r, int k, double tol) {
  if (k < 2) throw std::invalid_argument("compute_cr: k must be >= 2");
  if (tol <= 0) throw std::invalid_argument("compute_cr: tol must be > 0");
  if (!is_squarefree(r))
    throw std::invalid_argument("compute_cr: r must be squarefree");

  // Truncation from the integral tail bound: sum_{f>F} f^-k < F^(1-k)/(k-1)
  // <= tol once F >= tol^(-1/(k-1)).
  double f_real = std::ceil(std::pow(tol, -1.0 / (k - 1)));
  if (f_real > double(g_capacity))
    throw std::length_error("compute_cr: truncation point exceeds capacity");
  std::uint64_t f_max = std::uint64_t(f_real);

  MobiusTable mobius = sieve_mobius(f_max);
  // mu(f r) = mu(f) mu(r) when (f; r) = 1 and 0 otherwise (r squarefree).
  int mu_r = 1;
  {
    std::uint64_t m = r;
    for (std::uint64_t p = 2; p * p <= m; ++p)
      if (m % p == 0) {
        mu_r = -mu_r;
        m /= p;
      }
    if (m > 1) mu_r = -mu_r;
  }

  Kahan acc;
  for (std::uint64_t f = 1; f <= f_max; ++f) {
    int mu_f = mobius.mu(f);
    if (mu_f == 0) continue;
    if (std::gcd(f, r) != 1) continue;
    acc.add(double(mu_f) * std::pow(double(f), -double(k)));
  }
  double value = double(mu_r) * acc.value();

  double a = std::abs(value);
  if (a < 1.0 / 3.0 - tol || a > 2.0 + tol)
    throw std::logic_error("compute_cr: |C(r)| outside [1/3, 2]");
  return value;
}

}  // namespace kfree
