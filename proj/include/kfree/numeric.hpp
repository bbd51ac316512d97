#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace kfree {

// Neumaier-compensated accumulator. Keeps sums of ~1e8 terms near 1 ulp.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

// Distance to the nearest integer.
inline double dist_to_int(double x) {
  double d = x - std::nearbyint(x);
  return std::abs(d);
}

// Signed offset from the nearest integer, in [-1/2, 1/2].
inline double signed_dist_to_int(double x) { return x - std::nearbyint(x); }

// x reduced mod 2 into [0, 2). Exact for |x| < 2^52: floor and the
// subtraction x - 2*floor(x/2) are both exact there.
inline double reduce_mod2(double x) {
  double r = x - 2.0 * std::floor(0.5 * x);
  if (r >= 2.0) r -= 2.0;
  if (r < 0.0) r += 2.0;
  return r;
}

namespace detail {
// sin(pi*r) for r in [0,1], reduced to |arg| <= pi/2.
inline double sin_pi_unit(double r) {
  if (r > 0.5) r = 1.0 - r;  // exact
  return std::sin(std::numbers::pi * r);
}

// parity of an integral double; values >= 2^53 are all even
inline bool odd_int(double q) { return std::fmod(std::fabs(q), 2.0) == 1.0; }
}  // namespace detail

// sin(pi*x) split at the nearest integer: x = q + s with x - q exact, so s
// keeps full relative accuracy however close x sits to an integer. The
// parity of q carries the sign.
inline double sin_pi(double x) {
  double q = std::nearbyint(x);
  double s = x - q;  // exact, in [-1/2, 1/2]
  double v = std::sin(std::numbers::pi * s);
  return detail::odd_int(q) ? -v : v;
}

// cos(pi*x) by the same split; evaluated as sin(pi*(1/2 - |s|)) so the
// argument stays exact near the zeros at half-integers.
inline double cos_pi(double x) {
  double q = std::nearbyint(x);
  double s = std::abs(x - q);
  double v = std::sin(std::numbers::pi * (0.5 - s));
  return detail::odd_int(q) ? -v : v;
}

// n*alpha mod 1 in [0,1), with the product split exactly via FMA so the
// fractional part keeps ~1 ulp accuracy even when n*alpha >> 1.
inline double frac_mul(double n, double alpha) {
  double p = n * alpha;
  double e = std::fma(n, alpha, -p);  // n*alpha = p + e exactly
  double f = p - std::floor(p);
  f += e;
  if (f >= 1.0) f -= 1.0;
  if (f < 0.0) f += 1.0;
  return f;
}

// n*alpha mod 2 in [0,2), same exact-product scheme (for sin(pi*n*alpha)
// where the sign of the half-period matters).
inline double frac_mul_mod2(double n, double alpha) {
  double p = n * alpha;
  double e = std::fma(n, alpha, -p);
  double f = reduce_mod2(p);
  f += e;
  if (f >= 2.0) f -= 2.0;
  if (f < 0.0) f += 2.0;
  return f;
}

// sin(pi * m * t) with the product split exactly via FMA and reduced about
// the nearest integer. Reducing into [0,2) instead would round a small
// negative product against 2 and lose the offset's low bits, which the
// kernel closed forms then amplify by the kernel's value.
inline double sin_pi_prod(double m, double t) {
  double p = m * t;
  double e = std::fma(m, t, -p);  // m*t = p + e exactly
  double q = std::nearbyint(p);
  double s = (p - q) + e;  // p - q exact below 2^53
  double v = std::sin(std::numbers::pi * s);
  return detail::odd_int(q) ? -v : v;
}

// e(x) = exp(2 pi i x) evaluated at x = n*alpha with exact phase reduction.
inline std::complex<double> unit_phase(double n, double alpha) {
  double f = frac_mul(n, alpha);  // [0,1)
  double g = 2.0 * f;             // [0,2), exact
  return {cos_pi(g), sin_pi(g)};
}

// --- deterministic chunked reduction ------------------------------------
//
// Work split into fixed-size chunks (independent of thread count); partial
// results are combined in chunk order, so any thread count gives bit-equal
// sums.

int thread_count();
void set_thread_count(int n);

// fn(chunk_index, begin, end) -> partial value; partials are combined with
// combine(acc, partial) in chunk index order.
void for_each_chunk(std::uint64_t count, std::uint64_t chunk_size,
                    const std::function<double(std::uint64_t, std::uint64_t,
                                               std::uint64_t)>& fn,
                    const std::function<void(std::uint64_t, double)>& sink);

// Chunked compensated sum of fn over [0, count).
double chunked_sum(std::uint64_t count, std::uint64_t chunk_size,
                   const std::function<double(std::uint64_t, std::uint64_t,
                                              std::uint64_t)>& chunk_fn);

// x^(w/8) for integer w in [0,16]; cheaper than std::pow for the p-grids
// used by the moment sweeps (p on a 1/4 grid => |S|^p = (|S|^2)^(w/8)).
inline double pow_eighth(double x, int w) {
  double s1 = std::sqrt(x);
  double s3 = std::sqrt(std::sqrt(s1));  // x^(1/8)
  double r = 1.0;
  double b = s3;
  int e = w;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline std::uint64_t next_pow2(std::uint64_t x) {
  std::uint64_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

// |v|^p computed from m2 = |v|^2. Detects p on the 1/4 grid once at
// construction so hot loops take the eighth-power ladder instead of
// std::pow.
struct AbsPow {
  double q;     // p/2
  int w8 = -1;  // 4p when p is on the 1/4 grid in [0,4]

  explicit AbsPow(double p) : q(0.5 * p) {
    double w = 4.0 * p;
    double r = std::nearbyint(w);
    if (std::abs(w - r) < 1e-12 && r >= 0.0 && r <= 16.0) w8 = int(r);
  }
  double from_sq(double m2) const {
    if (w8 == 8) return m2;
    if (w8 >= 0) return pow_eighth(m2, w8);
    return std::pow(m2, q);
  }
};

}  // namespace kfree
