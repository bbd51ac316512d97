#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "kfree/quad.hpp"

namespace kfree {

// Piecewise-linear growth exponent of I_k(p): p/(k+1) up to the critical
// point p = 1+1/k, then p-1. Continuous, value 1/k at the knee.
double theoretical_e(int k, double p);

// One refined moment per N; budget misses come back with converged = false
// instead of aborting the sweep.
std::vector<MomentResult> moment_sweep(int k, double p,
                                       std::span<const std::uint64_t> ns,
                                       RefineOptions opt = {});

// Stock sweep grid: 2^14..2^22 for k = 2, 2^16..2^24 for k >= 3.
std::vector<std::uint64_t> default_sweep_ns(int k);

// Ordinary least squares of log I against log N.
struct ExponentFit {
  int k = 0;
  double p = 0;
  std::vector<std::pair<double, double>> points;  // (log N, log I)
  std::vector<double> residuals;
  double slope = 0;
  double intercept = 0;
  double std_error = 0;
  double theoretical = 0;  // theoretical_e(k, p); NaN when k is unknown
};

ExponentFit fit_exponent(std::span<const MomentResult> rows);

// Fitted slope per p over a shared N sweep, with the theoretical overlay.
struct ECurvePoint {
  double p = 0;
  double slope = 0;
  double std_error = 0;
  double theoretical = 0;
  bool all_converged = true;
};

struct ECurve {
  int k = 0;
  std::vector<std::uint64_t> ns;
  std::vector<ECurvePoint> points;                 // one per p
  std::vector<std::vector<MomentResult>> moments;  // [p index][N index]
};

ECurve e_curve(int k, std::span<const double> ps,
               std::span<const std::uint64_t> ns, RefineOptions opt = {});

// I(1+1/k) against the proven bracket N^(1/k) log N .. N^(1/k) log^2 N.
struct CriticalRow {
  std::uint64_t n = 0;
  MomentResult moment;
  double lower_ratio = 0;  // I / (N^(1/k) ln N)
  double upper_ratio = 0;  // I / (N^(1/k) ln^2 N)
};

std::vector<CriticalRow> critical_ratio(int k,
                                        std::span<const std::uint64_t> ns,
                                        RefineOptions opt = {});

// Compute the bracket ratios for an already-measured moment at p = 1+1/k.
CriticalRow critical_row_from(const MomentResult& moment);

// One rational point a/r^k of the major-arc scan.
struct MajorArcPoint {
  int k = 0;
  std::uint64_t n = 0;
  std::uint64_t r = 0;  // squarefree
  std::uint64_t a = 0;  // 1 <= a <= r^k, gcd(a, r^k) = 1
  std::complex<double> measured;  // S_k(a/r^k)
  double min_abs = 0;             // min |S_k(a/r^k + beta)| over the betas
  double predicted_main = 0;      // C(r) N / r^k
  double floor_bound = 0;         // N / (10 r^k)
  double error_constant = 0;      // |S - C(r) N/r^k| / (r^k N^(1/k))
  bool floor_ok = false;          // floor holds at every beta
};

struct MajorArcScan {
  int k = 0;
  std::uint64_t n = 0;
  std::uint64_t r_max = 0;
  std::vector<double> betas;
  std::vector<MajorArcPoint> points;
  double floor_fraction = 0;       // fraction of points with floor_ok
  double max_error_constant = 0;
  double min_gap_scaled = 0;       // min pairwise gap, in units of 1/(50N)
  bool separation_ok = false;      // every gap > 1/(50N), exact rational check
  bool pass = false;               // floor_fraction == 1 and separation_ok
};

// Enumerates squarefree r <= r_max with all admissible a and evaluates S_k
// directly at a/r^k + beta for beta in {0, +-1/(200N)} (or the given list).
// Requires r_max^(2k) <= 50 N so distinct fractions stay separated by more
// than 1/(50N).
MajorArcScan major_arc_scan(int k, std::uint64_t n, std::uint64_t r_max,
                            std::span<const double> betas = {});

// Partial sums of mu^2(r) phi(r)/r against the linear lower bound 0.2 R.
struct TotientSumRow {
  std::uint64_t r_limit = 0;
  double sum = 0;
  double ratio = 0;  // sum / R
  bool pass = false; // ratio >= 0.2
};

std::vector<TotientSumRow> totient_sum_check(
    std::span<const std::uint64_t> rs);

}  // namespace kfree
