#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kfree/arith.hpp"

namespace kfree {

// Integer coefficient sequence c[1..N] behind a trigonometric polynomial
// S(alpha) = sum_n c[n] e(alpha n). Immutable once built.
struct CoeffSeq {
  std::uint64_t length = 0;          // N
  int k = 0;                         // 0 when not tied to a mu_k family
  std::vector<std::int16_t> coeffs;  // index 0 unused (always 0)
  std::string label;

  std::int16_t at(std::uint64_t n) const { return coeffs[n]; }
};

CoeffSeq coeffs_from_kfree(const KFreeTable& table);
CoeffSeq coeffs_from_kfree(int k, std::uint64_t n);

// Values of S on the uniform grid j/M, j = 0..M-1, stored as the half
// spectrum [0, M/2]; the rest follows from conjugate symmetry (real
// coefficients).
struct SpectrumGrid {
  std::uint64_t grid_size = 0;    // M
  std::uint64_t source_length = 0;  // N
  int k = 0;
  std::string source_label;
  std::vector<std::complex<double>> half;  // [0 .. M/2]

  std::complex<double> value(std::uint64_t j) const {
    j %= grid_size;
    if (j < half.size()) return half[j];
    return std::conj(half[grid_size - j]);
  }
};

// S(alpha) by direct compensated summation.
std::complex<double> eval_direct(const CoeffSeq& seq, double alpha);

// S on the uniform M-grid via an FFT; requires M >= N+1.
SpectrumGrid eval_grid(const CoeffSeq& seq, std::uint64_t m);

// Default oversampled grid for quadrature: power of two >= 8N.
std::uint64_t default_grid_size(std::uint64_t n);

// (1/M) * sum_j |S(j/M)|^p for each p, streamed in fixed-size chunks with
// compensated accumulation. M must be a power of two >= N+1; large grids
// are processed in cosets so memory stays bounded.
std::vector<double> grid_power_means(const CoeffSeq& seq, std::uint64_t m,
                                     std::span<const double> ps);

// --- smoothing kernels ---------------------------------------------------

// Fejer kernel sum_{|n|<=N} (1-|n|/N) e(alpha n); closed form away from
// integers, direct sum within eps of them.
double fejer(std::uint64_t n, double alpha);

// sum_{|n|<=N+K} min(1, (N+K-|n|)/K) e(alpha n)
//   = sin(pi(2N+K)alpha) sin(pi K alpha) / (K sin^2(pi alpha)).
// Non-integer N or K are replaced by floor+1, at an O(1) cost in the
// associated bounds.
double kernel_nk(double n, double k, double alpha);

// Same weights restricted to n = M (mod d); direct-sum reference.
std::complex<double> kernel_congruence(double n, double k, std::int64_t residue,
                                       std::uint64_t d, double alpha);

// Crossover to the direct sum: the closed forms divide by sin^2(pi alpha).
inline constexpr double kernel_eps = 1e-6;

}  // namespace kfree
