#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kfree {

// Dense table of Mobius values mu(1..limit). Immutable after construction.
struct MobiusTable {
  std::uint64_t limit = 0;
  std::vector<std::int8_t> values;  // values[n] for 1 <= n <= limit

  std::int8_t mu(std::uint64_t n) const { return values[n]; }
};

// Bit table of the k-free indicator mu_k(1..limit).
struct KFreeTable {
  int k = 0;
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> bits;  // packed, bit n for 1 <= n <= limit

  bool test(std::uint64_t n) const {
    return (bits[n >> 6] >> (n & 63)) & 1u;
  }
};

// Divisor band [y, z) for the banded sums b_{y,z}.
struct BandSpec {
  int k;
  double y;
  double z;
};

// Largest N a sieve call may request before it is rejected with a capacity
// error. Overridable for tests.
std::uint64_t sieve_capacity();
void set_sieve_capacity(std::uint64_t n);

MobiusTable sieve_mobius(std::uint64_t n);
KFreeTable sieve_kfree(int k, std::uint64_t n);
std::uint64_t count_kfree(int k, std::uint64_t n);

// Largest d with d^k <= n.
std::uint64_t kth_root_floor(std::uint64_t n, int k);

// b_{y,z}(n) = sum of mu(d) over d^k | n with y <= d < z; b(0) = 0.
// Negative n is handled through |n|.
int band_value(std::int64_t n, const BandSpec& spec, const MobiusTable& mobius);

// Sum of |b_{y,z}(n)|^2 over the window N-K < n <= N, streamed so memory
// stays O(window + z). K <= 0 gives an empty window.
std::uint64_t window_band_energy(int k, std::uint64_t n_limit, double window_k,
                                 const BandSpec& spec);

std::uint64_t totient(std::uint64_t r);

// C(r) = sum_{f>=1} mu(f r) / f^k for squarefree r, truncated at
// F = ceil(tol^{-1/(k-1)}) so the dropped tail is below tol.
double compute_cr(std::uint64_t r, int k, double tol);

bool is_squarefree(std::uint64_t n);

}  // namespace kfree
