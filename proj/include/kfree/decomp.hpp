#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kfree/arith.hpp"
#include "kfree/expsum.hpp"
#include "kfree/quad.hpp"

namespace kfree {

// Dyadic split of mu_k: bands b_i over d in [2^(i-1), 2^i) for i <= H, and
// the merged tail b* over [2^h, 2^H). h and H are the unique integers with
//   N^(1/k) <= 2^H < 2 N^(1/k),  N^(1/(k+1)) < 2^h <= 2 N^(1/(k+1)).
struct DecompositionPlan {
  int k = 0;
  std::uint64_t n = 0;
  int h = 0;
  int H = 0;
};

DecompositionPlan choose_plan(int k, std::uint64_t n);

// Piece index for the merged tail band.
inline constexpr int star_piece = 0;

// Coefficients of the band sum T_i (d in [2^(i-1), 2^i)), streamed over d.
CoeffSeq build_band_coefficients(int k, std::uint64_t n, int i);
// Coefficients of T* (d in [2^h, 2^H)); empty band when h = H.
CoeffSeq build_star_coefficients(const DecompositionPlan& plan);

// Pointwise integer check of both identities
//   mu_k(n) = sum_{i<=H} b_i(n) = sum_{i<=h} b_i(n) + b*(n)
// for all n <= N.
struct DecompositionReport {
  DecompositionPlan plan;
  bool full_ok = false;   // sum over i <= H
  bool split_ok = false;  // sum over i <= h plus star
  std::uint64_t first_violation = 0;  // 0 when both identities hold
  std::string detail;

  bool pass() const { return full_ok && split_ok; }
};

DecompositionReport verify_decomposition(const DecompositionPlan& plan);

// One banded-energy measurement: sum of b_{y,z}(n)^2 over N-K < n <= N
// against the unit-constant bound K y^(1-k) + N^(1/k) ln^3 z, the second
// term dropped when K = N.
struct Lemma1Case {
  std::uint64_t n = 0;
  double window = 0;  // K
  double y = 0;
  double z = 0;
};

struct Lemma1Row {
  Lemma1Case c;
  double energy = 0;
  double bound = 0;
  double ratio = 0;
};

struct Lemma1Table {
  std::vector<Lemma1Row> rows;
  // max ratio per N, ascending in N
  std::vector<std::pair<std::uint64_t, double>> max_ratio;
};

Lemma1Table lemma1_sweep(int k, std::span<const Lemma1Case> cases);

// Stock case grid: N = 2^12..2^20, K in {N, N/4, N/16, N/64}, dyadic bands,
// plus the K = 2^(h+ki-1) slice.
std::vector<Lemma1Case> default_lemma1_grid(int k);

// Moment of one piece next to the matching unit-constant bound:
//   p = 1     -> 2^i ln N
//   1 < p < 2 -> 2^i N^(p-1)
//   p = 2     -> 2^(-i(k-1)) N      (star: N^(2/(k+1)))
// For the star piece with p < 2 the bound is N^(p/(k+1)), the L2 bound
// carried down by power-mean monotonicity.
struct PieceMoment {
  DecompositionPlan plan;
  int piece_index = 0;  // 1..H, or star_piece
  double p = 0;
  MomentResult moment;
  double theoretical_bound = 0;
};

PieceMoment piece_moments(const DecompositionPlan& plan, int piece, double p,
                          RefineOptions opt = {});

}  // namespace kfree
