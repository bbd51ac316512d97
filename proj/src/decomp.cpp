#include "kfree/decomp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include "kfree/numeric.hpp"

namespace kfree {

namespace {

bool pow2_ge(int bits, std::uint64_t n) {  // 2^bits >= n
  if (bits >= 64) return true;
  return (std::uint64_t(1) << bits) >= n;
}

bool pow2_gt(int bits, std::uint64_t n) {  // 2^bits > n
  if (bits >= 64) return true;
  return (std::uint64_t(1) << bits) > n;
}

// Coefficients of sum_{lo <= d < hi} mu(d) 1_{d^k | n}, streamed over d.
CoeffSeq band_range(int k, std::uint64_t n, std::uint64_t lo, std::uint64_t hi,
                    std::string label) {
  CoeffSeq seq;
  seq.length = n;
  seq.k = k;
  seq.label = std::move(label);
  seq.coeffs.assign(n + 1, 0);

  std::uint64_t d_max = kth_root_floor(n, k);
  hi = std::min(hi, d_max + 1);
  lo = std::max<std::uint64_t>(lo, 1);
  if (lo >= hi) return seq;

  MobiusTable mobius = sieve_mobius(hi - 1);
  for (std::uint64_t d = lo; d < hi; ++d) {
    int m = mobius.mu(d);
    if (m == 0) continue;
    std::uint64_t step = d;
    for (int j = 1; j < k; ++j) step *= d;  // d^k <= n, no overflow
    for (std::uint64_t x = step; x <= n; x += step) {
      int v = seq.coeffs[x] + m;
      assert(v >= INT16_MIN && v <= INT16_MAX);
      seq.coeffs[x] = std::int16_t(v);
    }
  }
  return seq;
}

}  // namespace

DecompositionPlan choose_plan(int k, std::uint64_t n) {
  if (k < 2) throw std::invalid_argument("choose_plan: k must be >= 2");
  if (n < 2) throw std::invalid_argument("choose_plan: N must be >= 2");
  DecompositionPlan plan;
  plan.k = k;
  plan.n = n;
  plan.H = 1;
  while (!pow2_ge(k * plan.H, n)) ++plan.H;
  plan.h = 1;
  while (!pow2_gt(plan.h * (k + 1), n)) ++plan.h;
  assert(plan.h <= plan.H);
  return plan;
}

CoeffSeq build_band_coefficients(int k, std::uint64_t n, int i) {
  if (k < 2) throw std::invalid_argument("build_band_coefficients: k >= 2");
  if (i < 1) throw std::invalid_argument("build_band_coefficients: i >= 1");
  std::uint64_t lo = i >= 65 ? ~std::uint64_t(0) : std::uint64_t(1) << (i - 1);
  std::uint64_t hi = i >= 64 ? ~std::uint64_t(0) : std::uint64_t(1) << i;
  return band_range(k, n, lo, hi,
                    "band:k=" + std::to_string(k) + ":i=" + std::to_string(i) +
                        ":N=" + std::to_string(n));
}

CoeffSeq build_star_coefficients(const DecompositionPlan& plan) {
  std::uint64_t lo = std::uint64_t(1) << plan.h;
  std::uint64_t hi = std::uint64_t(1) << plan.H;
  return band_range(plan.k, plan.n, lo, hi,
                    "star:k=" + std::to_string(plan.k) +
                        ":h=" + std::to_string(plan.h) +
                        ":H=" + std::to_string(plan.H) +
                        ":N=" + std::to_string(plan.n));
}

DecompositionReport verify_decomposition(const DecompositionPlan& plan) {
  DecompositionReport rep;
  rep.plan = plan;

  std::uint64_t n = plan.n;
  KFreeTable table = sieve_kfree(plan.k, n);

  std::vector<std::int32_t> full(n + 1, 0), split(n + 1, 0);
  for (int i = 1; i <= plan.H; ++i) {
    CoeffSeq band = build_band_coefficients(plan.k, n, i);
    bool in_split = i <= plan.h;
    for (std::uint64_t x = 1; x <= n; ++x) {
      full[x] += band.coeffs[x];
      if (in_split) split[x] += band.coeffs[x];
    }
  }
  {
    CoeffSeq star = build_star_coefficients(plan);
    for (std::uint64_t x = 1; x <= n; ++x) split[x] += star.coeffs[x];
  }

  rep.full_ok = true;
  rep.split_ok = true;
  for (std::uint64_t x = 1; x <= n; ++x) {
    std::int32_t want = table.test(x) ? 1 : 0;
    bool bad_full = full[x] != want;
    bool bad_split = split[x] != want;
    if ((bad_full || bad_split) && rep.first_violation == 0) {
      rep.first_violation = x;
      rep.detail = (bad_full ? std::string("full") : std::string("split")) +
                   " identity fails at n=" + std::to_string(x);
    }
    if (bad_full) rep.full_ok = false;
    if (bad_split) rep.split_ok = false;
  }
  if (rep.pass())
    rep.detail = "both identities hold for all n <= " + std::to_string(n);
  return rep;
}

Lemma1Table lemma1_sweep(int k, std::span<const Lemma1Case> cases) {
  if (k < 2) throw std::invalid_argument("lemma1_sweep: k must be >= 2");
  Lemma1Table table;
  table.rows.reserve(cases.size());
  std::map<std::uint64_t, double> worst;

  for (const Lemma1Case& c : cases) {
    if (c.n < 1 || c.window < 1 || c.window > double(c.n))
      throw std::invalid_argument("lemma1_sweep: need 1 <= K <= N");
    if (c.y < 1 || c.z <= c.y)
      throw std::invalid_argument("lemma1_sweep: need 1 <= y < z");

    Lemma1Row row;
    row.c = c;
    row.energy = double(window_band_energy(k, c.n, c.window,
                                           BandSpec{k, c.y, c.z}));
    double lg = std::log(c.z);
    row.bound = c.window * std::pow(c.y, 1.0 - double(k));
    if (c.window != double(c.n))
      row.bound += std::pow(double(c.n), 1.0 / k) * lg * lg * lg;
    row.ratio = row.energy / row.bound;
    table.rows.push_back(row);

    auto [it, fresh] = worst.emplace(c.n, row.ratio);
    if (!fresh) it->second = std::max(it->second, row.ratio);
  }
  table.max_ratio.assign(worst.begin(), worst.end());
  return table;
}

std::vector<Lemma1Case> default_lemma1_grid(int k) {
  if (k < 2) throw std::invalid_argument("default_lemma1_grid: k must be >= 2");
  std::vector<Lemma1Case> cases;
  for (int e = 12; e <= 20; e += 2) {
    std::uint64_t n = std::uint64_t(1) << e;
    std::uint64_t root = kth_root_floor(n, k);

    int j_max = 1;
    while ((std::uint64_t(1) << j_max) <= root) ++j_max;  // last nonempty band

    for (std::uint64_t div : {std::uint64_t(1), std::uint64_t(4),
                              std::uint64_t(16), std::uint64_t(64)}) {
      std::uint64_t window = std::max<std::uint64_t>(n / div, 1);
      for (int j = 1; j <= j_max; ++j)
        cases.push_back({n, double(window), std::ldexp(1.0, j - 1),
                         std::ldexp(1.0, j)});
    }

    // window size tied to the band as in the smoothed decomposition
    DecompositionPlan plan = choose_plan(k, n);
    for (int j = 1; j <= plan.h; ++j) {
      int bits = plan.h + k * j - 1;
      std::uint64_t window =
          bits >= e ? n : std::min(n, std::uint64_t(1) << bits);
      cases.push_back({n, double(window), std::ldexp(1.0, j - 1),
                       std::ldexp(1.0, j)});
    }
  }
  return cases;
}

PieceMoment piece_moments(const DecompositionPlan& plan, int piece, double p,
                          RefineOptions opt) {
  if (!(p == 1.0 || (p > 1.0 && p <= 2.0)))
    throw std::invalid_argument("piece_moments: p must be 1 or in (1, 2]");
  if (piece != star_piece && (piece < 1 || piece > plan.H))
    throw std::invalid_argument("piece_moments: piece index out of range");

  CoeffSeq seq = piece == star_piece
                     ? build_star_coefficients(plan)
                     : build_band_coefficients(plan.k, plan.n, piece);

  PieceMoment pm;
  pm.plan = plan;
  pm.piece_index = piece;
  pm.p = p;
  pm.moment =
      moments_with_refinement(seq, std::span<const double>(&p, 1), opt)[0];

  double nn = double(plan.n);
  if (piece == star_piece) {
    pm.theoretical_bound = std::pow(nn, p / double(plan.k + 1));
  } else if (p == 1.0) {
    pm.theoretical_bound = std::ldexp(1.0, piece) * std::log(nn);
  } else if (p == 2.0) {
    pm.theoretical_bound = std::ldexp(nn, -piece * (plan.k - 1));
  } else {
    pm.theoretical_bound = std::ldexp(1.0, piece) * std::pow(nn, p - 1.0);
  }
  return pm;
}

}  // namespace kfree
