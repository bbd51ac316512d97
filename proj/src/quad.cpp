#include "kfree/quad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "kfree/arith.hpp"
#include "kfree/numeric.hpp"

namespace kfree {

namespace {
constexpr std::uint64_t k_chunk = std::uint64_t(1) << 16;
}

MomentResult moment_from_grid(const SpectrumGrid& grid, double p) {
  if (p < 0) throw std::invalid_argument("moment_from_grid: p must be >= 0");
  if (grid.grid_size == 0 || grid.half.empty())
    throw std::invalid_argument("moment_from_grid: empty grid");

  std::uint64_t m = grid.grid_size;
  const std::complex<double>* v = grid.half.data();
  AbsPow pw(p);

  // Fold conjugate pairs: the stored half [0 .. floor(M/2)] covers the full
  // circle with weight 2 except at j=0 (and j=M/2 when M is even).
  double twice = chunked_sum(grid.half.size(), k_chunk,
                             [v, &pw](std::uint64_t, std::uint64_t b,
                                      std::uint64_t e) {
                               Kahan part;
                               for (std::uint64_t j = b; j < e; ++j)
                                 part.add(pw.from_sq(std::norm(v[j])));
                               return part.value();
                             });
  Kahan total;
  total.add(2.0 * twice);
  total.add(-pw.from_sq(std::norm(v[0])));
  if (m % 2 == 0) total.add(-pw.from_sq(std::norm(grid.half.back())));

  MomentResult r;
  r.k = grid.k;
  r.p = p;
  r.n = grid.source_length;
  r.grid_size = m;
  r.value = total.value() / double(m);
  r.err_estimate = 0.0;
  r.source_label = grid.source_label;
  return r;
}

std::vector<MomentResult> moments_with_refinement(const CoeffSeq& seq,
                                                  std::span<const double> ps,
                                                  RefineOptions opt) {
  if (opt.rel_tol < 1e-10)
    throw std::invalid_argument("moments_with_refinement: rel_tol below 1e-10");
  if (ps.empty()) return {};
  bool any_low = false;
  for (double p : ps) {
    if (p < 0)
      throw std::invalid_argument("moments_with_refinement: p must be >= 0");
    if (p < 1) any_low = true;
  }

  std::uint64_t n = std::max<std::uint64_t>(seq.length, 1);
  std::uint64_t m = next_pow2(std::max<std::uint64_t>((any_low ? 16 : 8) * n, 16));
  m = std::min(m, opt.max_grid);
  if (m < seq.length + 1)
    throw std::invalid_argument("moments_with_refinement: budget below N+1");

  std::size_t np = ps.size();
  std::vector<MomentResult> out(np);
  for (std::size_t i = 0; i < np; ++i) {
    out[i].k = seq.k;
    out[i].p = ps[i];
    out[i].n = seq.length;
    out[i].source_label = seq.label;
    out[i].converged = false;
    out[i].err_estimate = std::numeric_limits<double>::infinity();
  }

  std::vector<std::size_t> active(np);
  for (std::size_t i = 0; i < np; ++i) active[i] = i;
  std::vector<int> agree(np, 0);

  {
    std::vector<double> first = grid_power_means(seq, m, ps);
    for (std::size_t i = 0; i < np; ++i) {
      out[i].value = first[i];
      out[i].grid_size = m;
    }
  }

  while (!active.empty() && 2 * m <= opt.max_grid) {
    m *= 2;
    std::vector<double> sub_ps(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) sub_ps[j] = ps[active[j]];
    std::vector<double> cur = grid_power_means(seq, m, sub_ps);

    std::vector<std::size_t> still;
    for (std::size_t j = 0; j < active.size(); ++j) {
      std::size_t i = active[j];
      double diff = std::abs(cur[j] - out[i].value);
      out[i].value = cur[j];
      out[i].grid_size = m;
      out[i].err_estimate = diff;
      bool ok = diff <= opt.rel_tol * std::abs(cur[j]);
      agree[i] = ok ? agree[i] + 1 : 0;
      int need = ps[i] < 1 ? 2 : 1;
      if (agree[i] >= need)
        out[i].converged = true;
      else
        still.push_back(i);
    }
    active.swap(still);
  }
  return out;
}

MomentResult moment_with_refinement(const CoeffSeq& seq, double p,
                                    RefineOptions opt) {
  std::vector<MomentResult> r =
      moments_with_refinement(seq, std::span<const double>(&p, 1), opt);
  if (!r[0].converged) throw BudgetExceeded(std::move(r[0]));
  return std::move(r[0]);
}

MomentResult moment_with_refinement(int k, std::uint64_t n, double p,
                                    RefineOptions opt) {
  return moment_with_refinement(coeffs_from_kfree(k, n), p, opt);
}

HolderReport holder_check(const MomentResult& rq1, const MomentResult& rq2,
                          const MomentResult& rp) {
  if (rq1.source_label != rq2.source_label ||
      rq1.source_label != rp.source_label || rq1.n != rq2.n || rq1.n != rp.n)
    throw std::invalid_argument("holder_check: results from different sources");
  double q1 = rq1.p, q2 = rq2.p, p = rp.p;
  if (q1 > q2 || p < q1 || p > q2)
    throw std::invalid_argument("holder_check: need q1 <= p <= q2");

  HolderReport rep;
  rep.q1 = q1;
  rep.q2 = q2;
  rep.p = p;
  rep.theta = (q2 > q1) ? (p - q1) / (q2 - q1) : 0.0;
  rep.left = rp.value;
  rep.right = std::pow(rq1.value, 1.0 - rep.theta) *
              std::pow(rq2.value, rep.theta);

  auto rel_err = [](const MomentResult& r) {
    return r.value > 0 ? r.err_estimate / r.value : 0.0;
  };
  rep.slack = 1.0 + 1e-6 + rel_err(rp) + (1.0 - rep.theta) * rel_err(rq1) +
              rep.theta * rel_err(rq2);
  rep.pass = rep.left <= rep.right * rep.slack;
  return rep;
}

ParsevalReport parseval_check(int k, std::uint64_t n) {
  CoeffSeq seq = coeffs_from_kfree(k, n);
  std::uint64_t m = default_grid_size(n);
  double two = 2.0;
  double quad = grid_power_means(seq, m, std::span<const double>(&two, 1))[0];

  ParsevalReport rep;
  rep.k = k;
  rep.n = n;
  rep.grid_size = m;
  rep.quadrature = quad;
  rep.count = count_kfree(k, n);
  rep.rel_deviation =
      rep.count ? std::abs(quad - double(rep.count)) / double(rep.count)
                : std::abs(quad);
  rep.pass = rep.rel_deviation < 1e-9;
  return rep;
}

}  // namespace kfree
