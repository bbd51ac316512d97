#include "kfree/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kfree/arith.hpp"
#include "kfree/numeric.hpp"

namespace kfree {

double theoretical_e(int k, double p) {
  if (k < 2) throw std::invalid_argument("theoretical_e: k must be >= 2");
  if (p < 0) throw std::invalid_argument("theoretical_e: p must be >= 0");
  double critical = 1.0 + 1.0 / k;
  if (p <= critical) return p / (k + 1);
  return p - 1.0;
}

std::vector<MomentResult> moment_sweep(int k, double p,
                                       std::span<const std::uint64_t> ns,
                                       RefineOptions opt) {
  if (ns.size() < 3)
    throw std::invalid_argument("moment_sweep: need at least 3 values of N");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1])
      throw std::invalid_argument("moment_sweep: Ns must be increasing");

  std::vector<MomentResult> rows;
  rows.reserve(ns.size());
  for (std::uint64_t n : ns) {
    CoeffSeq seq = coeffs_from_kfree(k, n);
    rows.push_back(
        moments_with_refinement(seq, std::span<const double>(&p, 1), opt)[0]);
  }
  return rows;
}

std::vector<std::uint64_t> default_sweep_ns(int k) {
  int lo = k == 2 ? 14 : 16;
  int hi = k == 2 ? 22 : 24;
  std::vector<std::uint64_t> ns;
  for (int e = lo; e <= hi; ++e) ns.push_back(std::uint64_t(1) << e);
  return ns;
}

ExponentFit fit_exponent(std::span<const MomentResult> rows) {
  if (rows.size() < 3)
    throw std::invalid_argument("fit_exponent: need at least 3 rows");
  for (const MomentResult& r : rows) {
    if (r.k != rows[0].k || r.p != rows[0].p)
      throw std::invalid_argument("fit_exponent: rows mix k or p");
    if (!(r.value > 0) || r.n < 1)
      throw std::invalid_argument("fit_exponent: nonpositive value in table");
  }

  ExponentFit fit;
  fit.k = rows[0].k;
  fit.p = rows[0].p;
  fit.points.reserve(rows.size());
  for (const MomentResult& r : rows)
    fit.points.emplace_back(std::log(double(r.n)), std::log(r.value));

  double n = double(fit.points.size());
  double xbar = 0, ybar = 0;
  for (auto [x, y] : fit.points) {
    xbar += x;
    ybar += y;
  }
  xbar /= n;
  ybar /= n;

  double sxx = 0, sxy = 0;
  for (auto [x, y] : fit.points) {
    sxx += (x - xbar) * (x - xbar);
    sxy += (x - xbar) * (y - ybar);
  }
  if (sxx <= 0)
    throw std::invalid_argument("fit_exponent: degenerate (constant) abscissae");

  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;

  double ss_res = 0;
  fit.residuals.reserve(fit.points.size());
  for (auto [x, y] : fit.points) {
    double r = y - (fit.intercept + fit.slope * x);
    fit.residuals.push_back(r);
    ss_res += r * r;
  }
  fit.std_error = std::sqrt(ss_res / (n - 2.0) / sxx);
  fit.theoretical = fit.k >= 2 ? theoretical_e(fit.k, fit.p)
                               : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

ECurve e_curve(int k, std::span<const double> ps,
               std::span<const std::uint64_t> ns, RefineOptions opt) {
  if (ps.empty()) throw std::invalid_argument("e_curve: empty p list");
  if (ns.size() < 3)
    throw std::invalid_argument("e_curve: need at least 3 values of N");

  ECurve curve;
  curve.k = k;
  curve.ns.assign(ns.begin(), ns.end());
  curve.moments.assign(ps.size(), {});

  for (std::uint64_t n : ns) {
    CoeffSeq seq = coeffs_from_kfree(k, n);
    std::vector<MomentResult> rows = moments_with_refinement(seq, ps, opt);
    for (std::size_t i = 0; i < ps.size(); ++i)
      curve.moments[i].push_back(std::move(rows[i]));
  }

  curve.points.reserve(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    ExponentFit fit = fit_exponent(curve.moments[i]);
    ECurvePoint pt;
    pt.p = ps[i];
    pt.slope = fit.slope;
    pt.std_error = fit.std_error;
    pt.theoretical = fit.theoretical;
    pt.all_converged =
        std::all_of(curve.moments[i].begin(), curve.moments[i].end(),
                    [](const MomentResult& r) { return r.converged; });
    curve.points.push_back(pt);
  }
  return curve;
}

CriticalRow critical_row_from(const MomentResult& moment) {
  if (moment.k < 2)
    throw std::invalid_argument("critical_row_from: moment lacks k");
  CriticalRow row;
  row.n = moment.n;
  row.moment = moment;
  double nn = double(moment.n);
  double scale = std::pow(nn, 1.0 / moment.k);
  double lg = std::log(nn);
  row.lower_ratio = moment.value / (scale * lg);
  row.upper_ratio = moment.value / (scale * lg * lg);
  return row;
}

std::vector<CriticalRow> critical_ratio(int k,
                                        std::span<const std::uint64_t> ns,
                                        RefineOptions opt) {
  double p = 1.0 + 1.0 / k;
  std::vector<CriticalRow> rows;
  rows.reserve(ns.size());
  for (std::uint64_t n : ns) {
    CoeffSeq seq = coeffs_from_kfree(k, n);
    MomentResult m =
        moments_with_refinement(seq, std::span<const double>(&p, 1), opt)[0];
    rows.push_back(critical_row_from(m));
  }
  return rows;
}

namespace {

std::uint64_t pow_u64(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

}  // namespace

MajorArcScan major_arc_scan(int k, std::uint64_t n, std::uint64_t r_max,
                            std::span<const double> betas) {
  if (k < 2) throw std::invalid_argument("major_arc_scan: k must be >= 2");
  if (n < 2) throw std::invalid_argument("major_arc_scan: N must be >= 2");
  if (r_max < 1)
    throw std::invalid_argument("major_arc_scan: Rmax must be >= 1");
  {
    // separation needs every pair of moduli to satisfy r^k s^k <= 50 N
    unsigned __int128 sep = 1;
    for (int i = 0; i < 2 * k; ++i) {
      sep *= r_max;
      if (sep > (unsigned __int128)(50) * n)
        throw std::invalid_argument(
            "major_arc_scan: Rmax too large, need Rmax^(2k) <= 50 N");
    }
  }

  MajorArcScan scan;
  scan.k = k;
  scan.n = n;
  scan.r_max = r_max;
  if (betas.empty()) {
    double b = 1.0 / (200.0 * double(n));
    scan.betas = {0.0, b, -b};
  } else {
    scan.betas.assign(betas.begin(), betas.end());
  }

  CoeffSeq seq = coeffs_from_kfree(k, n);
  double root = std::pow(double(n), 1.0 / k);

  std::size_t floor_hits = 0;
  for (std::uint64_t r = 1; r <= r_max; ++r) {
    if (!is_squarefree(r)) continue;
    std::uint64_t q = pow_u64(r, k);
    double cr = compute_cr(r, k, 1e-6);
    double main = cr * double(n) / double(q);
    double floor_bound = double(n) / (10.0 * double(q));

    for (std::uint64_t a = 1; a <= q; ++a) {
      if (gcd_u64(a, q) != 1) continue;
      MajorArcPoint pt;
      pt.k = k;
      pt.n = n;
      pt.r = r;
      pt.a = a;
      pt.predicted_main = main;
      pt.floor_bound = floor_bound;

      double alpha = double(a) / double(q);
      pt.measured = eval_direct(seq, alpha);
      pt.min_abs = std::numeric_limits<double>::infinity();
      for (double beta : scan.betas) {
        std::complex<double> s =
            beta == 0.0 ? pt.measured : eval_direct(seq, alpha + beta);
        pt.min_abs = std::min(pt.min_abs, std::abs(s));
      }
      pt.error_constant =
          std::abs(pt.measured - std::complex<double>(main, 0.0)) /
          (double(q) * root);
      pt.floor_ok = pt.min_abs >= floor_bound;
      if (pt.floor_ok) ++floor_hits;
      scan.max_error_constant =
          std::max(scan.max_error_constant, pt.error_constant);
      scan.points.push_back(std::move(pt));
    }
  }

  scan.floor_fraction =
      scan.points.empty() ? 0.0 : double(floor_hits) / double(scan.points.size());

  // exact pairwise separation of the fractions a/q on the circle
  std::vector<std::pair<std::uint64_t, std::uint64_t>> fracs;  // (a, q)
  fracs.reserve(scan.points.size());
  for (const MajorArcPoint& pt : scan.points)
    fracs.emplace_back(pt.a, pow_u64(pt.r, k));
  std::sort(fracs.begin(), fracs.end(), [](auto lhs, auto rhs) {
    return (unsigned __int128)lhs.first * rhs.second <
           (unsigned __int128)rhs.first * lhs.second;
  });

  scan.separation_ok = true;
  scan.min_gap_scaled = std::numeric_limits<double>::infinity();
  auto check_gap = [&](std::pair<std::uint64_t, std::uint64_t> lo,
                       std::pair<std::uint64_t, std::uint64_t> hi) {
    // gap = hi - lo > 1/(50N), all in integers
    unsigned __int128 num = (unsigned __int128)hi.first * lo.second -
                            (unsigned __int128)lo.first * hi.second;
    unsigned __int128 den = (unsigned __int128)lo.second * hi.second;
    bool ok = num * 50 * n > den;
    if (!ok) scan.separation_ok = false;
    double scaled = 50.0 * double(n) * double(num) / double(den);
    scan.min_gap_scaled = std::min(scan.min_gap_scaled, scaled);
  };
  for (std::size_t i = 1; i < fracs.size(); ++i)
    check_gap(fracs[i - 1], fracs[i]);
  if (fracs.size() > 1) {
    // wrap pair: smallest vs largest shifted by one full turn
    auto first = fracs.front();
    auto last = fracs.back();
    check_gap(last, {first.first + first.second, first.second});
  }

  scan.pass = scan.separation_ok && scan.floor_fraction == 1.0;
  return scan;
}

std::vector<TotientSumRow> totient_sum_check(
    std::span<const std::uint64_t> rs) {
  std::vector<TotientSumRow> rows;
  if (rs.empty()) return rows;
  std::uint64_t r_max = *std::max_element(rs.begin(), rs.end());
  if (r_max < 1) throw std::invalid_argument("totient_sum_check: R must be >= 1");

  // phi by the usual multiplicative sieve
  std::vector<std::uint32_t> phi(r_max + 1);
  std::iota(phi.begin(), phi.end(), 0u);
  for (std::uint64_t p = 2; p <= r_max; ++p) {
    if (phi[p] != p) continue;  // composite, already reduced
    for (std::uint64_t m = p; m <= r_max; m += p) phi[m] -= phi[m] / p;
  }
  KFreeTable sqfree = sieve_kfree(2, r_max);

  std::vector<std::uint64_t> sorted(rs.begin(), rs.end());
  std::sort(sorted.begin(), sorted.end());

  Kahan sum;
  std::uint64_t r = 1;
  rows.reserve(sorted.size());
  for (std::uint64_t limit : sorted) {
    for (; r <= limit; ++r)
      if (sqfree.test(r)) sum.add(double(phi[r]) / double(r));
    TotientSumRow row;
    row.r_limit = limit;
    row.sum = sum.value();
    row.ratio = row.sum / double(limit);
    row.pass = row.ratio >= 0.2;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace kfree
