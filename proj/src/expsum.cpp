#include "kfree/expsum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "kfree/numeric.hpp"

namespace kfree {

namespace {

constexpr std::uint64_t k_chunk = std::uint64_t(1) << 16;
constexpr std::uint64_t k_incore_fft = std::uint64_t(1) << 23;
constexpr std::uint64_t k_max_grid = std::uint64_t(1) << 30;

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using fftw_buffer = std::unique_ptr<T[], FftwDeleter>;

template <class T>
fftw_buffer<T> fftw_alloc_buffer(std::uint64_t count) {
  void* p = fftw_malloc(count * sizeof(T));
  if (!p) throw std::bad_alloc();
  return fftw_buffer<T>(static_cast<T*>(p));
}

void fft_r2c(double* in, std::complex<double>* out, std::uint64_t m) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan = fftw_plan_dft_r2c_1d(int(m), in,
                                reinterpret_cast<fftw_complex*>(out),
                                FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fftw r2c planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_destroy_plan(plan);
  }
}

void fft_c2c_backward(std::complex<double>* buf, std::uint64_t m) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan = fftw_plan_dft_1d(int(m), reinterpret_cast<fftw_complex*>(buf),
                            reinterpret_cast<fftw_complex*>(buf),
                            FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fftw c2c planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_destroy_plan(plan);
  }
}

}  // namespace

CoeffSeq coeffs_from_kfree(const KFreeTable& table) {
  CoeffSeq seq;
  seq.length = table.limit;
  seq.k = table.k;
  seq.coeffs.assign(table.limit + 1, 0);
  for (std::uint64_t n = 1; n <= table.limit; ++n)
    seq.coeffs[n] = table.test(n) ? 1 : 0;
  seq.label = "mu_k:k=" + std::to_string(table.k) +
              ":N=" + std::to_string(table.limit);
  return seq;
}

CoeffSeq coeffs_from_kfree(int k, std::uint64_t n) {
  return coeffs_from_kfree(sieve_kfree(k, n));
}

std::complex<double> eval_direct(const CoeffSeq& seq, double alpha) {
  Kahan re, im;
  for (std::uint64_t n = 1; n <= seq.length; ++n) {
    std::int16_t c = seq.coeffs[n];
    if (c == 0) continue;
    std::complex<double> ph = unit_phase(double(n), alpha);
    re.add(double(c) * ph.real());
    im.add(double(c) * ph.imag());
  }
  return {re.value(), im.value()};
}

std::uint64_t default_grid_size(std::uint64_t n) {
  return next_pow2(std::max<std::uint64_t>(8 * n, 16));
}

SpectrumGrid eval_grid(const CoeffSeq& seq, std::uint64_t m) {
  if (m < seq.length + 1)
    throw std::invalid_argument("eval_grid: grid size must be >= N+1");
  if (m > (std::uint64_t(1) << 25))
    throw std::length_error("eval_grid: grid too large to hold in core");

  auto in = fftw_alloc_buffer<double>(m);
  std::memset(in.get(), 0, m * sizeof(double));
  for (std::uint64_t n = 1; n <= seq.length; ++n)
    in[n] = double(seq.coeffs[n]);

  std::uint64_t half = m / 2 + 1;
  auto out = fftw_alloc_buffer<std::complex<double>>(half);
  fft_r2c(in.get(), out.get(), m);

  SpectrumGrid grid;
  grid.grid_size = m;
  grid.source_length = seq.length;
  grid.k = seq.k;
  grid.source_label = seq.label;
  grid.half.resize(half);
  // r2c computes sum c_n e(-2 pi i n j / M); we store the + convention.
  for (std::uint64_t j = 0; j < half; ++j) grid.half[j] = std::conj(out[j]);
  return grid;
}

std::vector<double> grid_power_means(const CoeffSeq& seq, std::uint64_t m,
                                     std::span<const double> ps) {
  std::uint64_t n = seq.length;
  if (m < n + 1)
    throw std::invalid_argument("grid_power_means: grid size must be >= N+1");
  if ((m & (m - 1)) != 0)
    throw std::invalid_argument("grid_power_means: grid size must be a power of two");
  if (m > k_max_grid)
    throw std::length_error("grid_power_means: grid size beyond budget");

  std::vector<AbsPow> pows;
  pows.reserve(ps.size());
  for (double p : ps) {
    if (p < 0) throw std::invalid_argument("grid_power_means: p must be >= 0");
    pows.emplace_back(p);
  }

  std::vector<Kahan> acc(ps.size());

  std::uint64_t f = std::max(next_pow2(n + 1), std::min(m, k_incore_fft));
  if (f >= m) {
    // Single real-input transform; fold the conjugate half with weight 2.
    auto in = fftw_alloc_buffer<double>(m);
    std::memset(in.get(), 0, m * sizeof(double));
    for (std::uint64_t i = 1; i <= n; ++i) in[i] = double(seq.coeffs[i]);
    std::uint64_t half = m / 2 + 1;
    auto out = fftw_alloc_buffer<std::complex<double>>(half);
    fft_r2c(in.get(), out.get(), m);
    in.reset();

    const std::complex<double>* v = out.get();
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      const auto& pw = pows[pi];
      double twice = chunked_sum(half, k_chunk,
                                 [v, &pw](std::uint64_t, std::uint64_t b,
                                          std::uint64_t e) {
                                   Kahan part;
                                   for (std::uint64_t j = b; j < e; ++j)
                                     part.add(pw.from_sq(std::norm(v[j])));
                                   return part.value();
                                 });
      acc[pi].add(2.0 * twice);
      acc[pi].add(-pw.from_sq(std::norm(v[0])));
      acc[pi].add(-pw.from_sq(std::norm(v[m / 2])));
    }
  } else {
    // Evaluate the M-grid in cosets j = t (mod s) of size F = M/s, each a
    // size-F transform of the twiddled coefficients.
    std::uint64_t s = m / f;
    auto buf = fftw_alloc_buffer<std::complex<double>>(f);
    std::vector<double> m2(f);
    for (std::uint64_t t = 0; t < s; ++t) {
      double alpha_t = double(t) / double(m);  // exact: m is a power of two
      buf[0] = 0.0;
      for (std::uint64_t i = 1; i <= n; ++i) {
        std::int16_t c = seq.coeffs[i];
        buf[i] = c ? double(c) * unit_phase(double(i), alpha_t)
                   : std::complex<double>(0.0);
      }
      std::fill(buf.get() + n + 1, buf.get() + f,
                std::complex<double>(0.0));
      fft_c2c_backward(buf.get(), f);

      const std::complex<double>* v = buf.get();
      double* sq = m2.data();
      for_each_chunk(
          f, k_chunk,
          [v, sq](std::uint64_t, std::uint64_t b, std::uint64_t e) {
            for (std::uint64_t j = b; j < e; ++j) sq[j] = std::norm(v[j]);
            return 0.0;
          },
          [](std::uint64_t, double) {});
      for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        const auto& pw = pows[pi];
        acc[pi].add(chunked_sum(f, k_chunk,
                                [sq, &pw](std::uint64_t, std::uint64_t b,
                                          std::uint64_t e) {
                                  Kahan part;
                                  for (std::uint64_t j = b; j < e; ++j)
                                    part.add(pw.from_sq(sq[j]));
                                  return part.value();
                                }));
      }
    }
  }

  std::vector<double> means(ps.size());
  for (std::size_t pi = 0; pi < ps.size(); ++pi)
    means[pi] = acc[pi].value() / double(m);
  return means;
}

// --- kernels ---------------------------------------------------------------

double fejer(std::uint64_t n, double alpha) {
  if (n < 1) throw std::invalid_argument("fejer: N must be >= 1");
  double t = signed_dist_to_int(alpha);
  if (std::abs(t) < kernel_eps) {
    Kahan acc;
    acc.add(1.0);
    double nd = double(n);
    for (std::uint64_t i = 1; i < n; ++i)
      acc.add(2.0 * (1.0 - double(i) / nd) *
              std::cos(2.0 * std::numbers::pi * double(i) * t));
    return std::max(0.0, acc.value());
  }
  double num = sin_pi_prod(double(n), t);
  double den = std::sin(std::numbers::pi * t);
  return num * num / (double(n) * den * den);
}

namespace {
double ceil_to_kernel_int(double x) {
  double fl = std::floor(x);
  return (x == fl) ? x : fl + 1.0;
}
}  // namespace

double kernel_nk(double n, double k, double alpha) {
  if (n < 1 || k < 1)
    throw std::invalid_argument("kernel_nk: need N >= 1 and K >= 1");
  // Non-integer parameters are lifted to [x]+1, which perturbs the kernel
  // by O(1).
  double nn = ceil_to_kernel_int(n);
  double kk = ceil_to_kernel_int(k);

  double t = signed_dist_to_int(alpha);
  if (std::abs(t) < kernel_eps) {
    std::uint64_t len = std::uint64_t(nn + kk);
    Kahan acc;
    acc.add(1.0);
    for (std::uint64_t i = 1; i <= len; ++i) {
      double w = std::min(1.0, (nn + kk - double(i)) / kk);
      acc.add(2.0 * w * std::cos(2.0 * std::numbers::pi * double(i) * t));
    }
    return acc.value();
  }
  double den = std::sin(std::numbers::pi * t);
  return sin_pi_prod(2.0 * nn + kk, t) * sin_pi_prod(kk, t) /
         (kk * den * den);
}

std::complex<double> kernel_congruence(double n, double k,
                                       std::int64_t residue, std::uint64_t d,
                                       double alpha) {
  if (n < 1 || k < 1)
    throw std::invalid_argument("kernel_congruence: need N >= 1 and K >= 1");
  double len = n + k;
  if (d < 1 || double(d) > len)
    throw std::invalid_argument("kernel_congruence: need 1 <= d <= N+K");

  std::int64_t dd = std::int64_t(d);
  std::int64_t r = ((residue % dd) + dd) % dd;
  std::int64_t lo = std::int64_t(std::ceil((-len - double(r)) / double(dd)));
  std::int64_t first = r + lo * dd;
  while (double(first) < -len) first += dd;

  Kahan re, im;
  for (std::int64_t i = first; double(i) <= len; i += dd) {
    double w = std::min(1.0, (len - std::abs(double(i))) / k);
    std::complex<double> ph = unit_phase(double(i), alpha);
    re.add(w * ph.real());
    im.add(w * ph.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace kfree
