#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kfree/expsum.hpp"

namespace kfree {

// One measured moment I(p) = (1/M) sum_j |S(j/M)|^p with its provenance.
struct MomentResult {
  int k = 0;
  double p = 0.0;
  std::uint64_t n = 0;
  std::uint64_t grid_size = 0;
  double value = 0.0;
  double err_estimate = 0.0;
  std::string source_label;
  bool converged = true;
};

// Grid mean of |S|^p (trapezoid rule for a periodic integrand). The error
// estimate is left at 0; refinement fills it in.
MomentResult moment_from_grid(const SpectrumGrid& grid, double p);

struct RefineOptions {
  double rel_tol = 1e-6;
  std::uint64_t max_grid = std::uint64_t(1) << 28;
};

// Raised when the grid budget runs out before the tolerance is met; carries
// the best value seen.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(MomentResult r)
      : std::runtime_error("moment refinement exhausted grid budget at M=" +
                           std::to_string(r.grid_size)),
        best(std::move(r)) {}

  MomentResult best;
};

// Doubles the grid from 8N (16N when any p < 1) until successive values
// agree to rel_tol (twice in a row for p < 1); err_estimate is the last
// jump. One grid schedule shared by all requested p.
//
// The vector form never throws: rows that miss the tolerance come back with
// converged = false. The scalar forms throw BudgetExceeded instead.
std::vector<MomentResult> moments_with_refinement(const CoeffSeq& seq,
                                                  std::span<const double> ps,
                                                  RefineOptions opt = {});
MomentResult moment_with_refinement(const CoeffSeq& seq, double p,
                                    RefineOptions opt = {});
MomentResult moment_with_refinement(int k, std::uint64_t n, double p,
                                    RefineOptions opt = {});

// I(p) <= I(q1)^(1-theta) * I(q2)^theta for p = (1-theta)q1 + theta*q2.
// Holds exactly for the true integrals, so a failure beyond the slack
// points at a quadrature bug.
struct HolderReport {
  double q1 = 0, q2 = 0, p = 0;
  double theta = 0;
  double left = 0;   // I(p)
  double right = 0;  // I(q1)^(1-theta) I(q2)^theta
  double slack = 1;  // multiplicative allowance
  bool pass = false;
};

HolderReport holder_check(const MomentResult& rq1, const MomentResult& rq2,
                          const MomentResult& rp);

// I_k(2) against the coefficient count (Parseval).
struct ParsevalReport {
  int k = 0;
  std::uint64_t n = 0;
  std::uint64_t grid_size = 0;
  double quadrature = 0;
  std::uint64_t count = 0;
  double rel_deviation = 0;
  bool pass = false;
};

ParsevalReport parseval_check(int k, std::uint64_t n);

}  // namespace kfree
