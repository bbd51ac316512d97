#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <vector>

#include "kfree/arith.hpp"
#include "kfree/decomp.hpp"
#include "kfree/expsum.hpp"
#include "kfree/numeric.hpp"
#include "kfree/quad.hpp"
#include "kfree/scaling.hpp"

#ifndef KFREESUM_VERSION
#define KFREESUM_VERSION "0.0.0"
#endif

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  using namespace kfree;

  m.doc() = "moments of exponential sums over k-free numbers";
  m.attr("__version__") = KFREESUM_VERSION;

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded",
                                         PyExc_RuntimeError);

  py::class_<MomentResult>(m, "MomentResult")
      .def_readonly("k", &MomentResult::k)
      .def_readonly("p", &MomentResult::p)
      .def_readonly("n", &MomentResult::n)
      .def_readonly("grid_size", &MomentResult::grid_size)
      .def_readonly("value", &MomentResult::value)
      .def_readonly("err_estimate", &MomentResult::err_estimate)
      .def_readonly("label", &MomentResult::source_label)
      .def_readonly("converged", &MomentResult::converged)
      .def("__repr__", [](const MomentResult& r) {
        return "MomentResult(k=" + std::to_string(r.k) +
               ", p=" + std::to_string(r.p) + ", n=" + std::to_string(r.n) +
               ", value=" + std::to_string(r.value) + ")";
      });

  m.def("count_kfree", &count_kfree, py::arg("k"), py::arg("n"),
        "number of k-free integers in [1, n]");

  m.def(
      "mobius",
      [](std::uint64_t n) {
        auto table = sieve_mobius(n);
        return std::vector<int>(table.values.begin() + 1, table.values.end());
      },
      py::arg("n"), "mu(1..n)");

  m.def(
      "eval_direct",
      [](int k, std::uint64_t n, double alpha) {
        return eval_direct(coeffs_from_kfree(k, n), alpha);
      },
      py::arg("k"), py::arg("n"), py::arg("alpha"),
      "S_k(alpha) by direct summation");

  m.def(
      "moment",
      [](int k, std::uint64_t n, double p, double rel_tol,
         std::uint64_t max_grid) {
        return moment_with_refinement(k, n, p, RefineOptions{rel_tol, max_grid});
      },
      py::arg("k"), py::arg("n"), py::arg("p"), py::arg("rel_tol") = 1e-6,
      py::arg("max_grid") = std::uint64_t(1) << 28,
      "refined moment I_k(p); raises BudgetExceeded when the grid budget "
      "runs out");

  m.def(
      "moments",
      [](int k, std::uint64_t n, const std::vector<double>& ps, double rel_tol,
         std::uint64_t max_grid) {
        return moments_with_refinement(coeffs_from_kfree(k, n), ps,
                                       RefineOptions{rel_tol, max_grid});
      },
      py::arg("k"), py::arg("n"), py::arg("ps"), py::arg("rel_tol") = 1e-6,
      py::arg("max_grid") = std::uint64_t(1) << 28,
      "several moments on one shared grid schedule");

  m.def("theoretical_e", &theoretical_e, py::arg("k"), py::arg("p"),
        "piecewise-linear growth exponent E(p)");

  m.def(
      "fit_exponent",
      [](int k, double p, const std::vector<std::uint64_t>& ns,
         double rel_tol) {
        auto rows = moment_sweep(k, p, ns, RefineOptions{rel_tol});
        auto f = fit_exponent(rows);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["std_error"] = f.std_error;
        d["theoretical"] = f.theoretical;
        d["residuals"] = f.residuals;
        return d;
      },
      py::arg("k"), py::arg("p"), py::arg("ns"), py::arg("rel_tol") = 1e-6,
      "log-log least squares over a sweep of N");

  m.def(
      "parseval",
      [](int k, std::uint64_t n) {
        auto r = parseval_check(k, n);
        py::dict d;
        d["quadrature"] = r.quadrature;
        d["count"] = r.count;
        d["rel_deviation"] = r.rel_deviation;
        d["ok"] = r.pass;
        return d;
      },
      py::arg("k"), py::arg("n"), "I_k(2) against the k-free count");

  m.def(
      "choose_plan",
      [](int k, std::uint64_t n) {
        auto plan = choose_plan(k, n);
        return py::make_tuple(plan.h, plan.H);
      },
      py::arg("k"), py::arg("n"), "dyadic split points (h, H)");

  m.def(
      "verify_decomposition",
      [](int k, std::uint64_t n) {
        return verify_decomposition(choose_plan(k, n)).pass();
      },
      py::arg("k"), py::arg("n"),
      "pointwise band identities for all arguments up to n");

  m.def("compute_cr", &compute_cr, py::arg("r"), py::arg("k"),
        py::arg("tol") = 1e-6, "singular constant C(r)");

  m.def("fejer", &fejer, py::arg("n"), py::arg("alpha"));
  m.def("kernel_nk", &kernel_nk, py::arg("n"), py::arg("k"),
        py::arg("alpha"));

  m.def(
      "major_arc_scan",
      [](int k, std::uint64_t n, std::uint64_t r_max) {
        auto s = major_arc_scan(k, n, r_max);
        py::dict d;
        d["points"] = s.points.size();
        d["floor_fraction"] = s.floor_fraction;
        d["max_error_constant"] = s.max_error_constant;
        d["separation_ok"] = s.separation_ok;
        d["ok"] = s.pass;
        return d;
      },
      py::arg("k"), py::arg("n"), py::arg("r_max"),
      "peak scan over rational points a/r^k");

  m.def("set_threads", &set_thread_count, py::arg("n"),
        "worker thread count (0 = auto)");
}
