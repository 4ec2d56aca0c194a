#pragma once

/**
 * @file solver.hpp
 * @brief Jacobi-preconditioned conjugate gradients for the assembled SPD system.
 */

#include "nitsche/assembly.hpp"
#include "nitsche/error.hpp"
#include "nitsche/sparse.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nitsche {

struct SolveReport {
    std::vector<double> solution;
    std::size_t iterations{0};
    double relative_residual{0.0}; ///< ||b - A x|| / ||b||, recomputed from scratch
    std::string method{"pcg-jacobi"};
};

struct SolverOptions {
    double tol{1e-10};
    std::optional<std::size_t> max_iter; ///< defaults to 10 N
};

namespace detail {

[[nodiscard]] inline double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

[[nodiscard]] inline double true_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x,
                                          std::vector<double>& r)
{
    a.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return std::sqrt(dot(r, r));
}

} // namespace detail

/**
 * Solves A x = b for symmetric positive definite A. Convergence is declared
 * only once the explicitly recomputed residual meets the tolerance; if the
 * recurrence drifts the iteration restarts from the current iterate.
 */
[[nodiscard]] inline SolveReport solve_spd(const CsrMatrix& a, std::span<const double> b, SolverOptions opts = {})
{
    const std::size_t n = a.rows();
    if (b.size() != n) throw SolverError("right-hand side size does not match the matrix");
    if (!(opts.tol > 0.0 && opts.tol < 1.0)) throw SolverError("solver tolerance must lie in (0, 1)");
    const std::size_t max_iter = opts.max_iter.value_or(10 * n);

    std::vector<double> inv_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a.at(i, i);
        if (d == 0.0) throw SolverError("zero diagonal entry in row " + std::to_string(i));
        if (d < 0.0) throw SolverError("negative diagonal entry in row " + std::to_string(i) + "; matrix is not SPD");
        inv_diag[i] = 1.0 / d;
    }

    SolveReport rep;
    rep.solution.assign(n, 0.0);
    const double b_norm = std::sqrt(detail::dot(b, b));
    if (b_norm == 0.0) return rep;

    std::vector<double> r(n), z(n), p(n), ap(n);
    std::vector<double>& x = rep.solution;
    std::size_t it = 0;
    while (true) {
        double res = detail::true_residual(a, b, x, r);
        if (res <= opts.tol * b_norm) {
            rep.relative_residual = res / b_norm;
            rep.iterations = it;
            return rep;
        }
        if (it >= max_iter) break;
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        p = z;
        double rz = detail::dot(r, z);
        while (it < max_iter) {
            a.multiply(p, ap);
            const double pap = detail::dot(p, ap);
            if (!(pap > 0.0))
                throw SolverError("conjugate gradients broke down (p^T A p <= 0); matrix is not positive definite");
            const double alpha = rz / pap;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            ++it;
            if (std::sqrt(detail::dot(r, r)) <= opts.tol * b_norm) break;
            for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
            const double rz_new = detail::dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
    }
    const double res = detail::true_residual(a, b, x, r);
    throw SolverError("conjugate gradients did not converge in " + std::to_string(max_iter) +
                      " iterations (relative residual " + std::to_string(res / b_norm) +
                      "); the system may be indefinite, try a larger gamma");
}

[[nodiscard]] inline SolveReport solve_spd(const SparseSystem& system, SolverOptions opts = {})
{
    return solve_spd(system.matrix, system.rhs, opts);
}

} // namespace nitsche
