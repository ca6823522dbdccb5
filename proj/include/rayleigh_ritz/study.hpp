#pragma once

// Convergence studies: Ritz values for a range of basis sizes, monotonicity and
// upper-bound checks against a reference spectrum.

#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "rayleigh_ritz/eigen.hpp"
#include "rayleigh_ritz/errors.hpp"
#include "rayleigh_ritz/model.hpp"
#include "rayleigh_ritz/scalars.hpp"

namespace rr {

struct ConvergenceRow {
    int n;
    std::vector<PFloat> values;  // W_1 .. W_k
};

struct ConvergenceReport {
    Rational lambda;
    int states;
    precision_bits precision;
    Route route;
    std::vector<ConvergenceRow> rows;  // increasing n
};

/// First `states` Ritz values for one basis size.
inline ConvergenceRow solve_row(const Rational& lambda, int n, int states, precision_bits prec, Route route) {
    try {
        const ProblemMatrices m = build_matrices({lambda, n});
        RitzSolution sol = solve_generalized(m.hamiltonian, m.overlap, route, prec);
        sol.ritz_values.resize(static_cast<std::size_t>(states), PFloat(prec));
        return {n, std::move(sol.ritz_values)};
    } catch (const study_error&) {
        throw;
    } catch (const error& e) {
        throw study_error(n, e.what());
    }
}

/// Rows are independent solves; with a thread-safe MPFR build they run concurrently
/// and are collected in n order.
inline ConvergenceReport run_convergence(const Rational& lambda, int n_min, int n_max, int states,
                                         precision_bits prec, Route route, bool parallel = true) {
    if (states < 1 || states > n_min || n_min > n_max)
        throw std::invalid_argument("convergence study needs 1 <= states <= n_min <= n_max");
    ConvergenceReport report{lambda, states, prec, route, {}};
    if (parallel && mpfr_buildopt_tls_p()) {
        std::vector<std::future<ConvergenceRow>> pending;
        for (int n = n_min; n <= n_max; ++n)
            pending.push_back(std::async(std::launch::async, solve_row, lambda, n, states, prec, route));
        for (auto& f : pending) report.rows.push_back(f.get());
    } else {
        for (int n = n_min; n <= n_max; ++n) report.rows.push_back(solve_row(lambda, n, states, prec, route));
    }
    return report;
}

struct MonotoneViolation {
    int state;     // 1-based
    int n_before;
    int n_after;
    PFloat before;
    PFloat after;
};

/// Every pair of consecutive rows where some W_m increases by more than
/// tol * max(1, |W_m|). The default tolerance is 2^(-p/2).
inline std::vector<MonotoneViolation> check_monotone(const ConvergenceReport& report) {
    std::vector<MonotoneViolation> out;
    const PFloat tol = default_tolerance(report.precision);
    const PFloat one(1, report.precision);
    for (std::size_t r = 1; r < report.rows.size(); ++r) {
        const auto& prev = report.rows[r - 1];
        const auto& next = report.rows[r];
        for (std::size_t m = 0; m < prev.values.size() && m < next.values.size(); ++m) {
            const PFloat slack = tol * std::max(one, abs(prev.values[m]));
            if (next.values[m] > prev.values[m] + slack)
                out.push_back({static_cast<int>(m + 1), prev.n, next.n, prev.values[m], next.values[m]});
        }
    }
    return out;
}

struct GapRow {
    int n;
    std::vector<PFloat> gaps;  // W_m(n) - E_m
};

struct GapTable {
    std::vector<GapRow> rows;

    PFloat min_gap() const {
        PFloat best = rows.at(0).gaps.at(0);
        for (const auto& r : rows)
            for (const auto& g : r.gaps)
                if (g < best) best = g;
        return best;
    }
};

inline GapTable compare_to_reference(const ConvergenceReport& report, const ReferenceSpectrum& ref) {
    const auto need = static_cast<std::size_t>(report.states);
    if (ref.values.size() < need) throw state_count_mismatch(ref.values.size(), need);
    GapTable table;
    for (const auto& row : report.rows) {
        GapRow g{row.n, {}};
        for (std::size_t m = 0; m < need; ++m) g.gaps.push_back(row.values[m] - to_float(ref.values[m], report.precision));
        table.rows.push_back(std::move(g));
    }
    return table;
}

}  // namespace rr
