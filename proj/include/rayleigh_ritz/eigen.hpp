#pragma once

// Symmetric eigensolver and the reductions of the pencil (H, S) to a Ritz spectrum.
//
// Routes:
//   invsqrt  diagonalize S^(-1/2) H S^(-1/2), C = S^(-1/2) U
//   ldlt     exact congruence L^-1 H L^-T, then D^(-1/2) scaling in floats
//   nonsym   diagonalize S^-1 H as a general matrix (Rayleigh-quotient iteration
//            with S-orthogonal deflation), then S-normalize the columns

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rayleigh_ritz/errors.hpp"
#include "rayleigh_ritz/matrix.hpp"
#include "rayleigh_ritz/scalars.hpp"

namespace rr {

enum class Route { invsqrt, ldlt, nonsym };

inline std::string_view to_string(Route r) {
    switch (r) {
        case Route::invsqrt: return "invsqrt";
        case Route::ldlt: return "ldlt";
        case Route::nonsym: return "nonsym";
    }
    return "?";
}

inline Route parse_route(std::string_view name) {
    if (name == "invsqrt") return Route::invsqrt;
    if (name == "ldlt") return Route::ldlt;
    if (name == "nonsym") return Route::nonsym;
    throw std::invalid_argument("unknown route '" + std::string(name) + "'");
}

inline constexpr int max_jacobi_sweeps = 30;

struct Spectrum {
    std::vector<PFloat> values;  // ascending
    Matrix<PFloat> vectors;      // column k belongs to values[k]
};

struct RitzSolution {
    std::vector<PFloat> ritz_values;  // W_1 <= ... <= W_N
    Matrix<PFloat> coefficients;      // C, column k expands phi_k over the basis
    Route route;
    precision_bits precision;
};

namespace detail {

inline precision_bits max_precision(const SymMatrix<PFloat>& a) {
    precision_bits p = min_precision;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) p = std::max(p, a(i, j).precision());
    return p;
}

/// Largest-magnitude entry of each column made positive; lowest index wins ties.
inline void fix_column_signs(Matrix<PFloat>& v) {
    for (std::size_t c = 0; c < v.cols(); ++c) {
        std::size_t best = 0;
        for (std::size_t r = 1; r < v.rows(); ++r)
            if (abs(v(r, c)) > abs(v(best, c))) best = r;
        if (v(best, c).sign() < 0)
            for (std::size_t r = 0; r < v.rows(); ++r) v(r, c) = -v(r, c);
    }
}

/// Stable ascending sort of eigenpairs.
inline void sort_pairs(std::vector<PFloat>& values, Matrix<PFloat>& vectors) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<PFloat> sorted_values;
    Matrix<PFloat> sorted_vectors = vectors;
    for (std::size_t k = 0; k < order.size(); ++k) {
        sorted_values.push_back(values[order[k]]);
        for (std::size_t r = 0; r < vectors.rows(); ++r) sorted_vectors(r, k) = vectors(r, order[k]);
    }
    values = std::move(sorted_values);
    vectors = std::move(sorted_vectors);
}

inline PFloat s_dot(const Matrix<PFloat>& s, std::span<const PFloat> x, std::span<const PFloat> y) {
    PFloat acc(x[0].precision());
    for (std::size_t i = 0; i < x.size(); ++i) {
        PFloat row(acc.precision());
        for (std::size_t j = 0; j < y.size(); ++j) row += s(i, j) * y[j];
        acc += x[i] * row;
    }
    return acc;
}

inline Matrix<PFloat> diag_matrix(std::span<const PFloat> values) {
    Matrix<PFloat> d(values.size(), values.size(), zero_like(values[0]));
    for (std::size_t i = 0; i < values.size(); ++i) d(i, i) = values[i];
    return d;
}

}  // namespace detail

/// Cyclic-by-row Jacobi with threshold skipping. A pair (p, q) is skipped once
/// |a_pq| <= 2^-prec * sqrt(|a_pp a_qq|), which keeps small eigenvalues of graded
/// matrices relatively accurate; iteration stops after a sweep with no rotation.
inline Spectrum jacobi_eigensym(const SymMatrix<PFloat>& input, const PFloat& tol) {
    const std::size_t n = input.dim();
    const precision_bits prec = detail::max_precision(input);
    Matrix<PFloat> a = to_float(input.dense(), prec);
    Matrix<PFloat> v = Matrix<PFloat>::identity(n, PFloat(prec));
    const PFloat eps = PFloat::pow2(-prec, prec);

    PFloat norm(prec);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) norm += a(i, j) * a(i, j);
    norm = sqrt_pf(norm);
    const PFloat floor = eps * to_float(tol, prec) * norm / static_cast<long>(n);

    bool converged = false;
    for (int sweep = 0; sweep < max_jacobi_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const PFloat apq = a(p, q);
                const PFloat mag = abs(apq);
                if (mag <= floor || mag <= eps * sqrt_pf(abs(a(p, p) * a(q, q)))) continue;
                rotated = true;

                const PFloat theta = (a(q, q) - a(p, p)) / (2L * apq);
                PFloat t = PFloat(1, prec) / (abs(theta) + sqrt_pf(theta * theta + PFloat(1, prec)));
                if (theta.sign() < 0) t = -t;
                const PFloat c = PFloat(1, prec) / sqrt_pf(t * t + PFloat(1, prec));
                const PFloat s = t * c;

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = PFloat(prec);
                a(q, p) = PFloat(prec);
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        PFloat arp = a(r, p);
                        PFloat arq = a(r, q);
                        a(r, p) = c * arp - s * arq;
                        a(p, r) = a(r, p);
                        a(r, q) = c * arq + s * arp;
                        a(q, r) = a(r, q);
                    }
                    PFloat vrp = v(r, p);
                    PFloat vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged) throw no_convergence("Jacobi exceeded " + std::to_string(max_jacobi_sweeps) + " sweeps");

    PFloat off(prec);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) off += a(i, j) * a(i, j);
    if (sqrt_pf(off) > to_float(tol, prec) * norm) throw no_convergence("Jacobi off-diagonal above tolerance");

    Spectrum out{{}, std::move(v)};
    for (std::size_t i = 0; i < n; ++i) out.values.push_back(a(i, i));
    detail::sort_pairs(out.values, out.vectors);
    detail::fix_column_signs(out.vectors);
    return out;
}

inline Spectrum jacobi_eigensym(const SymMatrix<PFloat>& a) {
    return jacobi_eigensym(a, default_tolerance(detail::max_precision(a)));
}

namespace detail {

template <class F>
SymMatrix<PFloat> spectral_function(const SymMatrix<PFloat>& a, F f) {
    const precision_bits prec = max_precision(a);
    const PFloat tol = default_tolerance(prec);
    Spectrum sp = jacobi_eigensym(a, tol);
    const PFloat& smallest = sp.values.front();
    if (smallest.sign() <= 0 || smallest <= tol * abs(sp.values.back())) throw not_positive_definite();

    std::vector<PFloat> fv;
    for (const auto& x : sp.values) fv.push_back(f(x));
    const std::size_t n = a.dim();
    SymMatrix<PFloat> out(n, PFloat(prec));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            PFloat acc(prec);
            for (std::size_t k = 0; k < n; ++k) acc += sp.vectors(i, k) * fv[k] * sp.vectors(j, k);
            out.set(i, j, std::move(acc));
        }
    return out;
}

}  // namespace detail

/// V sqrt(Lambda) Vᵀ for symmetric positive definite A.
inline SymMatrix<PFloat> matrix_sqrt(const SymMatrix<PFloat>& a) {
    return detail::spectral_function(a, [](const PFloat& x) { return sqrt_pf(x); });
}

/// V Lambda^(-1/2) Vᵀ for symmetric positive definite A.
inline SymMatrix<PFloat> matrix_inv_sqrt(const SymMatrix<PFloat>& a) {
    return detail::spectral_function(a, [](const PFloat& x) {
        PFloat r(x.precision());
        mpfr_rec_sqrt(r.get(), x.get(), round_nearest);
        return r;
    });
}

/// Scales each column c to cᵀSc = 1. When `ritz_values` is given, columns whose values
/// lie within relative 2^(-p/3) of their neighbour form a cluster and are first
/// S-orthogonalized in index order.
inline Matrix<PFloat> normalize_s(Matrix<PFloat> c, const SymMatrix<PFloat>& s,
                                  std::span<const PFloat> ritz_values = {}) {
    if (c.rows() != s.dim()) throw dimension_mismatch("normalize_s");
    if (!ritz_values.empty() && ritz_values.size() != c.cols()) throw dimension_mismatch("normalize_s values");
    const precision_bits prec = c(0, 0).precision();
    const Matrix<PFloat> sd = to_float(s.dense(), prec);
    const PFloat cluster_tol = PFloat::pow2(-(prec / 3), prec);

    std::size_t cluster_start = 0;
    for (std::size_t k = 0; k < c.cols(); ++k) {
        if (!ritz_values.empty() && k > 0) {
            const PFloat gap = abs(ritz_values[k] - ritz_values[k - 1]);
            const PFloat scale = std::max(abs(ritz_values[k]), abs(ritz_values[k - 1]));
            if (gap > cluster_tol * scale) cluster_start = k;
        } else {
            cluster_start = k;
        }
        std::vector<PFloat> col = c.column(k);
        for (std::size_t m = cluster_start; m < k; ++m) {
            const std::vector<PFloat> prev = c.column(m);
            const PFloat proj = detail::s_dot(sd, prev, col);
            for (std::size_t r = 0; r < col.size(); ++r) col[r] -= proj * prev[r];
        }
        const PFloat norm2 = detail::s_dot(sd, col, col);
        if (norm2.sign() <= 0) throw zero_norm(k + 1);
        const PFloat inv = PFloat(1, prec) / sqrt_pf(norm2);
        for (auto& x : col) x *= inv;
        c.set_column(k, col);
    }
    return c;
}

namespace detail {

/// Eigenpairs of M = S^-1 H by Rayleigh-quotient iteration; each new iterate is kept
/// S-orthogonal to the pairs already found.
inline void deflated_rayleigh_iteration(const Matrix<PFloat>& m, const Matrix<PFloat>& s, const PFloat& tol,
                                        std::vector<PFloat>& values, Matrix<PFloat>& vectors) {
    const std::size_t n = m.rows();
    const precision_bits prec = m(0, 0).precision();
    const PFloat scale = std::max(max_abs(m), PFloat(1, prec));
    const PFloat pivot_fill = PFloat::pow2(-prec, prec) * scale;
    std::vector<std::vector<PFloat>> found;

    auto project = [&](std::vector<PFloat>& x) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : found) {
                const PFloat proj = s_dot(s, v, x);
                for (std::size_t i = 0; i < n; ++i) x[i] -= proj * v[i];
            }
    };
    auto normalize = [&](std::vector<PFloat>& x) {
        const PFloat norm2 = s_dot(s, x, x);
        if (norm2.sign() <= 0) return false;
        const PFloat inv = PFloat(1, prec) / sqrt_pf(norm2);
        for (auto& xi : x) xi *= inv;
        return true;
    };
    auto rayleigh = [&](const std::vector<PFloat>& x) {
        const std::vector<PFloat> mx = matvec<PFloat>(m, x);
        return s_dot(s, x, mx) / s_dot(s, x, x);
    };

    values.clear();
    vectors = Matrix<PFloat>(n, n, PFloat(prec));
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<PFloat> x;
        bool started = false;
        for (std::size_t attempt = 0; attempt <= n && !started; ++attempt) {
            x.assign(n, PFloat(prec));
            for (std::size_t i = 0; i < n; ++i) {
                if (attempt == 0)
                    x[i] = PFloat(1, prec) / static_cast<long>(i + k + 2);
                else if (i == attempt - 1)
                    x[i] = PFloat(1, prec);
            }
            project(x);
            started = normalize(x);
        }
        if (!started) throw no_convergence("no start vector outside the deflated subspace");

        for (int warm = 0; warm < 2; ++warm) {
            std::vector<PFloat> y = matvec<PFloat>(m, x);
            project(y);
            if (normalize(y)) x = std::move(y);
        }

        PFloat sigma = rayleigh(x);
        int settled = 0;
        for (int it = 0; it < 100 && settled < 2; ++it) {
            Matrix<PFloat> shifted = m;
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= sigma;
            Matrix<PFloat> rhs(n, 1, PFloat(prec));
            for (std::size_t i = 0; i < n; ++i) rhs(i, 0) = x[i];
            Matrix<PFloat> sol = lu_solve(std::move(shifted), std::move(rhs), &pivot_fill);
            std::vector<PFloat> y = sol.column(0);
            project(y);
            if (!normalize(y)) break;
            x = std::move(y);
            PFloat next = rayleigh(x);
            const PFloat delta = abs(next - sigma);
            sigma = std::move(next);
            settled = delta <= tol * std::max(abs(sigma), PFloat(1, prec)) ? settled + 1 : 0;
        }
        if (settled < 2) throw no_convergence("Rayleigh-quotient iteration for pair " + std::to_string(k + 1));
        values.push_back(sigma);
        vectors.set_column(k, x);
        found.push_back(std::move(x));
    }
}

template <class T>
void require_positive_definite(const SymMatrix<T>& s) {
    if constexpr (std::is_same_v<T, Rational>) {
        if (!is_positive_definite(s)) throw singular_overlap("exact LDL^T pivot test failed");
    }
}

}  // namespace detail

/// Solves HC = SCW for the Ritz values W and S-orthonormal coefficients C.
template <class T>
RitzSolution solve_generalized(const SymMatrix<T>& h, const SymMatrix<T>& s, Route route,
                               precision_bits prec = default_precision) {
    if (h.dim() != s.dim()) throw dimension_mismatch("solve_generalized");
    const std::size_t n = h.dim();
    const PFloat tol = default_tolerance(prec);
    RitzSolution sol{{}, Matrix<PFloat>(n, n, PFloat(prec)), route, prec};

    switch (route) {
        case Route::ldlt: {
            LdltFactors<T> f{Matrix<T>(1, 1, zero_like(s(0, 0))), {}};
            try {
                f = ldlt(s);
            } catch (const zero_pivot& e) {
                throw singular_overlap(e.what());
            }
            for (std::size_t k = 0; k < n; ++k)
                if (f.diag[k].sign() <= 0) throw singular_overlap("non-positive pivot at leading minor " + std::to_string(k + 1));

            const Matrix<T> linv = unit_lower_inverse(f.lower);
            const Matrix<T> reduced = matmul(matmul(linv, h.dense()), transpose_conjugate(linv));
            std::vector<PFloat> rsd;
            for (const auto& d : f.diag) {
                PFloat r(prec);
                mpfr_rec_sqrt(r.get(), to_float(d, prec).get(), round_nearest);
                rsd.push_back(std::move(r));
            }
            SymMatrix<PFloat> g(n, PFloat(prec));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) g.set(i, j, to_float(reduced(i, j), prec) * rsd[i] * rsd[j]);

            Spectrum sp = jacobi_eigensym(g, tol);
            Matrix<PFloat> back = to_float(transpose_conjugate(linv), prec);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) back(i, j) *= rsd[j];
            sol.ritz_values = std::move(sp.values);
            sol.coefficients = matmul(back, sp.vectors);
            break;
        }
        case Route::invsqrt: {
            detail::require_positive_definite(s);
            SymMatrix<PFloat> x(n, PFloat(prec));
            try {
                x = matrix_inv_sqrt(to_float(s, prec));
            } catch (const not_positive_definite&) {
                throw singular_overlap("S^(-1/2) requires a positive spectrum");
            }
            const Matrix<PFloat> xd = x.dense();
            const Matrix<PFloat> a = matmul(matmul(xd, to_float(h.dense(), prec)), xd);
            Spectrum sp = jacobi_eigensym(SymMatrix<PFloat>::from_upper(a), tol);
            sol.ritz_values = std::move(sp.values);
            sol.coefficients = matmul(xd, sp.vectors);
            break;
        }
        case Route::nonsym: {
            detail::require_positive_definite(s);
            Matrix<T> m_exact(1, 1, zero_like(s(0, 0)));
            try {
                m_exact = lu_solve(s.dense(), h.dense());
            } catch (const zero_pivot& e) {
                throw singular_overlap(e.what());
            }
            const SymMatrix<PFloat> sf = to_float(s, prec);
            detail::deflated_rayleigh_iteration(to_float(m_exact, prec), sf.dense(), tol, sol.ritz_values,
                                                sol.coefficients);
            detail::sort_pairs(sol.ritz_values, sol.coefficients);
            sol.coefficients = normalize_s(std::move(sol.coefficients), sf, sol.ritz_values);
            break;
        }
    }
    detail::fix_column_signs(sol.coefficients);
    return sol;
}

struct Residuals {
    PFloat secular;      // max |HC - SCW|
    PFloat overlap;      // max |CᵀSC - I|
    PFloat hamiltonian;  // max |CᵀHC - W|
};

template <class T>
Residuals residuals(const SymMatrix<T>& h, const SymMatrix<T>& s, const RitzSolution& sol) {
    if (h.dim() != s.dim() || sol.coefficients.rows() != h.dim() || sol.ritz_values.size() != sol.coefficients.cols())
        throw dimension_mismatch("residuals");
    const precision_bits prec = sol.precision;
    const Matrix<PFloat> hf = to_float(h.dense(), prec);
    const Matrix<PFloat> sf = to_float(s.dense(), prec);
    const Matrix<PFloat>& c = sol.coefficients;
    const Matrix<PFloat> ct = transpose_conjugate(c);
    const Matrix<PFloat> w = detail::diag_matrix(sol.ritz_values);
    const Matrix<PFloat> hc = matmul(hf, c);
    const Matrix<PFloat> sc = matmul(sf, c);
    return Residuals{
        max_abs(hc - matmul(sc, w)),
        max_abs(matmul(ct, sc) - Matrix<PFloat>::identity(c.cols(), PFloat(prec))),
        max_abs(matmul(ct, hc) - w),
    };
}

/// Acceptance bounds for a RitzSolution: overlap <= tol, hamiltonian <= tol * max(1, |W|),
/// secular <= tol * max(1, |W|) * max(1, max|C|).
inline bool residuals_within(const Residuals& r, const RitzSolution& sol, const PFloat& tol) {
    const precision_bits prec = sol.precision;
    PFloat wmax(1, prec);
    for (const auto& w : sol.ritz_values) wmax = std::max(wmax, abs(w));
    const PFloat cmax = std::max(max_abs(sol.coefficients), PFloat(1, prec));
    return r.overlap <= tol && r.hamiltonian <= tol * wmax && r.secular <= tol * wmax * cmax;
}

/// max |UᵀU - I| for U = S^(1/2) C.
template <class T>
PFloat unitarity_check(const SymMatrix<T>& s, const Matrix<PFloat>& c) {
    if (c.rows() != s.dim()) throw dimension_mismatch("unitarity_check");
    const precision_bits prec = c(0, 0).precision();
    const Matrix<PFloat> root = matrix_sqrt(to_float(s, prec)).dense();
    const Matrix<PFloat> u = matmul(root, c);
    return max_abs(matmul(transpose_conjugate(u), u) - Matrix<PFloat>::identity(c.cols(), PFloat(prec)));
}

}  // namespace rr
