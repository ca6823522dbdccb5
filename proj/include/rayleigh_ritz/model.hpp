#pragma once

// H = -1/2 d²/dx² + lambda x on [0, 1] with psi(0) = psi(1) = 0, expanded in the
// polynomial basis f_i(x) = x^i (1 - x), i = 1, 2, ...
// Basis indices are 1-based throughout this header.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "rayleigh_ritz/errors.hpp"
#include "rayleigh_ritz/matrix.hpp"
#include "rayleigh_ritz/scalars.hpp"

namespace rr {

struct ProblemSpec {
    Rational lambda;
    int basis_size = 1;
};

namespace detail {
inline void check_index(int i, const char* name) {
    if (i < 1) throw std::invalid_argument(std::string("basis index ") + name + " must be >= 1");
}
}  // namespace detail

/// <f_i|f_j> = 2 / ((i+j+1)(i+j+2)(i+j+3))
inline Rational overlap_element(int i, int j) {
    detail::check_index(i, "i");
    detail::check_index(j, "j");
    const long s = i + j;
    return Rational(2, (s + 1) * (s + 2) * (s + 3));
}

/// <f_i|H|f_j> = ij / ((i+j)(i+j+1)(i+j-1)) + 2 lambda / ((i+j+2)(i+j+3)(i+j+4))
inline Rational hamiltonian_element(int i, int j, const Rational& lambda) {
    detail::check_index(i, "i");
    detail::check_index(j, "j");
    const long s = i + j;
    return Rational(static_cast<long>(i) * j, s * (s + 1) * (s - 1)) + Rational(2, (s + 2) * (s + 3) * (s + 4)) * lambda;
}

struct ProblemMatrices {
    SymMatrix<Rational> hamiltonian;
    SymMatrix<Rational> overlap;
};

inline ProblemMatrices build_matrices(const ProblemSpec& spec) {
    if (spec.basis_size < 1) throw std::invalid_argument("basis size must be >= 1");
    const auto n = static_cast<std::size_t>(spec.basis_size);
    ProblemMatrices m{SymMatrix<Rational>(n, Rational(0)), SymMatrix<Rational>(n, Rational(0))};
    for (int i = 1; i <= spec.basis_size; ++i)
        for (int j = i; j <= spec.basis_size; ++j) {
            m.hamiltonian.set(i - 1, j - 1, hamiltonian_element(i, j, spec.lambda));
            m.overlap.set(i - 1, j - 1, overlap_element(i, j));
        }
    return m;
}

/// Dense polynomial with rational coefficients, coeffs[k] multiplying x^k.
class Polynomial {
public:
    explicit Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.emplace_back(0);
    }

    /// f_i(x) = x^i - x^(i+1)
    static Polynomial basis(int i) {
        detail::check_index(i, "i");
        std::vector<Rational> c(static_cast<std::size_t>(i) + 2, Rational(0));
        c[i] = Rational(1);
        c[i + 1] = Rational(-1);
        return Polynomial(std::move(c));
    }

    const std::vector<Rational>& coefficients() const { return coeffs_; }

    Polynomial derivative() const {
        std::vector<Rational> d;
        for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * Rational(static_cast<long>(k)));
        return Polynomial(std::move(d));
    }

    /// x · p(x)
    Polynomial times_x() const {
        std::vector<Rational> c{Rational(0)};
        c.insert(c.end(), coeffs_.begin(), coeffs_.end());
        return Polynomial(std::move(c));
    }

    PFloat operator()(const PFloat& x) const {
        const precision_bits prec = x.precision();
        PFloat acc(prec);
        for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * x + to_float(coeffs_[k], prec);
        return acc;
    }

private:
    std::vector<Rational> coeffs_;
};

struct QuadratureRule {
    std::vector<PFloat> nodes;    // in (0, 1)
    std::vector<PFloat> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1]; exact for degree <= 2n - 1.
inline QuadratureRule gauss_legendre(int n, precision_bits prec) {
    if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
    const precision_bits work = prec + 32;
    const PFloat pi = pi_const(std::min(work, max_pi_precision));
    const PFloat one(1, work);
    const PFloat stop = PFloat::pow2(-(prec + 16), work);
    QuadratureRule rule;
    for (int k = 1; k <= n; ++k) {
        PFloat x = to_float(pi, work) * PFloat(4 * k - 1, work) / static_cast<long>(4 * n + 2);
        mpfr_cos(x.get(), x.get(), round_nearest);
        PFloat dp(work);
        for (int it = 0;; ++it) {
            if (it == 100) throw no_convergence("Legendre root " + std::to_string(k));
            PFloat p0 = one, p1 = x;
            for (int j = 1; j < n; ++j) {
                PFloat p2 = (PFloat(2 * j + 1, work) * x * p1 - PFloat(j, work) * p0) / static_cast<long>(j + 1);
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            dp = PFloat(n, work) * (x * p1 - p0) / (x * x - one);
            PFloat dx = p1 / dp;
            x -= dx;
            if (abs(dx) <= stop) break;
        }
        // recompute the derivative at the converged root
        {
            PFloat p0 = one, p1 = x;
            for (int j = 1; j < n; ++j) {
                PFloat p2 = (PFloat(2 * j + 1, work) * x * p1 - PFloat(j, work) * p0) / static_cast<long>(j + 1);
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            dp = PFloat(n, work) * (x * p1 - p0) / (x * x - one);
        }
        PFloat w = PFloat(2, work) / ((one - x * x) * dp * dp);
        rule.nodes.push_back(to_float((x + one) / 2L, prec));
        rule.weights.push_back(to_float(w / 2L, prec));
    }
    return rule;
}

struct QuadratureElement {
    PFloat overlap;      // integral of f_i f_j
    PFloat hamiltonian;  // integral of f_i (-1/2 f_j'' + lambda x f_j)
};

/// Independent numerical evaluation of the matrix elements. The kinetic part uses
/// f_j'' directly (no integration by parts).
inline QuadratureElement quadrature_element(int i, int j, const Rational& lambda, int nodes,
                                            precision_bits prec = 113) {
    detail::check_index(i, "i");
    detail::check_index(j, "j");
    const int required = (i + j + 4) / 2 + 1;
    if (nodes < required) throw insufficient_nodes(nodes, required);

    const Polynomial fi = Polynomial::basis(i);
    const Polynomial fj = Polynomial::basis(j);
    const Polynomial fj2 = fj.derivative().derivative();
    const Polynomial xfj = fj.times_x();
    const PFloat lam = to_float(lambda, prec);
    const QuadratureRule rule = gauss_legendre(nodes, prec);

    QuadratureElement out{PFloat(prec), PFloat(prec)};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const PFloat& x = rule.nodes[k];
        const PFloat a = fi(x);
        out.overlap += rule.weights[k] * a * fj(x);
        out.hamiltonian += rule.weights[k] * a * (lam * xfj(x) - fj2(x) / 2L);
    }
    return out;
}

struct ReferenceSpectrum {
    enum class Provenance { analytic, table };
    Rational lambda;
    std::vector<PFloat> values;
    Provenance provenance;
};

/// Converged E_1..E_4 for lambda = 1, stored to the ten digits the reference table carries.
inline constexpr const char* lambda_one_reference[] = {"5.432607855", "20.23986304", "44.91360966", "79.45707400"};

/// lambda = 0: E_n = n² pi² / 2 (particle in a unit box). lambda = 1: tabulated values.
inline ReferenceSpectrum exact_reference(const Rational& lambda, int states, precision_bits prec) {
    if (states < 1) throw std::invalid_argument("reference needs at least one state");
    ReferenceSpectrum ref{lambda, {}, ReferenceSpectrum::Provenance::analytic};
    if (lambda == Rational(0)) {
        const PFloat pi = pi_const(prec);
        const PFloat half_pi2 = pi * pi / 2L;
        for (long n = 1; n <= states; ++n) ref.values.push_back(half_pi2 * (n * n));
    } else if (lambda == Rational(1)) {
        constexpr std::size_t stored = std::size(lambda_one_reference);
        if (static_cast<std::size_t>(states) > stored) throw state_count_mismatch(stored, static_cast<std::size_t>(states));
        ref.provenance = ReferenceSpectrum::Provenance::table;
        for (int n = 0; n < states; ++n) ref.values.push_back(PFloat::parse(lambda_one_reference[n], prec));
    } else {
        throw unsupported_lambda(lambda.to_string());
    }
    return ref;
}

}  // namespace rr
