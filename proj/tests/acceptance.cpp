// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rayleigh_ritz/cli.hpp"
#include "rayleigh_ritz/rayleigh_ritz.hpp"

namespace {

using namespace rr;

constexpr precision_bits P = 256;

const char* const table_one =
    "N,E1,E2,E3,E4\n"
    "4,4.934874810,19.75077640,51.06512518,100.2492235\n"
    "5,4.934802217,19.75077640,44.58681182,100.2492235\n"
    "6,4.934802217,19.73923669,44.58681182,79.99595777\n"
    "7,4.934802200,19.73923669,44.41473408,79.99595777\n"
    "8,4.934802200,19.73920882,44.41473408,78.97848206\n"
    "9,4.934802200,19.73920882,44.41322468,78.97848206\n"
    "10,4.934802200,19.73920880,44.41322468,78.95700917\n"
    "11,4.934802200,19.73920880,44.41321981,78.95700917\n"
    "12,4.934802200,19.73920880,44.41321981,78.95683586\n"
    "13,4.934802200,19.73920880,44.41321980,78.95683586\n"
    "14,4.934802200,19.73920880,44.41321980,78.95683521\n"
    "15,4.934802200,19.73920880,44.41321980,78.95683521\n"
    "16,4.934802200,19.73920880,44.41321980,78.95683520\n"
    "17,4.934802200,19.73920880,44.41321980,78.95683520\n"
    "18,4.934802200,19.73920880,44.41321980,78.95683520\n"
    "19,4.934802200,19.73920880,44.41321980,78.95683520\n"
    "20,4.934802200,19.73920880,44.41321980,78.95683520\n";

const char* const table_two =
    "N,E1,E2,E3,E4\n"
    "4,5.432678349,20.25175971,51.56499993,100.7505620\n"
    "5,5.432608286,20.25141191,45.08766430,100.7488422\n"
    "6,5.432607868,20.23989706,45.08714181,80.49674963\n"
    "7,5.432607855,20.23989074,44.91514957,80.49606992\n"
    "8,5.432607855,20.23986309,44.91512224,79.47878520\n"
    "9,5.432607855,20.23986306,44.91361487,79.47871372\n"
    "10,5.432607855,20.23986304,44.91361453,79.45724985\n"
    "11,5.432607855,20.23986304,44.91360967,79.45724783\n"
    "12,5.432607855,20.23986304,44.91360967,79.45707467\n"
    "13,5.432607855,20.23986304,44.91360966,79.45707465\n"
    "14,5.432607855,20.23986304,44.91360966,79.45707400\n"
    "15,5.432607855,20.23986304,44.91360966,79.45707400\n"
    "16,5.432607855,20.23986304,44.91360966,79.45707400\n"
    "17,5.432607855,20.23986304,44.91360966,79.45707400\n"
    "18,5.432607855,20.23986304,44.91360966,79.45707400\n"
    "19,5.432607855,20.23986304,44.91360966,79.45707400\n"
    "20,5.432607855,20.23986304,44.91360966,79.45707400\n";

struct Outcome {
    bool pass;
    std::string detail;
};

std::vector<std::string> split_cells(const std::string& text) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : text) {
        if (c == ',' || c == '\n') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    return cells;
}

Outcome reproduce_table(const std::string& lambda, const std::string& expected) {
    std::ostringstream out, err;
    const int code = cli::run_cli({"converge", "--lambda", lambda, "--n-min", "4", "--n-max", "20", "--states", "4",
                                   "--precision", "256", "--route", "ldlt", "--format", "csv"},
                                  out, err);
    if (code != cli::exit_ok) return {false, "exit code " + std::to_string(code) + ": " + err.str()};
    const auto got = split_cells(out.str()), want = split_cells(expected);
    if (got.size() != want.size()) return {false, "shape differs"};
    int matched = 0, values = 0;
    std::string first_miss;
    for (std::size_t k = 0; k < want.size(); ++k) {
        const bool is_value = want[k].find('.') != std::string::npos;
        if (is_value) ++values;
        if (got[k] == want[k]) {
            if (is_value) ++matched;
        } else if (first_miss.empty()) {
            first_miss = "; first mismatch " + got[k] + " vs " + want[k];
        }
    }
    return {matched == values && first_miss.empty(), std::to_string(matched) + "/" + std::to_string(values) + " values match" + first_miss};
}

Outcome closed_form_suite() {
    std::ostringstream out, err;
    const int code = cli::run_cli({"verify", "--tolerance", "1e-12", "--sqrt-tolerance", "1e-6"}, out, err);
    int passed = 0, lines = 0;
    std::istringstream is(out.str());
    for (std::string l; std::getline(is, l);) {
        ++lines;
        if (l.rfind("PASS", 0) == 0) ++passed;
    }
    return {code == cli::exit_ok && passed == 6 && lines == 6, std::to_string(passed) + "/6 checks pass"};
}

Outcome exact_limit() {
    const PFloat pi = pi_const(P);
    const PFloat half_pi2 = pi * pi / 2L;
    const PFloat floor_slack(1e-30, P);
    PFloat w1_gap(P);
    bool bound_ok = true;
    for (int n = 1; n <= 20; ++n) {
        const auto m = build_matrices({Rational(0), n});
        const auto sol = solve_generalized(m.hamiltonian, m.overlap, Route::ldlt, P);
        for (int k = 1; k <= std::min(n, 4); ++k)
            if (sol.ritz_values[k - 1] < half_pi2 * static_cast<long>(k * k) - floor_slack) bound_ok = false;
        if (n == 20) w1_gap = abs(sol.ritz_values[0] - half_pi2);
    }
    return {bound_ok && w1_gap <= PFloat(5e-10, P),
            "|W1(20) - pi^2/2| = " + format_scientific(w1_gap) + (bound_ok ? ", upper bounds hold" : ", upper bound broken")};
}

Outcome route_equivalence() {
    PFloat worst_invsqrt(P), worst_nonsym(P);
    for (const Rational& lambda : {Rational(0), Rational(1)})
        for (int n = 1; n <= 20; ++n) {
            const auto m = build_matrices({lambda, n});
            const auto ref = solve_generalized(m.hamiltonian, m.overlap, Route::ldlt, P);
            const auto alt = solve_generalized(m.hamiltonian, m.overlap, Route::invsqrt, P);
            for (int k = 0; k < n; ++k)
                worst_invsqrt = std::max(worst_invsqrt, abs(alt.ritz_values[k] - ref.ritz_values[k]) / abs(ref.ritz_values[k]));
            if (n > 8) continue;
            const auto ns = solve_generalized(m.hamiltonian, m.overlap, Route::nonsym, P);
            for (int k = 0; k < n; ++k)
                worst_nonsym = std::max(worst_nonsym, abs(ns.ritz_values[k] - ref.ritz_values[k]) / abs(ref.ritz_values[k]));
        }
    return {worst_invsqrt <= PFloat(1e-10, P) && worst_nonsym <= PFloat(1e-8, P),
            "invsqrt " + format_scientific(worst_invsqrt) + ", nonsym " + format_scientific(worst_nonsym)};
}

Outcome monotonicity() {
    std::size_t violations = 0;
    bool stair = false;
    for (const Rational& lambda : {Rational(0), Rational(1)}) {
        const auto report = run_convergence(lambda, 4, 20, 4, P, Route::ldlt);
        violations += check_monotone(report).size();
        if (lambda == Rational(0))
            stair = format_significant(report.rows[1].values[0], 10) == format_significant(report.rows[2].values[0], 10);
    }
    return {violations == 0 && stair,
            std::to_string(violations) + " violations" + (stair ? ", E1(5) = E1(6)" : ", E1(5) != E1(6)")};
}

Outcome quadrature_oracle() {
    const PFloat tol(1e-12, 113);
    PFloat worst(113);
    for (const Rational& lambda : {Rational(0), Rational(1)})
        for (int i = 1; i <= 10; ++i)
            for (int j = 1; j <= 10; ++j) {
                const auto q = quadrature_element(i, j, lambda, (i + j + 4) / 2 + 1, 113);
                worst = std::max({worst, abs(q.overlap - to_float(overlap_element(i, j), 113)),
                                  abs(q.hamiltonian - to_float(hamiltonian_element(i, j, lambda), 113))});
            }
    return {worst <= tol, "max deviation " + format_scientific(worst)};
}

Outcome exactness() {
    for (int n = 1; n <= 20; ++n) {
        const auto s = build_matrices({Rational(0), n}).overlap;
        const auto f = ldlt(s);
        if (reconstruct(f) != s.dense()) return {false, "reconstruction differs at N=" + std::to_string(n)};
        for (const auto& d : f.diag)
            if (d.sign() <= 0) return {false, "non-positive pivot at N=" + std::to_string(n)};
    }
    return {true, "LDL' = S exactly, all pivots positive, N = 1..20"};
}

Outcome properties() {
    std::mt19937_64 rng(20240611);
    const PFloat tol = default_tolerance(P);
    int pencils = 0;
    PFloat worst(P);
    while (pencils < 200) {
        const Rational s11 = oracle::random_rational(rng), s12 = oracle::random_rational(rng), s22 = oracle::random_rational(rng);
        if (s11.sign() <= 0 || s11 * s22 - s12 * s12 <= Rational(0)) continue;
        const Rational h11 = oracle::random_rational(rng), h12 = oracle::random_rational(rng), h22 = oracle::random_rational(rng);
        SymMatrix<Rational> h(2, Rational(0)), s(2, Rational(0));
        h.set(0, 0, h11), h.set(0, 1, h12), h.set(1, 1, h22);
        s.set(0, 0, s11), s.set(0, 1, s12), s.set(1, 1, s22);
        const auto [w1, w2] = oracle::pencil_roots_2x2(h11, h12, h22, s11, s12, s22, P);
        const auto sol = solve_generalized(h, s, Route::ldlt, P);
        const PFloat scale = std::max({abs(w1), abs(w2), PFloat(1, P)});
        worst = std::max({worst, abs(sol.ritz_values[0] - w1) / scale, abs(sol.ritz_values[1] - w2) / scale});
        ++pencils;
    }
    bool bitwise = true;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 6;
        SymMatrix<Rational> h(n, Rational(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) h.set(i, j, oracle::random_rational(rng));
        const Spectrum plain = jacobi_eigensym(to_float(h, P));
        const auto sol = solve_generalized(h, SymMatrix<Rational>::identity(n, Rational(0)), Route::ldlt, P);
        bitwise = bitwise && sol.ritz_values == plain.values;
    }
    return {worst <= tol && bitwise,
            "200 pencils, max relative error " + format_scientific(worst) + (bitwise ? ", S=I bitwise equal" : ", S=I differs")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 Table 1 reproduction (lambda=0)", [] { return reproduce_table("0", table_one); }},
        {"2 Table 2 reproduction (lambda=1)", [] { return reproduce_table("1", table_two); }},
        {"3 closed-form N=2 suite", closed_form_suite},
        {"4 exact limit and upper bounds", exact_limit},
        {"5 route equivalence", route_equivalence},
        {"6 monotonicity", monotonicity},
        {"7 quadrature oracle", quadrature_oracle},
        {"8 exact LDL' certificate", exactness},
        {"9 random pencils and S=I", properties},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::ostringstream time;
        time.precision(2);
        time << std::fixed << secs;
        std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << "  [" << o.detail << "; " << time.str() << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
