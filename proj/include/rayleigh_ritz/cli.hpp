#pragma once

// Command-line front end. `run_cli` is the whole program; tools/rritz.cpp only
// forwards argv to it.
//
// Exit codes: 0 success, 2 usage, 3 solver failure, 4 monotonicity violation,
// 5 verification failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rayleigh_ritz/eigen.hpp"
#include "rayleigh_ritz/format.hpp"
#include "rayleigh_ritz/model.hpp"
#include "rayleigh_ritz/study.hpp"

namespace rr::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_solver = 3;
inline constexpr int exit_monotone = 4;
inline constexpr int exit_verify = 5;

enum class Command { solve, converge, verify, elements };
enum class OutputFormat { csv, json, table };

struct RunConfig {
    Command command = Command::solve;
    Rational lambda;
    int n = 0;
    int n_min = 4;
    int n_max = 20;
    int states = 0;  // 0: all for solve, 4 for converge
    precision_bits precision = default_precision;
    Route route = Route::ldlt;
    OutputFormat format = OutputFormat::table;
    FormatOptions numbers;
    std::string output;
    bool auto_precision = false;
    std::string tolerance = "1e-12";
    std::string sqrt_tolerance = "1e-6";
};

class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    if (name == "table") return OutputFormat::table;
    throw usage_error("unknown format '" + name + "'");
}

namespace detail {

inline std::string render(const ConvergenceReport& report, OutputFormat format, const FormatOptions& opt) {
    switch (format) {
        case OutputFormat::csv: return to_csv(report, opt);
        case OutputFormat::json: return to_json(report, opt).dump(2) + "\n";
        case OutputFormat::table: return to_table(report, opt);
    }
    return {};
}

inline PFloat parse_tolerance(const std::string& text, precision_bits prec) {
    try {
        PFloat t = PFloat::parse(text, prec);
        if (t.sign() < 0) throw usage_error("tolerance must be non-negative");
        return t;
    } catch (const std::invalid_argument&) {
        throw usage_error("invalid tolerance '" + text + "'");
    }
}

}  // namespace detail

/// W_1..W_k, the HC = SCW / CᵀSC = I / CᵀHC = W residuals and the unitarity of S^(1/2)C.
inline int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.n < 1) throw usage_error("--n must be >= 1");
    const int states = cfg.states == 0 ? cfg.n : cfg.states;
    if (states < 1 || states > cfg.n) throw usage_error("--states must be in [1, n]");

    const ProblemMatrices m = build_matrices({cfg.lambda, cfg.n});
    const RitzSolution sol = solve_generalized(m.hamiltonian, m.overlap, cfg.route, cfg.precision);
    const Residuals res = residuals(m.hamiltonian, m.overlap, sol);
    const PFloat unitarity = unitarity_check(m.overlap, sol.coefficients);
    const PFloat tol = default_tolerance(cfg.precision);

    ConvergenceReport report{cfg.lambda, states, cfg.precision, cfg.route, {}};
    report.rows.push_back({cfg.n, std::vector<PFloat>(sol.ritz_values.begin(), sol.ritz_values.begin() + states)});

    switch (cfg.format) {
        case OutputFormat::csv: out << to_csv(report, cfg.numbers); break;
        case OutputFormat::json: {
            nlohmann::ordered_json j = to_json(report, cfg.numbers);
            j["residuals"] = {{"secular", format_scientific(res.secular)},
                              {"overlap", format_scientific(res.overlap)},
                              {"hamiltonian", format_scientific(res.hamiltonian)},
                              {"unitarity", format_scientific(unitarity)}};
            out << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::table: {
            out << "lambda     " << cfg.lambda << "\n"
                << "N          " << cfg.n << "\n"
                << "route      " << to_string(cfg.route) << "\n"
                << "precision  " << cfg.precision << "\n\n";
            for (int k = 0; k < states; ++k)
                out << "W" << (k + 1) << "  " << format_significant(sol.ritz_values[k], cfg.numbers.digits, cfg.numbers.rounding)
                    << "\n";
            out << "\nmax|HC - SCW|   " << format_scientific(res.secular) << "\n"
                << "max|C'SC - I|   " << format_scientific(res.overlap) << "\n"
                << "max|C'HC - W|   " << format_scientific(res.hamiltonian) << "\n"
                << "max|U'U - I|    " << format_scientific(unitarity) << "\n";
            break;
        }
    }
    if (!residuals_within(res, sol, tol) || unitarity > tol) {
        err << "error: residuals exceed tolerance " << format_scientific(tol) << "\n";
        return exit_solver;
    }
    return exit_ok;
}

inline int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const int states = cfg.states == 0 ? 4 : cfg.states;
    if (cfg.n_min < 1 || cfg.n_min > cfg.n_max) throw usage_error("need 1 <= --n-min <= --n-max");
    if (states < 1 || states > cfg.n_min) throw usage_error("--states must be in [1, n-min]");

    precision_bits prec = cfg.precision;
    if (cfg.auto_precision) {
        prec = select_precision(cfg.lambda, cfg.n_min, cfg.n_max, states, cfg.route, cfg.numbers);
        err << "selected precision: " << prec << " bits\n";
    }
    const ConvergenceReport report = run_convergence(cfg.lambda, cfg.n_min, cfg.n_max, states, prec, cfg.route);
    out << detail::render(report, cfg.format, cfg.numbers);

    const auto violations = check_monotone(report);
    for (const auto& v : violations)
        err << "monotonicity violation: E" << v.state << " rises from N=" << v.n_before << " ("
            << format_significant(v.before, cfg.numbers.digits, cfg.numbers.rounding) << ") to N=" << v.n_after << " ("
            << format_significant(v.after, cfg.numbers.digits, cfg.numbers.rounding) << ")\n";
    return violations.empty() ? exit_ok : exit_monotone;
}

/// The closed-form N = 2, lambda = 0 identities.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const precision_bits p = cfg.precision;
    const PFloat tol = detail::parse_tolerance(cfg.tolerance, p);
    const PFloat sqrt_tol = detail::parse_tolerance(cfg.sqrt_tolerance, p);
    auto num = [p](long v) { return PFloat(v, p); };
    auto root = [](const PFloat& x) { return sqrt_pf(x); };
    auto rel = [](const PFloat& got, const PFloat& want) { return abs(got - want) / abs(want); };

    const ProblemMatrices m = build_matrices({Rational(0), 2});
    const RitzSolution sol = solve_generalized(m.hamiltonian, m.overlap, cfg.route, p);
    const Residuals res = residuals(m.hamiltonian, m.overlap, sol);

    bool all_pass = true;
    auto report = [&](bool pass, const std::string& name, const PFloat& deviation) {
        all_pass = all_pass && pass;
        out << (pass ? "PASS  " : "FAIL  ") << name << "  (deviation " << format_scientific(deviation) << ")\n";
    };

    {
        const PFloat d = std::max(rel(sol.ritz_values[0], num(5)), rel(sol.ritz_values[1], num(21)));
        report(d <= tol, "Ritz values W = (5, 21)", d);
    }
    {
        const PFloat d = std::max(res.overlap, res.hamiltonian);
        report(d <= tol, "C'SC = I and C'HC = W", d);
    }
    {
        const Spectrum s = jacobi_eigensym(to_float(m.overlap, p));
        const PFloat r74 = root(num(74));
        const PFloat d = std::max(rel(s.values[0], (num(9) - r74) / 420L), rel(s.values[1], (num(9) + r74) / 420L));
        report(d <= tol, "S eigenvalues (9 -+ sqrt 74)/420", d);
    }
    {
        const Spectrum h = jacobi_eigensym(to_float(m.hamiltonian, p));
        const PFloat r34 = root(num(34));
        const PFloat d = std::max(rel(h.values[0], (num(7) - r34) / 60L), rel(h.values[1], (num(7) + r34) / 60L));
        report(d <= tol, "H eigenvalues (7 -+ sqrt 34)/60", d);
    }
    {
        const SymMatrix<PFloat> half = matrix_sqrt(to_float(m.overlap, p));
        const PFloat seven_r7 = num(7) * root(num(7));
        const PFloat printed11 = root(num(233) / 8880L + seven_r7 / 8880L);
        const PFloat printed12 = root(num(21) / 2960L - seven_r7 / 8880L);
        const PFloat printed22 = root(num(151) / 62160L + seven_r7 / 8880L);
        const PFloat d = std::max({abs(half(0, 0) - printed11), abs(half(0, 1) - printed12), abs(half(1, 1) - printed22)});
        report(d <= sqrt_tol, "S^(1/2) matches the closed-form entries", d);
    }
    {
        const PFloat d = unitarity_check(m.overlap, sol.coefficients);
        report(d <= tol, "U = S^(1/2) C is unitary", d);
    }
    return all_pass ? exit_ok : exit_verify;
}

/// Exact S_ij, H_ij for i <= j <= n and their deviation from Gauss-Legendre quadrature.
inline int cmd_elements(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.n < 1) throw usage_error("--n must be >= 1");
    const int nodes = cfg.n + 3;
    struct Entry {
        int i, j;
        Rational s, h;
        PFloat ds, dh;
    };
    std::vector<Entry> entries;
    PFloat worst(cfg.precision);
    for (int i = 1; i <= cfg.n; ++i)
        for (int j = i; j <= cfg.n; ++j) {
            const Rational s = overlap_element(i, j);
            const Rational h = hamiltonian_element(i, j, cfg.lambda);
            const QuadratureElement q = quadrature_element(i, j, cfg.lambda, nodes, cfg.precision);
            PFloat ds = abs(q.overlap - to_float(s, cfg.precision));
            PFloat dh = abs(q.hamiltonian - to_float(h, cfg.precision));
            worst = std::max({worst, ds, dh});
            entries.push_back({i, j, s, h, std::move(ds), std::move(dh)});
        }

    switch (cfg.format) {
        case OutputFormat::csv:
            out << "i,j,S,H,dS,dH\n";
            for (const auto& e : entries)
                out << e.i << "," << e.j << "," << e.s << "," << e.h << "," << format_scientific(e.ds) << ","
                    << format_scientific(e.dh) << "\n";
            break;
        case OutputFormat::json: {
            nlohmann::ordered_json j;
            j["lambda"] = cfg.lambda.to_string();
            j["n"] = cfg.n;
            j["precision"] = cfg.precision;
            j["elements"] = nlohmann::ordered_json::array();
            for (const auto& e : entries)
                j["elements"].push_back({{"i", e.i}, {"j", e.j}, {"S", e.s.to_string()}, {"H", e.h.to_string()},
                                         {"dS", format_scientific(e.ds)}, {"dH", format_scientific(e.dh)}});
            j["max_delta"] = format_scientific(worst);
            out << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::table: {
            std::size_t ws = 4, wh = 4;
            for (const auto& e : entries) {
                ws = std::max(ws, e.s.to_string().size());
                wh = std::max(wh, e.h.to_string().size());
            }
            auto pad = [](const std::string& s, std::size_t w) { return std::string(w - s.size(), ' ') + s; };
            out << " i   j  " << pad("S_ij", ws) << "  " << pad("H_ij", wh) << "  quadrature |dS|, |dH|\n";
            for (const auto& e : entries)
                out << pad(std::to_string(e.i), 2) << "  " << pad(std::to_string(e.j), 2) << "  " << pad(e.s.to_string(), ws)
                    << "  " << pad(e.h.to_string(), wh) << "  " << format_scientific(e.ds) << ", "
                    << format_scientific(e.dh) << "\n";
            out << "max quadrature deviation " << format_scientific(worst) << " (" << nodes << " Gauss-Legendre nodes, "
                << cfg.precision << " bits)\n";
            break;
        }
    }
    return exit_ok;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    switch (cfg.command) {
        case Command::solve: return cmd_solve(cfg, out, err);
        case Command::converge: return cmd_converge(cfg, out, err);
        case Command::verify: return cmd_verify(cfg, out, err);
        case Command::elements: return cmd_elements(cfg, out, err);
    }
    return exit_usage;
}

/// `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rayleigh-Ritz solver for HC = SCW in a non-orthogonal polynomial basis", "rritz"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string lambda = "0", route = "ldlt", format = "table", rounding = "truncate";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--lambda", lambda, "potential strength, fraction p/q or decimal")->capture_default_str();
        sub->add_option("--precision", cfg.precision, "significand bits, 53..640")->capture_default_str();
        sub->add_option("--route", route, "invsqrt | ldlt | nonsym")->capture_default_str();
        sub->add_option("--format", format, "csv | json | table")->capture_default_str();
        sub->add_option("--digits", cfg.numbers.digits, "significant digits printed")->capture_default_str();
        sub->add_option("--rounding", rounding, "truncate | nearest")->capture_default_str();
        sub->add_option("--output,-o", cfg.output, "write to this file instead of standard output");
    };

    CLI::App* solve = app.add_subcommand("solve", "Ritz values and residual diagnostics for one basis size");
    add_common(solve);
    solve->add_option("--n", cfg.n, "basis size")->required();
    solve->add_option("--states", cfg.states, "number of Ritz values printed (default: all)");

    CLI::App* converge = app.add_subcommand("converge", "convergence table over a range of basis sizes");
    add_common(converge);
    converge->add_option("--n-min", cfg.n_min, "smallest basis size")->capture_default_str();
    converge->add_option("--n-max", cfg.n_max, "largest basis size")->capture_default_str();
    converge->add_option("--states", cfg.states, "Ritz values per row (default 4)");
    converge->add_flag("--auto-precision", cfg.auto_precision, "double the precision until the output is stable");

    CLI::App* verify = app.add_subcommand("verify", "closed-form checks of the N=2, lambda=0 example");
    verify->add_option("--precision", cfg.precision, "significand bits, 53..640")->capture_default_str();
    verify->add_option("--route", route, "invsqrt | ldlt | nonsym")->capture_default_str();
    verify->add_option("--tolerance", cfg.tolerance, "bound for the exact identities")->capture_default_str();
    verify->add_option("--sqrt-tolerance", cfg.sqrt_tolerance, "bound for the S^(1/2) comparison")->capture_default_str();

    CLI::App* elements = app.add_subcommand("elements", "exact matrix elements with quadrature cross-check");
    add_common(elements);
    elements->add_option("--n", cfg.n, "basis size")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }

    try {
        if (solve->parsed()) cfg.command = Command::solve;
        if (converge->parsed()) cfg.command = Command::converge;
        if (verify->parsed()) cfg.command = Command::verify;
        if (elements->parsed()) cfg.command = Command::elements;
        try {
            cfg.lambda = Rational::parse(lambda);
            cfg.route = parse_route(route);
            cfg.numbers.rounding = parse_rounding(rounding);
        } catch (const std::exception& e) {
            throw usage_error(e.what());
        }
        cfg.format = parse_format(format);
        if (cfg.precision < min_precision || cfg.precision > max_pi_precision)
            throw usage_error("--precision must be in [53, 640]");
        if (cfg.numbers.digits < 1 || cfg.numbers.digits > 100) throw usage_error("--digits must be in [1, 100]");

        if (cfg.output.empty()) return dispatch(cfg, out, err);
        std::ostringstream buffer;
        const int code = dispatch(cfg, buffer, err);
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) {
            err << "error: cannot open " << cfg.output << "\n";
            return exit_usage;
        }
        file << buffer.str();
        return code;
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const error& e) {
        err << "solver error: " << e.what() << "\n";
        return exit_solver;
    }
}

}  // namespace rr::cli
