#pragma once

// Text renderings of convergence reports: significant-digit numbers, CSV, JSON and
// aligned tables.

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rayleigh_ritz/study.hpp"

namespace rr {

/// truncate: drop digits past the last shown one (how the reference tables were printed),
/// after discarding rounding noise below half the working precision.
/// nearest: round half to even.
enum class Rounding { truncate, nearest };

inline Rounding parse_rounding(const std::string& name) {
    if (name == "truncate") return Rounding::truncate;
    if (name == "nearest") return Rounding::nearest;
    throw std::invalid_argument("unknown rounding mode '" + name + "'");
}

/// `digits` significant digits, fixed notation for magnitudes in [1e-4, 10^digits),
/// scientific otherwise.
inline std::string format_significant(const PFloat& x, int digits, Rounding mode = Rounding::truncate) {
    if (digits < 1) throw std::invalid_argument("need at least one significant digit");
    if (mpfr_nan_p(x.get())) return "nan";
    if (mpfr_inf_p(x.get())) return x.sign() < 0 ? "-inf" : "inf";
    if (x.is_zero()) return digits == 1 ? "0" : "0." + std::string(static_cast<std::size_t>(digits - 1), '0');

    // Truncation first rounds to about half the working precision so that a result
    // like 5 - 1e-77 prints as 5, not 4.999...
    const int guarded = std::max(digits + 2, static_cast<int>(static_cast<double>(x.precision()) * 0.30103 / 2));
    const int requested = mode == Rounding::truncate ? guarded : digits;
    mpfr_exp_t exp = 0;
    std::unique_ptr<char, void (*)(char*)> raw(
        mpfr_get_str(nullptr, &exp, 10, static_cast<std::size_t>(requested), x.get(), MPFR_RNDN), mpfr_free_str);
    std::string d(raw.get());
    std::string sign;
    if (d[0] == '-') {
        sign = "-";
        d.erase(0, 1);
    }
    d.resize(static_cast<std::size_t>(digits));
    // value = 0.d × 10^exp
    if (exp >= 1 && exp <= digits) {
        std::string out = sign + d.substr(0, static_cast<std::size_t>(exp));
        if (static_cast<std::size_t>(exp) < d.size()) out += "." + d.substr(static_cast<std::size_t>(exp));
        return out;
    }
    if (exp <= 0 && exp > -4) return sign + "0." + std::string(static_cast<std::size_t>(-exp), '0') + d;
    std::ostringstream os;
    os << sign << d[0];
    if (d.size() > 1) os << "." << d.substr(1);
    const long e = static_cast<long>(exp) - 1;
    os << "e" << (e < 0 ? "-" : "+") << (e < 0 ? -e : e);
    return os.str();
}

/// Short scientific rendering for residuals and diagnostics.
inline std::string format_scientific(const PFloat& x, int digits = 3) {
    if (x.is_zero()) return "0";
    mpfr_exp_t exp = 0;
    std::unique_ptr<char, void (*)(char*)> raw(
        mpfr_get_str(nullptr, &exp, 10, static_cast<std::size_t>(digits), x.get(), MPFR_RNDN), mpfr_free_str);
    std::string d(raw.get());
    std::string sign;
    if (d[0] == '-') {
        sign = "-";
        d.erase(0, 1);
    }
    const long e = static_cast<long>(exp) - 1;
    return sign + d.substr(0, 1) + "." + d.substr(1) + "e" + (e < 0 ? "-" : "+") + std::to_string(e < 0 ? -e : e);
}

struct FormatOptions {
    int digits = 10;
    Rounding rounding = Rounding::truncate;
};

inline std::string to_csv(const ConvergenceReport& report, const FormatOptions& opt = {}) {
    std::ostringstream os;
    os << "N";
    for (int m = 1; m <= report.states; ++m) os << ",E" << m;
    os << "\n";
    for (const auto& row : report.rows) {
        os << row.n;
        for (const auto& v : row.values) os << "," << format_significant(v, opt.digits, opt.rounding);
        os << "\n";
    }
    return os.str();
}

inline nlohmann::ordered_json to_json(const ConvergenceReport& report, const FormatOptions& opt = {}) {
    nlohmann::ordered_json j;
    j["lambda"] = report.lambda.to_string();
    j["precision"] = report.precision;
    j["route"] = std::string(to_string(report.route));
    j["states"] = report.states;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["n"] = row.n;
        r["values"] = nlohmann::ordered_json::array();
        for (const auto& v : row.values) r["values"].push_back(format_significant(v, opt.digits, opt.rounding));
        j["rows"].push_back(std::move(r));
    }
    return j;
}

/// Right-aligned columns: N, E1 .. Ek.
inline std::string to_table(const ConvergenceReport& report, const FormatOptions& opt = {}) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"N"};
    for (int m = 1; m <= report.states; ++m) header.push_back("E" + std::to_string(m));
    cells.push_back(header);
    for (const auto& row : report.rows) {
        std::vector<std::string> line{std::to_string(row.n)};
        for (const auto& v : row.values) line.push_back(format_significant(v, opt.digits, opt.rounding));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    std::ostringstream os;
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c > 0) os << "  ";
            os << std::string(width[c] - line[c].size(), ' ') << line[c];
        }
        os << "\n";
    }
    return os.str();
}

/// Smallest precision in start, 2·start, ... whose report agrees textually with the
/// report at twice that precision. Throws no_convergence if 640 bits is reached first.
inline precision_bits select_precision(const Rational& lambda, int n_min, int n_max, int states, Route route,
                                       const FormatOptions& opt, precision_bits start = 64) {
    auto render = [&](precision_bits bits) -> std::optional<std::string> {
        try {
            return to_csv(run_convergence(lambda, n_min, n_max, states, bits, route), opt);
        } catch (const error&) {
            return std::nullopt;
        }
    };
    precision_bits p = std::max(start, min_precision);
    std::optional<std::string> current = render(p);
    while (2 * p <= max_pi_precision) {
        std::optional<std::string> doubled = render(2 * p);
        if (current && doubled && *doubled == *current) return p;
        current = std::move(doubled);
        p *= 2;
    }
    throw no_convergence("no precision up to " + std::to_string(max_pi_precision) + " bits stabilizes the output");
}

}  // namespace rr
