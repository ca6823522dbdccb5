#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rr {

/// Base class of every failure raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class negative_operand : public error {
public:
    negative_operand() : error("square root of a negative operand") {}
};

class precision_unsupported : public error {
public:
    explicit precision_unsupported(long bits)
        : error("precision of " + std::to_string(bits) + " bits is not supported"), bits_(bits) {}
    long bits() const noexcept { return bits_; }

private:
    long bits_;
};

class dimension_mismatch : public error {
public:
    explicit dimension_mismatch(const std::string& where) : error("dimension mismatch in " + where) {}
};

/// Raised by the unpivoted LDL^T when the leading minor of order `minor` is singular.
class zero_pivot : public error {
public:
    explicit zero_pivot(std::size_t minor)
        : error("zero pivot at leading minor " + std::to_string(minor)), minor_(minor) {}
    std::size_t minor() const noexcept { return minor_; }

private:
    std::size_t minor_;
};

class not_positive_definite : public error {
public:
    not_positive_definite() : error("matrix is not positive definite") {}
};

class no_convergence : public error {
public:
    explicit no_convergence(const std::string& what) : error("no convergence: " + what) {}
};

class singular_overlap : public error {
public:
    explicit singular_overlap(const std::string& detail)
        : error("overlap matrix is singular or indefinite (" + detail + ")") {}
};

class zero_norm : public error {
public:
    explicit zero_norm(std::size_t column)
        : error("column " + std::to_string(column) + " has non-positive S-norm"), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class insufficient_nodes : public error {
public:
    insufficient_nodes(int given, int required)
        : error("quadrature needs at least " + std::to_string(required) + " nodes, got " +
                std::to_string(given)) {}
};

class unsupported_lambda : public error {
public:
    explicit unsupported_lambda(const std::string& lambda)
        : error("no reference spectrum for lambda = " + lambda) {}
};

class state_count_mismatch : public error {
public:
    state_count_mismatch(std::size_t have, std::size_t need)
        : error("reference covers " + std::to_string(have) + " states, " + std::to_string(need) +
                " requested") {}
};

/// A solver failure inside a convergence study, tagged with the basis size that failed.
class study_error : public error {
public:
    study_error(int basis_size, const std::string& cause)
        : error("N=" + std::to_string(basis_size) + ": " + cause), basis_size_(basis_size) {}
    int basis_size() const noexcept { return basis_size_; }

private:
    int basis_size_;
};

}  // namespace rr
