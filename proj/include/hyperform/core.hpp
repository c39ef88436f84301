#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hyperform {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: wrong dimensions, out-of-range labels, non-group matrices.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A decomposition produced a factor outside the expected subgroup.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Evaluation at or too close to a singularity (Gamma poles, lambda = 0).
class PoleError : public Error {
public:
    using Error::Error;
};

/// A series or quadrature failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, int iterations, double last_term)
        : Error(what + " (iterations=" + std::to_string(iterations) +
                ", last term=" + std::to_string(last_term) + ")"),
          iterations_(iterations), last_term_(last_term) {}
    int iterations() const { return iterations_; }
    double last_term() const { return last_term_; }

private:
    int iterations_;
    double last_term_;
};

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline int binomial_int(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

} // namespace hyperform
