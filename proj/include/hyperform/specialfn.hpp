#pragma once

#include "hyperform/core.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace hyperform {

// ---- Gamma

namespace detail {
// Lanczos coefficients for g = 607/128 (15 terms).
inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr std::array<double, 15> lanczos_c = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

inline bool near_nonpositive_integer(cplx z, double eps = 1e-13) {
    if (std::abs(z.imag()) > eps || z.real() > eps) return false;
    return std::abs(z.real() - std::round(z.real())) < eps;
}
} // namespace detail

inline bool is_gamma_pole(cplx z) { return detail::near_nonpositive_integer(z); }

/// log Gamma(z) on the principal sheet away from the poles (imaginary part defined modulo 2 pi).
inline cplx lgamma_c(cplx z) {
    if (is_gamma_pole(z)) return {std::numeric_limits<double>::infinity(), 0.0};
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return std::log(pi) - std::log(std::sin(pi * z)) - lgamma_c(1.0 - z);
    }
    z -= 1.0;
    cplx x = detail::lanczos_c[0];
    for (int i = 1; i < 15; ++i) x += detail::lanczos_c[i] / (z + static_cast<double>(i));
    cplx t = z + detail::lanczos_g + 0.5;
    return 0.5 * std::log(2 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

/// Gamma(z); returns +inf (the pole flag) at non-positive integers.
inline cplx gamma_c(cplx z) {
    if (is_gamma_pole(z)) return {std::numeric_limits<double>::infinity(), 0.0};
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_c(1.0 - z));
    return std::exp(lgamma_c(z));
}

/// 1 / Gamma(z), zero at the poles.
inline cplx rgamma_c(cplx z) {
    if (is_gamma_pole(z)) return 0.0;
    if (z.real() < 0.5) return std::sin(pi * z) / pi * std::exp(lgamma_c(1.0 - z));
    return std::exp(-lgamma_c(z));
}

// ---- 2F1

namespace detail {
inline cplx hyp_series(cplx a, cplx b, cplx c, double w, int max_terms, bool& converged) {
    cplx sum = 1.0, term = 1.0;
    double kmin = std::abs(a) + std::abs(b) + 2.0;
    converged = false;
    for (int k = 0; k < max_terms; ++k) {
        double kk = k;
        term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * w;
        sum += term;
        if (term == 0.0 || (kk >= kmin && std::abs(term) <= 1e-17 * std::abs(sum))) {
            converged = true;
            return sum;
        }
    }
    return sum;
}
} // namespace detail

/// 2F1(a, b; c; z) for real z <= 0 through the Pfaff transform w = z / (z - 1).
inline cplx hyp2f1_negz(cplx a, cplx b, cplx c, double z) {
    if (z > 0) throw ValidationError("hyp2f1_negz: argument must be <= 0");
    if (is_gamma_pole(c)) throw PoleError("hyp2f1_negz: c is a non-positive integer");
    if (z == 0.0) return 1.0;
    double w = z / (z - 1.0);
    cplx pre = std::exp(-a * std::log1p(-z));
    cplx bb = c - b;
    bool terminating = detail::near_nonpositive_integer(a, 1e-14) || detail::near_nonpositive_integer(bb, 1e-14);
    int budget = (w <= 0.9 || terminating) ? 20000 : 200000;
    bool ok = false;
    cplx s = detail::hyp_series(a, bb, c, w, budget, ok);
    if (!ok) throw ConvergenceError("hyp2f1_negz: series did not converge at w = " + std::to_string(w), budget, 0.0);
    return pre * s;
}

// ---- Jacobi functions

struct JacobiParams {
    double alpha;
    double beta;
    cplx lambda;
};

inline constexpr double jacobi_switch_tanh2 = 0.9;

inline double jacobi_switch_t() { return std::atanh(std::sqrt(jacobi_switch_tanh2)); }

inline void check_jacobi(const JacobiParams& par) {
    if (detail::near_nonpositive_integer(par.alpha + 1.0))
        throw ValidationError("Jacobi: alpha must not be a negative integer");
}

/// c_{alpha,beta}(lambda).
inline cplx c_jacobi(double alpha, double beta, cplx lambda) {
    cplx il = I * lambda;
    if (is_gamma_pole(il)) throw PoleError("c_jacobi: i*lambda is a pole of Gamma");
    double r = alpha + beta + 1.0;
    cplx num = (-il + r) * std::log(2.0) + lgamma_c(alpha + 1.0) + lgamma_c(il);
    cplx d1 = (il + r) / 2.0, d2 = (il + alpha - beta + 1.0) / 2.0;
    if (is_gamma_pole(d1) || is_gamma_pole(d2)) return 0.0;
    return std::exp(num - lgamma_c(d1) - lgamma_c(d2));
}

/// e^{(alpha+beta+1) t} Psi_lambda(t) for t >= 0.5.
inline cplx jacobi_psi_scaled(const JacobiParams& par, double t) {
    check_jacobi(par);
    if (t < 0.5) throw ValidationError("jacobi_psi: t must be >= 0.5");
    cplx il = I * par.lambda;
    if (is_gamma_pole(1.0 - il)) throw PoleError("jacobi_psi: 1 - i*lambda is a non-positive integer");
    double r = par.alpha + par.beta + 1.0;
    double sh = std::sinh(t);
    cplx F = hyp2f1_negz((r - il) / 2.0, (-par.alpha + par.beta + 1.0 - il) / 2.0, 1.0 - il, -1.0 / (sh * sh));
    double l1 = std::log1p(-std::exp(-2 * t));
    return std::exp(il * t + (il - r) * l1) * F;
}

inline cplx jacobi_psi(const JacobiParams& par, double t) {
    return jacobi_psi_scaled(par, t) * std::exp(-(par.alpha + par.beta + 1.0) * t);
}

namespace detail {
inline cplx jacobi_phi_series(const JacobiParams& par, double t) {
    cplx il = I * par.lambda;
    double r = par.alpha + par.beta + 1.0;
    double sh = std::sinh(t);
    return hyp2f1_negz((il + r) / 2.0, (-il + r) / 2.0, par.alpha + 1.0, -sh * sh);
}

inline bool connection_has_pole(const JacobiParams& par) {
    cplx il = I * par.lambda;
    return std::abs(il.imag()) < 1e-13 && std::abs(il.real() - std::round(il.real())) < 1e-13;
}

inline bool series_terminates(const JacobiParams& par) {
    cplx il = I * par.lambda;
    double r = par.alpha + par.beta + 1.0;
    cplx a = (il + r) / 2.0, cb = par.alpha + 1.0 - (-il + r) / 2.0;
    return near_nonpositive_integer(a, 1e-14) || near_nonpositive_integer(cb, 1e-14);
}
} // namespace detail

/// e^{(alpha+beta+1) t} phi_lambda(t); avoids underflow at large t.
inline cplx jacobi_phi_scaled(const JacobiParams& par, double t) {
    check_jacobi(par);
    if (t < 0) throw ValidationError("jacobi_phi: t must be >= 0");
    double r = par.alpha + par.beta + 1.0;
    double ts = jacobi_switch_t();
    if (t <= ts || detail::series_terminates(par) || (detail::connection_has_pole(par) && t < 6.0))
        return detail::jacobi_phi_series(par, t) * std::exp(r * t);
    if (detail::connection_has_pole(par)) throw PoleError("jacobi_phi: lambda on the lattice i*Z at large t");
    JacobiParams neg{par.alpha, par.beta, -par.lambda};
    return c_jacobi(par.alpha, par.beta, par.lambda) * jacobi_psi_scaled(par, t) +
           c_jacobi(par.alpha, par.beta, -par.lambda) * jacobi_psi_scaled(neg, t);
}

inline cplx jacobi_phi(const JacobiParams& par, double t) {
    double r = par.alpha + par.beta + 1.0;
    if (t <= jacobi_switch_t()) {
        check_jacobi(par);
        if (t < 0) throw ValidationError("jacobi_phi: t must be >= 0");
        return detail::jacobi_phi_series(par, t);
    }
    return jacobi_phi_scaled(par, t) * std::exp(-r * t);
}

} // namespace hyperform
