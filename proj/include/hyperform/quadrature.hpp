#pragma once

#include "hyperform/core.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace hyperform {

struct GaussRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

inline GaussRule gauss_legendre_compute(int m) {
    GaussRule r;
    r.x.resize(m);
    r.w.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= m; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = m * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.x[m - 1 - i] = z;
        r.w[i] = r.w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

inline const GaussRule& gauss_legendre(int m) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, gauss_legendre_compute(m)).first;
    return it->second;
}

/// Fixed-order rule mapped to [a, b].
template <class F>
auto gl_integrate(F&& f, double a, double b, int m) -> decltype(f(a)) {
    const auto& r = gauss_legendre(m);
    double h = 0.5 * (b - a), c = 0.5 * (b + a);
    decltype(f(a)) s = f(c) * 0.0;
    for (int i = 0; i < m; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

namespace detail {
template <class T>
double magnitude(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::abs(v);
    } else if constexpr (std::is_same_v<T, cplx>) {
        return std::abs(v);
    } else {
        return v.cwiseAbs().maxCoeff();
    }
}

template <class F, class T>
T adaptive_rec(F& f, double a, double b, T whole, double tol, int depth, int m, int& evals) {
    double c = 0.5 * (a + b);
    T left = gl_integrate(f, a, c, m), right = gl_integrate(f, c, b, m);
    evals += 2 * m;
    T both = left + right;
    if (magnitude<T>(both - whole) <= tol || depth <= 0) return both;
    return adaptive_rec(f, a, c, left, 0.5 * tol, depth - 1, m, evals) +
           adaptive_rec(f, c, b, right, 0.5 * tol, depth - 1, m, evals);
}
} // namespace detail

/// Adaptive Gauss-Legendre: bisect until the two-panel estimate matches the one-panel estimate to tol.
/// The interval is first split into panels no longer than max_panel, which keeps oscillatory integrands resolved.
template <class F>
auto adaptive_gl(F&& f, double a, double b, double tol = 1e-10, double max_panel = 2.0, int m = 16)
    -> decltype(f(a)) {
    using T = decltype(f(a));
    if (b <= a) return f(a) * 0.0;
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    double h = (b - a) / panels;
    T total = f(a) * 0.0;
    int evals = 0;
    for (int k = 0; k < panels; ++k) {
        double lo = a + k * h, hi = lo + h;
        T whole = gl_integrate(f, lo, hi, m);
        // tolerances below the roundoff of int |f| over the panel cannot be met
        double l1 = gl_integrate([&](double x) { return detail::magnitude(f(x)); }, lo, hi, m);
        double floor = 256 * std::numeric_limits<double>::epsilon() * l1;
        total += detail::adaptive_rec(f, lo, hi, whole, std::max(tol / panels, floor), 16, m, evals);
    }
    return total;
}

} // namespace hyperform
