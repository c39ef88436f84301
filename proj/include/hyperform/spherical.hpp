#pragma once

#include "hyperform/extrep.hpp"
#include "hyperform/liegroup.hpp"
#include "hyperform/specialfn.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace hyperform {

inline constexpr double lambda_min = 1e-6;

struct SpectralPoint {
    BundleSpec spec;
    MLabel sigma;
    double lambda = 1.0;

    static SpectralPoint make(const BundleSpec& spec, const MLabel& sigma, double lambda) {
        SpectralPoint pt{spec, sigma, lambda};
        pt.validate();
        return pt;
    }

    void validate() const {
        spec.validate();
        tau_rep(spec).require(sigma);
        if (!std::isfinite(lambda) || std::abs(lambda) < lambda_min)
            throw ValidationError("SpectralPoint: |lambda| must be >= 1e-6");
    }

    double rho() const { return spec.rho(); }
};

struct SphericalValue {
    double t = 0.0;
    std::map<MLabel, cplx> components;
};

namespace detail {

// e^{rho t} phi_eta(t) for every eta, at possibly complex lambda.
inline std::map<MLabel, cplx> components_scaled(const BundleSpec& spec, const MLabel& sigma, cplx lambda, double t) {
    tau_rep(spec).require(sigma);
    const int n = spec.n, p = spec.p;
    const double nd = n, pd = p;
    std::map<MLabel, cplx> out;
    if (spec.case_type() == CaseType::half_even) {
        cplx C = jacobi_phi_scaled({nd / 2 - 1, nd / 2 + 1, 2.0 * lambda}, t / 2);
        double h = 0.5 * (1.0 + std::exp(-t));
        out[MLabel::Q(p)] = h * h * C;
        return out;
    }
    cplx A = jacobi_phi_scaled({nd / 2 - 1, -0.5, lambda}, t);
    cplx Bs = jacobi_phi_scaled({nd / 2, -0.5, lambda}, t);
    double em2 = std::exp(-2 * t);
    cplx B = std::exp(-t) * Bs;
    cplx coshB = 0.5 * (1.0 + em2) * Bs;
    cplx sinhB = 0.5 * (1.0 - em2) * Bs;
    if (spec.case_type() == CaseType::generic) {
        if (sigma == MLabel::Q(p)) {
            out[MLabel::Q(p - 1)] = B;
            out[MLabel::Q(p)] = (nd / (nd - pd)) * A - (pd / (nd - pd)) * coshB;
        } else {
            out[MLabel::Q(p - 1)] = (nd / pd) * A - ((nd - pd) / pd) * coshB;
            out[MLabel::Q(p)] = B;
        }
        return out;
    }
    // p = (n-1)/2
    if (sigma == MLabel::Q(p - 1)) {
        out[MLabel::Q(p - 1)] = (2 * nd / (nd - 1)) * A - ((nd + 1) / (nd - 1)) * coshB;
        out[MLabel::Plus()] = B;
        out[MLabel::Minus()] = B;
        return out;
    }
    cplx X = (2 * nd / (nd + 1)) * A - ((nd - 1) / (nd + 1)) * coshB;
    cplx Y = (2.0 * I * lambda / (nd + 1)) * sinhB;
    double s = sigma == MLabel::Plus() ? 1.0 : -1.0;
    out[MLabel::Q(p - 1)] = B;
    out[MLabel::Plus()] = X + s * Y;
    out[MLabel::Minus()] = X - s * Y;
    return out;
}

} // namespace detail

/// Scalars phi_eta(t) with Phi(a_t) = sum_eta phi_eta(t) P_eta.
inline SphericalValue scalar_components(const SpectralPoint& pt, double t) {
    pt.validate();
    if (t < 0) throw ValidationError("scalar_components: t must be >= 0");
    SphericalValue v;
    v.t = t;
    double f = std::exp(-pt.rho() * t);
    for (auto& [k, c] : detail::components_scaled(pt.spec, pt.sigma, pt.lambda, t)) v.components[k] = c * f;
    return v;
}

/// Same scalars multiplied by e^{rho t}.
inline SphericalValue scalar_components_scaled(const SpectralPoint& pt, double t) {
    pt.validate();
    if (t < 0) throw ValidationError("scalar_components: t must be >= 0");
    SphericalValue v;
    v.t = t;
    v.components = detail::components_scaled(pt.spec, pt.sigma, pt.lambda, t);
    return v;
}

/// c_sigma(lambda, tau) including the d_{tau,sigma} factor: e^{(rho - i lambda) t} phi_sigma(t) -> c_sigma.
inline cplx c_sigma(const BundleSpec& spec, const MLabel& sigma, cplx lambda) {
    tau_rep(spec).require(sigma);
    const double nd = spec.n, pd = spec.p, rho = spec.rho();
    cplx il = I * lambda;
    switch (spec.case_type()) {
    case CaseType::half_even:
        return 0.25 * c_jacobi(nd / 2 - 1, nd / 2 + 1, 2.0 * lambda);
    case CaseType::half_odd:
        if (sigma.is_chiral()) return (2.0 * il / (nd + 1)) * c_jacobi(nd / 2, -0.5, lambda);
        return ((il - 1.0) / (nd - 1)) * c_jacobi(nd / 2, -0.5, lambda);
    default:
        if (sigma == MLabel::Q(spec.p)) return ((il + rho - pd) / (2 * (nd - pd))) * c_jacobi(nd / 2, -0.5, lambda);
        return ((il - rho + pd - 1.0) / (2 * pd)) * c_jacobi(nd / 2, -0.5, lambda);
    }
}

inline cplx c_sigma(const SpectralPoint& pt) { return c_sigma(pt.spec, pt.sigma, pt.lambda); }

/// Closed-form Plancherel density nu_sigma(lambda).
inline double plancherel_density(const SpectralPoint& pt) {
    pt.validate();
    const int n = pt.spec.n;
    const double l = pt.lambda, l2 = l * l;
    const double norm = std::pow(2.0, 2 * n - 3) * std::pow(std::tgamma(n / 2.0), 2);
    if (pt.spec.case_type() == CaseType::half_even) {
        double prod = l * std::tanh(pi * l);
        for (int k = 2; k <= n / 2; ++k) prod *= l2 + (k - 0.5) * (k - 0.5);
        return prod / norm;
    }
    double prod;
    if (n % 2 == 1) {
        prod = l2;
        for (int k = 1; k <= (n - 1) / 2; ++k) prod *= l2 + k * k;
    } else {
        prod = l * std::tanh(pi * l);
        for (int k = 1; k <= n / 2; ++k) prod *= l2 + (k - 0.5) * (k - 0.5);
    }
    double q = pt.sigma.is_chiral() ? pt.spec.p : pt.sigma.q;
    double shift = pt.rho() - q;
    double dpq = tau_rep(pt.spec).d_tau_sigma(pt.sigma);
    return prod / (dpq * norm * (l2 + shift * shift));
}

/// nu_sigma(lambda) = d_{tau,sigma} |c_sigma|^{-2} / (2 pi).
inline double plancherel_density_from_c(const SpectralPoint& pt) {
    pt.validate();
    double d = tau_rep(pt.spec).d_tau_sigma(pt.sigma);
    return d / (2 * pi * std::norm(c_sigma(pt)));
}

inline std::pair<MLabel, double> weyl_reflect(const MLabel& sigma, double lambda) {
    if (sigma == MLabel::Plus()) return {MLabel::Minus(), -lambda};
    if (sigma == MLabel::Minus()) return {MLabel::Plus(), -lambda};
    return {sigma, -lambda};
}

inline SpectralPoint weyl_reflect(const SpectralPoint& pt) {
    auto [s, l] = weyl_reflect(pt.sigma, pt.lambda);
    return SpectralPoint::make(pt.spec, s, l);
}

/// sum_eta phi_eta P_eta as an operator on Lambda^p.
inline CMat radial_block(const BundleSpec& spec, const SphericalValue& v) {
    const auto& r = tau_rep(spec);
    CMat out = CMat::Zero(r.full_dim(), r.full_dim());
    for (const auto& [k, c] : v.components) out += c * r.projector(k);
    return out;
}

inline CMat spherical_from_cartan(const SpectralPoint& pt, const Cartan& c) {
    const auto& r = tau_rep(pt.spec);
    CMat mid = radial_block(pt.spec, scalar_components(pt, c.t));
    CMat t2 = r.tau(c.k2).transpose().cast<cplx>();
    CMat t1 = r.tau(c.k1).transpose().cast<cplx>();
    return t2 * mid * t1;
}

/// Phi(g) = tau(k2)^{-1} (sum phi_eta(t) P_eta) tau(k1)^{-1}.
inline CMat spherical_at(const SpectralPoint& pt, const GroupElement& g) {
    if (g.n() != pt.spec.n) throw ValidationError("spherical_at: dimension mismatch");
    return spherical_from_cartan(pt, cartan(g));
}

/// Weyl-sum head at radius t (radial part only).
inline CMat asymptotic_head_radial(const SpectralPoint& pt, double t) {
    const auto& r = tau_rep(pt.spec);
    CMat out = CMat::Zero(r.full_dim(), r.full_dim());
    const double rho = pt.rho();
    for (int s : {1, -1}) {
        MLabel ss = s == 1 ? pt.sigma : weyl_reflect(pt.sigma, pt.lambda).first;
        double sl = s * pt.lambda;
        out += std::exp(cplx(-rho * t, sl * t)) * c_sigma(pt.spec, ss, sl) * r.projector(ss);
    }
    return out;
}

inline CMat asymptotic_head(const SpectralPoint& pt, const GroupElement& g) {
    pt.validate();
    const auto& r = tau_rep(pt.spec);
    Cartan c = cartan(g);
    CMat t2 = r.tau(c.k2).transpose().cast<cplx>();
    CMat t1 = r.tau(c.k1).transpose().cast<cplx>();
    return t2 * asymptotic_head_radial(pt, c.t) * t1;
}

inline double op_norm(const CMat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues()(0);
}

/// e^{(rho+1) t} |Phi(a_t) - head(t)|_op at t0, t0 + dt, ..., up to t1.
inline std::vector<std::pair<double, double>> scaled_remainder(const SpectralPoint& pt, double t0, double t1, double dt) {
    if (!(dt > 0) || t1 < t0) throw ValidationError("scaled_remainder: bad t grid");
    std::vector<std::pair<double, double>> out;
    int steps = static_cast<int>(std::floor((t1 - t0) / dt + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        double t = t0 + i * dt;
        CMat res = radial_block(pt.spec, scalar_components(pt, t)) - asymptotic_head_radial(pt, t);
        out.emplace_back(t, std::exp((pt.rho() + 1) * t) * op_norm(res));
    }
    return out;
}

/// Largest relative rise between successive interior local maxima of v; with fewer than two maxima,
/// the rise of the second half's maximum over the first half's.
inline double envelope_growth(const std::vector<double>& v) {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] >= v[i - 1] && v[i] > v[i + 1]) peaks.push_back(v[i]);
    if (peaks.size() < 2) {
        std::size_t h = v.size() / 2;
        if (h == 0) return 0.0;
        double a = *std::max_element(v.begin(), v.begin() + h), b = *std::max_element(v.begin() + h, v.end());
        return b / a - 1.0;
    }
    double worst = -1.0;
    for (std::size_t j = 0; j + 1 < peaks.size(); ++j) worst = std::max(worst, peaks[j + 1] / peaks[j] - 1.0);
    return worst;
}

} // namespace hyperform
