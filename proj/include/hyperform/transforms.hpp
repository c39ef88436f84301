#pragma once

// Poisson transform, intertwiners, Radon and Fourier-Helgason transforms.
// Vectors live in Lambda^p C^n (colex coordinates); V_tau and V_sigma are subspaces cut out by projectors.

#include "hyperform/extrep.hpp"
#include "hyperform/liegroup.hpp"
#include "hyperform/montecarlo.hpp"
#include "hyperform/quadrature.hpp"
#include "hyperform/spherical.hpp"

#include <functional>
#include <vector>

namespace hyperform {

struct BoundaryAtom {
    GroupElement g;
    CVec v;
};

using KSampler = std::function<CVec(const KElement&)>;

/// Boundary datum in L^2(K, sigma): a weighted list of atoms, or a callable.
struct BoundarySection {
    SpectralPoint pt;
    std::vector<BoundaryAtom> atoms;
    std::vector<cplx> weights;
    KSampler sampler;
    long budget = 0;

    static BoundarySection from_atoms(const SpectralPoint& pt, std::vector<BoundaryAtom> atoms,
                                      std::vector<cplx> weights = {}) {
        pt.validate();
        if (weights.empty()) weights.assign(atoms.size(), cplx(1.0));
        if (weights.size() != atoms.size()) throw ValidationError("BoundarySection: weight count must match atom count");
        const auto& r = tau_rep(pt.spec);
        for (const auto& a : atoms) {
            if (a.g.n() != pt.spec.n) throw ValidationError("BoundarySection: atom dimension mismatch");
            if (a.v.size() != r.full_dim() || !a.v.allFinite()) throw ValidationError("BoundarySection: bad atom vector");
            r.check_member(FormVector(pt.spec.n, pt.spec.p, a.v));
        }
        BoundarySection s{pt, std::move(atoms), std::move(weights), {}, 0};
        return s;
    }
    static BoundarySection single(const SpectralPoint& pt, const GroupElement& g, const CVec& v) {
        return from_atoms(pt, {{g, v}});
    }
    static BoundarySection from_sampler(const SpectralPoint& pt, KSampler f, long budget) {
        pt.validate();
        if (!f) throw ValidationError("BoundarySection: empty sampler");
        BoundarySection s{pt, {}, {}, std::move(f), budget};
        return s;
    }

    bool is_atomic() const { return !sampler; }
    void require_atomic(const char* who) const {
        if (!is_atomic()) throw ValidationError(std::string(who) + ": sampler-backed sections are not supported");
    }
    bool all_at_identity() const {
        for (const auto& a : atoms)
            if ((a.g.matrix() - Mat::Identity(a.g.n() + 1, a.g.n() + 1)).cwiseAbs().maxCoeff() > 1e-14) return false;
        return true;
    }
};

/// Compactly supported section f(g k) = tau(k)^{-1} f(g), vanishing for A+(g) > R_supp.
struct CompactSection {
    BundleSpec spec;
    std::function<CVec(const GroupElement&)> f;
    double R_supp = 1.0;
};

/// f(g) = chi(A+(g)/R) tau(pi_0(g))^{-1} w with chi(s) = exp(1 - 1/(1 - s^2)).
inline double bump_profile(double t, double R) {
    double s = t / R;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

inline CompactSection bump_section(const BundleSpec& spec, const CVec& w, double R) {
    const auto& r = tau_rep(spec);
    r.check_member(FormVector(spec.n, spec.p, w));
    if (!(R > 0)) throw ValidationError("bump_section: support radius must be positive");
    CompactSection s;
    s.spec = spec;
    s.R_supp = R;
    s.f = [spec, w, R](const GroupElement& g) -> CVec {
        double chi = bump_profile(aplus(g), R);
        if (chi == 0.0) return CVec::Zero(w.size());
        return chi * (tau_rep(spec).tau(polar_k(g)).transpose().cast<cplx>() * w);
    };
    return s;
}

// ---- atoms and the Poisson transform

/// p^{g,v}(k) = sqrt(d_{tau,sigma}) e^{(i lambda - rho) H(g^{-1} k)} P_sigma tau(kappa(g^{-1} k))^{-1} v.
inline CVec atom_eval(const SpectralPoint& pt, const BoundaryAtom& atom, const KElement& k) {
    const auto& r = tau_rep(pt.spec);
    Iwasawa iw = iwasawa(atom.g.inverse() * k);
    cplx f = std::sqrt(r.d_tau_sigma(pt.sigma)) * std::exp(cplx(-pt.rho(), pt.lambda) * iw.H);
    return f * (r.projector(pt.sigma) * (r.tau(iw.kappa).transpose().cast<cplx>() * atom.v));
}

inline CVec section_eval(const BoundarySection& F, const KElement& k) {
    if (!F.is_atomic()) return F.sampler(k);
    CVec out = CVec::Zero(tau_rep(F.pt.spec).full_dim());
    for (std::size_t i = 0; i < F.atoms.size(); ++i) out += F.weights[i] * atom_eval(F.pt, F.atoms[i], k);
    return out;
}

/// Phi(h a_t) through the stable Cartan factors of h a_t.
inline CMat spherical_at_product(const SpectralPoint& pt, const GroupElement& h, double t) {
    return spherical_from_cartan(pt, cartan_product(h, t));
}

/// Symmetric formula: P(p^{g,v})(x) = Phi(g^{-1} x) v.
inline CVec poisson_atom(const SpectralPoint& pt, const BoundaryAtom& atom, const GroupElement& x) {
    return spherical_at(pt, atom.g.inverse() * x) * atom.v;
}

inline CVec poisson_section(const BoundarySection& F, const GroupElement& x) {
    F.require_atomic("poisson_section");
    CVec out = CVec::Zero(tau_rep(F.pt.spec).full_dim());
    for (std::size_t i = 0; i < F.atoms.size(); ++i) out += F.weights[i] * poisson_atom(F.pt, F.atoms[i], x);
    return out;
}

/// sqrt(d) e^{-(i lambda + rho) H(x^{-1} k)} tau(kappa(x^{-1} k)) F(k), the Poisson integrand.
inline CVec poisson_integrand(const SpectralPoint& pt, const GroupElement& xinv, const KElement& k, const CVec& Fk) {
    const auto& r = tau_rep(pt.spec);
    Iwasawa iw = iwasawa(xinv * k);
    cplx f = std::sqrt(r.d_tau_sigma(pt.sigma)) * std::exp(-cplx(pt.rho(), pt.lambda) * iw.H);
    return f * (r.tau(iw.kappa).cast<cplx>() * Fk);
}

/// Monte Carlo Poisson transform over Haar-distributed K samples.
inline MCResult poisson_mc(const BoundarySection& F, const GroupElement& x, long samples, std::uint64_t seed) {
    if (samples <= 0) throw ValidationError("poisson_mc: sample count must be positive");
    if (!F.is_atomic() && F.budget < samples) throw ValidationError("poisson_mc: sample budget exceeded");
    const int n = F.pt.spec.n;
    GroupElement xinv = x.inverse();
    return monte_carlo(samples, seed, tau_rep(F.pt.spec).full_dim(), [&](std::mt19937_64& rng) {
        KElement k = haar_sample_K(n, rng);
        return poisson_integrand(F.pt, xinv, k, section_eval(F, k));
    });
}

/// SO(3) rotation from ZYZ Euler angles.
inline KElement euler_zyz(double a, double b, double c) {
    auto rz = [](double x) {
        Mat m = Mat::Identity(3, 3);
        m(0, 0) = m(1, 1) = std::cos(x);
        m(0, 1) = -std::sin(x);
        m(1, 0) = std::sin(x);
        return m;
    };
    Mat ry = Mat::Identity(3, 3);
    ry(0, 0) = ry(2, 2) = std::cos(b);
    ry(0, 2) = std::sin(b);
    ry(2, 0) = -std::sin(b);
    return KElement::unchecked(rz(a) * ry * rz(c));
}

/// Poisson transform by tensor Gauss-Legendre over Euler angles (n = 3 only); m nodes per 2 pi.
inline CVec poisson_quadrature_so3(const BoundarySection& F, const GroupElement& x, int m = 48) {
    if (F.pt.spec.n != 3) throw ValidationError("poisson_quadrature_so3: n must be 3");
    GroupElement xinv = x.inverse();
    const auto& rule = gauss_legendre(m);
    const auto& rb = gauss_legendre(m / 2);
    CVec sum = CVec::Zero(tau_rep(F.pt.spec).full_dim());
    for (int i = 0; i < m; ++i) {
        double a = pi * (rule.x[i] + 1.0);
        for (int j = 0; j < m / 2; ++j) {
            double b = 0.5 * pi * (rb.x[j] + 1.0);
            for (int l = 0; l < m; ++l) {
                double c = pi * (rule.x[l] + 1.0);
                double w = rule.w[i] * pi * rb.w[j] * 0.5 * pi * rule.w[l] * pi * std::sin(b) / (8 * pi * pi);
                KElement k = euler_zyz(a, b, c);
                sum += w * poisson_integrand(F.pt, xinv, k, section_eval(F, k));
            }
        }
    }
    return sum;
}

// ---- Gram matrices and the intertwiner

/// G(i, j) = <p_i, p_j> = <Phi(g_i^{-1} g_j) v_i, v_j>.
inline CMat gram_matrix(const BoundarySection& F) {
    F.require_atomic("gram_matrix");
    const std::size_t m = F.atoms.size();
    CMat G(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            CVec u = spherical_at(F.pt, F.atoms[i].g.inverse() * F.atoms[j].g) * F.atoms[i].v;
            G(i, j) = F.atoms[j].v.dot(u);
        }
    return G;
}

/// ||F||^2 in L^2(K, sigma) from the Gram matrix.
inline double section_norm2(const BoundarySection& F) {
    CMat G = gram_matrix(F);
    cplx s = 0.0;
    for (std::size_t i = 0; i < F.atoms.size(); ++i)
        for (std::size_t j = 0; j < F.atoms.size(); ++j) s += F.weights[i] * std::conj(F.weights[j]) * G(i, j);
    return s.real();
}

/// U_{s,lambda}: relabels every atom to (s sigma, -lambda).
inline BoundarySection u_intertwine(const BoundarySection& F) {
    F.require_atomic("u_intertwine");
    return BoundarySection::from_atoms(weyl_reflect(F.pt), F.atoms, F.weights);
}

/// ||tau(k2(g a_R))^{-1} P_sigma tau(k1(g a_R))^{-1} - P_sigma tau(kappa(g))^{-1}||_op.
inline double kak_projector_defect(const BundleSpec& spec, const MLabel& sigma, const GroupElement& g, double R) {
    const auto& r = tau_rep(spec);
    const CMat& P = r.projector(sigma);
    Cartan c = cartan_product(g, R);
    CMat lhs = r.tau(c.k2).transpose().cast<cplx>() * P * r.tau(c.k1).transpose().cast<cplx>();
    CMat rhs = P * r.tau(iwasawa(g).kappa).transpose().cast<cplx>();
    return op_norm(lhs - rhs);
}

// ---- Radon and Fourier-Helgason transforms (n <= 4)

struct RadonGrid {
    int radial = 32;  // Gauss-Legendre nodes in |y|
    int angular = 32; // nodes per angular coordinate
    int t_nodes = 16; // nodes per unit length in the t-integral of the Fourier transform
};

/// Normalization of dn against Lebesgue dy: 2^{n-1} / |S^{n-1}|.
inline double radon_measure_constant(int n) {
    double sphere = 2.0 * std::pow(pi, n / 2.0) / std::tgamma(n / 2.0);
    return std::pow(2.0, n - 1) / sphere;
}

/// Radius of {y : A+(a_t n_y) <= R}: cosh t + e^t |y|^2 / 2 <= cosh R.
inline double horocycle_radius(double t, double R) {
    double gap = std::cosh(R) - std::cosh(t);
    if (gap <= 0) return 0.0;
    return std::sqrt(2.0 * gap * std::exp(-t));
}

/// e^{rho t} int_N f(k a_t n) dn.
inline CVec radon(const CompactSection& f, double t, const KElement& k, const RadonGrid& grid = {}) {
    const int n = f.spec.n;
    if (n > 4) throw ValidationError("radon: only n <= 4 is supported");
    if (!std::isfinite(f.R_supp) || f.R_supp <= 0) throw ValidationError("radon: support radius must be finite");
    const int D = tau_rep(f.spec).full_dim();
    CVec sum = CVec::Zero(D);
    double Y = horocycle_radius(t, f.R_supp);
    if (Y == 0.0) return sum;
    GroupElement ka = k * make_at(n, t);
    auto at = [&](const Vec& y) { return f.f(ka * make_ny(y)); };
    const auto& rr = gauss_legendre(grid.radial);
    const auto& ra = gauss_legendre(grid.angular);
    for (int i = 0; i < grid.radial; ++i) {
        double r = 0.5 * Y * (rr.x[i] + 1.0), wr = 0.5 * Y * rr.w[i];
        if (n == 2) {
            Vec y(1);
            y(0) = Y * rr.x[i];
            sum += Y * rr.w[i] * at(y);
            continue;
        }
        for (int j = 0; j < grid.angular; ++j) {
            double th = pi * (ra.x[j] + 1.0), wth = pi * ra.w[j];
            if (n == 3) {
                Vec y(2);
                y << r * std::cos(th), r * std::sin(th);
                sum += wr * wth * r * at(y);
                continue;
            }
            for (int l = 0; l < grid.angular; ++l) {
                double ph = 0.5 * pi * (ra.x[l] + 1.0), wph = 0.5 * pi * ra.w[l];
                Vec y(3);
                y << r * std::sin(ph) * std::cos(th), r * std::sin(ph) * std::sin(th), r * std::cos(ph);
                sum += wr * wth * wph * r * r * std::sin(ph) * at(y);
            }
        }
    }
    return std::exp(0.5 * (n - 1) * t) * radon_measure_constant(n) * sum;
}

/// Partial transform sqrt(d_{tau,sigma}) P_sigma R f.
inline CVec radon_sigma(const CompactSection& f, const MLabel& sigma, double t, const KElement& k, const RadonGrid& grid = {}) {
    const auto& r = tau_rep(f.spec);
    return std::sqrt(r.d_tau_sigma(sigma)) * (r.projector(sigma) * radon(f, t, k, grid));
}

/// F f(k) = int e^{-i lambda t} R_sigma f(t, k) dt.
inline CVec fourier_helgason(const CompactSection& f, const SpectralPoint& pt, const KElement& k, const RadonGrid& grid = {}) {
    if (f.spec != pt.spec) throw ValidationError("fourier_helgason: section and spectral point disagree on the bundle");
    if (f.spec.n > 4) throw ValidationError("fourier_helgason: only n <= 4 is supported");
    const double R = f.R_supp;
    int panels = std::max(2, static_cast<int>(std::ceil(2 * R)));
    int m = std::max(8, grid.t_nodes / 2);
    CVec sum = CVec::Zero(tau_rep(f.spec).full_dim());
    double h = 2 * R / panels;
    for (int i = 0; i < panels; ++i) {
        double lo = -R + i * h;
        sum += gl_integrate([&](double t) -> CVec { return std::exp(cplx(0, -pt.lambda * t)) * radon_sigma(f, pt.sigma, t, k, grid); },
                            lo, lo + h, m);
    }
    return sum;
}

/// Scalar l with F f_w(k) = l P_sigma tau(k)^{-1} w for a bump section f_w, from the trace of Phi:
/// l = (d_{tau,sigma}^{1/2} d_sigma)^{-1} int chi(t) w(t) sum_eta d_eta conj(phi_eta(t)) dt.
inline cplx bump_fourier_scalar(const SpectralPoint& pt, double R, double tol = 1e-12) {
    const auto& r = tau_rep(pt.spec);
    const int n = pt.spec.n;
    auto integrand = [&](double t) -> cplx {
        auto v = scalar_components(pt, t);
        cplx tr = 0.0;
        for (const auto& [eta, c] : v.components) tr += double(r.d_sigma(eta)) * std::conj(c);
        return bump_profile(t, R) * radial_weight(n, t) * tr;
    };
    double scale = radial_weight(n, R) * r.d_tau();
    return adaptive_gl(integrand, 0.0, R, tol * scale, 0.5) / (std::sqrt(r.d_tau_sigma(pt.sigma)) * r.d_sigma(pt.sigma));
}

/// ||f||^2_{L^2(G,tau)} of a bump section with unit profile vector norm |w|.
inline double bump_norm2(const BundleSpec& spec, double R, double w2) {
    return w2 * adaptive_gl([&](double t) { double c = bump_profile(t, R); return c * c * radial_weight(spec.n, t); },
                            0.0, R, 1e-13 * radial_weight(spec.n, R), 0.5);
}

/// Q f(g) = nu P(F f)(g), the K-integral by Monte Carlo over `samples` Fourier evaluations.
inline MCResult spectral_projection(const CompactSection& f, const SpectralPoint& pt, const GroupElement& g, long samples,
                                    std::uint64_t seed, const RadonGrid& grid = {}) {
    if (f.spec.n > 4) throw ValidationError("spectral_projection: only n <= 4 is supported");
    double nu = plancherel_density(pt);
    GroupElement ginv = g.inverse();
    MCResult r = monte_carlo(samples, seed, tau_rep(pt.spec).full_dim(), [&](std::mt19937_64& rng) {
        KElement k = haar_sample_K(pt.spec.n, rng);
        return poisson_integrand(pt, ginv, k, fourier_helgason(f, pt, k, grid));
    }, 64);
    r.mean *= nu;
    r.stderr_ *= nu;
    return r;
}

} // namespace hyperform
