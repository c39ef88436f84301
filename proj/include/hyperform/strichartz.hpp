#pragma once

// Ball averages (1/R) int_{B(R)} |.|^2 of Poisson images and the limits they converge to.

#include "hyperform/transforms.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace hyperform {

inline const std::vector<double>& default_R_grid() {
    static const std::vector<double> g = {12.5, 25.0, 50.0, 100.0, 200.0};
    return g;
}

struct BallAverageReport {
    std::vector<double> R_grid;
    std::vector<double> values;
    std::vector<double> stderrs;
    double extrapolated_limit = 0.0;
    double fit_slope = 0.0; // A in L + A/R
    double bstar = 0.0;     // sup of the values on the grid
    double stderr_ = 0.0;
    std::string method = "schur_1d";
    double target = 0.0;    // (1/pi) nu^{-1} |F|^2
    double norm2 = 0.0;     // |F|^2 in L^2(K, sigma)
    double bound_constant = 0.0; // smallest C with C^{-1} <= |P F|_* nu^{1/2} / |F| <= C

    double rel_error() const { return std::abs(extrapolated_limit - target) / target; }
};

namespace detail {

inline void check_grid(const std::vector<double>& R, std::size_t min_points, const char* who) {
    if (R.size() < min_points) throw ValidationError(std::string(who) + ": R grid too short");
    for (std::size_t i = 0; i < R.size(); ++i)
        if (!(R[i] > 0) || (i > 0 && R[i] <= R[i - 1])) throw ValidationError(std::string(who) + ": R grid must be positive and increasing");
}

/// (1/R_i) int_0^{R_i} f for every grid point, accumulating panel by panel.
template <class F>
std::vector<double> cumulative_averages(F&& f, const std::vector<double>& R, double tol, double panel = 1.0) {
    std::vector<double> out;
    double acc = 0.0, lo = 0.0;
    for (double r : R) {
        acc += adaptive_gl(f, lo, r, tol, panel);
        lo = r;
        out.push_back(acc / r);
    }
    return out;
}

} // namespace detail

/// Least-squares fit v = L + A/R on the upper half of the grid.
inline std::pair<double, double> fit_inverse_R(const std::vector<double>& R, const std::vector<double>& v) {
    std::size_t start = R.size() / 2;
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = start; i < R.size(); ++i) {
        double x = 1.0 / R[i];
        s1 += 1;
        sx += x;
        sxx += x * x;
        sy += v[i];
        sxy += x * v[i];
    }
    double det = s1 * sxx - sx * sx;
    if (std::abs(det) < 1e-300) return {v.back(), 0.0};
    double L = (sxx * sy - sx * sxy) / det;
    double A = (s1 * sxy - sx * sy) / det;
    return {L, A};
}

/// Schur-reduced radial integrand sum_eta (d_eta/d_tau) |phi_eta(t)|^2 w(t) per unit |v|^2.
inline double schur_radial_density(const SpectralPoint& pt, double t) {
    const auto& r = tau_rep(pt.spec);
    const int n = pt.spec.n;
    double w = std::pow(-std::expm1(-2 * t), n - 1); // w(t) e^{-2 rho t}
    double s = 0.0;
    for (const auto& [eta, c] : scalar_components_scaled(pt, t).components) s += r.d_sigma(eta) * std::norm(c);
    return w * s / r.d_tau();
}

/// Ball averages of a Poisson image on R_grid.
/// Atoms at the identity use the exact Schur reduction; otherwise the K-integral is a Monte Carlo mean over
/// `samples` Haar points shared by every t node.
inline BallAverageReport ball_averages(const BoundarySection& F, const std::vector<double>& R_grid, long samples = 2000,
                                       std::uint64_t seed = 1, double tol = 1e-10) {
    F.require_atomic("ball_averages");
    detail::check_grid(R_grid, 1, "ball_averages");
    BallAverageReport rep;
    rep.R_grid = R_grid;
    const auto& pt = F.pt;
    const int n = pt.spec.n;
    if (F.all_at_identity()) {
        CVec V = CVec::Zero(tau_rep(pt.spec).full_dim());
        for (std::size_t i = 0; i < F.atoms.size(); ++i) V += F.weights[i] * F.atoms[i].v;
        double v2 = V.squaredNorm();
        rep.norm2 = v2;
        if (v2 == 0.0) {
            rep.values.assign(R_grid.size(), 0.0);
        } else {
            rep.values = detail::cumulative_averages([&](double t) { return schur_radial_density(pt, t); }, R_grid, tol / v2);
            for (double& x : rep.values) x *= v2;
        }
        rep.stderrs.assign(R_grid.size(), 0.0);
        rep.method = "schur_1d";
    } else {
        rep.method = "mc_k";
        rep.norm2 = section_norm2(F);
        std::vector<KElement> ks;
        ks.reserve(samples);
        {
            auto rng = chunk_rng(seed, 0);
            for (long i = 0; i < samples; ++i) ks.push_back(haar_sample_K(n, rng));
        }
        std::vector<GroupElement> ginv;
        for (const auto& a : F.atoms) ginv.push_back(a.g.inverse());
        // per-sample cumulative integrals, fixed panels of width 0.5
        std::vector<std::vector<double>> per(samples, std::vector<double>(R_grid.size()));
        parallel_for(static_cast<int>(samples), [&](int s) {
            double acc = 0.0, lo = 0.0;
            for (std::size_t j = 0; j < R_grid.size(); ++j) {
                double hi = R_grid[j];
                int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.5)));
                double h = (hi - lo) / panels;
                for (int q = 0; q < panels; ++q)
                    acc += gl_integrate([&](double t) {
                        CVec u = CVec::Zero(tau_rep(pt.spec).full_dim());
                        for (std::size_t i = 0; i < F.atoms.size(); ++i)
                            u += F.weights[i] * (spherical_at_product(pt, ginv[i] * ks[s], t) * F.atoms[i].v);
                        return radial_weight(n, t) * u.squaredNorm();
                    }, lo + q * h, lo + (q + 1) * h, 8);
                lo = hi;
                per[s][j] = acc / hi;
            }
        });
        for (std::size_t j = 0; j < R_grid.size(); ++j) {
            double m = 0, m2 = 0;
            for (long s = 0; s < samples; ++s) {
                m += per[s][j];
                m2 += per[s][j] * per[s][j];
            }
            m /= samples;
            m2 /= samples;
            rep.values.push_back(m);
            rep.stderrs.push_back(std::sqrt(std::max(0.0, m2 - m * m) / std::max(1L, samples - 1)));
        }
    }
    rep.bstar = *std::max_element(rep.values.begin(), rep.values.end());
    rep.stderr_ = rep.stderrs.back();
    return rep;
}

inline double ball_average_atom(const BoundarySection& F, double R, long samples = 2000, std::uint64_t seed = 1) {
    return ball_averages(F, {R}, samples, seed).values[0];
}

/// Ball averages on R_grid, the A/R extrapolated limit, and the two-sided B* bound constant.
inline BallAverageReport strichartz_limit(const BoundarySection& F, const std::vector<double>& R_grid = default_R_grid(),
                                          long samples = 2000, std::uint64_t seed = 1) {
    detail::check_grid(R_grid, 4, "strichartz_limit");
    BallAverageReport rep = ball_averages(F, R_grid, samples, seed);
    auto [L, A] = fit_inverse_R(R_grid, rep.values);
    rep.extrapolated_limit = L;
    rep.fit_slope = A;
    double nu = plancherel_density(F.pt);
    rep.target = rep.norm2 / (pi * nu);
    if (rep.norm2 > 0) {
        double ratio = std::sqrt(rep.bstar * nu / rep.norm2);
        rep.bound_constant = std::max(ratio, 1.0 / ratio);
    }
    return rep;
}

/// (1/R) int_0^R e^{2(i lambda - rho) t} (2 sinh t)^{n-1} dt by quadrature.
inline cplx cross_term(double lambda, int n, double R) {
    if (std::abs(lambda) < lambda_min) throw PoleError("cross_term: lambda must be nonzero");
    if (!(R > 0)) throw ValidationError("cross_term: R must be positive");
    auto f = [&](double t) { return std::exp(cplx(0, 2 * lambda * t)) * std::pow(-std::expm1(-2 * t), n - 1); };
    return adaptive_gl(f, 0.0, R, 1e-13 * std::max(1.0, R), std::min(1.0, 1.0 / std::abs(lambda))) / R;
}

/// Ball averages of (1/d_{tau,sigma}) |Phi(a_t)|_HS^2 and their limit against (d_sigma/pi) nu^{-1}.
inline BallAverageReport eisenstein_hs_limit(const SpectralPoint& pt, const std::vector<double>& R_grid = default_R_grid()) {
    detail::check_grid(R_grid, 4, "eisenstein_hs_limit");
    const auto& r = tau_rep(pt.spec);
    const int n = pt.spec.n;
    double d = r.d_tau_sigma(pt.sigma);
    BallAverageReport rep;
    rep.R_grid = R_grid;
    rep.values = detail::cumulative_averages([&](double t) {
        double s = 0.0;
        for (const auto& [eta, c] : scalar_components_scaled(pt, t).components) s += r.d_sigma(eta) * std::norm(c);
        return std::pow(-std::expm1(-2 * t), n - 1) * s / d;
    }, R_grid, 1e-10);
    rep.stderrs.assign(R_grid.size(), 0.0);
    auto [L, A] = fit_inverse_R(R_grid, rep.values);
    rep.extrapolated_limit = L;
    rep.fit_slope = A;
    rep.bstar = *std::max_element(rep.values.begin(), rep.values.end());
    rep.target = r.d_sigma(pt.sigma) / (pi * plancherel_density(pt));
    rep.norm2 = r.d_sigma(pt.sigma);
    return rep;
}

// ---- asymptotic head of Poisson images

struct ResidualRow {
    double R = 0.0;
    double deviation = 0.0;    // (1/R) int_B |P F - head|^2
    double average = 0.0;      // (1/R) int_B |P F|^2
    double head_average = 0.0; // (1/R) int_B |head|^2
    double stderr_ = 0.0;
    double ratio() const { return deviation / average; }
};

/// Head of P(p^{g,v}) at k a_t: sum_s e^{(i s lambda - rho) t} c_{s sigma}(s lambda) d^{-1/2} p^{g,v}_{s sigma, s lambda}(k).
inline CVec poisson_head(const SpectralPoint& pt, const BoundaryAtom& atom, const KElement& k, double t) {
    const auto& r = tau_rep(pt.spec);
    CVec out = CVec::Zero(r.full_dim());
    for (int s : {1, -1}) {
        auto [ss, sl] = s == 1 ? std::pair<MLabel, double>{pt.sigma, pt.lambda} : weyl_reflect(pt.sigma, pt.lambda);
        SpectralPoint q = SpectralPoint::make(pt.spec, ss, sl);
        cplx f = std::exp(cplx(-pt.rho(), sl) * t) * c_sigma(q) / std::sqrt(r.d_tau_sigma(ss));
        out += f * atom_eval(q, atom, k);
    }
    return out;
}

/// Ball-averaged squared deviation between a single-atom Poisson image and its Weyl head.
inline std::vector<ResidualRow> asymptotic_residual_sweep(const SpectralPoint& pt, const BoundaryAtom& atom,
                                                          const std::vector<double>& R_grid, long samples = 400,
                                                          std::uint64_t seed = 1) {
    detail::check_grid(R_grid, 1, "asymptotic_residual_sweep");
    const auto& r = tau_rep(pt.spec);
    const int n = pt.spec.n;
    std::vector<ResidualRow> rows(R_grid.size());
    for (std::size_t j = 0; j < R_grid.size(); ++j) rows[j].R = R_grid[j];
    bool identity = (atom.g.matrix() - Mat::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() < 1e-14;
    if (identity) {
        // Schur: sum_eta (d_eta/d_tau) |phi_eta - h_eta|^2 |v|^2 with h the radial head
        double v2 = atom.v.squaredNorm();
        auto parts = [&](double t) {
            std::array<double, 3> out{0, 0, 0};
            auto comps = scalar_components_scaled(pt, t).components;
            double w = std::pow(-std::expm1(-2 * t), n - 1);
            for (const auto& [eta, c] : comps) {
                cplx h = 0.0;
                for (int s : {1, -1}) {
                    auto [ss, sl] = s == 1 ? std::pair<MLabel, double>{pt.sigma, pt.lambda} : weyl_reflect(pt.sigma, pt.lambda);
                    if (ss == eta) h += std::exp(cplx(0, sl * t)) * c_sigma(pt.spec, ss, sl);
                }
                double de = double(r.d_sigma(eta)) / r.d_tau() * w * v2;
                out[0] += de * std::norm(c - h);
                out[1] += de * std::norm(c);
                out[2] += de * std::norm(h);
            }
            return out;
        };
        for (int which = 0; which < 3; ++which) {
            auto vals = detail::cumulative_averages([&](double t) { return parts(t)[which]; }, R_grid, 1e-11);
            for (std::size_t j = 0; j < R_grid.size(); ++j) {
                if (which == 0) rows[j].deviation = vals[j];
                if (which == 1) rows[j].average = vals[j];
                if (which == 2) rows[j].head_average = vals[j];
            }
        }
        return rows;
    }
    std::vector<KElement> ks;
    {
        auto rng = chunk_rng(seed, 0);
        for (long i = 0; i < samples; ++i) ks.push_back(haar_sample_K(n, rng));
    }
    GroupElement ginv = atom.g.inverse();
    std::vector<std::vector<std::array<double, 3>>> per(samples, std::vector<std::array<double, 3>>(R_grid.size()));
    parallel_for(static_cast<int>(samples), [&](int s) {
        std::array<double, 3> acc{0, 0, 0};
        double lo = 0.0;
        for (std::size_t j = 0; j < R_grid.size(); ++j) {
            double hi = R_grid[j];
            int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.5)));
            double h = (hi - lo) / panels;
            const auto& rule = gauss_legendre(8);
            for (int q = 0; q < panels; ++q)
                for (int i = 0; i < 8; ++i) {
                    double t = lo + (q + 0.5) * h + 0.5 * h * rule.x[i];
                    double wt = 0.5 * h * rule.w[i] * radial_weight(n, t);
                    CVec u = spherical_at_product(pt, ginv * ks[s], t) * atom.v;
                    CVec hd = poisson_head(pt, atom, ks[s], t);
                    acc[0] += wt * (u - hd).squaredNorm();
                    acc[1] += wt * u.squaredNorm();
                    acc[2] += wt * hd.squaredNorm();
                }
            lo = hi;
            for (int c = 0; c < 3; ++c) per[s][j][c] = acc[c] / hi;
        }
    });
    for (std::size_t j = 0; j < R_grid.size(); ++j) {
        double m[3] = {0, 0, 0}, m2 = 0;
        for (long s = 0; s < samples; ++s) {
            for (int c = 0; c < 3; ++c) m[c] += per[s][j][c];
            m2 += per[s][j][0] * per[s][j][0];
        }
        for (double& x : m) x /= samples;
        rows[j].deviation = m[0];
        rows[j].average = m[1];
        rows[j].head_average = m[2];
        rows[j].stderr_ = std::sqrt(std::max(0.0, m2 / samples - m[0] * m[0]) / std::max(1L, samples - 1));
    }
    return rows;
}

// ---- inversion

struct InversionResult {
    double R = 0.0;
    double lambda_kernel = 0.0;
    cplx scale = 0.0; // F_R(k) = scale P_sigma tau(k)^{-1} V
    CVec V;           // sum of weighted atom vectors
    SpectralPoint pt;

    CVec operator()(const KElement& k) const {
        const auto& r = tau_rep(pt.spec);
        return scale * (r.projector(pt.sigma) * (r.tau(k).transpose().cast<cplx>() * V));
    }
};

/// F_R(k) = pi nu (1/R) int_{B(R)} e_{sigma,lambda'}(k^{-1} g) f(g) dg for f the Poisson image of atoms at the identity.
/// The kernel integral over B(R) = K a_[0,R] reduces to (pi nu' / (sqrt(d) d_sigma)) (1/R) int w tr(Phi_lambda Phi_lambda'^*).
inline InversionResult inversion_reconstruct(const BoundarySection& F, double R, double lambda_kernel = 0.0) {
    F.require_atomic("inversion_reconstruct");
    if (!F.all_at_identity()) throw ValidationError("inversion_reconstruct: atoms must sit at the identity");
    if (!(R > 0)) throw ValidationError("inversion_reconstruct: R must be positive");
    const auto& pt = F.pt;
    const auto& r = tau_rep(pt.spec);
    const int n = pt.spec.n;
    SpectralPoint kp = SpectralPoint::make(pt.spec, pt.sigma, lambda_kernel == 0.0 ? pt.lambda : lambda_kernel);
    auto integrand = [&](double t) {
        auto a = scalar_components_scaled(pt, t).components;
        auto b = scalar_components_scaled(kp, t).components;
        cplx s = 0.0;
        for (const auto& [eta, c] : a) s += double(r.d_sigma(eta)) * c * std::conj(b.at(eta));
        return std::pow(-std::expm1(-2 * t), n - 1) * s;
    };
    double d = r.d_tau_sigma(pt.sigma);
    cplx avg = adaptive_gl(integrand, 0.0, R, 1e-11, 1.0) / R;
    InversionResult out;
    out.R = R;
    out.lambda_kernel = kp.lambda;
    out.pt = pt;
    out.V = CVec::Zero(r.full_dim());
    for (std::size_t i = 0; i < F.atoms.size(); ++i) out.V += F.weights[i] * F.atoms[i].v;
    out.scale = pi * plancherel_density(kp) / (std::sqrt(d) * r.d_sigma(pt.sigma)) * avg;
    return out;
}

/// Relative L^2(K, sigma) distance between F_R and F by Monte Carlo over K.
inline MCResult inversion_error(const BoundarySection& F, const InversionResult& FR, long samples, std::uint64_t seed) {
    const int n = F.pt.spec.n;
    MCResult num = monte_carlo(samples, seed, 2, [&](std::mt19937_64& rng) {
        KElement k = haar_sample_K(n, rng);
        CVec a = section_eval(F, k);
        CVec out(2);
        out(0) = (FR(k) - a).squaredNorm();
        out(1) = a.squaredNorm();
        return out;
    });
    MCResult rel;
    rel.samples = samples;
    rel.mean = CVec::Constant(1, std::sqrt(num.mean(0).real() / num.mean(1).real()));
    // delta method on the numerator only; the denominator is the larger, better resolved term
    rel.stderr_ = CVec::Constant(1, 0.5 * num.stderr_(0).real() / std::sqrt(num.mean(0).real() * num.mean(1).real() + 1e-300));
    return rel;
}

// ---- spectral projection energy (n = 3)

struct EnergyReport {
    double lambda_lo = 0.0, lambda_hi = 0.0;
    double captured = 0.0; // sum_sigma int dlambda lim (1/R) int_B |Q f|^2, over the window
    double total = 0.0;    // (1/pi) |f|^2
    double fraction() const { return captured / total; }
    std::vector<std::pair<MLabel, double>> per_sigma;
};

/// Windowed diagnostic for lim_R int dlambda (1/R) int_B |Q_lambda f|^2 = (1/pi) |f|^2 with f a bump section.
/// F f_w is obtained on the Radon path at one K point; the ball-average limit uses the Schur-reduced extrapolation.
inline EnergyReport spectral_projection_energy(const BundleSpec& spec, const CVec& w, double R_supp, double lambda_lo,
                                               double lambda_hi, int lambda_nodes = 24,
                                               const std::vector<double>& R_grid = default_R_grid(),
                                               const RadonGrid& grid = {16, 16, 12}) {
    if (spec.n != 3) throw ValidationError("spectral_projection_energy: only n = 3 is supported");
    if (!(lambda_hi > lambda_lo && lambda_lo > 0)) throw ValidationError("spectral_projection_energy: bad lambda window");
    const auto& r = tau_rep(spec);
    auto f = bump_section(spec, w, R_supp);
    EnergyReport rep;
    rep.lambda_lo = lambda_lo;
    rep.lambda_hi = lambda_hi;
    rep.total = bump_norm2(spec, R_supp, w.squaredNorm()) / pi;
    if (rep.total == 0.0) return rep;
    KElement k0 = KElement::unchecked(plane_rotation(3, Vec::Unit(3, 1), 0.9) * plane_rotation(3, Vec::Unit(3, 2), 0.4));
    const auto& rule = gauss_legendre(lambda_nodes);
    for (const auto& sigma : r.branching()) {
        CVec u = r.projector(sigma) * (r.tau(k0).transpose().cast<cplx>() * w);
        double part = 0.0;
        if (u.norm() > 1e-12) {
            for (int i = 0; i < lambda_nodes; ++i) {
                double lam = lambda_lo + 0.5 * (lambda_hi - lambda_lo) * (rule.x[i] + 1.0);
                auto pt = SpectralPoint::make(spec, sigma, lam);
                cplx l = u.dot(fourier_helgason(f, pt, k0, grid)) / u.squaredNorm();
                double nu = plancherel_density(pt);
                double d = r.d_tau_sigma(sigma);
                auto lim = strichartz_limit(BoundarySection::single(pt, GroupElement(3), w), R_grid);
                part += 0.5 * (lambda_hi - lambda_lo) * rule.w[i] * nu * nu * std::norm(l) / d * lim.extrapolated_limit;
            }
        }
        rep.per_sigma.emplace_back(sigma, part);
        rep.captured += part;
    }
    return rep;
}

} // namespace hyperform
