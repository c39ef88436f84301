// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "hyperform/strichartz.hpp"
#include "unit/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace hyperform;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Case {
    BundleSpec spec;
    MLabel sigma;
};

std::string show(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string case_name(const Case& c) {
    std::string s = "n=" + std::to_string(c.spec.n) + ",p=" + std::to_string(c.spec.p);
    if (c.spec.chirality != Chirality::none) s += "," + to_string(c.spec.chirality);
    return s + "," + c.sigma.str();
}

std::vector<Case> case_types() {
    return {{BundleSpec::make(6, 2), MLabel::Q(1)},
            {BundleSpec::make(6, 2), MLabel::Q(2)},
            {BundleSpec::make(5, 2), MLabel::Q(1)},
            {BundleSpec::make(5, 2), MLabel::Plus()},
            {BundleSpec::make(5, 2), MLabel::Minus()},
            {BundleSpec::make(4, 2, Chirality::plus), MLabel::Q(2)},
            {BundleSpec::make(4, 2, Chirality::minus), MLabel::Q(2)}};
}

CVec unit_member(const BundleSpec& spec, const MLabel& sigma, std::mt19937_64& rng) {
    const auto& r = tau_rep(spec);
    std::normal_distribution<double> nd;
    CVec x(r.full_dim());
    for (int i = 0; i < x.size(); ++i) x(i) = cplx(nd(rng), nd(rng));
    CVec v = r.projector(sigma) * (r.tau_projector() * x);
    return v / v.norm();
}

CVec tau_vector(const BundleSpec& spec, std::mt19937_64& rng) {
    const auto& r = tau_rep(spec);
    std::normal_distribution<double> nd;
    CVec x(r.full_dim());
    for (int i = 0; i < x.size(); ++i) x(i) = cplx(nd(rng), nd(rng));
    x = r.tau_projector() * x;
    return x / x.norm();
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// 1. Jacobi connection formula against the Pfaff + Gauss connection evaluation.
Outcome jacobi_connection() {
    struct P { double a, b; };
    std::vector<P> pairs;
    for (int n = 3; n <= 8; ++n) {
        pairs.push_back({n / 2.0, -0.5});
        pairs.push_back({n / 2.0 - 1.0, -0.5});
    }
    for (int n : {4, 6}) pairs.push_back({n / 2.0 - 1.0, n / 2.0 + 1.0});
    double worst = 0.0;
    for (const auto& pr : pairs)
        for (double l : {0.25, 0.5, 1.0, 2.0, 5.0})
            for (int i = 0; i <= 20; ++i) {
                double t = 1.0 + 0.45 * i;
                JacobiParams p{pr.a, pr.b, l}, m{pr.a, pr.b, -l};
                cplx conn = c_jacobi(pr.a, pr.b, l) * jacobi_psi(p, t) + c_jacobi(pr.a, pr.b, -l) * jacobi_psi(m, t);
                worst = std::max(worst, rel(conn, oracle::jacobi_phi(pr.a, pr.b, l, t)));
            }
    return {worst <= 1e-8, "max rel residual " + show(worst) + " <= 1e-8"};
}

// 2. c_{n/2-1,-1/2}(lambda) = ((i lambda + rho)/(2n)) c_{n/2,-1/2}(lambda).
Outcome c_identity() {
    double worst = 0.0;
    for (int n = 3; n <= 8; ++n)
        for (double l : {0.3, 1.0, 2.7}) {
            double rho = 0.5 * (n - 1);
            cplx rhs = (I * l + rho) / (2.0 * n) * c_jacobi(n / 2.0, -0.5, l);
            worst = std::max(worst, rel(c_jacobi(n / 2.0 - 1.0, -0.5, l), rhs));
        }
    return {worst <= 1e-12, "max rel error " + show(worst) + " <= 1e-12"};
}

// 3. Plancherel density: closed forms against d_{tau,sigma} / (2 pi |c_sigma|^2).
Outcome plancherel() {
    double worst = 0.0;
    for (const auto& c : case_types())
        for (double l : {0.1, 0.5, 1.0, 2.7, 7.0}) {
            auto pt = SpectralPoint::make(c.spec, c.sigma, l);
            double a = plancherel_density(pt), b = plancherel_density_from_c(pt);
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
    return {worst <= 1e-10, "max rel error " + show(worst) + " <= 1e-10"};
}

// 4. Phi(e) = Id.
Outcome identity_at_zero() {
    double worst = 0.0;
    for (const auto& c : case_types())
        for (double l : {0.5, 1.0, 3.0})
            for (const auto& [eta, z] : scalar_components(SpectralPoint::make(c.spec, c.sigma, l), 0.0).components)
                worst = std::max(worst, std::abs(z - 1.0));
    return {worst <= 1e-12, "max |phi_eta(0) - 1| " + show(worst) + " <= 1e-12"};
}

// 5. Bounded scaled remainder on [1, 15]; its envelope is non-increasing on [5, 15] up to 10%.
Outcome asymptotic_remainder() {
    double sup = 0.0, growth = -1.0;
    std::string worst_case;
    for (const auto& c : case_types())
        for (double l : {0.5, 1.0, 2.0}) {
            auto pt = SpectralPoint::make(c.spec, c.sigma, l);
            std::vector<double> tail;
            for (auto [t, e] : scaled_remainder(pt, 1.0, 15.0, 0.05)) {
                sup = std::max(sup, e);
                if (t >= 5.0 - 1e-9) tail.push_back(e);
            }
            double gr = envelope_growth(tail);
            if (gr > growth) {
                growth = gr;
                worst_case = case_name(c) + ",lambda=" + show(l);
            }
        }
    bool ok = std::isfinite(sup) && sup <= 1e3 && growth <= 0.10;
    return {ok, "sup " + show(sup) + " <= 1e3, envelope growth " + show(growth) + " <= 0.1 (worst " + worst_case + ")"};
}

// 6. Ball-average limit (1/pi) nu^{-1} |v|^2 within 1% and the two-sided bound with C <= 10.
Outcome strichartz() {
    std::mt19937_64 rng(601);
    double worst = 0.0, C = 0.0;
    for (const auto& c : case_types())
        for (double l : {0.25, 0.5, 1.0, 2.0, 3.5, 5.0}) {
            auto pt = SpectralPoint::make(c.spec, c.sigma, l);
            auto F = BoundarySection::single(pt, GroupElement(c.spec.n), 1.7 * unit_member(c.spec, c.sigma, rng));
            auto rep = strichartz_limit(F, default_R_grid());
            C = std::max(C, rep.bound_constant);
            if (l == 0.5 || l == 1.0) worst = std::max(worst, rep.rel_error());
        }
    return {worst <= 0.01 && C <= 10.0, "max rel error " + show(worst) + " <= 0.01, bound constant " + show(C) + " <= 10"};
}

// 7. Eisenstein HS-norm limit at delta = tau.
Outcome eisenstein() {
    double worst = 0.0;
    for (const auto& s : {MLabel::Q(1), MLabel::Q(2)}) {
        auto rep = eisenstein_hs_limit(SpectralPoint::make(BundleSpec::make(6, 2), s, 1.0));
        worst = std::max(worst, rep.rel_error());
    }
    return {worst <= 0.01, "max rel error " + show(worst) + " <= 0.01"};
}

// 8. Inversion at n = 3, p = 1. sigma_1 splits there, so q:1 is run as plus.
Outcome inversion() {
    std::mt19937_64 rng(801);
    auto pt = SpectralPoint::make(BundleSpec::make(3, 1), MLabel::Plus(), 1.0);
    auto F = BoundarySection::single(pt, GroupElement(3), unit_member(pt.spec, pt.sigma, rng));
    std::vector<double> errs;
    double se = 0.0;
    for (double R : {20.0, 40.0, 80.0}) {
        MCResult e = inversion_error(F, inversion_reconstruct(F, R), 1000000, 802);
        errs.push_back(e.mean(0).real());
        se = e.stderr_(0).real();
    }
    bool ok = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] + 3 * se <= 0.05;
    return {ok, "errors " + show(errs[0]) + ", " + show(errs[1]) + ", " + show(errs[2]) + " (stderr " + show(se) +
                    ") decreasing, last <= 0.05"};
}

// 9. Round trips, the E-defect bound and the KAK projector distance.
Outcome appendix() {
    std::mt19937_64 rng(901);
    double iw_worst = 0.0, ca_worst = 0.0;
    for (int n = 2; n <= 6; ++n)
        for (int i = 0; i < 1000; ++i) {
            GroupElement g = random_group_element(n, rng, 3.0);
            double scale = g.matrix().cwiseAbs().maxCoeff();
            Iwasawa iw = iwasawa(g);
            Cartan ca = cartan(g);
            iw_worst = std::max(iw_worst, ((iw.kappa * make_at(n, iw.H) * make_ny(iw.y)).matrix() - g.matrix()).cwiseAbs().maxCoeff() / scale);
            ca_worst = std::max(ca_worst, ((ca.k1 * make_at(n, ca.t) * ca.k2).matrix() - g.matrix()).cwiseAbs().maxCoeff() / scale);
        }
    double e_low = 1e300, e_excess = -1e300;
    for (int i = 0; i < 10000; ++i) {
        int n = 2 + i % 5;
        GroupElement g = random_group_element(n, rng, 2.0), x = random_group_element(n, rng, 6.0);
        double e = e_defect(g, x);
        e_low = std::min(e_low, e);
        e_excess = std::max(e_excess, e - std::exp(2 * (aplus(g) - aplus(x))));
    }
    std::vector<Case> kak;
    for (const auto& spec : {BundleSpec::make(3, 1), BundleSpec::make(5, 2), BundleSpec::make(4, 2, Chirality::plus)})
        for (const auto& s : branching(spec)) kak.push_back({spec, s});
    double kak_worst = 0.0;
    bool decreasing = true;
    for (const auto& c : kak)
        for (int i = 0; i < 20; ++i) {
            GroupElement g = random_group_element(c.spec.n, rng, 1.5);
            double prev = 1e300;
            for (double R : {5.0, 10.0, 15.0, 20.0}) {
                double d = kak_projector_defect(c.spec, c.sigma, g, R);
                decreasing = decreasing && d < prev;
                prev = d;
            }
            kak_worst = std::max(kak_worst, prev);
        }
    bool ok = iw_worst <= 1e-10 && ca_worst <= 1e-10 && e_low >= -1e-12 && e_excess <= 1e-9 && kak_worst < 1e-6 && decreasing;
    return {ok, "(a) iwasawa " + show(iw_worst) + ", cartan " + show(ca_worst) + " <= 1e-10; (b) min E " + show(e_low) +
                    ", max excess " + show(e_excess) + " <= 1e-9; (c) defect at R=20 " + show(kak_worst) + " < 1e-6" +
                    (decreasing ? ", decreasing" : ", NOT decreasing")};
}

// 10. Schur orthogonality and the Gram identity by Monte Carlo at n = 3.
Outcome schur_gram() {
    std::mt19937_64 rng(1001);
    auto spec = BundleSpec::make(3, 1);
    const auto& r = tau_rep(spec);
    CVec v = tau_vector(spec, rng);
    double z_schur = 0.0;
    for (const auto& s : r.branching()) {
        double target = double(r.d_sigma(s)) / r.d_tau() * v.squaredNorm();
        const CMat& P = r.projector(s);
        auto mc = monte_carlo(100000, 1002, 1, [&](std::mt19937_64& g) {
            CVec out(1);
            out(0) = (P * (r.tau(haar_sample_K(3, g)).transpose().cast<cplx>() * v)).squaredNorm();
            return out;
        });
        z_schur = std::max(z_schur, std::abs(mc.mean(0).real() - target) / mc.stderr_(0).real());
    }
    auto pt = SpectralPoint::make(spec, MLabel::Plus(), 0.9);
    BoundaryAtom a1{random_group_element(3, rng, 0.7), tau_vector(spec, rng)};
    BoundaryAtom a2{random_group_element(3, rng, 0.7), tau_vector(spec, rng)};
    CMat G = gram_matrix(BoundarySection::from_atoms(pt, {a1, a2}));
    auto mc = monte_carlo(1000000, 1003, 2, [&](std::mt19937_64& g) {
        KElement k = haar_sample_K(3, g);
        CVec e1 = atom_eval(pt, a1, k), e2 = atom_eval(pt, a2, k);
        CVec out(2);
        out(0) = e2.dot(e1);
        out(1) = e1.squaredNorm();
        return out;
    });
    double z_gram = std::max(std::abs(mc.mean(0) - G(0, 1)) / mc.stderr_(0).real(),
                             std::abs(mc.mean(1) - G(0, 0)) / mc.stderr_(1).real());
    return {z_schur <= 3.0 && z_gram <= 3.0, "Schur " + show(z_schur) + " sigma, Gram " + show(z_gram) + " sigma, both <= 3"};
}

// 11. Restriction ratio nu |F f|^2 / (R |f|^2) for a bump section at n = 3, with the Radon path checked
// against the trace reduction at R = 2.
Outcome restriction() {
    auto spec = BundleSpec::make(3, 1);
    const auto& r = tau_rep(spec);
    double lo = 1e300, hi = 0.0, dual = 0.0;
    std::mt19937_64 rng(1101);
    CVec w = tau_vector(spec, rng);
    KElement k = haar_sample_K(3, rng);
    for (const auto& s : r.branching())
        for (double l : {0.5, 1.0, 2.0}) {
            auto pt = SpectralPoint::make(spec, s, l);
            double nu = plancherel_density(pt);
            for (double R : {2.0, 4.0, 8.0}) {
                double ff = std::norm(bump_fourier_scalar(pt, R)) * double(r.d_sigma(s)) / r.d_tau();
                double ratio = nu * ff / (R * bump_norm2(spec, R, 1.0));
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            auto f = bump_section(spec, w, 2.0);
            CVec radon_path = fourier_helgason(f, pt, k, {24, 24, 24});
            CVec trace_path = bump_fourier_scalar(pt, 2.0) * (r.projector(s) * (r.tau(k).transpose().cast<cplx>() * w));
            dual = std::max(dual, (radon_path - trace_path).norm() / trace_path.norm());
        }
    return {hi <= 1.0 && lo > 0.0 && dual <= 1e-6,
            "ratios in [" + show(lo) + ", " + show(hi) + "] <= C = 1; Radon vs trace " + show(dual) + " <= 1e-6"};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double budget_s;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all = {
        {1, "Jacobi connection formula", 5, jacobi_connection},
        {2, "c-function shift identity", 1, c_identity},
        {3, "Plancherel density cross-check", 1, plancherel},
        {4, "spherical function at the identity", 1, identity_at_zero},
        {5, "asymptotic remainder", 10, asymptotic_remainder},
        {6, "ball-average limit and two-sided bound", 60, strichartz},
        {7, "Eisenstein HS-norm limit", 10, eisenstein},
        {8, "inversion formula", 300, inversion},
        {9, "round trips, E-defect bound, KAK projector", 30, appendix},
        {10, "Schur orthogonality and Gram identity", 120, schur_gram},
        {11, "Fourier restriction ratio", 600, restriction},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.budget_s;
        bool ok = o.ok && in_time;
        failed += !ok;
        std::printf("%s %2d %s: %s; %.2f s (budget %.0f s)%s\n", ok ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs,
                    c.budget_s, in_time ? "" : " over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
