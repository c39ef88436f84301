#include "hyperform/montecarlo.hpp"
#include "hyperform/spherical.hpp"

#include "unit/oracles.hpp"

#include <gtest/gtest.h>

using namespace hyperform;

namespace {

struct Case {
    BundleSpec spec;
    MLabel sigma;
};

std::vector<Case> cases() {
    std::vector<Case> out;
    auto add = [&](BundleSpec s) {
        for (const auto& l : branching(s)) out.push_back({s, l});
    };
    add(BundleSpec::make(3, 1));
    add(BundleSpec::make(4, 1));
    add(BundleSpec::make(5, 1));
    add(BundleSpec::make(5, 2));
    add(BundleSpec::make(6, 2));
    add(BundleSpec::make(7, 3));
    add(BundleSpec::make(2, 1, Chirality::plus));
    add(BundleSpec::make(4, 2, Chirality::plus));
    add(BundleSpec::make(4, 2, Chirality::minus));
    add(BundleSpec::make(6, 3, Chirality::minus));
    return out;
}

std::string name(const Case& c) {
    return "n=" + std::to_string(c.spec.n) + " p=" + std::to_string(c.spec.p) + " chir=" + to_string(c.spec.chirality) +
           " sigma=" + c.sigma.str();
}

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST(SpectralPoint, Validation) {
    auto s = BundleSpec::make(5, 2);
    EXPECT_THROW(SpectralPoint::make(s, MLabel::Q(2), 1.0), ValidationError);
    EXPECT_THROW(SpectralPoint::make(s, MLabel::Plus(), 1e-8), ValidationError);
    EXPECT_NO_THROW(SpectralPoint::make(s, MLabel::Plus(), -0.5));
}

TEST(ScalarComponents, EqualOneAtOrigin) {
    for (const auto& c : cases())
        for (double l : {0.3, 1.0, 4.0}) {
            auto v = scalar_components(SpectralPoint::make(c.spec, c.sigma, l), 0.0);
            for (const auto& [k, x] : v.components) EXPECT_LT(std::abs(x - 1.0), 1e-12) << name(c);
        }
}

TEST(ScalarComponents, MatchEisensteinIntegral) {
    for (const auto& c : cases())
        for (double l : {0.5, 1.7})
            for (double t : {0.4, 1.5, 3.0}) {
                auto v = scalar_components(SpectralPoint::make(c.spec, c.sigma, l), t);
                for (const auto& [eta, x] : v.components) {
                    cplx o = oracle::eisenstein_component(c.spec, c.sigma, l, eta, t);
                    EXPECT_LT(std::abs(x - o), 1e-9 * std::max(1.0, std::abs(o)))
                        << name(c) << " eta=" << eta.str() << " lambda=" << l << " t=" << t << " got " << x << " want " << o;
                }
            }
}

TEST(ScalarComponents, MatchEisensteinIntegralComplexLambda) {
    for (const auto& c : cases()) {
        cplx l(0.8, -0.4);
        auto comps = detail::components_scaled(c.spec, c.sigma, l, 2.0);
        for (const auto& [eta, x] : comps) {
            cplx o = oracle::eisenstein_component(c.spec, c.sigma, l, eta, 2.0) * std::exp(c.spec.rho() * 2.0);
            EXPECT_LT(std::abs(x - o), 1e-8 * std::max(1.0, std::abs(o))) << name(c) << " eta=" << eta.str();
        }
    }
}

TEST(ScalarComponents, DirectFormulaSubstitution) {
    // n = 6, p = 2, sigma_p
    auto pt = SpectralPoint::make(BundleSpec::make(6, 2), MLabel::Q(2), 1.0);
    double t = 2.0;
    auto v = scalar_components(pt, t);
    cplx A = jacobi_phi({2.0, -0.5, 1.0}, t), B = jacobi_phi({3.0, -0.5, 1.0}, t);
    EXPECT_LT(std::abs(v.components.at(MLabel::Q(1)) - B), 1e-13);
    EXPECT_LT(std::abs(v.components.at(MLabel::Q(2)) - (1.5 * A - 0.5 * std::cosh(t) * B)), 1e-13);
}

TEST(ScalarComponents, ChiralSignStructure) {
    auto s = BundleSpec::make(5, 2);
    auto vp = scalar_components(SpectralPoint::make(s, MLabel::Plus(), 1.0), 1.0);
    auto vm = scalar_components(SpectralPoint::make(s, MLabel::Minus(), 1.0), 1.0);
    EXPECT_LT(std::abs(vp.components.at(MLabel::Q(1)) - vm.components.at(MLabel::Q(1))), 1e-15);
    EXPECT_LT(std::abs(vp.components.at(MLabel::Plus()) - vm.components.at(MLabel::Minus())), 1e-15);
    cplx sinh_term = 2.0 * I / 6.0 * std::sinh(1.0) * jacobi_phi({2.5, -0.5, 1.0}, 1.0);
    EXPECT_LT(std::abs(vp.components.at(MLabel::Plus()) - vp.components.at(MLabel::Minus()) - 2.0 * sinh_term), 1e-13);
}

TEST(SphericalAt, IdentityAndBlockStructure) {
    for (const auto& c : cases()) {
        auto pt = SpectralPoint::make(c.spec, c.sigma, 1.3);
        const auto& r = tau_rep(c.spec);
        CMat e = spherical_at(pt, GroupElement(c.spec.n));
        EXPECT_LT(max_abs(e - r.tau_projector()), 1e-12) << name(c);
        CMat a = spherical_at(pt, make_at(c.spec.n, 1.7));
        for (const auto& eta : r.branching()) EXPECT_LT(max_abs(a * r.projector(eta) - r.projector(eta) * a), 1e-12);
    }
}

TEST(SphericalAt, IndependentOfMAmbiguity) {
    std::mt19937_64 rng(5);
    for (const auto& c : cases()) {
        int n = c.spec.n;
        auto pt = SpectralPoint::make(c.spec, c.sigma, 0.9);
        GroupElement g = random_group_element(n, rng, 2.0);
        Cartan cg = cartan(g);
        Mat m = Mat::Identity(n, n);
        if (n > 2) m.bottomRightCorner(n - 1, n - 1) = haar_sample_K(n - 1, rng).matrix();
        KElement mk = KElement::unchecked(m);
        Cartan alt{cg.k1 * mk, cg.t, mk.inverse() * cg.k2};
        EXPECT_LT(max_abs(spherical_from_cartan(pt, cg) - spherical_from_cartan(pt, alt)), 1e-12) << name(c);
    }
}

TEST(SphericalAt, TauRadiality) {
    std::mt19937_64 rng(6);
    auto pt = SpectralPoint::make(BundleSpec::make(5, 2), MLabel::Plus(), 0.7);
    const auto& r = tau_rep(pt.spec);
    GroupElement g = random_group_element(5, rng, 2.0);
    KElement k1 = haar_sample_K(5, rng), k2 = haar_sample_K(5, rng);
    CMat lhs = spherical_at(pt, k1 * g * k2);
    CMat rhs = r.tau(k2).transpose().cast<cplx>() * spherical_at(pt, g) * r.tau(k1).transpose().cast<cplx>();
    EXPECT_LT(max_abs(lhs - rhs), 1e-12);
}

TEST(SphericalAt, EisensteinMonteCarlo) {
    auto pt = SpectralPoint::make(BundleSpec::make(3, 1), MLabel::Plus(), 1.0);
    const auto& r = tau_rep(pt.spec);
    const double t = 1.0;
    const double d = r.d_tau_sigma(pt.sigma);
    const CMat& P = r.projector(pt.sigma);
    auto mc = monte_carlo(1000000, 2024, 9, [&](std::mt19937_64& rng) {
        KElement k = haar_sample_K(3, rng);
        Iwasawa iw = iwasawa_ak(-t, k);
        CMat m = d * std::exp(-(I + 1.0) * iw.H) * (r.tau(iw.kappa).cast<cplx>() * P * r.tau(k).transpose().cast<cplx>());
        return CVec(Eigen::Map<CVec>(m.data(), 9));
    });
    CMat exact = spherical_at(pt, make_at(3, t));
    for (int i = 0; i < 9; ++i) EXPECT_LT(std::abs(mc.mean(i) - exact.data()[i]), 3.5 * mc.stderr_(i).real() + 1e-12) << i;
}

TEST(CSigma, AsymptoticConsistency) {
    for (const auto& c : cases()) {
        cplx l(1.0, -1.2);
        cplx target = c_sigma(c.spec, c.sigma, l);
        // half-even components live on t/2 and approach the limit like e^{-t}
        double f = c.spec.case_type() == CaseType::half_even ? 2.0 : 1.0;
        for (double t : {10.0 * f, 14.0 * f}) {
            auto comps = detail::components_scaled(c.spec, c.sigma, l, t);
            cplx v = comps.at(c.sigma) * std::exp(-I * l * t);
            EXPECT_LT(std::abs(v - target), 1e-6 * std::abs(target)) << name(c) << " t=" << t;
        }
    }
}

TEST(CSigma, WeylModulusSymmetry) {
    for (const auto& c : cases())
        for (double l : {0.4, 2.2}) {
            auto [s, ml] = weyl_reflect(c.sigma, l);
            EXPECT_NEAR(std::abs(c_sigma(c.spec, s, ml)), std::abs(c_sigma(c.spec, c.sigma, l)), 1e-13) << name(c);
        }
}

TEST(CSigma, HalfOddThreeDimensional) {
    cplx v = c_sigma(BundleSpec::make(3, 1), MLabel::Q(0), 1.0);
    EXPECT_LT(std::abs(v - (I - 1.0) / 2.0 * c_jacobi(1.5, -0.5, 1.0)), 1e-15);
}

TEST(Plancherel, ClosedFormMatchesCFunction) {
    for (const auto& c : cases())
        for (double l : {0.3, 1.0, 2.7}) {
            auto pt = SpectralPoint::make(c.spec, c.sigma, l);
            double a = plancherel_density(pt), b = plancherel_density_from_c(pt);
            EXPECT_GT(a, 0.0);
            EXPECT_LT(std::abs(a - b), 1e-10 * b) << name(c) << " lambda=" << l;
        }
}

TEST(Plancherel, HandValue) {
    // sigma_1 of tau_1 at n = 3 splits into plus/minus; each carries half of (lambda^2 + 1) / (3 pi)
    for (auto s : {MLabel::Plus(), MLabel::Minus()}) {
        auto pt = SpectralPoint::make(BundleSpec::make(3, 1), s, 1.0);
        EXPECT_NEAR(2 * plancherel_density(pt), 2.0 / (3 * pi), 1e-14);
        EXPECT_NEAR(2 * plancherel_density(pt), 0.2122, 1e-4);
    }
    auto pt = SpectralPoint::make(BundleSpec::make(5, 1), MLabel::Q(1), 1.0);
    // d_{tau,sigma} = 5/4, Gamma(5/2)^2 = 9 pi / 16, rho - q = 1
    EXPECT_NEAR(plancherel_density(pt), 1.0 / (18 * pi), 1e-14);
}

TEST(Plancherel, GrowthEnvelope) {
    // nu ~ lambda^{n-1} at infinity; at the origin nu ~ lambda^2 unless q = rho (the plus/minus labels)
    for (const auto& c : cases()) {
        double lo = 1e300, hi = 0;
        int n = c.spec.n;
        double e0 = c.sigma.is_chiral() ? 0.0 : 2.0;
        for (double l = 0.1; l <= 50.0; l *= 1.1) {
            double env = std::pow(l / (1 + l), e0) * std::pow(1 + l, n - 1);
            double r = plancherel_density(SpectralPoint::make(c.spec, c.sigma, l)) / env;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        EXPECT_GT(lo, 0.0);
        EXPECT_LT(hi / lo, 100.0) << name(c);
    }
}

TEST(Weyl, Reflection) {
    auto [a, la] = weyl_reflect(MLabel::Q(1), 0.7);
    EXPECT_EQ(a, MLabel::Q(1));
    EXPECT_EQ(la, -0.7);
    auto [b, lb] = weyl_reflect(MLabel::Plus(), 0.7);
    EXPECT_EQ(b, MLabel::Minus());
    auto [c, lc] = weyl_reflect(b, lb);
    EXPECT_EQ(c, MLabel::Plus());
    EXPECT_EQ(lc, 0.7);
}

TEST(Weyl, SphericalFunctionInvariant) {
    for (const auto& c : cases()) {
        auto pt = SpectralPoint::make(c.spec, c.sigma, 1.1);
        auto w = weyl_reflect(pt);
        GroupElement g = make_at(c.spec.n, 2.3);
        EXPECT_LT(max_abs(spherical_at(pt, g) - spherical_at(w, g)), 1e-11) << name(c);
    }
}

TEST(AsymptoticHead, ResidualDecay) {
    for (const auto& c : cases()) {
        for (double l : {0.5, 1.0, 2.0}) {
            auto pt = SpectralPoint::make(c.spec, c.sigma, l);
            double rho = pt.rho();
            double worst = 0;
            for (double t = 1.0; t <= 15.0; t += 0.5) {
                CMat res = radial_block(c.spec, scalar_components(pt, t)) - asymptotic_head_radial(pt, t);
                double e = std::exp((rho + 1) * t) * op_norm(res);
                EXPECT_TRUE(std::isfinite(e));
                worst = std::max(worst, e);
            }
            EXPECT_LT(worst, 1e4) << name(c);
        }
    }
}

TEST(AsymptoticHead, EnvelopeNonIncreasing) {
    for (const auto& c : cases())
        for (double l : {0.5, 1.0, 2.0}) {
            auto pt = SpectralPoint::make(c.spec, c.sigma, l);
            std::vector<double> tail;
            for (auto [t, e] : scaled_remainder(pt, 5.0, 15.0, 0.05)) tail.push_back(e);
            EXPECT_EQ(tail.size(), 201u);
            EXPECT_LT(envelope_growth(tail), 0.10) << name(c) << " lambda=" << l;
        }
}

TEST(EnvelopeGrowth, PeaksAndFallback) {
    std::vector<double> v;
    for (int i = 0; i < 400; ++i) v.push_back(std::exp(-0.01 * i) * std::abs(std::cos(0.05 * i)));
    EXPECT_LT(envelope_growth(v), 0.0);
    for (int i = 0; i < 400; ++i) v[i] = std::exp(0.01 * i) * std::abs(std::cos(0.05 * i));
    EXPECT_GT(envelope_growth(v), 0.5);
    EXPECT_NEAR(envelope_growth({1.0, 2.0, 3.0, 4.0}), 1.0, 1e-15);
}

TEST(AsymptoticHead, MatrixFormAgreesWithRadial) {
    auto pt = SpectralPoint::make(BundleSpec::make(6, 2), MLabel::Q(1), 1.0);
    CMat a = asymptotic_head(pt, make_at(6, 3.0));
    EXPECT_LT(max_abs(a - asymptotic_head_radial(pt, 3.0)), 1e-13);
}

TEST(RadialWeight, OperatorNorm) {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 3.0;
    m(1, 1) = cplx(0, -4.0);
    EXPECT_NEAR(op_norm(m), 4.0, 1e-14);
}
