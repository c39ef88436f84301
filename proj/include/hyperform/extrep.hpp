#pragma once

// tau_p of SO(n) on Lambda^p C^n and its branching to M = SO(n-1) = Stab(e_1).
// Basis: p-subsets of {0..n-1} in colexicographic order (increasing bitmask).

#include "hyperform/core.hpp"
#include "hyperform/liegroup.hpp"

#include <array>
#include <bit>
#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace hyperform {

enum class Chirality { none, plus, minus };
enum class CaseType { generic, half_odd, half_even };

inline std::string to_string(Chirality c) {
    switch (c) {
    case Chirality::plus: return "plus";
    case Chirality::minus: return "minus";
    default: return "none";
    }
}

inline std::string to_string(CaseType c) {
    switch (c) {
    case CaseType::half_odd: return "half_odd";
    case CaseType::half_even: return "half_even";
    default: return "generic";
    }
}

struct BundleSpec {
    int n = 3;
    int p = 1;
    Chirality chirality = Chirality::none;

    static BundleSpec make(int n, int p, Chirality chir = Chirality::none) {
        BundleSpec s{n, p, chir};
        s.validate();
        return s;
    }

    void validate() const {
        if (n < 2 || n > 16) throw ValidationError("BundleSpec: n must lie in [2, 16]");
        if (p < 1 || p > n / 2) throw ValidationError("BundleSpec: p must lie in [1, n/2]");
        bool middle = (n % 2 == 0) && (2 * p == n);
        if (chirality != Chirality::none && !middle)
            throw ValidationError("BundleSpec: chirality requires n even and p = n/2");
        // tau_{n/2} is reducible; only its halves carry a multiplicity-free branching
        if (middle && chirality == Chirality::none)
            throw ValidationError("BundleSpec: p = n/2 requires chirality plus or minus");
    }

    CaseType case_type() const {
        if (2 * p == n) return CaseType::half_even;
        if (2 * p == n - 1) return CaseType::half_odd;
        return CaseType::generic;
    }

    double rho() const { return 0.5 * (n - 1); }
    int full_dim() const { return binomial_int(n, p); }
    int dim() const { return chirality == Chirality::none ? full_dim() : full_dim() / 2; }

    auto operator<=>(const BundleSpec&) const = default;
};

struct MLabel {
    enum class Kind { q, plus, minus };
    Kind kind = Kind::q;
    int q = 0;

    static MLabel Q(int q) { return {Kind::q, q}; }
    static MLabel Plus() { return {Kind::plus, 0}; }
    static MLabel Minus() { return {Kind::minus, 0}; }

    bool is_chiral() const { return kind != Kind::q; }

    std::string str() const {
        if (kind == Kind::plus) return "plus";
        if (kind == Kind::minus) return "minus";
        return "q:" + std::to_string(q);
    }

    static MLabel parse(const std::string& s) {
        if (s == "plus" || s == "+") return Plus();
        if (s == "minus" || s == "-") return Minus();
        if (s.rfind("q:", 0) == 0) {
            try {
                std::size_t used = 0;
                int q = std::stoi(s.substr(2), &used);
                if (used == s.size() - 2) return Q(q);
            } catch (const std::exception&) {
            }
        }
        throw ValidationError("MLabel: cannot parse '" + s + "' (expected q:<int>, plus or minus)");
    }

    auto operator<=>(const MLabel&) const = default;
};

// ---- subset bookkeeping

namespace detail {

inline std::vector<std::uint32_t> colex_subsets(int n, int p) {
    std::vector<std::uint32_t> out;
    if (p == 0) {
        out.push_back(0);
        return out;
    }
    std::uint32_t m = (1u << p) - 1u;
    while (m < (1u << n)) {
        out.push_back(m);
        std::uint32_t c = m & (~m + 1u);
        std::uint32_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    return out;
}

inline int colex_rank(std::uint32_t mask) {
    int r = 0, i = 1;
    while (mask) {
        int c = std::countr_zero(mask);
        r += binomial_int(c, i);
        ++i;
        mask &= mask - 1;
    }
    return r;
}

// sign of (I, I^c) as a permutation of (0..n-1)
inline double shuffle_sign(std::uint32_t mask, int n) {
    int inv = 0;
    for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) inv += std::popcount(~mask & ((1u << i) - 1u));
    return (inv % 2) ? -1.0 : 1.0;
}

} // namespace detail

class FormVector {
public:
    FormVector() = default;
    FormVector(int n, int p) : n_(n), p_(p), c_(CVec::Zero(binomial_int(n, p))) {
        if (n < 1 || p < 0 || p > n) throw ValidationError("FormVector: invalid degree");
    }
    FormVector(int n, int p, CVec coeffs) : n_(n), p_(p), c_(std::move(coeffs)) {
        if (c_.size() != binomial_int(n, p)) throw ValidationError("FormVector: coefficient count must be C(n,p)");
        if (!c_.allFinite()) throw ValidationError("FormVector: non-finite coefficient");
    }

    /// e_{i_1} ^ ... ^ e_{i_p} with 0-based sorted indices.
    static FormVector basis(int n, const std::vector<int>& idx) {
        FormVector f(n, static_cast<int>(idx.size()));
        std::uint32_t mask = 0;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (idx[j] < 0 || idx[j] >= n) throw ValidationError("FormVector::basis: index out of range");
            if (j > 0 && idx[j] <= idx[j - 1]) throw ValidationError("FormVector::basis: indices must increase");
            mask |= 1u << idx[j];
        }
        f.c_(detail::colex_rank(mask)) = 1.0;
        return f;
    }

    int n() const { return n_; }
    int p() const { return p_; }
    int size() const { return static_cast<int>(c_.size()); }
    const CVec& coeffs() const { return c_; }
    CVec& coeffs() { return c_; }
    double norm() const { return c_.norm(); }

    /// <a, b> = sum a_I conj(b_I)
    cplx dot(const FormVector& o) const {
        check_same(o);
        return o.c_.dot(c_);
    }

    FormVector operator+(const FormVector& o) const {
        check_same(o);
        return FormVector(n_, p_, c_ + o.c_);
    }
    FormVector operator-(const FormVector& o) const {
        check_same(o);
        return FormVector(n_, p_, c_ - o.c_);
    }
    FormVector operator*(cplx s) const { return FormVector(n_, p_, c_ * s); }

private:
    void check_same(const FormVector& o) const {
        if (o.n_ != n_ || o.p_ != p_) throw ValidationError("FormVector: degree mismatch");
    }
    int n_ = 0, p_ = 0;
    CVec c_;
};

/// Matrix of Lambda^p(u) in the colex basis; entries are the p x p minors of u.
inline Mat exterior_power(const Mat& u, int p) {
    int n = static_cast<int>(u.rows());
    auto subs = detail::colex_subsets(n, p);
    int D = static_cast<int>(subs.size());
    Mat out(D, D);
    if (p <= 3) {
        std::vector<std::array<int, 3>> idx(D);
        for (int a = 0; a < D; ++a) {
            std::uint32_t m = subs[a];
            for (int j = 0; j < p; ++j) {
                idx[a][j] = std::countr_zero(m);
                m &= m - 1;
            }
        }
        for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b) {
                const auto& I = idx[a];
                const auto& J = idx[b];
                double v;
                if (p == 1) {
                    v = u(I[0], J[0]);
                } else if (p == 2) {
                    v = u(I[0], J[0]) * u(I[1], J[1]) - u(I[0], J[1]) * u(I[1], J[0]);
                } else {
                    v = u(I[0], J[0]) * (u(I[1], J[1]) * u(I[2], J[2]) - u(I[1], J[2]) * u(I[2], J[1])) -
                        u(I[0], J[1]) * (u(I[1], J[0]) * u(I[2], J[2]) - u(I[1], J[2]) * u(I[2], J[0])) +
                        u(I[0], J[2]) * (u(I[1], J[0]) * u(I[2], J[1]) - u(I[1], J[1]) * u(I[2], J[0]));
                }
                out(a, b) = v;
            }
        return out;
    }
    // induced action on basis wedges, one column at a time
    std::vector<std::vector<std::uint32_t>> levels(p + 1);
    for (int k = 0; k <= p; ++k) levels[k] = detail::colex_subsets(n, k);
    for (int b = 0; b < D; ++b) {
        std::vector<double> cur(1, 1.0);
        std::uint32_t m = subs[b];
        for (int k = 0; k < p; ++k) {
            int j = std::countr_zero(m);
            m &= m - 1;
            std::vector<double> next(levels[k + 1].size(), 0.0);
            for (std::size_t a = 0; a < levels[k].size(); ++a) {
                if (cur[a] == 0.0) continue;
                std::uint32_t I = levels[k][a];
                for (int i = 0; i < n; ++i) {
                    if (I & (1u << i)) continue;
                    double s = (std::popcount(I >> (i + 1)) % 2) ? -1.0 : 1.0;
                    next[detail::colex_rank(I | (1u << i))] += s * cur[a] * u(i, j);
                }
            }
            cur.swap(next);
        }
        for (int a = 0; a < D; ++a) out(a, b) = cur[a];
    }
    return out;
}

/// Hodge star Lambda^p -> Lambda^{n-p}, *e_I = sgn(I, I^c) e_{I^c}.
inline FormVector hodge_star(const FormVector& xi) {
    int n = xi.n(), p = xi.p();
    auto subs = detail::colex_subsets(n, p);
    FormVector out(n, n - p);
    std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
    for (std::size_t a = 0; a < subs.size(); ++a) {
        std::uint32_t comp = full & ~subs[a];
        out.coeffs()(detail::colex_rank(comp)) += detail::shuffle_sign(subs[a], n) * xi.coeffs()(a);
    }
    return out;
}

/// e_1 ^ xi (index 0 is the first basis vector).
inline FormVector wedge_e1(const FormVector& xi) {
    int n = xi.n(), p = xi.p();
    if (p >= n) throw ValidationError("wedge_e1: degree too large");
    auto subs = detail::colex_subsets(n, p);
    FormVector out(n, p + 1);
    for (std::size_t a = 0; a < subs.size(); ++a)
        if (!(subs[a] & 1u)) out.coeffs()(detail::colex_rank(subs[a] | 1u)) = xi.coeffs()(a);
    return out;
}

/// interior product with e_1.
inline FormVector contract_e1(const FormVector& xi) {
    int n = xi.n(), p = xi.p();
    if (p < 1) throw ValidationError("contract_e1: degree must be >= 1");
    auto subs = detail::colex_subsets(n, p);
    FormVector out(n, p - 1);
    for (std::size_t a = 0; a < subs.size(); ++a)
        if (subs[a] & 1u) out.coeffs()(detail::colex_rank(subs[a] & ~1u)) = xi.coeffs()(a);
    return out;
}

namespace detail {
inline Mat operator_matrix(int n, int p, int p_out, FormVector (*op)(const FormVector&)) {
    int D = binomial_int(n, p);
    Mat m = Mat::Zero(binomial_int(n, p_out), D);
    for (int a = 0; a < D; ++a) {
        FormVector e(n, p);
        e.coeffs()(a) = 1.0;
        m.col(a) = op(e).coeffs().real();
    }
    return m;
}
} // namespace detail

/// Cached representation data for one BundleSpec.
class TauRep {
public:
    explicit TauRep(const BundleSpec& spec) : spec_(spec) {
        spec_.validate();
        int n = spec.n, p = spec.p;
        D_ = spec.full_dim();
        subsets_ = detail::colex_subsets(n, p);
        CMat PQp = CMat::Zero(D_, D_), PQm = CMat::Zero(D_, D_);
        for (int a = 0; a < D_; ++a) {
            if (subsets_[a] & 1u) PQm(a, a) = 1.0;
            else PQp(a, a) = 1.0;
        }
        Mat star = detail::operator_matrix(n, p, n - p, hodge_star);
        if (spec.case_type() == CaseType::half_even) {
            cplx mu = (p % 2 == 0) ? cplx(1.0) : I;
            double sgn = spec.chirality == Chirality::plus ? 1.0 : -1.0;
            CMat pi = 0.5 * (CMat::Identity(D_, D_) + sgn * star.cast<cplx>() / mu);
            chiral_ = 0.5 * (pi + pi.adjoint());
            labels_ = {MLabel::Q(p)};
            proj_[MLabel::Q(p)] = chiral_;
        } else if (spec.case_type() == CaseType::half_odd) {
            Mat iota = detail::operator_matrix(n, p + 1, p, contract_e1);
            CMat S = (iota * star).cast<cplx>();
            cplx c = std::pow(I, p * (p + 2));
            CMat cs = c * S * PQp;
            CMat pp = 0.5 * (PQp + cs), pm = 0.5 * (PQp - cs);
            labels_ = {MLabel::Q(p - 1), MLabel::Plus(), MLabel::Minus()};
            proj_[MLabel::Q(p - 1)] = PQm;
            proj_[MLabel::Plus()] = 0.5 * (pp + pp.adjoint());
            proj_[MLabel::Minus()] = 0.5 * (pm + pm.adjoint());
        } else {
            labels_ = {MLabel::Q(p - 1), MLabel::Q(p)};
            proj_[MLabel::Q(p - 1)] = PQm;
            proj_[MLabel::Q(p)] = PQp;
        }
        if (spec.chirality == Chirality::none) chiral_ = CMat::Identity(D_, D_);
    }

    const BundleSpec& spec() const { return spec_; }
    int full_dim() const { return D_; }
    const std::vector<MLabel>& branching() const { return labels_; }

    bool admissible(const MLabel& s) const {
        for (const auto& l : labels_)
            if (l == s) return true;
        return false;
    }
    void require(const MLabel& s) const {
        if (!admissible(s))
            throw ValidationError("label " + s.str() + " is not in the branching of (n=" + std::to_string(spec_.n) +
                                  ", p=" + std::to_string(spec_.p) + ")");
    }

    const CMat& projector(const MLabel& s) const {
        require(s);
        return proj_.at(s);
    }
    /// Orthogonal projector of Lambda^p onto V_tau (identity unless chiral).
    const CMat& tau_projector() const { return chiral_; }

    int d_tau() const { return spec_.dim(); }
    int d_sigma(const MLabel& s) const {
        require(s);
        if (s.is_chiral()) return binomial_int(spec_.n - 1, spec_.p) / 2;
        return binomial_int(spec_.n - 1, s.q);
    }
    double d_tau_sigma(const MLabel& s) const { return static_cast<double>(d_tau()) / d_sigma(s); }

    Mat tau(const KElement& k) const {
        if (k.n() != spec_.n) throw ValidationError("tau: dimension mismatch");
        return exterior_power(k.matrix(), spec_.p);
    }

    void check_member(const FormVector& v, double tol = 1e-10) const {
        if (v.n() != spec_.n || v.p() != spec_.p) throw ValidationError("FormVector degree does not match the bundle");
        if (spec_.chirality != Chirality::none) {
            double off = (v.coeffs() - chiral_ * v.coeffs()).norm();
            if (off > tol * std::max(1.0, v.norm()))
                throw ValidationError("FormVector is not in the chirality eigenspace (defect " + std::to_string(off) + ")");
        }
    }

private:
    BundleSpec spec_;
    int D_ = 0;
    std::vector<std::uint32_t> subsets_;
    std::vector<MLabel> labels_;
    std::map<MLabel, CMat> proj_;
    CMat chiral_;
};

inline const TauRep& tau_rep(const BundleSpec& spec) {
    static std::mutex mu;
    static std::map<BundleSpec, std::unique_ptr<TauRep>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(spec);
    if (it == cache.end()) it = cache.emplace(spec, std::make_unique<TauRep>(spec)).first;
    return *it->second;
}

inline std::vector<MLabel> branching(const BundleSpec& spec) { return tau_rep(spec).branching(); }

struct Dims {
    int d_tau;
    int d_sigma;
    double d_tau_sigma;
};

inline Dims dims(const BundleSpec& spec, const MLabel& s) {
    const auto& r = tau_rep(spec);
    return {r.d_tau(), r.d_sigma(s), r.d_tau_sigma(s)};
}

inline FormVector tau_apply(const KElement& k, const FormVector& xi) {
    if (k.n() != xi.n()) throw ValidationError("tau_apply: dimension mismatch");
    return FormVector(xi.n(), xi.p(), exterior_power(k.matrix(), xi.p()).cast<cplx>() * xi.coeffs());
}

inline FormVector project_M(const BundleSpec& spec, const MLabel& s, const FormVector& xi) {
    const auto& r = tau_rep(spec);
    if (xi.n() != spec.n || xi.p() != spec.p) throw ValidationError("project_M: degree mismatch");
    return FormVector(xi.n(), xi.p(), r.projector(s) * xi.coeffs());
}

/// Orthonormal basis of V_tau as columns (all of Lambda^p unless chiral).
inline CMat tau_basis(const BundleSpec& spec) {
    const auto& r = tau_rep(spec);
    if (spec.chirality == Chirality::none) return CMat::Identity(r.full_dim(), r.full_dim());
    Eigen::SelfAdjointEigenSolver<CMat> es(r.tau_projector());
    return es.eigenvectors().rightCols(r.d_tau());
}

} // namespace hyperform
