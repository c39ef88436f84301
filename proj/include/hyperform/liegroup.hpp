#pragma once

// SO_0(n,1) in its defining (n+1)x(n+1) representation, J = diag(1,...,1,-1).
// A = {a_t}, N = {n_y}, K = SO(n) embedded as diag(u, 1).

#include "hyperform/core.hpp"

#include <cmath>
#include <random>

namespace hyperform {

inline constexpr double group_tol = 1e-10;
inline constexpr double factor_tol = 1e-8;
inline constexpr double tie_eps = 1e-12;

class KElement {
public:
    KElement() = default;
    explicit KElement(int n) : u_(Mat::Identity(n, n)) {}

    static KElement from_matrix(const Mat& u, double tol = group_tol) {
        if (u.rows() != u.cols() || u.rows() < 2) throw ValidationError("KElement: matrix must be square with n >= 2");
        double orth = (u.transpose() * u - Mat::Identity(u.rows(), u.rows())).cwiseAbs().maxCoeff();
        if (orth > tol) throw ValidationError("KElement: matrix is not orthogonal (defect " + std::to_string(orth) + ")");
        if (u.determinant() < 0) throw ValidationError("KElement: determinant is -1");
        return unchecked(u);
    }
    static KElement unchecked(const Mat& u) {
        KElement k;
        k.u_ = u;
        return k;
    }

    int n() const { return static_cast<int>(u_.rows()); }
    const Mat& matrix() const { return u_; }
    KElement inverse() const { return unchecked(u_.transpose()); }
    KElement operator*(const KElement& o) const { return unchecked(u_ * o.u_); }

private:
    Mat u_;
};

class GroupElement {
public:
    GroupElement() = default;
    explicit GroupElement(int n) : g_(Mat::Identity(n + 1, n + 1)) {}

    static GroupElement from_matrix(const Mat& g, double tol = group_tol) {
        if (g.rows() != g.cols() || g.rows() < 3) throw ValidationError("GroupElement: matrix must be square of size n+1 >= 3");
        int n = static_cast<int>(g.rows()) - 1;
        Mat J = Mat::Identity(n + 1, n + 1);
        J(n, n) = -1.0;
        double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        double defect = (g.transpose() * J * g - J).cwiseAbs().maxCoeff();
        if (defect > tol * scale * scale)
            throw ValidationError("GroupElement: g^T J g != J (defect " + std::to_string(defect) + ")");
        if (g(n, n) < 1.0 - tol) throw ValidationError("GroupElement: not in the identity component (g_nn < 1)");
        if (g.determinant() < 0)
            throw ValidationError("GroupElement: determinant is -1");
        return unchecked(g);
    }
    static GroupElement unchecked(const Mat& g) {
        GroupElement e;
        e.g_ = g;
        return e;
    }

    int n() const { return static_cast<int>(g_.rows()) - 1; }
    const Mat& matrix() const { return g_; }

    GroupElement operator*(const GroupElement& o) const { return unchecked(g_ * o.g_); }

    GroupElement inverse() const {
        Mat inv = g_.transpose();
        int n = this->n();
        inv.col(n).head(n) *= -1.0;
        inv.row(n).head(n) *= -1.0;
        return unchecked(inv);
    }

    Vec apply(const Vec& x) const { return g_ * x; }

private:
    Mat g_;
};

inline GroupElement embed(const KElement& k) {
    int n = k.n();
    Mat g = Mat::Identity(n + 1, n + 1);
    g.topLeftCorner(n, n) = k.matrix();
    return GroupElement::unchecked(g);
}

inline GroupElement operator*(const KElement& k, const GroupElement& g) { return embed(k) * g; }
inline GroupElement operator*(const GroupElement& g, const KElement& k) { return g * embed(k); }

inline GroupElement make_rotation(const Mat& u) { return embed(KElement::from_matrix(u)); }

inline GroupElement make_at(int n, double t) {
    if (n < 2) throw ValidationError("make_at: n must be >= 2");
    Mat g = Mat::Identity(n + 1, n + 1);
    g(0, 0) = g(n, n) = std::cosh(t);
    g(0, n) = g(n, 0) = std::sinh(t);
    return GroupElement::unchecked(g);
}

inline GroupElement make_ny(const Vec& y) {
    int n = static_cast<int>(y.size()) + 1;
    if (n < 2) throw ValidationError("make_ny: empty y");
    double r = y.squaredNorm();
    Mat g = Mat::Identity(n + 1, n + 1);
    g(0, 0) = 1.0 - r / 2;
    g(0, n) = r / 2;
    g(n, 0) = -r / 2;
    g(n, n) = 1.0 + r / 2;
    for (int i = 0; i < n - 1; ++i) {
        g(0, i + 1) = y(i);
        g(n, i + 1) = y(i);
        g(i + 1, 0) = -y(i);
        g(i + 1, n) = y(i);
    }
    return GroupElement::unchecked(g);
}

// Rotation by phi in the oriented plane (e1, w), w a unit vector orthogonal to e1.
inline Mat plane_rotation(int n, const Vec& w, double phi) {
    Mat r = Mat::Identity(n, n);
    Vec e1 = Vec::Zero(n);
    e1(0) = 1.0;
    r += (std::cos(phi) - 1.0) * (e1 * e1.transpose() + w * w.transpose());
    r += std::sin(phi) * (w * e1.transpose() - e1 * w.transpose());
    return r;
}

// Element of SO(n) sending e_j to the unit vector v. Fixes e_0 when j != 0 and v is orthogonal to e_0.
inline Mat rotation_sending(int n, int j, const Vec& v) {
    Vec w = -v;
    w(j) += 1.0;
    double w2 = w.squaredNorm();
    if (w2 < 1e-300) return Mat::Identity(n, n);
    Mat h = Mat::Identity(n, n) - (2.0 / w2) * w * w.transpose();
    // second reflection through e_{n-1}^perp restores det = +1 and keeps e_j
    h.col(n - 1) *= -1.0;
    return h;
}

struct Iwasawa {
    KElement kappa;
    double H = 0.0;
    Vec y;
};

/// g = kappa(g) a_{H(g)} n_y.
inline Iwasawa iwasawa(const GroupElement& g, double tol = factor_tol) {
    const Mat& m = g.matrix();
    int n = g.n();
    double e = m(n, 0) + m(n, n);
    if (!(e > 0.0)) throw ConsistencyError("iwasawa: c_1 + d is not positive");
    Iwasawa out;
    out.H = std::log(e);
    out.y = m.row(n).segment(1, n - 1).transpose() / e;
    Mat kap = m * make_ny(-out.y).matrix() * make_at(n, -out.H).matrix();
    double off = std::max(kap.row(n).head(n).cwiseAbs().maxCoeff(), kap.col(n).head(n).cwiseAbs().maxCoeff());
    off = std::max(off, std::abs(kap(n, n) - 1.0));
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff()) * std::exp(std::abs(out.H));
    if (off > tol * scale) throw ConsistencyError("iwasawa: kappa is not in K (defect " + std::to_string(off) + ")");
    out.kappa = KElement::unchecked(kap.topLeftCorner(n, n));
    return out;
}

namespace detail {
// Polar data of k e1 = cos(theta) e1 + sin(theta) w.
struct AxisAngle {
    double theta;
    Vec w;
};

inline AxisAngle axis_angle(const Vec& v) {
    int n = static_cast<int>(v.size());
    AxisAngle out;
    out.w = Vec::Zero(n);
    if (n == 2) {
        out.theta = std::atan2(v(1), v(0));
        out.w(1) = 1.0;
        return out;
    }
    Vec rest = v.tail(n - 1);
    double s = rest.norm();
    out.theta = std::atan2(s, v(0));
    if (s > 1e-300) {
        out.w.tail(n - 1) = rest / s;
    } else {
        out.w(1) = 1.0;
    }
    return out;
}
} // namespace detail

/// Iwasawa kappa and H of a_t k, without forming the (possibly huge) matrix.
inline Iwasawa iwasawa_ak(double t, const KElement& k) {
    int n = k.n();
    auto aa = detail::axis_angle(k.matrix().col(0));
    double c2 = std::cos(aa.theta / 2), s2 = std::sin(aa.theta / 2);
    c2 *= c2;
    s2 *= s2;
    Iwasawa out;
    double logeH = t >= 0 ? t + std::log(c2 + std::exp(-2 * t) * s2) : -t + std::log(s2 + std::exp(2 * t) * c2);
    out.H = logeH;
    double ct = (t >= 0 ? c2 - std::exp(-2 * t) * s2 : std::exp(2 * t) * c2 - s2) * std::exp(std::abs(t) - logeH);
    double st = std::sin(aa.theta) * std::exp(-logeH);
    double thp = std::atan2(st, ct);
    out.kappa = KElement::unchecked(plane_rotation(n, aa.w, thp - aa.theta) * k.matrix());
    return out;
}

inline double aplus(const GroupElement& g) {
    double d = g.matrix()(g.n(), g.n());
    return d <= 1.0 ? 0.0 : std::acosh(d);
}

/// pi_0(g) = A - b c^T / (1 + d), the K-factor of the polar decomposition.
inline KElement polar_k(const GroupElement& g) {
    const Mat& m = g.matrix();
    int n = g.n();
    Mat u = m.topLeftCorner(n, n) - m.col(n).head(n) * m.row(n).head(n) / (1.0 + m(n, n));
    return KElement::unchecked(u);
}

struct Cartan {
    KElement k1;
    double t = 0.0;
    KElement k2;
};

/// g = k1 a_t k2 with t >= 0.
inline Cartan cartan(const GroupElement& g, double tol = factor_tol) {
    int n = g.n();
    Cartan out;
    out.t = aplus(g);
    KElement pk = polar_k(g);
    double defect = (pk.matrix().transpose() * pk.matrix() - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > tol * std::max(1.0, g.matrix()(n, n)))
        throw ConsistencyError("cartan: polar factor is not orthogonal (defect " + std::to_string(defect) + ")");
    Vec b = g.matrix().col(n).head(n);
    if (out.t < tie_eps || b.norm() < tie_eps) {
        out.t = 0.0;
        out.k1 = pk;
        out.k2 = KElement(n);
        return out;
    }
    out.k1 = KElement::unchecked(rotation_sending(n, 0, b / b.norm()));
    out.k2 = KElement::unchecked(out.k1.matrix().transpose() * pk.matrix());
    return out;
}

/// Cartan factors of h a_t, stable for large t when h is moderate.
inline Cartan cartan_product(const GroupElement& h, double t) {
    int n = h.n();
    Cartan ch = cartan(h);
    double s = ch.t;
    if (s < tie_eps) {
        Cartan out;
        out.k1 = ch.k1 * ch.k2;
        out.t = std::abs(t);
        out.k2 = KElement(n);
        if (t < 0) {
            Mat flip = Mat::Identity(n, n);
            flip(0, 0) = flip(1, 1) = -1.0;
            out.k1 = KElement::unchecked(out.k1.matrix() * flip);
            out.k2 = KElement::unchecked(flip);
        }
        return out;
    }
    // k2(h) = m1 R(phi) m2 with m1, m2 fixing e1
    const Mat& kp = ch.k2.matrix();
    Mat m1 = Mat::Identity(n, n);
    double phi;
    if (n == 2) {
        phi = std::atan2(kp(1, 0), kp(0, 0));
    } else {
        Vec rest = kp.col(0).tail(n - 1);
        double sn = rest.norm();
        phi = std::atan2(sn, kp(0, 0));
        if (sn > 1e-300) {
            Vec v = Vec::Zero(n);
            v.tail(n - 1) = rest / sn;
            m1 = rotation_sending(n, 1, v);
        }
    }
    Vec e2 = Vec::Zero(n);
    e2(1) = 1.0;
    Mat rphi = plane_rotation(n, e2, phi);
    Mat m2 = rphi.transpose() * m1.transpose() * kp;
    // a_s R(phi) a_t restricted to span(e1, e2, e_{n+1})
    double cs = std::cosh(s), ss = std::sinh(s), ct = std::cosh(t), st = std::sinh(t);
    double cp = std::cos(phi), sp = std::sin(phi);
    double b1 = cs * cp * st + ss * ct, b2 = sp * st;
    double c1 = ss * cp * ct + cs * st, c2 = -ss * sp;
    double d = ss * cp * st + cs * ct;
    Cartan out;
    out.t = d <= 1.0 ? 0.0 : std::acosh(d);
    if (out.t < 1e-6) return cartan(h * make_at(n, t));
    double alpha = std::atan2(b2, b1);
    double beta = std::atan2(-c2, c1);
    out.k1 = KElement::unchecked(ch.k1.matrix() * m1 * plane_rotation(n, e2, alpha));
    out.k2 = KElement::unchecked(plane_rotation(n, e2, beta) * m2);
    return out;
}

/// E(g, x) = A+(g x) - A+(x) - H(g k1(x)) with x = k a_t (t >= 0).
inline double e_defect_ak(const GroupElement& g, const KElement& k, double t) {
    int n = g.n();
    const Mat& m = g.matrix();
    double d = m(n, n);
    double C = m.row(n).head(n).dot(k.matrix().col(0));
    double Y = C + d, Z = d - C;
    double X = std::sinh(t) * C + d * std::cosh(t);
    double q = 1.0 / (X * X);
    return std::log1p(Z / Y * std::exp(-2 * t)) + std::log1p(-q / (2.0 * (1.0 + std::sqrt(std::max(0.0, 1.0 - q)))));
}

inline double e_defect(const GroupElement& g, const GroupElement& x) {
    Cartan c = cartan(x);
    return e_defect_ak(g, c.k1, c.t);
}

/// Density of dG/(dk dk) in the Cartan radius: (2 sinh t)^{n-1}.
inline double radial_weight(int n, double t) { return std::pow(2.0 * std::sinh(t), n - 1); }

// ---- sampling

inline KElement haar_sample_K(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    if (q.determinant() < 0) q.col(n - 1) *= -1.0;
    return KElement::unchecked(q);
}

/// k1 a_s k2 with Haar k1, k2 and s uniform in [0, s_max].
inline GroupElement random_group_element(int n, std::mt19937_64& rng, double s_max) {
    std::uniform_real_distribution<double> ud(0.0, s_max);
    KElement k1 = haar_sample_K(n, rng);
    double s = ud(rng);
    KElement k2 = haar_sample_K(n, rng);
    return k1 * make_at(n, s) * k2;
}

} // namespace hyperform
