#pragma once

// JSON and CSV serialization.

#include "hyperform/strichartz.hpp"

#include <json.hpp>

#include <iomanip>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

namespace hyperform::io {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "hyperform-report/1";

inline json to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) rows.push_back(m(i, j));
    return rows;
}

inline json to_json(const GroupElement& g) {
    return json{{"n", g.n()}, {"matrix", to_json(g.matrix())}};
}

inline json to_json(const KElement& k) {
    return json{{"n", k.n()}, {"matrix", to_json(k.matrix())}};
}

/// Interleaved (re, im) pairs.
inline json to_json(const CVec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v(i).real());
        a.push_back(v(i).imag());
    }
    return a;
}

inline json to_json(const FormVector& xi) {
    return json{{"n", xi.n()}, {"p", xi.p()}, {"coeffs", to_json(xi.coeffs())}};
}

inline json to_json(const SphericalValue& v) {
    json c = json::object();
    for (const auto& [eta, z] : v.components) c[eta.str()] = json::array({z.real(), z.imag()});
    return json{{"t", v.t}, {"components", c}};
}

inline json to_json(const BundleSpec& s) {
    return json{{"n", s.n}, {"p", s.p}, {"chirality", to_string(s.chirality)}};
}

inline json to_json(const SpectralPoint& pt) {
    return json{{"spec", to_json(pt.spec)}, {"sigma", pt.sigma.str()}, {"lambda", pt.lambda}};
}

inline json to_json(const BoundarySection& F) {
    if (!F.is_atomic()) throw ValidationError("to_json: sampler-backed sections cannot be serialized");
    json atoms = json::array();
    for (std::size_t i = 0; i < F.atoms.size(); ++i)
        atoms.push_back({{"g", to_json(F.atoms[i].g)},
                         {"v", to_json(F.atoms[i].v)},
                         {"weight", json::array({F.weights[i].real(), F.weights[i].imag()})}});
    return json{{"point", to_json(F.pt)}, {"atoms", atoms}};
}

inline json to_json(const BallAverageReport& r) {
    return json{{"R_grid", r.R_grid},
                {"values", r.values},
                {"stderrs", r.stderrs},
                {"extrapolated_limit", r.extrapolated_limit},
                {"fit_slope", r.fit_slope},
                {"bstar", r.bstar},
                {"stderr", r.stderr_},
                {"method", r.method},
                {"target", r.target}};
}

// ---- parsing

namespace detail {

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("json: missing field '") + key + "'");
    return j.at(key);
}

inline double number(const json& j, const char* what) {
    if (!j.is_number()) throw ValidationError(std::string("json: ") + what + " must be a number");
    return j.get<double>();
}

inline int integer(const json& j, const char* what) {
    if (!j.is_number_integer()) throw ValidationError(std::string("json: ") + what + " must be an integer");
    return j.get<int>();
}

} // namespace detail

inline Chirality chirality_from_string(const std::string& s) {
    if (s == "none") return Chirality::none;
    if (s == "plus" || s == "+") return Chirality::plus;
    if (s == "minus" || s == "-") return Chirality::minus;
    throw ValidationError("chirality must be none, plus or minus (got '" + s + "')");
}

/// Square matrix from a flat row-major array, or from an array of rows.
inline Mat matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("json: matrix must be a non-empty array");
    std::vector<double> flat;
    std::size_t rows = 0;
    if (j.front().is_array()) {
        rows = j.size();
        for (const auto& row : j) {
            if (!row.is_array() || row.size() != rows) throw ValidationError("json: matrix rows must all have length " + std::to_string(rows));
            for (const auto& x : row) flat.push_back(detail::number(x, "matrix entry"));
        }
    } else {
        for (const auto& x : j) flat.push_back(detail::number(x, "matrix entry"));
        rows = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
        if (rows * rows != flat.size()) throw ValidationError("json: flat matrix length is not a perfect square");
    }
    Mat m(rows, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < rows; ++k) m(i, k) = flat[i * rows + k];
    if (!m.allFinite()) throw ValidationError("json: matrix has non-finite entries");
    return m;
}

inline GroupElement group_from_json(const json& j) {
    const json& m = j.is_object() ? detail::field(j, "matrix") : j;
    Mat g = matrix_from_json(m);
    if (j.is_object() && j.contains("n") && detail::integer(j.at("n"), "n") + 1 != g.rows())
        throw ValidationError("json: matrix size does not match n");
    return GroupElement::from_matrix(g);
}

inline CVec cvec_from_json(const json& j) {
    if (!j.is_array() || j.size() % 2 != 0) throw ValidationError("json: complex vector must be an even-length array");
    CVec v(j.size() / 2);
    for (std::size_t i = 0; i < j.size() / 2; ++i)
        v(i) = cplx(detail::number(j[2 * i], "vector entry"), detail::number(j[2 * i + 1], "vector entry"));
    return v;
}

inline FormVector form_from_json(const json& j) {
    int n = detail::integer(detail::field(j, "n"), "n"), p = detail::integer(detail::field(j, "p"), "p");
    CVec c = cvec_from_json(detail::field(j, "coeffs"));
    if (n < 1 || p < 0 || p > n || c.size() != binomial_int(n, p)) throw ValidationError("json: form coefficient count does not match (n, p)");
    return FormVector(n, p, c);
}

inline BundleSpec spec_from_json(const json& j) {
    BundleSpec s{detail::integer(detail::field(j, "n"), "n"), detail::integer(detail::field(j, "p"), "p"), Chirality::none};
    if (j.contains("chirality")) s.chirality = chirality_from_string(j.at("chirality").get<std::string>());
    s.validate();
    return s;
}

inline SpectralPoint point_from_json(const json& j) {
    const json& sig = detail::field(j, "sigma");
    if (!sig.is_string()) throw ValidationError("json: sigma must be a label string");
    return SpectralPoint::make(spec_from_json(detail::field(j, "spec")), MLabel::parse(sig.get<std::string>()),
                               detail::number(detail::field(j, "lambda"), "lambda"));
}

inline BoundarySection section_from_json(const json& j) {
    if (j.is_object() && j.contains("sampler")) throw ValidationError("json: sampler-backed sections cannot be deserialized");
    SpectralPoint pt = point_from_json(detail::field(j, "point"));
    const json& arr = detail::field(j, "atoms");
    if (!arr.is_array()) throw ValidationError("json: atoms must be an array");
    std::vector<BoundaryAtom> atoms;
    std::vector<cplx> weights;
    for (const auto& a : arr) {
        atoms.push_back({group_from_json(detail::field(a, "g")), cvec_from_json(detail::field(a, "v"))});
        cplx w = 1.0;
        if (a.contains("weight")) {
            CVec wv = cvec_from_json(a.at("weight"));
            if (wv.size() != 1) throw ValidationError("json: weight must be [re, im]");
            w = wv(0);
        }
        weights.push_back(w);
    }
    return BoundarySection::from_atoms(pt, std::move(atoms), std::move(weights));
}

// ---- CSV

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string format_number(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << x;
    return os.str();
}

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\r\n";
}

inline std::string to_csv(const BallAverageReport& r) {
    std::string out = csv_line({"R", "value", "stderr", "method"});
    for (std::size_t i = 0; i < r.R_grid.size(); ++i)
        out += csv_line({format_number(r.R_grid[i]), format_number(r.values[i]),
                         format_number(i < r.stderrs.size() ? r.stderrs[i] : 0.0), r.method});
    return out;
}

// ---- verification reports

struct Row {
    std::string name;
    double target = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct Report {
    std::vector<std::pair<std::string, std::string>> config;
    std::uint64_t seed = 0;
    std::vector<Row> rows;

    /// |value - target| <= tol
    Row& check(const std::string& name, double target, double value, double tol, double stderr_ = 0.0) {
        rows.push_back({name, target, value, stderr_, tol, std::abs(value - target) <= tol});
        return rows.back();
    }
    /// value <= bound
    Row& check_below(const std::string& name, double bound, double value, double stderr_ = 0.0) {
        rows.push_back({name, bound, value, stderr_, 0.0, value <= bound});
        return rows.back();
    }
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

inline json to_json(const Report& rep) {
    json cfg = json::object();
    for (const auto& [k, v] : rep.config) cfg[k] = v;
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"name", r.name}, {"target", r.target}, {"value", r.value}, {"stderr", r.stderr_}, {"tol", r.tol}, {"pass", r.pass}});
    return json{{"meta", {{"version", schema_version}, {"config", cfg}, {"seed", rep.seed}}}, {"rows", rows}};
}

inline std::string to_csv(const Report& rep) {
    std::string out = csv_line({"name", "target", "value", "stderr", "tol", "pass"});
    for (const auto& r : rep.rows)
        out += csv_line({r.name, format_number(r.target), format_number(r.value), format_number(r.stderr_), format_number(r.tol),
                         r.pass ? "PASS" : "FAIL"});
    return out;
}

} // namespace hyperform::io
