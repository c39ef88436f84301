// hyperform: seeded verification runs emitting JSON or CSV reports.

#include "hyperform/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

using namespace hyperform;
using io::json;

namespace {

struct Config {
    int n = 3;
    int p = 1;
    std::string chirality = "none";
    std::string sigma;
    double lambda = 1.0;
    double t = 0.0;
    std::vector<double> R_grid;
    long samples = 0;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string format = "json";
    std::string config_file;
    bool series = false;

    // decompose
    std::optional<double> at;
    bool random = false;
    std::string file;
};

class Usage : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Output {
    io::Report report;
    json extra = json::object();
    std::string series_csv;
};

BundleSpec spec_of(const Config& c) {
    BundleSpec s{c.n, c.p, io::chirality_from_string(c.chirality)};
    s.validate();
    return s;
}

SpectralPoint point_of(const Config& c) {
    if (c.sigma.empty()) throw Usage("--sigma is required (q:<int>, plus or minus)");
    return SpectralPoint::make(spec_of(c), MLabel::parse(c.sigma), c.lambda);
}

std::uint64_t seed_of(const Config& c) {
    if (!c.seed) throw Usage("--seed is required for Monte Carlo commands");
    return *c.seed;
}

double tol_of(const Config& c, double fallback) { return c.tol.value_or(fallback); }

std::vector<double> grid_of(const Config& c, std::vector<double> fallback) {
    return c.R_grid.empty() ? fallback : c.R_grid;
}

/// Fixed member of the sigma-isotypic part of tau, unit norm.
CVec probe_vector(const SpectralPoint& pt) {
    const auto& r = tau_rep(pt.spec);
    CVec x(r.full_dim());
    for (int i = 0; i < x.size(); ++i) x(i) = cplx(1.0 + 0.37 * i, 0.21 * ((i * 7) % 5) - 0.4);
    CVec v = r.projector(pt.sigma) * (r.tau_projector() * x);
    return v / v.norm();
}

std::string label_row(const std::string& base, double R) { return base + "[R=" + io::format_number(R) + "]"; }

double rel_norm(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff()); }

// ---- commands

void cmd_decompose(const Config& c, Output& out) {
    GroupElement g;
    int sources = (c.at ? 1 : 0) + (c.random ? 1 : 0) + (c.file.empty() ? 0 : 1);
    if (sources != 1) throw Usage("decompose needs exactly one of --at, --random, --file");
    if (c.at) {
        g = make_at(c.n, *c.at);
    } else if (c.random) {
        std::mt19937_64 rng(seed_of(c));
        g = random_group_element(c.n, rng, 3.0);
    } else {
        std::ifstream in(c.file);
        if (!in) throw Usage("cannot open " + c.file);
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded()) throw Usage(c.file + ": not valid JSON");
        g = io::group_from_json(j);
    }
    const int n = g.n();
    Iwasawa iw = iwasawa(g);
    Cartan ca = cartan(g);
    KElement pk = polar_k(g);
    Mat Pfull = embed(pk).inverse().matrix() * g.matrix();

    double tol = tol_of(c, 1e-10);
    Mat iw_prod = (iw.kappa * make_at(n, iw.H) * make_ny(iw.y)).matrix();
    Mat ca_prod = (ca.k1 * make_at(n, ca.t) * ca.k2).matrix();
    out.report.check("iwasawa_residual", 0.0, rel_norm(iw_prod, g.matrix()), tol);
    out.report.check("cartan_residual", 0.0, rel_norm(ca_prod, g.matrix()), tol);
    out.report.check("polar_symmetry", 0.0, rel_norm(Pfull, Pfull.transpose()), tol);
    out.report.check("tplus_vs_H_bound", 0.0, std::max(0.0, std::abs(iw.H) - ca.t), tol);
    if (c.at) {
        out.report.check("H", *c.at, iw.H, 1e-12);
        out.report.check("tplus", std::abs(*c.at), ca.t, 1e-12);
    }
    out.extra["factors"] = {
        {"input", io::to_json(g)},
        {"iwasawa", {{"kappa", io::to_json(iw.kappa)}, {"H", iw.H}, {"y", iw.y}}},
        {"cartan", {{"k1", io::to_json(ca.k1)}, {"t", ca.t}, {"k2", io::to_json(ca.k2)}}},
        {"polar", {{"k", io::to_json(pk)}, {"p", io::to_json(Pfull)}}},
    };
}

void cmd_density(const Config& c, Output& out) {
    auto pt = point_of(c);
    double closed = plancherel_density(pt), from_c = plancherel_density_from_c(pt);
    out.report.check("density_closed_vs_c", closed, from_c, tol_of(c, 1e-10) * std::abs(closed));
}

void cmd_cfun(const Config& c, Output& out) {
    auto pt = point_of(c);
    double tol = tol_of(c, 1e-12);
    cplx cs = c_sigma(pt);
    double d = tau_rep(pt.spec).d_tau_sigma(pt.sigma);
    double modulus = std::sqrt(d / (2 * pi * plancherel_density(pt)));
    out.report.check("c_sigma_modulus_vs_density", modulus, std::abs(cs), 1e3 * tol * modulus);
    const int n = pt.spec.n;
    double rho = pt.rho();
    cplx lhs = c_jacobi(n / 2.0 - 1.0, -0.5, pt.lambda);
    cplx rhs = (I * pt.lambda + rho) / (2.0 * n) * c_jacobi(n / 2.0, -0.5, pt.lambda);
    out.report.check("jacobi_c_shift_identity", 0.0, std::abs(lhs - rhs) / std::abs(rhs), tol);
    out.extra["c_sigma"] = json::array({cs.real(), cs.imag()});
}

void cmd_spherical(const Config& c, Output& out) {
    auto pt = point_of(c);
    if (c.t < 0) throw Usage("--t must be >= 0");
    SphericalValue v = scalar_components(pt, c.t);
    double tol = tol_of(c, c.t == 0.0 ? 1e-12 : 1e-10);
    std::map<MLabel, cplx> target;
    if (c.t == 0.0) {
        for (const auto& [eta, z] : v.components) target[eta] = 1.0;
    } else {
        auto [s, l] = weyl_reflect(pt.sigma, pt.lambda);
        target = scalar_components(SpectralPoint::make(pt.spec, s, l), c.t).components;
    }
    for (const auto& [eta, z] : v.components) {
        cplx tg = target.at(eta);
        double scale = std::max(1.0, std::abs(tg));
        out.report.check("phi[" + eta.str() + "].re", tg.real(), z.real(), tol * scale);
        out.report.check("phi[" + eta.str() + "].im", tg.imag(), z.imag(), tol * scale);
    }
    out.extra["spherical"] = io::to_json(v);
}

void cmd_asympt(const Config& c, Output& out) {
    auto pt = point_of(c);
    double ripple = tol_of(c, 0.10);
    std::vector<double> ts, es, tail;
    for (auto [t, e] : scaled_remainder(pt, 1.0, 15.0, 0.05)) {
        ts.push_back(t);
        es.push_back(e);
        if (t >= 5.0 - 1e-9) tail.push_back(e);
    }
    out.report.check_below("scaled_remainder_sup[1,15]", 1e4, *std::max_element(es.begin(), es.end()));
    out.report.check_below("scaled_remainder_envelope_growth[5,15]", ripple, envelope_growth(tail));
    out.extra["scaled_remainder"] = {{"t", ts}, {"value", es}};
}

void cmd_limit(const Config& c, Output& out) {
    auto pt = point_of(c);
    auto grid = grid_of(c, default_R_grid());
    auto F = BoundarySection::single(pt, GroupElement(pt.spec.n), probe_vector(pt));
    auto rep = strichartz_limit(F, grid, c.samples > 0 ? c.samples : 2000, c.seed.value_or(1));
    out.report.check("limit", rep.target, rep.extrapolated_limit, tol_of(c, 0.01) * rep.target, rep.stderr_);
    out.report.check_below("bound_constant", 10.0, rep.bound_constant);
    out.extra["ball_averages"] = io::to_json(rep);
    out.series_csv = io::to_csv(rep);
}

void cmd_invert(const Config& c, Output& out) {
    auto pt = point_of(c);
    auto seed = seed_of(c);
    auto grid = grid_of(c, {20.0, 40.0, 80.0});
    long samples = c.samples > 0 ? c.samples : 100000;
    auto F = BoundarySection::single(pt, GroupElement(pt.spec.n), probe_vector(pt));
    double tol = tol_of(c, 0.05);
    std::vector<double> errs;
    for (double R : grid) {
        auto FR = inversion_reconstruct(F, R);
        MCResult e = inversion_error(F, FR, samples, seed);
        errs.push_back(e.mean(0).real());
        out.report.check_below(label_row("relative_error", R), tol, errs.back(), e.stderr_(0).real());
    }
    double rise = -1e300;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) rise = std::max(rise, errs[i + 1] - errs[i]);
    if (errs.size() > 1) out.report.check_below("max_increase", 0.0, rise);
}

void cmd_fourier(const Config& c, Output& out) {
    auto pt = point_of(c);
    if (pt.spec.n > 4) throw Usage("fourier supports n <= 4");
    auto grid = grid_of(c, {2.0, 4.0, 8.0});
    const auto& r = tau_rep(pt.spec);
    double nu = plancherel_density(pt);
    double bound = tol_of(c, 1.0);
    for (double R : grid) {
        double ff = std::norm(bump_fourier_scalar(pt, R)) * double(r.d_sigma(pt.sigma)) / r.d_tau();
        out.report.check_below(label_row("restriction_ratio", R), bound, nu * ff / (R * bump_norm2(pt.spec, R, 1.0)));
    }
    // Radon path against the 1D trace reduction on the smallest support
    double R0 = grid.front();
    CVec w = r.tau_projector() * CVec::Ones(r.full_dim());
    w /= w.norm();
    auto f = bump_section(pt.spec, w, R0);
    KElement k = KElement::unchecked(plane_rotation(pt.spec.n, Vec::Unit(pt.spec.n, 1), 0.7));
    RadonGrid rg = pt.spec.n == 4 ? RadonGrid{20, 16, 16} : RadonGrid{24, 24, 24};
    CVec radon_path = fourier_helgason(f, pt, k, rg);
    CVec trace_path = bump_fourier_scalar(pt, R0) * (r.projector(pt.sigma) * (r.tau(k).transpose().cast<cplx>() * w));
    out.report.check(label_row("radon_vs_trace", R0), 0.0, (radon_path - trace_path).norm() / std::max(1e-300, trace_path.norm()), 1e-6);
}

// ---- config file

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Usage("cannot open config file " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Usage(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        kv.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return kv;
}

struct Cli {
    Config cfg;
    CLI::App app{"hyperform: verification runs for forms on real hyperbolic space"};
    std::map<std::string, std::function<void(const Config&, Output&)>> commands;

    Cli() {
        app.require_subcommand(1);
        app.add_option("--config", cfg.config_file, "flat key=value file; flags override it");
        app.add_option("--n", cfg.n, "dimension of H^n");
        app.add_option("--p", cfg.p, "form degree");
        app.add_option("--chirality", cfg.chirality, "none, plus or minus");
        app.add_option("--sigma", cfg.sigma, "M-type label: q:<int>, plus or minus");
        app.add_option("--lambda", cfg.lambda, "spectral parameter");
        app.add_option("--t", cfg.t, "radius for spherical");
        app.add_option("--R-grid", cfg.R_grid, "comma separated radii")->delimiter(',');
        app.add_option("--samples", cfg.samples, "Monte Carlo sample count");
        app.add_option("--seed", cfg.seed, "RNG seed");
        app.add_option("--tol", cfg.tol, "override the pass tolerance");
        app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        app.add_flag("--series", cfg.series, "limit: emit the R, value, stderr, method table as CSV");

        auto* d = app.add_subcommand("decompose", "Iwasawa, Cartan and polar factors with round-trip residuals")->fallthrough();
        d->add_option("--at", cfg.at, "use a_t");
        d->add_flag("--random", cfg.random, "random element from --seed");
        d->add_option("--file", cfg.file, "JSON matrix (row-major array or {\"matrix\": ...})");
        commands["decompose"] = cmd_decompose;

        auto add = [&](const char* name, const char* help, auto fn) {
            app.add_subcommand(name, help)->fallthrough();
            commands[name] = fn;
        };
        add("density", "Plancherel density: closed form against the c-function", cmd_density);
        add("cfun", "c-function checks", cmd_cfun);
        add("spherical", "scalar components of the spherical function at t", cmd_spherical);
        add("asympt", "scaled remainder of the Weyl-sum asymptotics on [1, 15]", cmd_asympt);
        add("limit", "ball-average limit of a Poisson image", cmd_limit);
        add("invert", "inversion formula reconstruction error", cmd_invert);
        add("fourier", "Fourier restriction ratio for bump sections", cmd_fourier);
    }

    CLI::App* selected() const {
        auto subs = app.get_subcommands();
        return subs.empty() ? nullptr : subs.front();
    }

    std::vector<std::pair<std::string, std::string>> effective_config() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto* opt : app.get_options()) {
            std::string name = opt->get_single_name();
            if (name == "help" || name == "config" || name == "format" || name == "series") continue;
            if (opt->count() == 0) continue;
            out.emplace_back(name, CLI::detail::join(opt->results(), ","));
        }
        if (const auto* s = selected())
            for (const auto* opt : s->get_options()) {
                std::string name = opt->get_single_name();
                if (name == "help" || opt->count() == 0) continue;
                out.emplace_back(name, opt->count() && opt->get_expected_min() == 0 ? "true" : CLI::detail::join(opt->results(), ","));
            }
        std::sort(out.begin(), out.end());
        return out;
    }
};

int emit(const Config& cfg, const Output& out) {
    if (cfg.series && !out.series_csv.empty()) {
        std::cout << out.series_csv;
    } else if (cfg.format == "csv") {
        std::cout << io::to_csv(out.report);
    } else {
        json j = io::to_json(out.report);
        for (auto it = out.extra.begin(); it != out.extra.end(); ++it) j[it.key()] = it.value();
        std::cout << j.dump(2) << "\n";
    }
    return out.report.all_pass() ? 0 : 1;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);

    auto cli = std::make_unique<Cli>();
    try {
        auto first = args;
        cli->app.parse(first);
        if (!cli->cfg.config_file.empty()) {
            auto kv = read_config_file(cli->cfg.config_file);
            std::vector<std::string> extra;
            for (const auto& [key, value] : kv) {
                const CLI::Option* opt = cli->app.get_option_no_throw("--" + key);
                if (!opt && cli->selected()) opt = cli->selected()->get_option_no_throw("--" + key);
                if (!opt || key == "config") throw Usage("config file: unknown key '" + key + "'");
                if (opt->count() > 0) continue;
                if (opt->get_expected_min() == 0) {
                    if (value == "true" || value == "1") extra.push_back("--" + key);
                } else {
                    extra.push_back("--" + key);
                    extra.push_back(value);
                }
            }
            std::vector<std::string> second(extra.rbegin(), extra.rend());
            second.insert(second.end(), args.begin(), args.end());
            cli = std::make_unique<Cli>();
            cli->app.parse(second);
        }
    } catch (const CLI::CallForHelp& e) {
        return cli->app.exit(e);
    } catch (const CLI::ParseError& e) {
        cli->app.exit(e);
        return 2;
    } catch (const Usage& e) {
        std::cerr << "hyperform: " << e.what() << "\n";
        return 2;
    }

    const Config& cfg = cli->cfg;
    Output out;
    out.report.config = cli->effective_config();
    out.report.seed = cfg.seed.value_or(0);
    const std::string name = cli->selected()->get_name();
    out.report.config.insert(out.report.config.begin(), {"command", name});
    try {
        cli->commands.at(name)(cfg, out);
    } catch (const Usage& e) {
        std::cerr << "hyperform: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "hyperform: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        out.report.rows.push_back({std::string("numerical_failure: ") + e.what(), 0.0, 0.0, 0.0, 0.0, false});
        emit(cfg, out);
        return 1;
    }
    return emit(cfg, out);
}

} // namespace

int main(int argc, char** argv) {
    std::locale::global(std::locale::classic());
    return run(argc, argv);
}
