#include "borel_lab/cli_runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "borel_lab/laplace_paths.hpp"
#include "borel_lab/parallel.hpp"

namespace borel_lab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---- configuration -------------------------------------------------------------------------

RunConfig::RunConfig() { solver.residual_samples = 4; }

void RunConfig::check() const {
    solver.check(inline_spec ? *inline_spec : ProblemSpec{});
    if (varsigma < 2) throw ConfigError("config: varsigma must be at least 2");
    if (!(overlap_deg > 0.0)) throw ConfigError("config: overlap_deg must be positive");
    if (!(r_T > 0.0) || !(T_half_deg > 0.0) || !(beta_prime > 0.0)) throw ConfigError("config: r_T, T_half_deg, beta_prime must be positive");
    if (eps_samples < 6) throw ConfigError("config: eps_samples must be at least 6 (fit requirement)");
    if (!(eps_hi_frac > 0.0) || !(eps_lo_frac > 0.0) || !(eps_hi_frac <= 1.0) || eps_hi_frac < 3.0 * eps_lo_frac)
        throw ConfigError("config: the eps ladder must lie in (0, eps0] and span a factor 3");
    if (points < 1 || split_points < 1) throw ConfigError("config: point counts must be positive");
    if (!(sector_R1 > 0.0) || !(sector_R2 > 0.0)) throw ConfigError("config: sector radii must be positive");
    if (workers < 0) throw ConfigError("config: workers must be nonnegative");
    for (int p : links)
        if (p < 0 || p >= varsigma) throw ConfigError("config: link index out of range");
}

namespace {

cplx json_cplx(const ojson& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("config: " + what + " must be a number or [re, im]");
}

std::vector<cplx> json_cplx_list(const ojson& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError("config: " + what + " must be an array");
    std::vector<cplx> v;
    for (const auto& x : j) v.push_back(json_cplx(x, what));
    return v;
}

template <class T>
T get(const ojson& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

}  // namespace

RunConfig config_from_json_text(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (!j.contains("config_version")) throw ConfigError("config: missing field 'config_version'");
    if (get<int>(j, "config_version") != 1) throw ConfigError("config: unsupported config_version (expected 1)");
    static const std::set<std::string> known = {
        "config_version", "scenario", "spec_path", "spec", "rep", "tol", "N_max", "max_iter", "residual_samples",
        "solve_eps", "sector_R1", "sector_R2", "varsigma", "overlap_deg", "r_T", "T_half_deg", "beta_prime",
        "eps_samples", "eps_hi_frac", "eps_lo_frac", "points", "links", "tails", "split_eps", "split_points",
        "allow_invalid", "out", "workers", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("config: unknown key '" + it.key() + "'");
    RunConfig c;
    if (j.contains("scenario")) c.scenario = get<std::string>(j, "scenario");
    if (j.contains("spec_path")) c.spec_path = get<std::string>(j, "spec_path");
    if (j.contains("spec")) c.inline_spec = spec_from_json_text(j["spec"].dump());
    if (j.contains("rep")) {
        const auto r = get<std::string>(j, "rep");
        if (r == "series") c.solver.rep = Representation::Series;
        else if (r == "collocation") c.solver.rep = Representation::Collocation;
        else throw ConfigError("config: rep must be 'series' or 'collocation'");
    }
    if (j.contains("tol")) c.solver.tol = get<double>(j, "tol");
    if (j.contains("N_max")) c.solver.N_max = get<int>(j, "N_max");
    if (j.contains("max_iter")) c.solver.max_iter = get<int>(j, "max_iter");
    if (j.contains("residual_samples")) c.solver.residual_samples = get<int>(j, "residual_samples");
    if (j.contains("solve_eps")) c.solve_eps = json_cplx_list(j["solve_eps"], "solve_eps");
    if (j.contains("sector_R1")) c.sector_R1 = get<double>(j, "sector_R1");
    if (j.contains("sector_R2")) c.sector_R2 = get<double>(j, "sector_R2");
    if (j.contains("varsigma")) c.varsigma = get<int>(j, "varsigma");
    if (j.contains("overlap_deg")) c.overlap_deg = get<double>(j, "overlap_deg");
    if (j.contains("r_T")) c.r_T = get<double>(j, "r_T");
    if (j.contains("T_half_deg")) c.T_half_deg = get<double>(j, "T_half_deg");
    if (j.contains("beta_prime")) c.beta_prime = get<double>(j, "beta_prime");
    if (j.contains("eps_samples")) c.eps_samples = get<int>(j, "eps_samples");
    if (j.contains("eps_hi_frac")) c.eps_hi_frac = get<double>(j, "eps_hi_frac");
    if (j.contains("eps_lo_frac")) c.eps_lo_frac = get<double>(j, "eps_lo_frac");
    if (j.contains("points")) c.points = get<int>(j, "points");
    if (j.contains("links")) c.links = get<std::vector<int>>(j, "links");
    if (j.contains("tails")) c.tails = get<bool>(j, "tails");
    if (j.contains("split_eps")) c.split_eps = json_cplx_list(j["split_eps"], "split_eps");
    if (j.contains("split_points")) c.split_points = get<int>(j, "split_points");
    if (j.contains("allow_invalid")) c.allow_invalid = get<bool>(j, "allow_invalid");
    if (j.contains("out")) c.out_dir = get<std::string>(j, "out");
    if (j.contains("workers")) c.workers = get<int>(j, "workers");
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
    c.check();
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

ProblemSpec resolve_spec(const RunConfig& cfg) {
    if (cfg.inline_spec) return *cfg.inline_spec;
    if (!cfg.spec_path.empty()) return load_spec_file(cfg.spec_path);
    return builtin_spec(cfg.scenario);
}

// ---- output helpers ------------------------------------------------------------------------

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON numbers must be finite: infinities and NaN become strings.
ojson jnum(double x) {
    if (std::isfinite(x)) return x;
    return num(x);
}

ojson jcplx(cplx z) { return ojson::array({jnum(z.real()), jnum(z.imag())}); }

class Writer {
public:
    Writer(const std::string& dir, std::vector<std::string>& files) : dir_(dir), files_(files) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw ConfigError("output: cannot create directory " + dir_);
    }
    void text(const std::string& rel, const std::string& body) {
        const fs::path p = fs::path(dir_) / rel;
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        std::ofstream o(p, std::ios::binary);
        if (!o) throw ConfigError("output: cannot write " + p.string());
        o << body;
        if (!o) throw ConfigError("output: write failed for " + p.string());
        files_.push_back(rel);
    }
    void json(const std::string& rel, const ojson& j) { text(rel, j.dump(2) + "\n"); }

private:
    std::string dir_;
    std::vector<std::string>& files_;
};

std::vector<cplx> scaled_defaults(const std::vector<cplx>& given, std::initializer_list<cplx> fracs, double eps0) {
    if (!given.empty()) return given;
    std::vector<cplx> v;
    for (cplx f : fracs) v.push_back(f * eps0);
    return v;
}

SectorSpec first_sector(const RunConfig& cfg, double eps0) {
    return SectorSpec{0.0, 0.5 * (360.0 / cfg.varsigma + cfg.overlap_deg) * kPi / 180.0, eps0, false};
}

struct Pipeline {
    const RunConfig& cfg;
    Writer& out;
    SolverContextPtr ctx;
    std::optional<Directions> dirs;

    const SolverContext& context() {
        if (!ctx) ctx = SolverContext::make(resolve_spec(cfg));
        return *ctx;
    }
    const Directions& directions() {
        if (!dirs) dirs = choose_directions(context().spec, context().derived);
        return *dirs;
    }
    LaplaceParams laplace_params(double nu1 = 1.0, double nu2 = 1.0) {
        const auto& s = context().spec;
        return make_laplace_params(s, directions(), first_sector(cfg, s.eps0), cfg.r_T, cfg.T_half_deg * kPi / 180.0,
                                   cfg.beta_prime, nu1, nu2);
    }
    SolverConfig sector_config() const {
        SolverConfig c = cfg.solver;
        c.rep = Representation::Collocation;
        c.sector_R1 = cfg.sector_R1;
        c.sector_R2 = cfg.sector_R2;
        c.residual_samples = 0;
        return c;
    }

    // ---- stages ----

    // returns false when the instance is invalid and not allowed to proceed
    bool validate() {
        const auto spec = resolve_spec(cfg);
        const auto rep = validate_spec(spec);
        ojson j;
        j["spec_version"] = 1;
        j["name"] = spec.name;
        j["valid"] = rep.valid();
        ojson f = ojson::array();
        for (const auto& x : rep.findings) f.push_back({{"id", x.id}, {"passed", x.passed}, {"detail", x.detail}});
        j["findings"] = f;
        ojson ts = ojson::array();
        for (const auto& [a, b] : rep.tuple_shifts) ts.push_back({a, b});
        j["tuple_shifts"] = ts;
        const auto dq = derived_quantities(spec);
        j["derived"] = {{"r_QR", jnum(dq.r_QR)},
                        {"arg_hull", {{"start", jnum(dq.arg_hull.start)}, {"width", jnum(dq.arg_hull.width)}}},
                        {"Delta0", dq.Delta0}};
        const auto [r1, r2] = default_radii(spec);
        const auto pb = pm_bounds_disc(spec, r1, r2);
        j["pm_bounds_disc"] = {{"rho1", r1},       {"rho2", r2},         {"admissible", pb.admissible},
                               {"product", pb.product}, {"C1", pb.C1}, {"grid_inf", jnum(pb.grid_inf)}};
        try {
            const auto d = choose_directions(spec, dq);
            j["directions"] = {{"d1", d.d1}, {"d2", d.d2}, {"d12", d.d12}, {"distance", d.distance}, {"C2", jnum(d.C2)}};
        } catch (const GeometryError& e) {
            j["directions"] = {{"error", e.what()}};
        }
        out.json("validation.json", j);
        return rep.valid() || cfg.allow_invalid;
    }

    void solve() {
        const auto& c = context();
        const auto eps = scaled_defaults(cfg.solve_eps, {0.9, {0.4, 0.6}, {-0.6, 0.2}, {-0.2, -0.5}, {0.1, -0.16}, {0.04, 0.02}},
                                         c.spec.eps0);
        std::vector<BorelSolution> sols(eps.size());
        parallel_for(eps.size(), [&](std::size_t i) { sols[i] = picard_solve(c, eps[i], cfg.solver, Domain::Disc); },
                     cfg.workers);
        std::ostringstream csv;
        csv << "eps_index,eps_re,eps_im,iteration,increment_norm,ratio\n";
        ojson summary = ojson::array();
        for (std::size_t i = 0; i < sols.size(); ++i) {
            const auto& s = sols[i];
            for (std::size_t it = 0; it < s.trace.size(); ++it)
                csv << i << ',' << num(eps[i].real()) << ',' << num(eps[i].imag()) << ',' << it + 1 << ','
                    << num(s.trace[it]) << ','
                    << (it > 0 && s.trace[it - 1] > 0.0 ? num(s.trace[it] / s.trace[it - 1]) : std::string()) << '\n';
            summary.push_back({{"eps", jcplx(eps[i])},
                               {"representation", representation_name(s.rep)},
                               {"iterations", s.iterations},
                               {"converged", s.converged},
                               {"contraction_ratio", jnum(s.contraction_ratio)},
                               {"contraction_ok", s.contraction_ok},
                               {"residual", jnum(s.residual)},
                               {"norm", jnum(s.norm)},
                               {"varpi", jnum(s.varpi)},
                               {"within_ball", s.within_ball},
                               {"psi_norm", jnum(s.psi_norm)},
                               {"truncation_indicator", jnum(s.truncation_indicator)}});
        }
        out.text("borel_convergence.csv", csv.str());
        out.json("solve_summary.json", summary);
    }

    void continuation() {
        const auto& c = context();
        const auto& d = directions();
        const cplx eps = 0.6 * c.spec.eps0;
        const std::vector<std::pair<double, double>> ang{
            {d.d1, d.d2}, {d.d1 + 0.5 * d.S1.half_opening, d.d2 - 0.5 * d.S2.half_opening}};
        SolverConfig sc = cfg.solver;
        sc.rep = Representation::Series;
        sc.residual_samples = 0;
        SolverConfig cc = cfg.solver;
        cc.rep = Representation::Collocation;
        cc.angles = ang;
        cc.residual_samples = 0;
        std::vector<BorelSolution> sols(3);
        parallel_for(
            3,
            [&](std::size_t i) {
                sols[i] = i == 0 ? picard_solve(c, eps, sc, Domain::Disc)
                                 : picard_solve(c, eps, cc, i == 1 ? Domain::Sector : Domain::Intersection);
            },
            cfg.workers);
        const auto samples = overlap_samples(ang, sols[0].space.rho1, sols[0].space.rho2, 5);
        const auto& ms = *c.ms;
        CVec a(ms.dim()), b(ms.dim()), e(ms.dim());
        auto rel = [&](const BorelSolution& x, const BorelSolution& y, cplx t1, cplx t2) {
            x.eval(t1, t2, a.data());
            y.eval(t1, t2, b.data());
            for (std::size_t j = 0; j < a.size(); ++j) e[j] = a[j] - b[j];
            const double nb = ms.norm(b.data());
            return nb > 0.0 ? ms.norm(e.data()) / nb : ms.norm(e.data());
        };
        std::ostringstream csv;
        csv << "sample,tau1_re,tau1_im,tau2_re,tau2_im,disc_sector,disc_intersection,sector_intersection\n";
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto [t1, t2] = samples[i];
            csv << i << ',' << num(t1.real()) << ',' << num(t1.imag()) << ',' << num(t2.real()) << ',' << num(t2.imag())
                << ',' << num(rel(sols[0], sols[1], t1, t2)) << ',' << num(rel(sols[0], sols[2], t1, t2)) << ','
                << num(rel(sols[1], sols[2], t1, t2)) << '\n';
        }
        out.text("continuation.csv", csv.str());
    }

    void transform(const std::vector<LaplacePoint>* given) {
        const auto& c = context();
        const auto& d = directions();
        // group the points by eps: one sector solve each
        std::vector<cplx> eps;
        std::vector<std::vector<SweepPoint>> pts;
        const auto base = laplace_params();
        if (given) {
            for (const auto& p : *given) {
                std::size_t k = 0;
                while (k < eps.size() && eps[k] != p.eps) ++k;
                if (k == eps.size()) {
                    eps.push_back(p.eps);
                    pts.emplace_back();
                }
                pts[k].push_back({p.t1, p.t2, p.z});
            }
        } else {
            eps = scaled_defaults(cfg.split_eps, {0.6, {0.3, 0.05}}, c.spec.eps0);
            for (std::size_t i = 0; i < eps.size(); ++i)
                pts.push_back(sample_points(base.T1, base.T2, base.beta_prime, cfg.split_points, cfg.seed + 1000 + i));
        }
        auto sc = sector_config();
        sc.angles = {{d.d1, d.d2}};
        std::vector<std::vector<SplitResult>> res(eps.size());
        parallel_for(
            eps.size(),
            [&](std::size_t i) {
                const auto sol = picard_solve(c, eps[i], sc, Domain::Sector);
                auto prm = base;
                prm.nu1 = sol.space.nu1;
                prm.nu2 = sol.space.nu2;
                for (const auto& p : pts[i]) res[i].push_back(solution_and_split(c.spec, sol, {p.t1, p.t2, p.z, eps[i]}, prm));
            },
            cfg.workers);
        std::ostringstream csv;
        csv << "point,eps_re,eps_im,t1_re,t1_im,t2_re,t2_im,z_re,z_im,u_re,u_im,J1_re,J1_im,J2_re,J2_im,J3_re,J3_im,"
               "residual,log_tail,log_bound\n";
        std::size_t n = 0;
        for (std::size_t i = 0; i < eps.size(); ++i)
            for (std::size_t k = 0; k < pts[i].size(); ++k) {
                const auto& p = pts[i][k];
                const auto& r = res[i][k];
                csv << n++ << ',' << num(eps[i].real()) << ',' << num(eps[i].imag()) << ',' << num(p.t1.real()) << ','
                    << num(p.t1.imag()) << ',' << num(p.t2.real()) << ',' << num(p.t2.imag()) << ',' << num(p.z.real())
                    << ',' << num(p.z.imag());
                for (const Scaled* s : {&r.u, &r.J1, &r.J2, &r.J3})
                    csv << ',' << num(s->value().real()) << ',' << num(s->value().imag());
                csv << ',' << num(r.identity_gap) << ',' << num(r.log_tail) << ',' << num(r.log_bound) << '\n';
            }
        out.text("split_identity.csv", csv.str());
    }

    void sweep() {
        const auto& c = context();
        const auto& s = c.spec;
        const auto& d = directions();
        const auto cov = build_good_covering(cfg.varsigma, s.eps0, cfg.overlap_deg);
        SweepSettings set;
        set.disc = cfg.solver;
        set.disc.rep = Representation::Series;
        set.disc.residual_samples = 0;
        set.sector = sector_config();
        set.prm = laplace_params();
        set.workers = cfg.workers;
        const auto dirs = assign_directions(cov, s, set.prm.T1, set.prm.T2, d.d1, d.d2);
        const auto pts = sample_points(set.prm.T1, set.prm.T2, set.prm.beta_prime, cfg.points, cfg.seed);
        const auto lad = eps_ladder(s.eps0, cfg.eps_samples, cfg.eps_hi_frac, cfg.eps_lo_frac);
        std::vector<int> links = cfg.links;
        if (links.empty())
            for (int p = 0; p < cfg.varsigma; ++p) links.push_back(p);
        std::vector<Sweep> sweeps;
        for (int p : links) sweeps.push_back(difference_sweep(c, p, cov, dirs, lad, pts, set));
        std::optional<std::pair<Sweep, Sweep>> tails;
        if (cfg.tails) tails = tail_sweeps(c, d, lad, cov.bisector(0), pts, set);

        auto write_sweep = [&](const Sweep& w) {
            std::ostringstream csv;
            csv << "abs_eps,arg_eps,magnitude,log_magnitude\n";
            for (std::size_t i = 0; i < w.abs_eps.size(); ++i)
                csv << num(w.abs_eps[i]) << ',' << num(w.arg_eps) << ',' << num(std::exp(w.log_mag[i])) << ','
                    << num(w.log_mag[i]) << '\n';
            out.text("sweeps/" + w.name + ".csv", csv.str());
        };
        for (const auto& w : sweeps) write_sweep(w);
        if (tails) {
            write_sweep(tails->first);
            write_sweep(tails->second);
        }
        const auto rep = gevrey_report(s, dirs, sweeps, tails ? &tails->first : nullptr, tails ? &tails->second : nullptr);

        ojson fits = ojson::array();
        for (const auto& f : rep.fits) {
            ojson o{{"name", f.name},
                    {"case", f.p >= 0 ? link_case_name(f.tag) : f.name},
                    {"link", f.p},
                    {"expected_k", f.expected_k},
                    {"tolerance", f.tolerance},
                    {"fitted", f.fitted}};
            if (f.fitted) {
                o["C"] = jnum(f.fit.C);
                o["log_C"] = jnum(f.fit.log_C);
                o["M"] = jnum(f.fit.M);
                o["k"] = jnum(f.fit.k);
                o["rms_residual"] = jnum(f.fit.rms_residual);
                o["max_residual"] = jnum(f.fit.max_residual);
                o["non_exponential"] = f.fit.non_exponential;
                o["multi_level"] = f.fit.multi_level;
            }
            o["consistent"] = f.consistent;
            o["note"] = f.note;
            fits.push_back(o);
        }
        out.json("fits.json", fits);

        ojson r;
        r["I1"] = rep.I1;
        r["I2"] = rep.I2;
        r["zero_links"] = rep.zero_links;
        r["orders"] = {{"I1", s.k1}, {"I2", s.k2}};
        ojson sectors = ojson::array();
        for (int p = 0; p < cfg.varsigma; ++p)
            sectors.push_back({{"p", p},
                               {"bisector", cov.bisector(p)},
                               {"d", dirs.d[p]},
                               {"d_tilde", dirs.dt[p]},
                               {"nabla", dirs.nabla[p]},
                               {"nabla_tilde", dirs.nabla_t[p]},
                               {"link_case", link_case_name(dirs.links[p])}});
        r["sectors"] = sectors;
        ojson maj = ojson::array();
        for (const auto& m : rep.majorants) {
            ojson lm = ojson::array();
            for (double v : m.log_majorant) lm.push_back(jnum(v));
            maj.push_back({{"name", m.name},
                           {"kprime", m.kprime},
                           {"log_C", jnum(m.log_C)},
                           {"K", jnum(m.K)},
                           {"worst_log_margin", jnum(m.worst_log_margin)},
                           {"dominates", m.dominates},
                           {"log_majorant", lm}});
        }
        r["majorants"] = maj;
        r["discrepancies"] = rep.discrepancies;
        r["hypotheses_hold"] = rep.hypotheses_hold;
        r["two_level_splitting_certified"] = rep.hypotheses_hold;
        out.json("rs_report.json", r);
    }
};

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case Error::Kind::Config:
        case Error::Kind::Usage: return 2;
        default: return 1;
    }
}

}  // namespace

RunSummary run_scenario(const RunConfig& cfg, const std::vector<std::string>& stages_in) {
    RunSummary sum;
    static const std::vector<std::string> order = {"validate", "solve", "continuation", "transform", "sweep"};
    std::set<std::string> want;
    for (const auto& s : stages_in) {
        if (s == "report") want.insert(order.begin(), order.end());
        else if (std::find(order.begin(), order.end(), s) != order.end()) want.insert(s);
        else {
            sum.exit_code = 2;
            sum.failed_stage = s;
            sum.message = "unknown stage '" + s + "'";
            return sum;
        }
    }
    std::string stage = "setup";
    try {
        cfg.check();
        if (cfg.workers > 0) set_default_workers(cfg.workers);
        Writer w(cfg.out_dir, sum.files);
        Pipeline pl{cfg, w, nullptr, std::nullopt};
        for (const auto& s : order) {
            if (!want.count(s)) continue;
            stage = s;
            const auto t0 = std::chrono::steady_clock::now();
            if (s == "validate") {
                if (!pl.validate()) {
                    sum.exit_code = 1;
                    sum.failed_stage = s;
                    sum.message = "the instance violates its hypotheses (see validation.json; --allow-invalid to proceed)";
                    return sum;
                }
            } else if (s == "solve") {
                pl.solve();
            } else if (s == "continuation") {
                pl.continuation();
            } else if (s == "transform") {
                pl.transform(nullptr);
            } else if (s == "sweep") {
                pl.sweep();
            }
            sum.timings.push_back({s, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
        }
    } catch (const Error& e) {
        sum.exit_code = exit_code_for(e);
        sum.failed_stage = stage;
        sum.message = e.what();
    } catch (const std::exception& e) {
        sum.exit_code = 1;
        sum.failed_stage = stage;
        sum.message = e.what();
    }
    return sum;
}

// ---- command line ----------------------------------------------------------------------------

namespace {

const char* kColumns =
    "Output files (in --out):\n"
    "  validation.json        findings per hypothesis, derived quantities, disc bounds, directions\n"
    "  borel_convergence.csv  eps_index,eps_re,eps_im,iteration,increment_norm,ratio\n"
    "  solve_summary.json     per eps: iterations, contraction ratio, oracle residual, norms\n"
    "  continuation.csv       sample,tau1_re,tau1_im,tau2_re,tau2_im,disc_sector,disc_intersection,\n"
    "                         sector_intersection (relative carrier-norm differences)\n"
    "  split_identity.csv     point,eps,t1,t2,z (re,im pairs),u,J1,J2,J3 (re,im pairs),\n"
    "                         residual=|J1+J2+J3-u|/|u|,log_tail,log_bound\n"
    "  sweeps/<name>.csv      abs_eps,arg_eps,magnitude,log_magnitude\n"
    "  fits.json              per sweep: C, log_C, M, k, residuals, case, consistency\n"
    "  rs_report.json         I1/I2 links, sector directions, majorant checks, verdict\n"
    "Exit codes: 0 success, 1 mathematical failure, 2 configuration error.";

cplx parse_cplx(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("cannot parse complex number '" + s + "' (use re or re,im)");
    }
}

std::vector<LaplacePoint> load_points_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("points: cannot read " + path);
    ojson j;
    try {
        j = ojson::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("points: not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ConfigError("points: expected an array of {t1, t2, z, eps}");
    std::vector<LaplacePoint> v;
    for (const auto& p : j) {
        if (!p.is_object() || !p.contains("t1") || !p.contains("t2") || !p.contains("z") || !p.contains("eps"))
            throw ConfigError("points: each entry needs t1, t2, z, eps");
        v.push_back({json_cplx(p["t1"], "t1"), json_cplx(p["t2"], "t2"), json_cplx(p["z"], "z"), json_cplx(p["eps"], "eps")});
    }
    return v;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Borel-Laplace summation lab for two-time singularly perturbed problems"};
    app.footer(kColumns);
    app.require_subcommand(1);
    std::string scenario, spec_path, config_path, out_dir, rep, covering, links, points_path;
    std::vector<std::string> eps_list;
    int workers = -1, samples = 0;
    long long seed = -1;
    double tol = 0.0, eps_min = 0.0, eps_max = 0.0;
    bool allow_invalid = false, no_tails = false;

    auto common = [&](CLI::App* s) {
        s->add_option("--scenario", scenario, "built-in scenario: paper-remark, scenario-a, scenario-b");
        s->add_option("--spec", spec_path, "problem spec JSON file");
        s->add_option("--config", config_path, "run configuration JSON file");
        s->add_option("--workers", workers, "worker threads (default: BOREL_LAB_THREADS or 1)");
        s->add_option("--seed", seed, "seed for the sample points");
        s->add_flag("--allow-invalid", allow_invalid, "continue past failed hypotheses (diagnosis only)");
        s->add_option("--out", out_dir, "output directory");
    };
    auto* validate = app.add_subcommand("validate", "check the hypotheses and write validation.json");
    auto* solve = app.add_subcommand("solve", "Picard solves, convergence traces and the continuation check");
    auto* transform = app.add_subcommand("transform", "Laplace synthesis and the three-piece split");
    auto* sweep = app.add_subcommand("sweep", "eps-sweeps of the differences and of J2, J3, fits and report");
    auto* report = app.add_subcommand("report", "the whole pipeline");
    for (auto* s : {validate, solve, transform, sweep, report}) common(s);
    solve->add_option("--rep", rep, "series | collocation")->check(CLI::IsMember({"series", "collocation"}));
    solve->add_option("--tol", tol, "Picard tolerance");
    solve->add_option("--eps", eps_list, "eps values (re or re,im), repeatable");
    transform->add_option("--points", points_path, "JSON array of {t1, t2, z, eps} ([re, im] pairs)");
    sweep->add_option("--covering", covering, "varsigma,overlap_deg (default 12,10)");
    sweep->add_option("--eps-min", eps_min, "smallest |eps|");
    sweep->add_option("--eps-max", eps_max, "largest |eps|");
    sweep->add_option("--samples", samples, "points on the eps ladder");
    sweep->add_option("--links", links, "comma-separated link indices, or 'none'");
    sweep->add_flag("--no-tails", no_tails, "skip the J2 / J3 sweeps");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    RunConfig cfg;
    std::vector<std::string> stages;
    std::optional<std::vector<LaplacePoint>> pts;
    try {
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (!scenario.empty()) {
            cfg.scenario = scenario;
            cfg.spec_path.clear();
            cfg.inline_spec.reset();
        }
        if (!spec_path.empty()) {
            cfg.spec_path = spec_path;
            cfg.inline_spec.reset();
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (workers >= 0) cfg.workers = workers;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (allow_invalid) cfg.allow_invalid = true;
        if (!rep.empty()) cfg.solver.rep = rep == "series" ? Representation::Series : Representation::Collocation;
        if (tol > 0.0) cfg.solver.tol = tol;
        if (!eps_list.empty()) {
            cfg.solve_eps.clear();
            for (const auto& e : eps_list) cfg.solve_eps.push_back(parse_cplx(e));
        }
        if (!covering.empty()) {
            const auto c = parse_cplx(covering);
            cfg.varsigma = static_cast<int>(c.real());
            if (c.real() != cfg.varsigma) throw ConfigError("--covering: varsigma must be an integer");
            if (c.imag() != 0.0) cfg.overlap_deg = c.imag();
        }
        const double eps0 = resolve_spec(cfg).eps0;
        if (eps_max > 0.0) cfg.eps_hi_frac = eps_max / eps0;
        if (eps_min > 0.0) cfg.eps_lo_frac = eps_min / eps0;
        if (samples > 0) cfg.eps_samples = samples;
        if (!links.empty()) {
            cfg.links.clear();
            if (links == "none") {
                cfg.links = {-1};  // marker, replaced below
            } else {
                std::stringstream ss(links);
                std::string t;
                while (std::getline(ss, t, ','))
                    try {
                        cfg.links.push_back(std::stoi(t));
                    } catch (const std::exception&) {
                        throw ConfigError("--links: cannot parse '" + t + "'");
                    }
            }
        }
        if (no_tails) cfg.tails = false;
        if (!points_path.empty()) pts = load_points_file(points_path);
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }

    RunSummary sum;
    if (validate->parsed()) stages = {"validate"};
    if (solve->parsed()) stages = {"validate", "solve", "continuation"};
    if (transform->parsed()) stages = {"validate", "transform"};
    if (sweep->parsed()) stages = {"validate", "sweep"};
    if (report->parsed()) stages = {"report"};

    const bool no_links = cfg.links.size() == 1 && cfg.links[0] == -1;
    if (no_links) cfg.links.clear();
    if (pts || no_links) {
        // paths the generic runner does not cover: an explicit point list, or an empty link list
        try {
            cfg.check();
            if (cfg.workers > 0) set_default_workers(cfg.workers);
            Writer w(cfg.out_dir, sum.files);
            Pipeline pl{cfg, w, nullptr, std::nullopt};
            if (!pl.validate()) {
                err << "validate: the instance violates its hypotheses\n";
                return 1;
            }
            if (pts) pl.transform(&*pts);
            if (no_links) {
                if (cfg.tails) throw ConfigError("--links none needs --no-tails for an empty sweep list");
                w.json("fits.json", ojson::array());
            }
            out << "ok\n";
            return 0;
        } catch (const Error& e) {
            err << e.what() << "\n";
            return exit_code_for(e);
        }
    }

    sum = run_scenario(cfg, stages);
    for (const auto& t : sum.timings) out << t.stage << ": " << t.seconds << " s\n";
    for (const auto& f : sum.files) out << "wrote " << (fs::path(cfg.out_dir) / f).string() << "\n";
    if (sum.exit_code != 0) err << sum.failed_stage << ": " << sum.message << "\n";
    return sum.exit_code;
}

}  // namespace borel_lab
