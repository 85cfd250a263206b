// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include "borel_lab/asymptotics.hpp"
#include "borel_lab/cli_runner.hpp"
#include "borel_lab/fourier_layer.hpp"
#include "borel_lab/oracles.hpp"
#include "borel_lab/parallel.hpp"
#include "borel_lab/special_functions.hpp"

using namespace borel_lab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void run(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    try {
        const auto [ok, detail] = f();
        report(id, name, ok, detail);
    } catch (const std::exception& e) {
        report(id, name, false, std::string("error: ") + e.what());
    }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

const SolverContext& scenario_a() {
    static const auto ctx = SolverContext::make(builtin_spec("scenario-a"));
    return *ctx;
}

// Shared by criteria 6-9.
struct Geometry {
    Directions base;
    GoodCovering cov;
    LaplaceParams prm;
    DirectionAssignment dirs;
    std::vector<SweepPoint> pts;
};

const Geometry& geometry() {
    static const Geometry g = [] {
        const auto& c = scenario_a();
        Geometry g;
        g.base = choose_directions(c.spec, c.derived);
        g.cov = build_good_covering(12, c.spec.eps0, 10.0);
        g.prm = make_laplace_params(c.spec, g.base, g.cov.sectors[0], 0.5, 5.0 * kPi / 180.0, 0.5);
        g.dirs = assign_directions(g.cov, c.spec, g.prm.T1, g.prm.T2, g.base.d1, g.base.d2);
        g.pts = sample_points(g.prm.T1, g.prm.T2, g.prm.beta_prime, 8, 20240917);
        return g;
    }();
    return g;
}

SolverConfig sector_config() {
    SolverConfig c;
    c.rep = Representation::Collocation;
    c.sector_R1 = 2.0;
    c.sector_R2 = 4.0;
    c.residual_samples = 0;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    // 1. Laplace identity for monomials
    run(1, "monomial Laplace identity", [] {
        const auto t0 = Clock::now();
        double worst = 0.0;
        int n_checks = 0;
        for (int k = 1; k <= 4; ++k)
            for (int n = 1; n <= 8; ++n)
                for (int s = 0; s < 5; ++s) {
                    const cplx T = std::polar(0.3 + 0.45 * s, -0.6 + 0.3 * s);
                    const double d = std::arg(T) + 0.6 * (kPi / (2.0 * k)) * (0.5 * s - 1.0);
                    worst = std::max(worst, laplace_monomial_verify(k, n, d, T, 1e-12).rel_discrepancy);
                    ++n_checks;
                }
        const double t = since(t0);
        return std::pair{worst <= 1e-8 && t < 30.0,
                         fmt("%.0f checks, max rel %.2e (<= 1e-8), %.2f s (< 30 s)", n_checks, worst, t)};
    });

    // 2. irregular-operator expansion coefficients
    run(2, "mono_op coefficients", [] {
        long bad = 0, checks = 0;
        for (int m = 1; m <= 6; ++m)
            for (int k = 1; k <= 4; ++k) {
                const auto e = mono_op_coeffs(m, k);
                for (int j = 1; j <= 2 * m; ++j) {
                    const auto lhs = oracles::symbolic_monomial_apply(oracles::lifted_derivative(m, k), j);
                    std::int64_t total = oracles::symbolic_monomial_apply(oracles::irregular_power(k, m), j).coeff;
                    for (int l = 1; l < m; ++l) {
                        auto w = oracles::irregular_power(k, l);
                        w.insert(w.begin(), oracles::OpFactor::mul_t(k * (m - l)));
                        total += oracles::symbolic_monomial_apply(w, j, e.exact[l - 1]).coeff;
                    }
                    ++checks;
                    if (total != lhs.coeff) ++bad;
                }
            }
        const bool spots = mono_op_coeffs(2, 1).exact == std::vector<std::int64_t>{-2} &&
                           mono_op_coeffs(2, 2).exact == std::vector<std::int64_t>{-3} &&
                           mono_op_coeffs(3, 1).exact == std::vector<std::int64_t>{6, -6};
        return std::pair{bad == 0 && spots, fmt("%.0f monomials, %.0f nonzero residuals, spot values ", double(checks),
                                                double(bad)) +
                                                (spots ? "match" : "differ")};
    });

    // 3. lower bounds and directions
    run(3, "disc bounds and sector constant", [] {
        bool ok = true;
        std::string detail;
        for (const char* name : {"scenario-a", "paper-remark"}) {
            const auto s = builtin_spec(name);
            const auto [r1, r2] = default_radii(s);
            const auto b = pm_bounds_disc(s, r1, r2);
            const auto d = choose_directions(s, derived_quantities(s));
            const bool good = b.admissible && b.grid_inf >= b.C1 - 1e-9 && d.C2 > 0.0;
            ok = ok && good;
            if (!detail.empty()) detail += "; ";
            detail += std::string(name) + fmt(": inf %.4g >= C1 %.4g, C2 %.3g", b.grid_inf, b.C1, d.C2);
        }
        return std::pair{ok, detail};
    });

    // 4. contraction and residual
    run(4, "contraction and residual", [] {
        const auto& c = scenario_a();
        SolverConfig cfg;
        cfg.residual_samples = 4;
        const cplx eps[] = {0.45, {0.2, 0.3}, {-0.3, 0.1}, {-0.1, -0.25}, {0.05, -0.08}, {0.02, 0.01}};
        bool ok = true;
        double worst_ratio = 0.0, worst_res = 0.0, worst_t = 0.0;
        int worst_it = 0;
        for (cplx e : eps) {
            const auto t0 = Clock::now();
            const auto s = picard_solve(c, e, cfg, Domain::Disc);
            const double t = since(t0);
            ok = ok && s.contraction_ok && s.contraction_ratio <= 0.5 && s.iterations <= 10 && s.residual <= 1e-6 &&
                 t < 120.0;
            worst_ratio = std::max(worst_ratio, s.contraction_ratio);
            worst_res = std::max(worst_res, s.residual);
            worst_it = std::max(worst_it, s.iterations);
            worst_t = std::max(worst_t, t);
        }
        return std::pair{ok, fmt("6 eps: ratio <= %.3g, iterations <= %.0f, residual <= %.2e, slowest %.1f s", worst_ratio,
                                 worst_it, worst_res, worst_t)};
    });

    // 5. continuation between disc and sector solutions
    run(5, "continuation disc/sector", [] {
        const auto& c = scenario_a();
        const auto d = choose_directions(c.spec, c.derived);
        const std::vector<std::pair<double, double>> ang{
            {d.d1, d.d2}, {d.d1 + 0.5 * d.S1.half_opening, d.d2 - 0.5 * d.S2.half_opening}};
        SolverConfig sc;
        sc.residual_samples = 0;
        SolverConfig cc;
        cc.rep = Representation::Collocation;
        cc.angles = ang;
        cc.residual_samples = 0;
        const auto disc = picard_solve(c, 0.3, sc, Domain::Disc);
        const auto sec = picard_solve(c, 0.3, cc, Domain::Sector);
        const auto inter = picard_solve(c, 0.3, cc, Domain::Intersection);
        const auto samples = overlap_samples(ang, disc.space.rho1, disc.space.rho2, 5);
        const auto r = continuation_check(disc, sec, inter, samples);
        return std::pair{r.samples >= 50 && r.disc_sector <= 1e-6,
                         fmt("%.0f samples, disc-sector %.2e, disc-intersection %.2e (<= 1e-6)", double(r.samples),
                             r.disc_sector, r.disc_intersection)};
    });

    // 6. u = J1 + J2 + J3
    run(6, "split identity", [] {
        const auto& c = scenario_a();
        const auto& g = geometry();
        auto cfg = sector_config();
        cfg.angles = {{g.base.d1, g.base.d2}};
        double worst = 0.0;
        int n = 0;
        for (double e : {0.3, 0.15}) {
            const auto sol = picard_solve(c, e, cfg, Domain::Sector);
            auto prm = g.prm;
            prm.nu1 = sol.space.nu1;
            prm.nu2 = sol.space.nu2;
            for (const auto& p : sample_points(prm.T1, prm.T2, prm.beta_prime, 10, 1000 + n)) {
                worst = std::max(worst, solution_and_split(c.spec, sol, {p.t1, p.t2, p.z, e}, prm).identity_gap);
                ++n;
            }
        }
        const double tol = 10.0 * g.prm.rel_tol;
        return std::pair{n >= 20 && worst <= tol,
                         fmt("%.0f points, max |J1+J2+J3-u|/|u| = %.2e (<= %.0e)", n, worst, tol)};
    });

    // 7. deformation of the truncated paths
    run(7, "deformation invariance", [] {
        const auto& c = scenario_a();
        const auto& g = geometry();
        SolverConfig sc;
        sc.residual_samples = 0;
        double worst = 0.0;
        int n = 0;
        for (int p : {0, 1, 2, 5, 11}) {
            const int q = (p + 1) % 12;
            const cplx eps = std::polar(0.15, g.cov.overlap_direction(p));
            const auto disc = picard_solve(c, eps, sc, Domain::Disc);
            const double h1 = 0.5 * disc.space.rho1, h2 = 0.5 * disc.space.rho2;
            for (const auto& pt : g.pts) {
                const LaplacePoint lp{pt.t1, pt.t2, pt.z, eps};
                const auto straight = j1p_family(c.spec, disc, g.dirs.d[q], g.dirs.dt[q], g.cov.sectors[q], lp, g.prm);
                // start on the neighbouring directions, turn at a quarter of the radius
                const auto bent =
                    laplace_over_paths(c.spec, disc, PathChain::bent(g.dirs.d[p], g.dirs.d[q], 0.5 * h1, h1),
                                       PathChain::bent(g.dirs.dt[p], g.dirs.dt[q], 0.5 * h2, h2), lp, g.prm)
                        .value;
                worst = std::max(worst, std::exp((bent - straight).log_abs() - straight.log_abs()));
                ++n;
            }
        }
        return std::pair{worst <= 1e-8, fmt("%.0f comparisons, max relative difference %.2e (<= 1e-8)", n, worst)};
    });

    // 8 and 9. two-level decay and majorants
    std::vector<Sweep> links;
    std::optional<std::pair<Sweep, Sweep>> tails;
    double sweep_seconds = 0.0;
    std::string sweep_error;
    try {
        const auto t0 = Clock::now();
        const auto& c = scenario_a();
        const auto& g = geometry();
        SweepSettings set;
        set.disc.residual_samples = 0;
        set.sector = sector_config();
        set.prm = g.prm;
        set.workers = 4;
        const auto lad = eps_ladder(c.spec.eps0);
        for (int p = 0; p < 12; ++p) links.push_back(difference_sweep(c, p, g.cov, g.dirs, lad, g.pts, set));
        tails = tail_sweeps(c, g.base, lad, g.cov.bisector(0), g.pts, set);
        sweep_seconds = since(t0);
    } catch (const std::exception& e) {
        sweep_error = e.what();
    }
    run(8, "two-level decay", [&] {
        if (!sweep_error.empty()) throw std::runtime_error(sweep_error);
        const auto& c = scenario_a();
        double kmin[4] = {1e9, 1e9, 1e9, 1e9}, kmax[4] = {0, 0, 0, 0};
        bool ok = true;
        for (const auto& s : links) {
            const auto f = fit_decay_log(s.abs_eps, s.log_mag);
            const int ci = static_cast<int>(s.tag);
            kmin[ci] = std::min(kmin[ci], f.k);
            kmax[ci] = std::max(kmax[ci], f.k);
            const double tol = s.tag == LinkCase::Case3 ? 0.25 : 0.15;
            if (s.tag == LinkCase::Zero || std::abs(f.k - s.expected_k) > tol * s.expected_k) ok = false;
        }
        const auto f2 = fit_decay_log(tails->first.abs_eps, tails->first.log_mag);
        const auto f3 = fit_decay_log(tails->second.abs_eps, tails->second.log_mag);
        ok = ok && std::abs(f2.k - c.spec.k2) <= 0.15 * c.spec.k2 && std::abs(f3.k - c.spec.k1) <= 0.15 * c.spec.k1 &&
             sweep_seconds < 1800.0;
        std::string d = fmt("case2 k in [%.3f, %.3f], case1 k in [%.3f, %.3f]; ", kmin[2], kmax[2], kmin[1], kmax[1]);
        d += fmt("case3 k in [%.3f, %.3f]; ", kmin[3], kmax[3]);
        d += fmt("|J2| k = %.3f, |J3| k = %.3f; %.0f s", f2.k, f3.k, sweep_seconds);
        return std::pair{ok, d};
    });
    run(9, "majorant domination", [&] {
        if (!sweep_error.empty()) throw std::runtime_error(sweep_error);
        const auto& c = scenario_a();
        const auto m2 = majorant_check(tails->first, c.spec.k2);
        const auto m3 = majorant_check(tails->second, c.spec.k1);
        return std::pair{m2.dominates && m3.dominates,
                         fmt("J2 worst log margin %.3g, J3 worst log margin %.3g (<= 0 on all %.0f samples)",
                             m2.worst_log_margin, m3.worst_log_margin, double(tails->first.abs_eps.size()))};
    });

    // 10. inverse Fourier identities
    run(10, "Fourier identities", [] {
        auto g = FourierGrid::make(1.0, 1.0, 30.0, 16, 1.0);
        auto closed = [&](const char* tag, double (*f)(double)) {
            return ProfileFn(g, tag, [f](double m) { return cplx(f(m)); });
        };
        const ProfileFn s = closed("sech", [](double m) { return 1.0 / std::cosh(m); });
        const ProfileFn hs[] = {closed("exp", [](double m) { return std::exp(-std::abs(m)); }), s,
                                closed("gauss", [](double m) { return std::exp(-m * m); })};
        double conv = 0.0, deriv = 0.0;
        for (const auto& h : hs) {
            const auto hc = convolve_m(h, s);
            for (double z : {0.7, -1.9, 3.1}) {
                const cplx rhs = inverse_fourier(h, z, 1.0) * inverse_fourier(s, z, 1.0);
                conv = std::max(conv, std::abs(inverse_fourier(hc, z, 1.0) - rhs) / std::abs(rhs));
                CVec im(g->size());
                for (std::size_t i = 0; i < g->size(); ++i) im[i] = cplx(0.0, g->nodes()[i]) * h.values()[i];
                const auto d = oracles::finite_diff([&](double x) { return inverse_fourier(h, x, 1.0); }, z, 0.05);
                const cplx exact = inverse_fourier(*g, im.data(), z, 1.0);
                deriv = std::max(deriv, std::abs(d.value - exact) / std::abs(exact));
            }
        }
        return std::pair{conv <= 1e-6 && deriv <= 1e-6,
                         fmt("convolution/product %.2e, derivative/multiplication %.2e (<= 1e-6)", conv, deriv)};
    });

    // 11. determinism across worker counts
    run(11, "determinism", [] {
        RunConfig cfg;
        cfg.solve_eps = {0.3, {0.1, 0.2}};
        cfg.split_eps = {0.3};
        cfg.split_points = 3;
        cfg.links = {0, 1, 2};
        cfg.eps_samples = 6;
        cfg.eps_lo_frac = 0.05;
        cfg.points = 3;
        const fs::path base = fs::temp_directory_path() / "borel_lab_acceptance";
        fs::remove_all(base);
        std::vector<std::vector<std::string>> files;
        std::vector<fs::path> dirs;
        for (int w : {1, 3}) {
            cfg.workers = w;
            cfg.out_dir = (base / ("w" + std::to_string(w))).string();
            const auto sum = run_scenario(cfg, {"report"});
            set_default_workers(0);
            if (sum.exit_code != 0) throw std::runtime_error(sum.failed_stage + ": " + sum.message);
            files.push_back(sum.files);
            dirs.push_back(cfg.out_dir);
        }
        bool same = files[0] == files[1];
        std::size_t bytes = 0;
        for (const auto& f : files[0]) {
            const auto a = slurp(dirs[0] / f), b = slurp(dirs[1] / f);
            same = same && a == b;
            bytes += a.size();
        }
        fs::remove_all(base);
        return std::pair{same, fmt("%.0f files (%.0f bytes) identical for 1 and 3 workers", double(files[0].size()),
                                   double(bytes))};
    });

    std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "SOME FAIL", failures);
    return failures == 0 ? 0 : 1;
}
