#include "borel_lab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "borel_lab/parallel.hpp"
#include "borel_lab/special_functions.hpp"

namespace borel_lab {

namespace {
constexpr double kDeg = kPi / 180.0;
}

// ---- coverings ---------------------------------------------------------------------------

double GoodCovering::overlap_direction(int p) const {
    const double step = 2.0 * kPi / varsigma;
    return wrap_angle(bisector(p) + 0.5 * step);
}

CoveringAudit audit_covering(const GoodCovering& c, int n_args) {
    CoveringAudit a;
    const int n = static_cast<int>(c.sectors.size());
    if (n < 2) {
        a.diagnostic = "fewer than two sectors";
        return a;
    }
    const double radii[] = {1e-6, 0.1, 0.5, 0.9, 0.999};
    std::vector<bool> link_seen(n, false);
    a.no_triple = a.covers = true;
    for (int i = 0; i < n_args && (a.no_triple && a.covers); ++i) {
        const double th = -kPi + 2.0 * kPi * (i + 0.5) / n_args;
        for (double rf : radii) {
            const cplx e = std::polar(rf * c.eps0, th);
            ++a.samples;
            std::vector<int> in;
            for (int p = 0; p < n; ++p)
                if (c.sectors[p].contains(e)) in.push_back(p);
            if (in.empty()) {
                a.covers = false;
                a.diagnostic = "argument " + std::to_string(th / kDeg) + " deg is not covered";
                break;
            }
            if (in.size() >= 3) {
                a.no_triple = false;
                a.diagnostic = "argument " + std::to_string(th / kDeg) + " deg lies in " + std::to_string(in.size()) +
                               " sectors";
                break;
            }
            for (int p = 0; p < n; ++p)
                if (c.sectors[p].contains(e) && c.sectors[(p + 1) % n].contains(e)) link_seen[p] = true;
        }
    }
    a.consecutive_overlap = std::all_of(link_seen.begin(), link_seen.end(), [](bool b) { return b; });
    if (!a.consecutive_overlap && a.diagnostic.empty()) {
        const int p = static_cast<int>(std::find(link_seen.begin(), link_seen.end(), false) - link_seen.begin());
        a.diagnostic = "sectors " + std::to_string(p) + " and " + std::to_string((p + 1) % n) + " do not overlap";
    }
    return a;
}

GoodCovering build_good_covering(int varsigma, double eps0, double overlap_deg) {
    if (varsigma < 2) throw GeometryError("covering: need at least two sectors");
    if (!(eps0 > 0.0)) throw GeometryError("covering: eps0 must be positive");
    const double opening = 360.0 / varsigma + overlap_deg;
    if (!(overlap_deg > 0.0)) throw GeometryError("covering: consecutive sectors must overlap (overlap_deg > 0)");
    if (!(opening < 2.0 * 360.0 / varsigma))
        throw GeometryError("covering: opening " + std::to_string(opening) + " deg allows triple intersections");
    GoodCovering c;
    c.varsigma = varsigma;
    c.eps0 = eps0;
    c.overlap_deg = overlap_deg;
    for (int p = 0; p < varsigma; ++p)
        c.sectors.push_back(SectorSpec{wrap_angle(2.0 * kPi * p / varsigma), 0.5 * opening * kDeg, eps0, false});
    const auto a = audit_covering(c);
    if (!a.ok()) throw GeometryError("covering: " + a.diagnostic);
    return c;
}

// ---- directions ----------------------------------------------------------------------------

const char* link_case_name(LinkCase c) {
    switch (c) {
        case LinkCase::Zero: return "zero";
        case LinkCase::Case1: return "case1";
        case LinkCase::Case2: return "case2";
        case LinkCase::Case3: return "case3";
    }
    return "?";
}

int expected_order(LinkCase c, const ProblemSpec& spec) {
    switch (c) {
        case LinkCase::Case2: return spec.k1;
        case LinkCase::Case1:
        case LinkCase::Case3: return spec.k2;
        case LinkCase::Zero: return 0;
    }
    return 0;
}

namespace {

// Directions for one variable: sectors joined by shared links form runs; a run takes the
// base direction turned by the mean of its bisectors (the base itself if it holds sector 0).
struct VarAssign {
    std::vector<double> d, margin;
    std::vector<bool> broken;  // shared links that had to be split
};

VarAssign assign_variable(const GoodCovering& cov, int k, const SectorSpec& T, double base, std::vector<bool> shared) {
    const int n = cov.varsigma;
    VarAssign v;
    v.broken.assign(n, false);
    const double step = 2.0 * kPi / n;
    for (;;) {
        // runs: start at a sector whose incoming link is not shared
        std::vector<std::vector<int>> runs;
        int start = -1;
        for (int p = 0; p < n; ++p)
            if (!shared[(p - 1 + n) % n]) {
                start = p;
                break;
            }
        if (start < 0) {  // every link shared: cut the one entering sector 0
            shared[n - 1] = false;
            v.broken[n - 1] = true;
            continue;
        }
        for (int i = 0; i < n; ++i) {
            const int p = (start + i) % n;
            if (i == 0 || !shared[(p - 1 + n) % n]) runs.emplace_back();
            runs.back().push_back(p);
        }
        v.d.assign(n, 0.0);
        v.margin.assign(n, 0.0);
        bool changed = false;
        for (const auto& r : runs) {
            double dir;
            if (std::find(r.begin(), r.end(), 0) != r.end()) {
                dir = base;
            } else {
                // unwrapped bisectors along the run
                const double first = 2.0 * kPi * r.front() / n;
                dir = base + first + 0.5 * step * static_cast<double>(r.size() - 1);
            }
            double worst = kInf;
            for (int p : r) {
                v.d[p] = wrap_angle(dir);
                v.margin[p] = cosine_margin(k, v.d[p], cov.sectors[p], T);
                worst = std::min(worst, v.margin[p]);
            }
            if (!(worst > 0.0)) {
                if (r.size() == 1)
                    throw GeometryError("assign_directions: no admissible direction for sector " + std::to_string(r[0]) +
                                        " (cosine margin " + std::to_string(worst) + ")");
                for (std::size_t i = 0; i + 1 < r.size(); ++i) {
                    shared[r[i]] = false;
                    v.broken[r[i]] = true;
                }
                changed = true;
            }
        }
        if (!changed) return v;
    }
}

}  // namespace

DirectionAssignment assign_directions(const GoodCovering& cov, const ProblemSpec& spec, const SectorSpec& T1,
                                      const SectorSpec& T2, double d1, double d2) {
    if (!audit_covering(cov).ok()) throw GeometryError("assign_directions: the covering is not good");
    const int n = cov.varsigma;
    static constexpr LinkCase pattern[3] = {LinkCase::Case3, LinkCase::Case1, LinkCase::Case2};
    std::vector<bool> share1(n), share2(n);
    for (int p = 0; p < n; ++p) {
        share1[p] = pattern[p % 3] == LinkCase::Case1;
        share2[p] = pattern[p % 3] == LinkCase::Case2;
    }
    const auto v1 = assign_variable(cov, spec.k1, T1, d1, share1);
    const auto v2 = assign_variable(cov, spec.k2, T2, d2, share2);
    DirectionAssignment a;
    a.d = v1.d;
    a.dt = v2.d;
    a.nabla = v1.margin;
    a.nabla_t = v2.margin;
    for (int p = 0; p < n; ++p) {
        const int q = (p + 1) % n;
        const bool same1 = std::abs(wrap_angle(a.d[q] - a.d[p])) < 1e-14;
        const bool same2 = std::abs(wrap_angle(a.dt[q] - a.dt[p])) < 1e-14;
        a.links.push_back(same1 && same2   ? LinkCase::Zero
                          : same1          ? LinkCase::Case1
                          : same2          ? LinkCase::Case2
                                           : LinkCase::Case3);
    }
    return a;
}

// ---- sweeps --------------------------------------------------------------------------------

std::vector<SweepPoint> sample_points(const SectorSpec& T1, const SectorSpec& T2, double beta_prime, int n,
                                      std::uint64_t seed) {
    // raw 64-bit draws mapped to [0, 1) by hand: reproducible across standard libraries
    std::mt19937_64 gen(seed);
    auto u = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<SweepPoint> pts;
    for (int i = 0; i < n; ++i) {
        auto t = [&](const SectorSpec& T) {
            const double r = T.radius * (0.5 + 0.5 * u());
            return std::polar(r, T.d + 0.9 * T.half_opening * (2.0 * u() - 1.0));
        };
        SweepPoint p;
        p.t1 = t(T1);
        p.t2 = t(T2);
        p.z = cplx(4.0 * u() - 2.0, 0.9 * beta_prime * (2.0 * u() - 1.0));
        pts.push_back(p);
    }
    return pts;
}

std::vector<double> eps_ladder(double eps0, int n, double hi_frac, double lo_frac) {
    if (n < 2 || !(hi_frac > lo_frac) || !(lo_frac > 0.0)) throw UsageError("eps_ladder: bad range");
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[i] = eps0 * hi_frac * std::pow(lo_frac / hi_frac, double(i) / (n - 1));
    return e;
}

namespace {

PathChain arc_chain(double rho, double from, double to) {
    PathChain c;
    c.then(Arc{rho, from, from + wrap_angle(to - from)});
    return c;
}

}  // namespace

Sweep difference_sweep(const SolverContext& ctx, int p, const GoodCovering& cov, const DirectionAssignment& dirs,
                       const std::vector<double>& abs_eps, const std::vector<SweepPoint>& points,
                       const SweepSettings& set) {
    const int n = cov.varsigma;
    if (p < 0 || p >= n) throw UsageError("difference_sweep: link index out of range");
    if (set.disc.rep != Representation::Series) throw UsageError("difference_sweep: needs the series representation");
    const int q = (p + 1) % n;
    Sweep s;
    s.name = "link_" + std::to_string(p);
    s.p = p;
    s.tag = dirs.links.at(p);
    s.expected_k = expected_order(s.tag, ctx.spec);
    s.arg_eps = cov.overlap_direction(p);
    s.abs_eps = abs_eps;
    for (double r : abs_eps) {
        const cplx e = std::polar(r, s.arg_eps);
        if (!(r > 0.0) || !cov.sectors[p].contains(e) || !cov.sectors[q].contains(e) || r > ctx.spec.eps0)
            throw DomainError("difference_sweep: eps outside E_p cap E_{p+1}");
    }
    s.log_mag.assign(abs_eps.size(), -kInf);
    const double dp = dirs.d[p], dq = dirs.d[q], tp = dirs.dt[p], tq = dirs.dt[q];
    parallel_for(
        abs_eps.size(),
        [&](std::size_t i) {
            const cplx eps = std::polar(abs_eps[i], s.arg_eps);
            const auto sol = picard_solve(ctx, eps, set.disc, Domain::Disc);
            const double h1 = 0.5 * sol.space.rho1, h2 = 0.5 * sol.space.rho2;
            auto L = [&](const PathChain& a, const PathChain& b, const LaplacePoint& lp) {
                return laplace_over_paths(ctx.spec, sol, a, b, lp, set.prm).value;
            };
            double best = -kInf;
            for (const auto& pt : points) {
                const LaplacePoint lp{pt.t1, pt.t2, pt.z, eps};
                Scaled d;
                switch (s.tag) {
                    case LinkCase::Zero:
                        d = L(PathChain::segment(dq, 0, h1), PathChain::segment(tq, 0, h2), lp) -
                            L(PathChain::segment(dp, 0, h1), PathChain::segment(tp, 0, h2), lp);
                        break;
                    case LinkCase::Case1:
                        d = L(PathChain::segment(dp, 0, h1), arc_chain(h2, tp, tq), lp);
                        break;
                    case LinkCase::Case2:
                        d = L(arc_chain(h1, dp, dq), PathChain::segment(tp, 0, h2), lp);
                        break;
                    case LinkCase::Case3:
                        d = L(arc_chain(h1, dp, dq), PathChain::segment(tq, 0, h2), lp) +
                            L(PathChain::segment(dp, 0, h1), arc_chain(h2, tp, tq), lp);
                        break;
                }
                best = std::max(best, d.log_abs());
            }
            s.log_mag[i] = best;
        },
        set.workers);
    return s;
}

std::pair<Sweep, Sweep> tail_sweeps(const SolverContext& ctx, const Directions& dirs, const std::vector<double>& abs_eps,
                                    double arg_eps, const std::vector<SweepPoint>& points, const SweepSettings& set) {
    Sweep j2, j3;
    j2.name = "J2";
    j3.name = "J3";
    j2.expected_k = ctx.spec.k2;
    j3.expected_k = ctx.spec.k1;
    j2.arg_eps = j3.arg_eps = arg_eps;
    j2.abs_eps = j3.abs_eps = abs_eps;
    j2.log_mag.assign(abs_eps.size(), -kInf);
    j3.log_mag.assign(abs_eps.size(), -kInf);
    auto cfg = set.sector;
    cfg.rep = Representation::Collocation;
    cfg.angles = {{dirs.d1, dirs.d2}};
    parallel_for(
        abs_eps.size(),
        [&](std::size_t i) {
            const cplx eps = std::polar(abs_eps[i], arg_eps);
            const auto sol = picard_solve(ctx, eps, cfg, Domain::Sector);
            auto prm = set.prm;
            prm.nu1 = sol.space.nu1;
            prm.nu2 = sol.space.nu2;
            const double d1 = sol.directions.d1, d2 = sol.directions.d2;
            const double h1 = 0.5 * sol.space.rho1, h2 = 0.5 * sol.space.rho2;
            double b2 = -kInf, b3 = -kInf;
            for (const auto& pt : points) {
                const LaplacePoint lp{pt.t1, pt.t2, pt.z, eps};
                b2 = std::max(b2, laplace_over_paths(ctx.spec, sol, PathChain::segment(d1, 0, h1), PathChain::ray(d2, h2),
                                                     lp, prm)
                                      .value.log_abs());
                b3 = std::max(b3, laplace_over_paths(ctx.spec, sol, PathChain::ray(d1, h1), PathChain::ray(d2), lp, prm)
                                      .value.log_abs());
            }
            j2.log_mag[i] = b2;
            j3.log_mag[i] = b3;
        },
        set.workers);
    return {j2, j3};
}

// ---- fits ----------------------------------------------------------------------------------

namespace {

struct LinFit {
    double a = 0.0, M = 0.0, ssr = 0.0, max_res = 0.0, dssr = 0.0;
};

// y centred beforehand; x = r^-k. dssr = d(ssr)/dk at the optimal (a, M) (envelope).
LinFit lin_fit(const std::vector<double>& r, const std::vector<double>& y, double k) {
    const std::size_t n = r.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(r[i], -k);
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    LinFit f;
    const double b = sxx > 0.0 ? sxy / sxx : 0.0;
    f.M = -b;
    f.a = ym - b * xm;
    f.max_res = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double res = (y[i] - ym) - b * (x[i] - xm);
        f.ssr += res * res;
        f.max_res = std::max(f.max_res, res);
        // d x_i / dk = -ln(r_i) x_i; d ssr/dk = -2 sum res_i b dx_i/dk
        f.dssr += 2.0 * res * b * std::log(r[i]) * x[i];
    }
    return f;
}

void check_series(const std::vector<double>& r, const std::vector<double>& y) {
    if (r.size() != y.size()) throw UsageError("fit_decay: size mismatch");
    if (r.size() < 6) throw UsageError("fit_decay: need at least 6 samples");
    double lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(r[i] > 0.0) || !std::isfinite(r[i])) throw UsageError("fit_decay: |eps| must be positive");
        if (!std::isfinite(y[i])) throw UsageError("fit_decay: magnitudes must be positive and finite");
        lo = std::min(lo, r[i]);
        hi = std::max(hi, r[i]);
    }
    if (hi < 3.0 * lo) throw UsageError("fit_decay: |eps| must span at least a factor 3");
}

DecayFit make_fit(const LinFit& f, double k, double shift, std::size_t n) {
    DecayFit d;
    d.k = k;
    d.M = f.M;
    d.log_C = f.a + shift;
    d.C = std::exp(d.log_C);
    d.rms_residual = std::sqrt(f.ssr / n);
    d.max_residual = f.max_res;
    d.n = n;
    return d;
}

constexpr double kKLo = 0.05, kKHi = 6.0, kKStep = 0.05;

}  // namespace

DecayFit fit_decay_fixed_k(const std::vector<double>& abs_eps, const std::vector<double>& log_v, double k) {
    check_series(abs_eps, log_v);
    const double shift = std::accumulate(log_v.begin(), log_v.end(), 0.0) / log_v.size();
    std::vector<double> y(log_v.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = log_v[i] - shift;
    auto d = make_fit(lin_fit(abs_eps, y, k), k, shift, y.size());
    d.non_exponential = !(d.M > 0.0);
    return d;
}

DecayFit fit_decay_log(const std::vector<double>& abs_eps, const std::vector<double>& log_v) {
    check_series(abs_eps, log_v);
    // centring makes the fit of lambda v differ from that of v only in log C
    const double shift = std::accumulate(log_v.begin(), log_v.end(), 0.0) / log_v.size();
    std::vector<double> y(log_v.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = log_v[i] - shift;
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));

    const int ng = static_cast<int>(std::lround((kKHi - kKLo) / kKStep));
    int best = 0;
    double best_ssr = kInf;
    for (int i = 0; i <= ng; ++i) {
        const double ssr = lin_fit(abs_eps, y, kKLo + i * kKStep).ssr;
        if (ssr < best_ssr * (1 - 1e-12)) {
            best_ssr = ssr;
            best = i;
        }
    }
    double k = kKLo + best * kKStep;
    // refine: the stationary point of ssr(k) next to the grid minimum
    const double a = std::max(kKLo, k - kKStep), b = std::min(kKHi, k + kKStep);
    auto g = [&](double kk) { return lin_fit(abs_eps, y, kk).dssr; };
    const double ga = g(a), gb = g(b);
    if (ga < 0.0 && gb > 0.0) {
        std::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(50), it);
        const double kr = 0.5 * (r.first + r.second);
        if (lin_fit(abs_eps, y, kr).ssr <= best_ssr) k = kr;
    }
    const auto f = lin_fit(abs_eps, y, k);
    auto d = make_fit(f, k, shift, y.size());
    // decay visible in the data at all?
    double xlo = kInf, xhi = 0.0;
    for (double r : abs_eps) {
        xlo = std::min(xlo, std::pow(r, -k));
        xhi = std::max(xhi, std::pow(r, -k));
    }
    if (!(d.M > 0.0) || d.M * (xhi - xlo) <= 1e-9 * std::max(1.0, ymax)) {
        d.non_exponential = true;
        d.k = kKLo;
        d.M = std::max(d.M, 0.0);
    }
    const double nearest = std::max(1.0, std::round(d.k));
    d.multi_level = !d.non_exponential && std::abs(d.k - nearest) > 0.25;
    return d;
}

DecayFit fit_decay(const std::vector<double>& abs_eps, const std::vector<double>& v) {
    std::vector<double> lv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) throw UsageError("fit_decay: magnitudes must be positive");
        lv[i] = std::log(v[i]);
    }
    return fit_decay_log(abs_eps, lv);
}

// ---- report --------------------------------------------------------------------------------

double log_min_majorant(double log_C, double K, int kprime, double r) {
    double best = kInf;
    for (int N = 1; N <= 200; ++N) {
        const double q = double(N) / kprime;
        best = std::min(best, log_C + N * std::log(K) + 0.5 * std::log(q) + std::lgamma(q) + N * std::log(r));
    }
    return best;
}

MajorantCheck majorant_check(const Sweep& s, int kprime) {
    MajorantCheck m;
    m.name = s.name;
    m.kprime = kprime;
    for (double v : s.log_mag)
        if (!std::isfinite(v)) {
            m.worst_log_margin = kInf;
            return m;
        }
    const auto f = fit_decay_fixed_k(s.abs_eps, s.log_mag, kprime);
    if (!(f.M > 0.0)) {
        m.worst_log_margin = kInf;
        return m;
    }
    // exp(-M/r^k') <= C_k' K^N (N/k')^{1/2} Gamma(N/k') r^N for every N, K = M^{-1/k'}
    m.log_C = f.log_C + f.max_residual + std::log(gevrey_constant(kprime));
    m.K = std::pow(f.M, -1.0 / kprime);
    m.worst_log_margin = -kInf;
    for (std::size_t i = 0; i < s.abs_eps.size(); ++i) {
        m.log_majorant.push_back(log_min_majorant(m.log_C, m.K, kprime, s.abs_eps[i]));
        m.worst_log_margin = std::max(m.worst_log_margin, s.log_mag[i] - m.log_majorant.back());
    }
    m.dominates = m.worst_log_margin <= 0.0;
    return m;
}

namespace {

SweepFit fit_sweep(const Sweep& s, double tol) {
    SweepFit f;
    f.name = s.name;
    f.tag = s.tag;
    f.p = s.p;
    f.expected_k = s.expected_k;
    f.tolerance = tol;
    for (double v : s.log_mag)
        if (!std::isfinite(v)) {
            f.note = "non-finite magnitude (exact zero or overflow)";
            return f;
        }
    f.fit = fit_decay_log(s.abs_eps, s.log_mag);
    f.fitted = true;
    f.consistent = !f.fit.non_exponential && std::abs(f.fit.k - s.expected_k) <= tol * s.expected_k;
    std::ostringstream o;
    o << "fitted k = " << f.fit.k << ", expected " << s.expected_k << " +- " << 100 * tol << "%";
    f.note = o.str();
    return f;
}

}  // namespace

RSReport gevrey_report(const ProblemSpec& spec, const DirectionAssignment& dirs, const std::vector<Sweep>& links,
                       const Sweep* J2, const Sweep* J3, double zero_floor) {
    RSReport r;
    for (std::size_t p = 0; p < dirs.links.size(); ++p) {
        const auto c = dirs.links[p];
        if (c == LinkCase::Case2) r.I1.push_back(static_cast<int>(p));
        else if (c == LinkCase::Zero) r.zero_links.push_back(static_cast<int>(p));
        else r.I2.push_back(static_cast<int>(p));
    }
    for (const auto& s : links) {
        if (s.tag == LinkCase::Zero) {
            const double worst = *std::max_element(s.log_mag.begin(), s.log_mag.end());
            if (worst > std::log(zero_floor))
                r.discrepancies.push_back(s.name + ": identical paths but differences above " + std::to_string(zero_floor));
            continue;
        }
        const double tol = s.tag == LinkCase::Case3 ? 0.25 : 0.15;
        auto f = fit_sweep(s, tol);
        if (!f.consistent) r.discrepancies.push_back(s.name + " (" + link_case_name(s.tag) + "): " + f.note);
        if (f.fitted) {
            if ((s.tag == LinkCase::Case1 || s.tag == LinkCase::Case3) && f.fit.k > 1.15 * spec.k1)
                r.discrepancies.push_back(s.name + ": exponent above k1 for a k2-type link");
            if (s.tag == LinkCase::Case2 && f.fit.k < spec.k2)
                r.discrepancies.push_back(s.name + ": exponent below k2 for a k1-type link");
        }
        r.fits.push_back(std::move(f));
    }
    for (const Sweep* s : {J2, J3}) {
        if (!s) continue;
        auto f = fit_sweep(*s, 0.15);
        if (!f.consistent) r.discrepancies.push_back(s->name + ": " + f.note);
        r.fits.push_back(std::move(f));
        auto m = majorant_check(*s, s->expected_k);
        if (!m.dominates) r.discrepancies.push_back(s->name + ": the Gevrey majorant does not dominate");
        r.majorants.push_back(std::move(m));
    }
    r.hypotheses_hold = r.discrepancies.empty() && !r.fits.empty();
    return r;
}

}  // namespace borel_lab
