#include "borel_lab/laplace_paths.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "borel_lab/parallel.hpp"
#include "borel_lab/quadrature.hpp"
#include "borel_lab/special_functions.hpp"

namespace borel_lab {

// ---- paths ---------------------------------------------------------------------------------

cplx PathSegment::end() const { return infinite() ? cplx(kInf, kInf) : std::polar(r_end, d); }

namespace {

cplx piece_start(const PathPiece& p) {
    return std::visit([](const auto& q) { return q.start(); }, p);
}
cplx piece_end(const PathPiece& p) {
    return std::visit([](const auto& q) { return q.end(); }, p);
}
bool piece_infinite(const PathPiece& p) {
    const auto* s = std::get_if<PathSegment>(&p);
    return s && s->infinite();
}

}  // namespace

PathChain& PathChain::then(const PathPiece& p) {
    if (const auto* s = std::get_if<PathSegment>(&p)) {
        if (!(s->r_start >= 0.0) || !(s->r_start < s->r_end)) throw UsageError("PathChain: segment needs 0 <= r_start < r_end");
    } else {
        const auto& a = std::get<Arc>(p);
        if (!(a.rho > 0.0)) throw UsageError("PathChain: arc radius must be positive");
        if (!(std::abs(a.theta_end - a.theta_start) < 2.0 * kPi)) throw UsageError("PathChain: arc must turn less than 2 pi");
    }
    if (!pieces_.empty()) {
        if (piece_infinite(pieces_.back())) throw UsageError("PathChain: nothing can follow a ray to infinity");
        const cplx a = piece_end(pieces_.back()), b = piece_start(p);
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
            throw UsageError("PathChain: consecutive pieces must share endpoints");
    }
    pieces_.push_back(p);
    return *this;
}

bool PathChain::infinite() const { return !pieces_.empty() && piece_infinite(pieces_.back()); }

cplx PathChain::start() const {
    if (pieces_.empty()) throw UsageError("PathChain: empty chain");
    return piece_start(pieces_.front());
}

cplx PathChain::end() const {
    if (pieces_.empty()) throw UsageError("PathChain: empty chain");
    if (const auto* s = std::get_if<PathSegment>(&pieces_.back()); s && s->infinite()) return s->start();
    return piece_end(pieces_.back());
}

PathChain PathChain::ray(double d, double r_start) {
    PathChain c;
    c.then(PathSegment{d, r_start, kInf});
    return c;
}

PathChain PathChain::segment(double d, double r_start, double r_end) {
    PathChain c;
    c.then(PathSegment{d, r_start, r_end});
    return c;
}

PathChain PathChain::bent(double theta, double d, double r_mid, double r_end) {
    PathChain c;
    c.then(PathSegment{theta, 0.0, r_mid});
    if (std::abs(d - theta) > 0.0) c.then(Arc{r_mid, theta, d});
    c.then(PathSegment{d, r_mid, r_end});
    return c;
}

// ---- parameters ----------------------------------------------------------------------------

double cosine_margin(int k, double d, const SectorSpec& E, const SectorSpec& T) {
    double m = kInf;
    constexpr int n = 40;
    for (int i = 0; i <= n; ++i) {
        const double ae = E.d + E.half_opening * (2.0 * i / n - 1.0);
        for (int j = 0; j <= n; ++j) {
            const double at = T.d + T.half_opening * (2.0 * j / n - 1.0);
            m = std::min(m, std::cos(k * (d - ae - at)));
        }
    }
    return m;
}

LaplaceParams make_laplace_params(const ProblemSpec& spec, const Directions& dirs, const SectorSpec& E, double r_T,
                                  double T_half_opening, double beta_prime, double nu1, double nu2) {
    LaplaceParams p;
    p.beta_prime = beta_prime;
    p.E = E;
    if (p.E.unbounded) {
        p.E.unbounded = false;
        p.E.radius = spec.eps0;
    }
    p.T1 = {dirs.d1 - E.d, T_half_opening, r_T, false};
    p.T2 = {dirs.d2 - E.d, T_half_opening, r_T, false};
    p.Delta1 = cosine_margin(spec.k1, dirs.d1, p.E, p.T1);
    p.Delta2 = cosine_margin(spec.k2, dirs.d2, p.E, p.T2);
    if (!(p.Delta1 > 0.0) || !(p.Delta2 > 0.0))
        throw GeometryError("make_laplace_params: the kernels do not decay on E x T (Delta <= 0)");
    p.nu1 = nu1;
    p.nu2 = nu2;
    p.check(spec);
    return p;
}

void LaplaceParams::check(const ProblemSpec& spec) const {
    if (!(beta_prime > 0.0) || !(beta_prime < spec.beta)) throw ConfigError("laplace: need 0 < beta' < beta");
    if (!(rel_tol > 0.0) || rel_tol > 1e-3) throw ConfigError("laplace: rel_tol must lie in (0, 1e-3]");
    if (order < 4 || !(phase_step > 0.0)) throw ConfigError("laplace: panel parameters out of range");
    if (R_max < 0.0) throw ConfigError("laplace: R_max must be nonnegative");
    if (T1.unbounded || T2.unbounded || E.unbounded) throw ConfigError("laplace: T1, T2 and E must be bounded sectors");
    const double e0 = std::min(E.radius, spec.eps0);
    if (!(Delta1 > 0.0) || !(Delta2 > 0.0)) throw ConfigError("laplace: Delta1, Delta2 must be positive");
    if (!(e0 * T1.radius < std::pow(Delta1 / nu1, 1.0 / spec.k1)) ||
        !(e0 * T2.radius < std::pow(Delta2 / nu2, 1.0 / spec.k2)))
        throw ConfigError("laplace: eps0 r_T too large for the kernel to dominate the growth of omega");
}

bool LaplaceParams::contains(const LaplacePoint& p) const {
    return p.t1 != cplx(0.0) && p.t2 != cplx(0.0) && p.eps != cplx(0.0) && T1.contains(p.t1) && T2.contains(p.t2) &&
           E.contains(p.eps) && std::abs(p.z.imag()) < beta_prime;
}

// ---- scaled numbers ------------------------------------------------------------------------

cplx Scaled::value() const { return mant == cplx(0.0) ? cplx(0.0) : mant * std::exp(log_scale); }

double Scaled::log_abs() const { return mant == cplx(0.0) ? -kInf : std::log(std::abs(mant)) + log_scale; }

Scaled Scaled::operator+(const Scaled& o) const {
    if (mant == cplx(0.0)) return o;
    if (o.mant == cplx(0.0)) return *this;
    const double s = std::max(log_scale, o.log_scale);
    return {mant * std::exp(log_scale - s) + o.mant * std::exp(o.log_scale - s), s};
}

Scaled Scaled::operator-(const Scaled& o) const { return *this + Scaled{-o.mant, o.log_scale}; }

// ---- quadrature rules along chains ------------------------------------------------------

namespace {

// Nodes u_i of a chain with weights w_i = (du/u measure) * exp(E_i - shift),
// E = -(u/T)^k.
struct Rule {
    std::vector<cplx> u, w;
    std::vector<double> r;
    std::vector<double> dir;  // direction of the segment holding the node (NaN on arcs)
    double shift = 0.0;
    double R_cut = 0.0;       // where the ray to infinity was cut (0 if none)
    double ray_decay = 0.0;   // cos(k(d - arg T)) / |T|^k on that ray
    double ray_start = 0.0;
};

// -(u/T)^k for u = r e^{i theta}
cplx kernel_exponent(double r, double theta, cplx T, int k) {
    const double A = std::pow(r / std::abs(T), k);
    return -std::polar(A, k * (theta - std::arg(T)));
}

void add_panel_nodes(Rule& R, const quad::Rule& gl, double lo, double hi, double theta, cplx T, int k,
                     std::vector<cplx>& expo) {
    const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double r = c + h * gl.x[i];
        R.u.push_back(std::polar(r, theta));
        R.r.push_back(r);
        R.dir.push_back(theta);
        R.w.push_back(h * gl.w[i] / r);
        expo.push_back(kernel_exponent(r, theta, T, k));
    }
}

// R_cap: largest radius the source can be evaluated at; breaks: radii where the source is
// only piecewise smooth (inserted as panel ends).
Rule build_rule(const PathChain& chain, cplx T, int k, const LaplaceParams& prm, double R_cap,
                const std::vector<double>& breaks) {
    if (chain.empty()) throw UsageError("laplace: empty path chain");
    Rule R;
    std::vector<cplx> expo;
    const auto& gl = quad::gauss_legendre(prm.order);
    const double A = std::pow(std::abs(T), -k);
    const double drop = std::log(1.0 / prm.rel_tol) + 8.0;
    for (const auto& piece : chain.pieces()) {
        if (const auto* s = std::get_if<PathSegment>(&piece)) {
            const double c = std::cos(k * (s->d - std::arg(T)));
            double b = s->r_end;
            if (s->infinite()) {
                if (!(c > 0.0))
                    throw DomainError("laplace: the kernel does not decay along the ray of direction " +
                                      std::to_string(s->d));
                R.ray_decay = c * A;
                R.ray_start = s->r_start;
            }
            // cut where the kernel has dropped below rel_tol e^{-8} of its value at r_start
            if (c > 0.0) b = std::min(b, std::pow(std::pow(s->r_start, k) + drop / (c * A), 1.0 / k));
            if (s->infinite() && prm.R_max > 0.0) b = std::min(b, prm.R_max);
            if (b > R_cap) {
                if (!s->infinite() && s->r_end > R_cap * (1 + 1e-12))
                    throw UsageError("laplace: path leaves the region where omega is known");
                b = std::min(b, R_cap);
            }
            if (s->infinite()) R.R_cut = b;
            const double a = s->r_start;
            if (!(b > a)) continue;
            // panel ends: equal steps of A r^k, plus the source's breaks
            std::vector<double> ends{a};
            const double ak = std::pow(a, k);
            for (int j = 1;; ++j) {
                const double r = std::pow(ak + j * prm.phase_step / A, 1.0 / k);
                if (r >= b * (1 - 1e-12)) break;
                ends.push_back(r);
            }
            for (double x : breaks)
                if (x > a * (1 + 1e-12) && x < b * (1 - 1e-12)) ends.push_back(x);
            ends.push_back(b);
            std::sort(ends.begin(), ends.end());
            for (std::size_t i = 0; i + 1 < ends.size(); ++i)
                if (ends[i + 1] - ends[i] > 1e-14 * b) add_panel_nodes(R, gl, ends[i], ends[i + 1], s->d, T, k, expo);
        } else {
            const auto& a = std::get<Arc>(piece);
            if (a.rho > R_cap * (1 + 1e-12)) throw UsageError("laplace: arc leaves the region where omega is known");
            const double L = a.theta_end - a.theta_start;
            const double rate = k * A * std::pow(a.rho, k);
            const double width = std::min(0.25, prm.phase_step / rate);
            const int n = std::max(1, static_cast<int>(std::ceil(std::abs(L) / width)));
            for (int p = 0; p < n; ++p) {
                const double t0 = a.theta_start + L * p / n, t1 = a.theta_start + L * (p + 1) / n;
                const double h = 0.5 * (t1 - t0), c = 0.5 * (t1 + t0);
                for (std::size_t i = 0; i < gl.x.size(); ++i) {
                    const double th = c + h * gl.x[i];
                    R.u.push_back(std::polar(a.rho, th));
                    R.r.push_back(a.rho);
                    R.dir.push_back(std::numeric_limits<double>::quiet_NaN());
                    R.w.push_back(cplx(0.0, h * gl.w[i]));  // du/u = i dtheta
                    expo.push_back(kernel_exponent(a.rho, th, T, k));
                }
            }
        }
    }
    if (expo.empty()) return R;
    R.shift = -kInf;
    for (const auto& e : expo) R.shift = std::max(R.shift, e.real());
    for (std::size_t i = 0; i < expo.size(); ++i) R.w[i] *= std::exp(expo[i] - R.shift);
    return R;
}

// log of int_R^inf exp(-a r^k) dr (bounded by e^{-a R^k} / (a k R^{k-1}) for R > 0)
double log_ray_tail(double a, double R, int k) {
    if (!(a > 0.0)) return kInf;
    if (R <= 0.0) return std::log(std::tgamma(1.0 + 1.0 / k)) - std::log(a) / k;
    return -a * std::pow(R, k) - std::log(a * k * std::pow(R, k - 1));
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    if (std::isinf(m)) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// (1/sqrt(2 pi)) int (1+|m|)^-mu e^{-(beta - |Im z|)|m|} dm <= 2 / (sqrt(2 pi) gap)
double log_m_factor(double beta, cplx z) {
    const double gap = beta - std::abs(z.imag());
    if (!(gap > 0.0)) throw DomainError("laplace: z outside the strip of analyticity");
    return std::log(2.0 / (kSqrt2Pi * gap));
}

void check_point(const ProblemSpec& s, const LaplacePoint& p, const LaplaceParams& prm) {
    prm.check(s);
    if (!(std::abs(p.z.imag()) < prm.beta_prime)) throw DomainError("laplace: z outside the strip H_beta'");
    if (std::abs(p.eps) > s.eps0 * (1 + 1e-12)) throw DomainError("laplace: eps outside D(0, eps0)");
}

// moments sum_i w_i u_i^n, n = 1..N
CVec moments(const Rule& R, int N) {
    CVec M(N + 1, 0.0);
    std::vector<CVec> terms(N + 1);
    for (std::size_t i = 0; i < R.u.size(); ++i) {
        cplx p = R.w[i];
        for (int n = 1; n <= N; ++n) {
            p *= R.u[i];
            terms[n].push_back(p);
        }
    }
    for (int n = 1; n <= N; ++n) M[n] = quad::pairwise_sum(terms[n].data(), terms[n].size());
    return M;
}

double abs_moment(const Rule& R, int n) {
    std::vector<double> t;
    for (std::size_t i = 0; i < R.u.size(); ++i) t.push_back(std::abs(R.w[i]) * std::pow(R.r[i], n));
    return quad::pairwise_sum(t.data(), t.size());
}

LaplaceResult finish(const MSpace& ms, const ProblemSpec& s, const CVec& vec, const Rule& R1, const Rule& R2,
                     const LaplacePoint& p, double log_tail_rel) {
    LaplaceResult res;
    const double kk = s.k1 * s.k2;
    res.value = {kk * ms.inverse_fourier(vec.data(), p.z), R1.shift + R2.shift};
    // truncation of the m-line
    const double mt = kk * inverse_fourier_tail(ms.grid(), ms.norm(vec.data()), p.z, ms.beta(), ms.mu());
    double lt = log_add(log_tail_rel, mt > 0.0 ? std::log(mt) : -kInf);
    res.log_tail = lt + R1.shift + R2.shift;
    res.R_eff1 = R1.R_cut;
    res.R_eff2 = R2.R_cut;
    res.nodes1 = R1.u.size();
    res.nodes2 = R2.u.size();
    return res;
}

LaplaceResult zero_result() {
    LaplaceResult r;
    r.value = {0.0, 0.0};
    return r;
}

// Shared by the disc-series and entire-series entry points. rho = inf for entire functions.
LaplaceResult series_laplace(const SeriesFn& w, const ProblemSpec& s, double rho1, double rho2, const PathChain& c1,
                             const PathChain& c2, const LaplacePoint& p, const LaplaceParams& prm) {
    check_point(s, p, prm);
    if ((std::isfinite(rho1) && c1.infinite()) || (std::isfinite(rho2) && c2.infinite()))
        throw UsageError("laplace: a disc solution has no ray to infinity");
    if (p.t1 == cplx(0.0) || p.t2 == cplx(0.0) || p.eps == cplx(0.0)) return zero_result();
    const Rule R1 = build_rule(c1, p.eps * p.t1, s.k1, prm, rho1, {});
    const Rule R2 = build_rule(c2, p.eps * p.t2, s.k2, prm, rho2, {});
    const int N = w.N_max();
    const CVec M1 = moments(R1, N), M2 = moments(R2, N);
    const std::size_t J = w.ms().dim();
    CVec vec(J, 0.0);
    for (const auto& [key, c] : w.coeffs()) {
        const cplx f = M1[key.first] * M2[key.second];
        for (std::size_t j = 0; j < J; ++j) vec[j] += f * c[j];
    }
    // rays to infinity: |omega|_m <= sum |c_n|_m r1^n1 r2^n2, tails by incomplete Gamma
    double lt = -kInf;
    if (R1.R_cut > 0.0 || R2.R_cut > 0.0) {
        lt = log_m_factor(s.beta, p.z);
        double acc = 0.0;
        auto tail = [&](const Rule& R, int k, int n) {
            if (R.R_cut <= 0.0) return 0.0;
            const double a = R.ray_decay, x = a * std::pow(R.R_cut, k);
            // int_R^inf r^{n-1} e^{-a r^k} dr, relative to exp(shift)
            return std::exp(std::lgamma(double(n) / k) - std::log(double(k)) - (double(n) / k) * std::log(a) - R.shift) *
                   boost::math::gamma_q(double(n) / k, x);
        };
        for (const auto& [key, c] : w.coeffs()) {
            const double cn = w.ms().norm(c.data());
            const double t1 = tail(R1, s.k1, key.first), t2 = tail(R2, s.k2, key.second);
            const double b1 = abs_moment(R1, key.first), b2 = abs_moment(R2, key.second);
            acc += cn * (t1 * (b2 + t2) + b1 * t2);
        }
        lt = acc > 0.0 ? lt + std::log(s.k1 * s.k2 * acc) : -kInf;
    }
    return finish(w.ms(), s, vec, R1, R2, p, lt);
}

// G(r) = r e^{nu r^k} / (1 + r^{2k}): the radial profile of sector solutions
double log_G(double r, double nu, int k) {
    return std::log(r) + nu * std::pow(r, k) - std::log1p(std::pow(r, 2 * k));
}

LaplaceResult grid_laplace(const BorelSolution& sol, const ProblemSpec& s, const PathChain& c1, const PathChain& c2,
                           const LaplacePoint& p, const LaplaceParams& prm) {
    check_point(s, p, prm);
    if (p.t1 == cplx(0.0) || p.t2 == cplx(0.0) || p.eps == cplx(0.0)) return zero_result();
    const BorelGridFn& g = *sol.grid;
    const PolarGrid& G = g.grid();
    const Rule R1 = build_rule(c1, p.eps * p.t1, s.k1, prm, G.r1().hi(), G.r1().breaks());
    const Rule R2 = build_rule(c2, p.eps * p.t2, s.k2, prm, G.r2().hi(), G.r2().breaks());
    // one angle pair for both chains
    auto direction = [](const Rule& R) {
        double d = std::numeric_limits<double>::quiet_NaN();
        for (double x : R.dir) {
            if (std::isnan(x)) throw UsageError("laplace: arcs need a series solution");
            if (std::isnan(d)) d = x;
            else if (std::abs(wrap_angle(x - d)) > 1e-12) throw UsageError("laplace: grid solutions need straight chains");
        }
        return d;
    };
    const double d1 = direction(R1), d2 = direction(R2);
    std::size_t a = G.n_angles();
    for (std::size_t i = 0; i < G.n_angles(); ++i)
        if (std::abs(wrap_angle(G.angles()[i].first - d1)) < 1e-9 && std::abs(wrap_angle(G.angles()[i].second - d2)) < 1e-9)
            a = i;
    const std::size_t J = g.dim();
    CVec vec(J, 0.0);
    if (R1.u.empty() || R2.u.empty()) return finish(g.ms(), s, vec, R1, R2, p, -kInf);
    if (a == G.n_angles()) throw UsageError("laplace: path directions are not an angle pair of the grid");
    // project the node weights onto the grid values (exact for the panel interpolant)
    auto project = [](const Rule& R, const quad::PanelGrid& P) {
        CVec W(P.size(), 0.0);
        std::vector<double> bw(P.order());
        for (std::size_t i = 0; i < R.u.size(); ++i) {
            std::size_t first = 0;
            P.interp_weights(R.r[i], first, bw.data());
            for (int j = 0; j < P.order(); ++j) W[first + j] += R.w[i] * bw[j];
        }
        return W;
    };
    const CVec W1 = project(R1, G.r1()), W2 = project(R2, G.r2());
    std::vector<CVec> rows(G.n1(), CVec(J, 0.0));
    parallel_for(G.n1(), [&](std::size_t i1) {
        if (W1[i1] == cplx(0.0)) return;
        for (std::size_t i2 = 0; i2 < G.n2(); ++i2) {
            const cplx* v = g.at(a, i1, i2);
            for (std::size_t j = 0; j < J; ++j) rows[i1][j] += W2[i2] * v[j];
        }
        for (auto& x : rows[i1]) x *= W1[i1];
    });
    for (std::size_t j = 0; j < J; ++j) {
        CVec col(G.n1());
        for (std::size_t i1 = 0; i1 < G.n1(); ++i1) col[i1] = rows[i1][j];
        vec[j] = quad::pairwise_sum(col.data(), col.size());
    }
    // rays to infinity: |omega|_m <= varpi G1(r1) G2(r2) beyond the grid
    double lt = -kInf;
    if (R1.R_cut > 0.0 || R2.R_cut > 0.0) {
        const auto& sp = sol.space;
        auto nodes_bound = [](const Rule& R, double nu, int k) {
            std::vector<double> t;
            for (std::size_t i = 0; i < R.u.size(); ++i) t.push_back(std::abs(R.w[i]) * std::exp(log_G(R.r[i], nu, k)));
            return quad::pairwise_sum(t.data(), t.size());
        };
        auto tail = [](const Rule& R, double nu, int k) {
            if (R.R_cut <= 0.0) return 0.0;
            return std::exp(log_ray_tail(R.ray_decay - nu, R.R_cut, k) - R.shift);
        };
        const double t1 = tail(R1, sp.nu1, s.k1), t2 = tail(R2, sp.nu2, s.k2);
        const double b1 = nodes_bound(R1, sp.nu1, s.k1), b2 = nodes_bound(R2, sp.nu2, s.k2);
        const double acc = t1 * (b2 + t2) + b1 * t2;
        lt = acc > 0.0 ? log_m_factor(s.beta, p.z) + std::log(s.k1 * s.k2 * sol.varpi * acc) : -kInf;
    }
    return finish(g.ms(), s, vec, R1, R2, p, lt);
}

}  // namespace

LaplaceResult laplace_over_paths(const ProblemSpec& spec, const BorelSolution& w, const PathChain& c1,
                                 const PathChain& c2, const LaplacePoint& p, const LaplaceParams& prm) {
    if (std::abs(w.eps - p.eps) > 1e-14 * std::max(1.0, std::abs(p.eps)))
        throw UsageError("laplace: the point's eps differs from the solution's");
    if (w.series) return series_laplace(*w.series, spec, w.space.rho1, w.space.rho2, c1, c2, p, prm);
    if (w.grid) return grid_laplace(w, spec, c1, c2, p, prm);
    throw UsageError("laplace: empty solution");
}

LaplaceResult laplace_over_paths(const ProblemSpec& spec, const SeriesFn& w, const PathChain& c1, const PathChain& c2,
                                 const LaplacePoint& p, const LaplaceParams& prm) {
    return series_laplace(w, spec, kInf, kInf, c1, c2, p, prm);
}

// ---- forcing term --------------------------------------------------------------------------

SeriesFn forcing_series(const SolverContext& ctx, cplx eps, int N_max) {
    const auto& s = ctx.spec;
    if (std::abs(eps) > s.eps0 * (1 + 1e-12)) throw DomainError("forcing: eps outside D(0, eps0)");
    SeriesFn out(ctx.ms, N_max);
    for (const auto& [key, amp] : s.forcing) {
        if (key.first > N_max || key.second > N_max) throw UsageError("forcing_series: N_max below a forcing exponent");
        const cplx a = amp(eps) / (gamma_fn(double(key.first) / s.k1) * gamma_fn(double(key.second) / s.k2));
        CVec p = ctx.ms->profile(a);
        auto& o = out.coeff(key);
        for (std::size_t j = 0; j < p.size(); ++j) o[j] += p[j];
    }
    return out;
}

cplx forcing_eval(const SolverContext& ctx, const LaplacePoint& p, ForcingMode mode, const LaplaceParams& prm,
                  double d1, double d2) {
    const auto& s = ctx.spec;
    check_point(s, p, prm);
    if (mode == ForcingMode::Quadrature) {
        int N = 1;
        for (const auto& [key, amp] : s.forcing) N = std::max({N, key.first, key.second});
        const auto r = laplace_over_paths(s, forcing_series(ctx, p.eps, N), PathChain::ray(d1), PathChain::ray(d2), p, prm);
        return r.value.value();
    }
    std::vector<cplx> terms;
    for (const auto& [key, amp] : s.forcing) {
        const cplx Ff = inverse_fourier(ProfileFn(ctx.mgrid, "F", [&, a = amp(p.eps)](double m) {
                                            return a * base_profile(m, s.beta, s.mu);
                                        }),
                                        p.z, s.beta);
        terms.push_back(Ff * std::pow(p.eps * p.t1, key.first) * std::pow(p.eps * p.t2, key.second));
    }
    return quad::pairwise_sum(terms.data(), terms.size());
}

// ---- splitting -------------------------------------------------------------------------------

double log_solution_bound(const ProblemSpec& spec, double varpi, const LaplacePoint& p, const LaplaceParams& prm) {
    const double gap = spec.beta - std::abs(p.z.imag());
    if (!(gap > 0.0)) throw DomainError("bound: z outside the strip");
    auto radial = [](double a, int k) {
        // int_0^inf e^{-a r^k} / (1 + r^{2k}) dr, cut where e^{-a r^k} < 1e-18
        if (!(a > 0.0)) return kInf;
        const double R = std::pow(42.0 / a, 1.0 / k);
        auto r = quad::adaptive_vec([&](double x, cplx* o) { o[0] = std::exp(-a * std::pow(x, k)) / (1.0 + std::pow(x, 2 * k)); },
                                    1, 0.0, R, 1e-15, 1e-12);
        return r.value[0].real() + std::exp(-a * std::pow(R, k)) / (a * k * std::pow(R, k - 1));
    };
    const double M = 60.0 / gap;
    auto mi = quad::adaptive_vec(
        [&](double m, cplx* o) { o[0] = 2.0 * std::pow(1.0 + m, -spec.mu) * std::exp(-gap * m); }, 1, 0.0, M, 1e-15, 1e-12);
    const double mint = mi.value[0].real() + 2.0 * std::exp(-gap * M) / gap;
    const double a1 = prm.Delta1 / std::pow(std::abs(p.eps * p.t1), spec.k1) - prm.nu1;
    const double a2 = prm.Delta2 / std::pow(std::abs(p.eps * p.t2), spec.k2) - prm.nu2;
    return std::log(varpi * spec.k1 * spec.k2 / kSqrt2Pi * mint) + std::log(radial(a1, spec.k1)) +
           std::log(radial(a2, spec.k2));
}

SplitResult solution_and_split(const ProblemSpec& spec, const BorelSolution& sol, const LaplacePoint& p,
                               const LaplaceParams& prm) {
    if (!sol.grid || sol.domain != Domain::Sector) throw UsageError("solution_and_split: needs a sector solution");
    prm.check(spec);
    if (!prm.contains(p)) throw DomainError("solution_and_split: point outside T1 x T2 x H_beta' x E");
    const double d1 = sol.directions.d1, d2 = sol.directions.d2;
    const double h1 = 0.5 * sol.space.rho1, h2 = 0.5 * sol.space.rho2;
    // the direction conditions at this point
    if (!(std::cos(spec.k1 * (d1 - std::arg(p.eps * p.t1))) > 0.0) ||
        !(std::cos(spec.k2 * (d2 - std::arg(p.eps * p.t2))) > 0.0))
        throw DomainError("solution_and_split: direction conditions fail at the point");
    SplitResult r;
    const auto u = laplace_over_paths(spec, sol, PathChain::ray(d1), PathChain::ray(d2), p, prm);
    const auto J1 = laplace_over_paths(spec, sol, PathChain::segment(d1, 0.0, h1), PathChain::segment(d2, 0.0, h2), p, prm);
    const auto J2 = laplace_over_paths(spec, sol, PathChain::segment(d1, 0.0, h1), PathChain::ray(d2, h2), p, prm);
    const auto J3 = laplace_over_paths(spec, sol, PathChain::ray(d1, h1), PathChain::ray(d2), p, prm);
    r.u = u.value;
    r.J1 = J1.value;
    r.J2 = J2.value;
    r.J3 = J3.value;
    const Scaled gap = r.J1 + r.J2 + r.J3 - r.u;
    r.identity_gap = std::exp(gap.log_abs() - r.u.log_abs());
    r.log_tail = std::max({u.log_tail, J1.log_tail, J2.log_tail, J3.log_tail});
    r.log_bound = log_solution_bound(spec, sol.varpi, p, prm);
    return r;
}

Scaled j1p_family(const ProblemSpec& spec, const BorelSolution& disc, double dp, double dtp, const SectorSpec& Ep,
                  const LaplacePoint& p, const LaplaceParams& prm) {
    if (!disc.series) throw UsageError("j1p_family: needs a disc series solution");
    if (!Ep.contains(p.eps) || p.eps == cplx(0.0)) throw DomainError("j1p_family: eps outside E_p");
    return laplace_over_paths(spec, disc, PathChain::segment(dp, 0.0, 0.5 * disc.space.rho1),
                              PathChain::segment(dtp, 0.0, 0.5 * disc.space.rho2), p, prm)
        .value;
}

}  // namespace borel_lab
