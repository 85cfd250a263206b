#include "borel_lab/borel_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "borel_lab/oracles.hpp"
#include "borel_lab/parallel.hpp"
#include "borel_lab/special_functions.hpp"

namespace borel_lab {

// ---- context and P_m ---------------------------------------------------------------------

std::shared_ptr<const SolverContext> SolverContext::make(const ProblemSpec& spec, int J, FourierGridPtr mgrid) {
    auto c = std::make_shared<SolverContext>();
    c->spec = spec;
    c->validation = validate_spec(spec);
    c->derived = derived_quantities(spec);
    c->mgrid = mgrid ? std::move(mgrid) : FourierGrid::make(spec.beta, spec.mu);
    c->ms = make_mspace(spec, c->mgrid, J);
    return c;
}

void SolverContext::require_valid() const {
    if (validation.valid()) return;
    std::string failed;
    for (const auto& f : validation.findings)
        if (!f.passed) failed += (failed.empty() ? "" : ", ") + f.id;
    throw PreconditionError("spec '" + spec.name + "' fails: " + failed);
}

const PowerM& SolverContext::doubled_power_basis() const {
    std::call_once(doubled_once_, [&] { doubled_ = std::make_shared<PowerM>(mgrid, 2 * static_cast<int>(ms->dim())); });
    return *doubled_;
}

namespace {

double x_factor(const ProblemSpec& s) { return std::pow(s.k1, s.delta1) * std::pow(s.k2, s.delta2); }

bool constant_QR(const ProblemSpec& s) { return s.Q.degree() == 0 && s.R.degree() == 0; }

// Samples of m for grid infima: uniform on [-M, M] plus a fine block near 0.
std::vector<double> m_samples(double M) {
    std::vector<double> m;
    for (int i = -400; i <= 400; ++i) m.push_back(M * i / 400.0);
    for (int i = -100; i <= 100; ++i) m.push_back(0.02 * i);
    return m;
}

}  // namespace

PmEvaluator::PmEvaluator(const ProblemSpec& spec, FourierGridPtr mgrid) : spec_(&spec), grid_(std::move(mgrid)) {
    for (double m : grid_->nodes()) {
        Q_.push_back(spec.Q.at_im(m));
        R_.push_back(spec.R.at_im(m));
    }
}

cplx PmEvaluator::X(cplx t1, cplx t2) const {
    const auto& s = *spec_;
    return x_factor(s) * std::pow(t1, s.k1 * s.delta1) * std::pow(t2, s.k2 * s.delta2);
}

cplx PmEvaluator::operator()(cplx t1, cplx t2, double m) const {
    return spec_->Q.at_im(m) - spec_->R.at_im(m) * X(t1, t2);
}

Symbol PmEvaluator::inverse_symbol(cplx t1, cplx t2) const {
    const cplx x = X(t1, t2);
    const auto& s = *spec_;
    if (constant_QR(s)) return Symbol::scalar(1.0 / (s.Q.coeffs()[0] - s.R.coeffs()[0] * x));
    Symbol sym;
    ComplexPoly Q = s.Q, R = s.R;
    sym.f = [Q, R, x](double m) { return 1.0 / (Q.at_im(m) - R.at_im(m) * x); };
    return sym;
}

PmDiscBounds pm_bounds_disc(const ProblemSpec& spec, double rho1, double rho2) {
    if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw UsageError("pm_bounds_disc: radii must be positive");
    const auto d = derived_quantities(spec);
    PmDiscBounds b;
    b.product = x_factor(spec) * std::pow(rho1, spec.k1 * spec.delta1) * std::pow(rho2, spec.k2 * spec.delta2);
    b.max_product = 0.5 * d.r_QR;
    b.C1 = 0.5 * d.r_QR;
    b.admissible = b.product <= b.max_product;
    // |P_m| / |R(im)| = |Q/R(im) - X| with X over the image of the closed polydisc
    const auto ms = m_samples(std::max(20.0, d.m_extent));
    CVec q;
    for (double m : ms) q.push_back(spec.Q.at_im(m) / spec.R.at_im(m));
    PmEvaluator pe(spec, FourierGrid::make(spec.beta, spec.mu, 1.0, 2, 1.0));
    std::vector<cplx> xs;
    const int nr = 5, na = 16;
    for (int i1 = 0; i1 < nr; ++i1)
        for (int a1 = 0; a1 < na; ++a1)
            for (int i2 = 0; i2 < nr; ++i2)
                for (int a2 = 0; a2 < na; ++a2) {
                    cplx t1 = std::polar(rho1 * i1 / (nr - 1), 2.0 * kPi * a1 / na);
                    cplx t2 = std::polar(rho2 * i2 / (nr - 1), 2.0 * kPi * a2 / na);
                    xs.push_back(pe.X(t1, t2));
                }
    double inf = std::numeric_limits<double>::infinity();
    for (cplx x : xs)
        for (cplx v : q) inf = std::min(inf, std::abs(v - x));
    b.grid_inf = inf;
    return b;
}

std::pair<double, double> default_radii(const ProblemSpec& spec) {
    const auto d = derived_quantities(spec);
    auto product = [&](double r1) {
        return x_factor(spec) * std::pow(r1, spec.k1 * spec.delta1) * std::pow(2.0 * r1, spec.k2 * spec.delta2);
    };
    const double target = 0.25 * d.r_QR;
    for (double step : {0.05, 0.005, 0.0005}) {
        double best = 0.0;
        for (int i = 1; i <= 200; ++i)
            if (product(step * i) <= target) best = step * i;
        if (best > 0.0) return {best, 2.0 * best};
    }
    throw PreconditionError("default_radii: no admissible radii");
}

bool SectorSpec::contains(cplx tau) const {
    if (tau == cplx(0.0)) return true;
    if (!unbounded && std::abs(tau) >= radius) return false;
    return std::abs(wrap_angle(std::arg(tau) - d)) <= half_opening;
}

namespace {

// The hull is sampled; gaps narrower than this are treated as closed.
constexpr double kHullResolution = 0.05;

void require_gap(const DerivedReport& derived) {
    if (derived.arg_hull.width >= 2.0 * kPi - kHullResolution)
        throw GeometryError("choose_directions: the argument hull covers the circle");
}

}  // namespace

Directions directions_for(const ProblemSpec& spec, const DerivedReport& derived, double d12) {
    require_gap(derived);
    Directions r;
    r.d12 = wrap_angle(d12);
    r.distance = derived.arg_hull.distance(r.d12);
    if (!(r.distance > 0.0)) throw GeometryError("choose_directions: direction inside the argument hull");
    const double e1 = spec.delta1 * spec.k1, e2 = spec.delta2 * spec.k2;
    r.d1 = r.d12 / (2.0 * e1);
    r.d2 = r.d12 / (2.0 * e2);
    r.S1 = {r.d1, r.distance / (4.0 * e1), 0.0, true};
    r.S2 = {r.d2, r.distance / (4.0 * e2), 0.0, true};
    // arg X ranges over d12 +- distance/2
    const auto ms = m_samples(std::max(20.0, derived.m_extent));
    CVec q;
    for (double m : ms) q.push_back(spec.Q.at_im(m) / spec.R.at_im(m));
    double inf = std::numeric_limits<double>::infinity();
    for (int a = -8; a <= 8; ++a) {
        const double phi = r.d12 + 0.5 * r.distance * a / 8.0;
        for (int i = -1; i <= 120; ++i) {
            const double rad = i < 0 ? 0.0 : std::pow(10.0, -6.0 + 0.1 * i);
            const cplx xi = std::polar(rad, phi);
            for (cplx v : q) inf = std::min(inf, std::abs(v - xi) / (1.0 + rad));
        }
    }
    r.C2 = inf;
    return r;
}

Directions choose_directions(const ProblemSpec& spec, const DerivedReport& derived) {
    require_gap(derived);
    return directions_for(spec, derived, derived.arg_hull.center() + kPi);
}

// ---- series --------------------------------------------------------------------------------

SeriesFn::SeriesFn(MSpacePtr ms, int N_max) : ms_(std::move(ms)), N_(N_max) {
    if (N_ < 1) throw UsageError("SeriesFn: N_max must be positive");
}

CVec& SeriesFn::coeff(Key k) {
    if (k.first < 1 || k.second < 1 || k.first > N_ || k.second > N_) throw UsageError("SeriesFn: exponent out of range");
    auto it = c_.find(k);
    if (it == c_.end()) it = c_.emplace(k, CVec(ms_->dim(), 0.0)).first;
    return it->second;
}

void SeriesFn::eval(cplx t1, cplx t2, cplx* out) const {
    const std::size_t J = ms_->dim();
    std::fill(out, out + J, cplx(0.0));
    for (const auto& [k, c] : c_) {
        const cplx f = std::pow(t1, k.first) * std::pow(t2, k.second);
        for (std::size_t j = 0; j < J; ++j) out[j] += f * c[j];
    }
}

SeriesFn& SeriesFn::operator+=(const SeriesFn& o) {
    for (const auto& [k, c] : o.c_) {
        auto& d = coeff(k);
        for (std::size_t j = 0; j < c.size(); ++j) d[j] += c[j];
    }
    return *this;
}

SeriesFn& SeriesFn::operator-=(const SeriesFn& o) {
    for (const auto& [k, c] : o.c_) {
        auto& d = coeff(k);
        for (std::size_t j = 0; j < c.size(); ++j) d[j] -= c[j];
    }
    return *this;
}

double SeriesFn::disc_norm(double rho1, double rho2, int n_angles) const {
    std::vector<double> best(n_angles, 0.0);
    parallel_for(n_angles, [&](std::size_t a1) {
        CVec v(ms_->dim());
        for (int a2 = 0; a2 < n_angles; ++a2) {
            eval(std::polar(rho1, 2.0 * kPi * a1 / n_angles), std::polar(rho2, 2.0 * kPi * a2 / n_angles), v.data());
            best[a1] = std::max(best[a1], ms_->norm(v.data()));
        }
    });
    return *std::max_element(best.begin(), best.end()) / (rho1 * rho2);
}

double SeriesFn::last_diagonal_norm(double rho1, double rho2) const {
    int top = 0;
    for (const auto& [k, c] : c_)
        if (ms_->norm(c.data()) > 0.0) top = std::max(top, k.first + k.second);
    double r = 0.0;
    for (const auto& [k, c] : c_)
        if (k.first + k.second == top)
            r = std::max(r, ms_->norm(c.data()) * std::pow(rho1, k.first - 1) * std::pow(rho2, k.second - 1));
    return r;
}

const char* representation_name(Representation r) { return r == Representation::Series ? "series" : "collocation"; }

// ---- the operator H ------------------------------------------------------------------------

namespace {

// One term of a linear kernel in one variable: coefficient * tau^k/Gamma(D/k) *
// int_0^{tau^k} (tau^k - s)^{D/k-1} (k s)^p omega(s^{1/k}) ds/s.
struct KernelTerm {
    int D = 0, p = 0;
    double coef = 1.0;
};

std::vector<KernelTerm> kernel_terms(int d, int l, int k) {
    std::vector<KernelTerm> t{{d, l, 1.0}};
    if (l > 1) {
        const auto A = mono_op_coeffs(l, k);
        for (int h = 1; h <= l - 1; ++h) t.push_back({d + k * (l - h), h, A.coeffs[h - 1]});
    }
    return t;
}

int eps_power(const IndexTuple& t) { return t.Delta - t.l1 + t.l2 - t.l3 + t.l4; }

// Monomial action: tau^n -> factor * tau^{n + D + k p}.
double monomial_factor(const KernelTerm& t, int n, int k) {
    const double p = t.p, a = static_cast<double>(n) / k, D = static_cast<double>(t.D) / k;
    return t.coef * std::pow(k, t.p) * std::exp(log_gamma(p + a) - log_gamma(p + a + D));
}

Symbol poly_symbol(const ComplexPoly& p) { return Symbol::poly_at_im(p); }

// (1/P_m) V as a truncated geometric series in kappa R X / Q.
SeriesFn divide_by_pm(const SolverContext& ctx, const SeriesFn& v) {
    const auto& s = ctx.spec;
    const auto& ms = v.ms();
    const int N = v.N_max(), e1 = s.k1 * s.delta1, e2 = s.k2 * s.delta2;
    const double kappa = x_factor(s);
    Symbol inv_q, ratio;
    if (constant_QR(s)) {
        const cplx q = s.Q.coeffs()[0], r = s.R.coeffs()[0];
        inv_q = Symbol::scalar(1.0 / q);
        ratio = Symbol::scalar(kappa * r / q);
    } else {
        ComplexPoly Q = s.Q, R = s.R;
        inv_q.f = [Q](double m) { return 1.0 / Q.at_im(m); };
        ratio.f = [Q, R, kappa](double m) { return kappa * R.at_im(m) / Q.at_im(m); };
    }
    SeriesFn out(v.ms_ptr(), N);
    for (const auto& [k, c] : v.coeffs()) {
        CVec t = c;
        ms.apply_symbol(t.data(), inv_q);
        for (int l = 0;; ++l) {
            const int n1 = k.first + l * e1, n2 = k.second + l * e2;
            if (n1 > N || n2 > N) break;
            auto& o = out.coeff({n1, n2});
            for (std::size_t j = 0; j < t.size(); ++j) o[j] += t[j];
            ms.apply_symbol(t.data(), ratio);
        }
    }
    return out;
}

void add_forcing_series(const SolverContext& ctx, SeriesFn& out, cplx eps, double scale) {
    const auto& s = ctx.spec;
    for (const auto& [key, amp] : s.forcing) {
        if (key.first > out.N_max() || key.second > out.N_max()) continue;
        const cplx a = scale * amp(eps) / (gamma_fn(static_cast<double>(key.first) / s.k1) *
                                           gamma_fn(static_cast<double>(key.second) / s.k2));
        CVec p = out.ms().profile(a);
        auto& o = out.coeff(key);
        for (std::size_t j = 0; j < p.size(); ++j) o[j] += p[j];
    }
}

void check_eps(const ProblemSpec& s, cplx eps) {
    if (std::abs(eps) > s.eps0 * (1.0 + 1e-12)) throw DomainError("H_eps: eps outside D(0, eps0)");
}

}  // namespace

SeriesFn linear_terms(const SolverContext& ctx, const SeriesFn& w, cplx eps) {
    const auto& s = ctx.spec;
    const auto& ms = w.ms();
    SeriesFn out(w.ms_ptr(), w.N_max());
    for (std::size_t ti = 0; ti < s.I.size(); ++ti) {
        const auto& t = s.I[ti];
        const auto [d1, d2] = tuple_shifts(s, t);
        const auto v1 = kernel_terms(d1, t.l2, s.k1), v2 = kernel_terms(d2, t.l4, s.k2);
        const cplx w0 = std::pow(eps, eps_power(t)) * t.amplitude(eps);
        const Symbol sym = poly_symbol(s.R_l[ti]);
        for (const auto& [k, c] : w.coeffs()) {
            const int n1 = k.first + d1 + s.k1 * t.l2, n2 = k.second + d2 + s.k2 * t.l4;
            if (n1 > w.N_max() || n2 > w.N_max()) continue;
            double f = 0.0;
            for (const auto& a : v1)
                for (const auto& b : v2) f += monomial_factor(a, k.first, s.k1) * monomial_factor(b, k.second, s.k2);
            CVec rc = c;
            ms.apply_symbol(rc.data(), sym);
            ms.conv_profile_acc(out.coeff({n1, n2}).data(), rc.data(), w0 * f);
        }
    }
    return out;
}

SeriesFn apply_H(const SolverContext& ctx, const SeriesFn& w, cplx eps, double psi_scale) {
    const auto& s = ctx.spec;
    check_eps(s, eps);
    if (w.ms_ptr() != ctx.ms) throw UsageError("apply_H: carrier mismatch");
    const auto& ms = w.ms();
    const int N = w.N_max();
    SeriesFn pre = linear_terms(ctx, w, eps);

    // bilinear term: tau^a * tau^b -> B(a1/k1, b1/k1) B(a2/k2, b2/k2) tau^{a+b}
    const Symbol s1 = poly_symbol(s.P1.at(eps)), s2 = poly_symbol(s.P2.at(eps));
    std::vector<std::pair<SeriesFn::Key, CVec>> A, B;
    for (const auto& [k, c] : w.coeffs()) {
        CVec a = c, b = c;
        ms.apply_symbol(a.data(), s1);
        ms.apply_symbol(b.data(), s2);
        A.emplace_back(k, std::move(a));
        B.emplace_back(k, std::move(b));
    }
    std::vector<SeriesFn::Key> targets;
    for (const auto& a : A)
        for (const auto& b : B) {
            SeriesFn::Key n{a.first.first + b.first.first, a.first.second + b.first.second};
            if (n.first <= N && n.second <= N) targets.push_back(n);
        }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    std::vector<CVec> nl(targets.size(), CVec(ms.dim(), 0.0));
    parallel_for(targets.size(), [&](std::size_t ti) {
        const auto n = targets[ti];
        for (const auto& a : A) {
            const int b1 = n.first - a.first.first, b2 = n.second - a.first.second;
            if (b1 < 1 || b2 < 1) continue;
            auto it = std::lower_bound(B.begin(), B.end(), SeriesFn::Key{b1, b2},
                                       [](const auto& e, const SeriesFn::Key& k) { return e.first < k; });
            if (it == B.end() || it->first != SeriesFn::Key{b1, b2}) continue;
            const double f = beta_fn(static_cast<double>(a.first.first) / s.k1, static_cast<double>(b1) / s.k1) *
                             beta_fn(static_cast<double>(a.first.second) / s.k2, static_cast<double>(b2) / s.k2);
            ms.conv_acc(nl[ti].data(), a.second.data(), it->second.data(), f);
        }
    });
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        auto& o = pre.coeff(targets[ti]);
        for (std::size_t j = 0; j < o.size(); ++j) o[j] += nl[ti][j];
    }
    add_forcing_series(ctx, pre, eps, psi_scale);
    return divide_by_pm(ctx, pre);
}

BorelGridFn apply_H(const SolverContext& ctx, const BorelGridFn& w, cplx eps, int quad_n, double psi_scale) {
    const auto& s = ctx.spec;
    check_eps(s, eps);
    if (w.ms_ptr() != ctx.ms) throw UsageError("apply_H: carrier mismatch");
    const auto& ms = w.ms();
    const auto& sp = w.space();
    BorelGridFn out(sp, w.grid_ptr(), w.ms_ptr());
    for (std::size_t ti = 0; ti < s.I.size(); ++ti) {
        const auto& t = s.I[ti];
        const auto [d1, d2] = tuple_shifts(s, t);
        const cplx h_amp = std::pow(eps, eps_power(t)) * t.amplitude(eps) / kSqrt2Pi;
        for (const auto& a : kernel_terms(d1, t.l2, s.k1))
            for (const auto& b : kernel_terms(d2, t.l4, s.k2)) {
                const Sigma sig{1.0, 1.0, static_cast<double>(a.D) / s.k1 - 1.0, static_cast<double>(b.D) / s.k2 - 1.0,
                                a.p - 1.0, b.p - 1.0};
                const double c = a.coef * b.coef * std::pow(s.k1, a.p) * std::pow(s.k2, b.p) /
                                 (gamma_fn(static_cast<double>(a.D) / s.k1) * gamma_fn(static_cast<double>(b.D) / s.k2));
                out += apply_B1(w, sig, s.R_l[ti], h_amp, [c](cplx, cplx) { return cplx(c); }, quad_n);
            }
    }
    out += apply_B2(w, w, s.P1, s.P2, eps, [](cplx, cplx) { return cplx(1.0 / kSqrt2Pi); }, quad_n);

    const PmEvaluator pe(s, ctx.mgrid);
    const auto& g = out.grid();
    std::vector<std::pair<std::pair<int, int>, cplx>> forcing;
    for (const auto& [key, amp] : s.forcing)
        forcing.push_back({key, psi_scale * amp(eps) / (gamma_fn(static_cast<double>(key.first) / s.k1) *
                                                       gamma_fn(static_cast<double>(key.second) / s.k2))});
    const CVec phi = ms.profile(1.0);
    parallel_for(g.n_angles() * g.n1(), [&](std::size_t ai) {
        const std::size_t a = ai / g.n1(), i1 = ai % g.n1();
        for (std::size_t i2 = 0; i2 < g.n2(); ++i2) {
            const cplx t1 = out.tau1(a, i1), t2 = out.tau2(a, i2);
            cplx f = 0.0;
            for (const auto& [key, c] : forcing) f += c * std::pow(t1, key.first) * std::pow(t2, key.second);
            cplx* v = out.at(a, i1, i2);
            for (std::size_t j = 0; j < phi.size(); ++j) v[j] += f * phi[j];
            ms.apply_symbol(v, pe.inverse_symbol(t1, t2));
        }
    });
    return out;
}

// ---- configuration, grids ------------------------------------------------------------------

void SolverConfig::check(const ProblemSpec& spec) const {
    if (!(tol > 0.0)) throw ConfigError("solver: tol must be positive");
    if (max_iter < 1) throw ConfigError("solver: max_iter must be positive");
    if (radial_order < 2 || quad_n < 2) throw ConfigError("solver: grid sizes too small");
    if (!(nu1 > 0.0) || !(nu2 > 0.0)) throw ConfigError("solver: nu must be positive");
    if (varpi < 0.0) throw ConfigError("solver: ball radius must be positive");
    for (const auto& t : spec.I) {
        const auto [d1, d2] = tuple_shifts(spec, t);
        if (N_max < spec.k1 * t.l2 + d1 || N_max < spec.k2 * t.l4 + d2)
            throw ConfigError("solver: N_max below the exponent shift of a tuple");
    }
}

namespace {

std::pair<double, double> radii(const SolverContext& ctx, const SolverConfig& cfg) {
    if (cfg.rho1 > 0.0 && cfg.rho2 > 0.0) return {cfg.rho1, cfg.rho2};
    return default_radii(ctx.spec);
}

Directions directions_or_default(const SolverContext& ctx) {
    try {
        return choose_directions(ctx.spec, ctx.derived);
    } catch (const GeometryError&) {
        return {};
    }
}

}  // namespace

SpaceParams solver_space(const SolverContext& ctx, const SolverConfig& cfg, Domain domain) {
    const auto& s = ctx.spec;
    const auto [r1, r2] = radii(ctx, cfg);
    SpaceParams sp;
    sp.domain = domain;
    sp.k1 = s.k1;
    sp.k2 = s.k2;
    sp.delta1 = s.delta1;
    sp.delta2 = s.delta2;
    sp.beta = s.beta;
    sp.mu = s.mu;
    sp.rho1 = r1;
    sp.rho2 = r2;
    sp.nu1 = cfg.nu1;
    sp.nu2 = cfg.nu2;
    return sp;
}

PolarGridPtr solver_grid(const SolverContext& ctx, const SolverConfig& cfg, Domain domain) {
    const auto [r1, r2] = radii(ctx, cfg);
    auto angles = cfg.angles;
    if (angles.empty()) {
        const auto d = domain == Domain::Disc ? directions_or_default(ctx) : choose_directions(ctx.spec, ctx.derived);
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                angles.push_back({d.d1 + 0.5 * a * d.S1.half_opening, d.d2 + 0.5 * b * d.S2.half_opening});
    }
    double R1 = r1, R2 = r2;
    std::vector<double> x1{0.5 * r1}, x2{0.5 * r2};
    if (domain == Domain::Sector) {
        R1 = cfg.sector_R1 > 0.0 ? cfg.sector_R1 : 2.0 * r1;
        R2 = cfg.sector_R2 > 0.0 ? cfg.sector_R2 : 2.0 * r2;
        x1.push_back(r1);
        x2.push_back(r2);
    }
    return std::make_shared<PolarGrid>(
        angles, quad::PanelGrid(radial_breaks(R1, cfg.max_panel, cfg.first_panel, x1), cfg.radial_order),
        quad::PanelGrid(radial_breaks(R2, cfg.max_panel, cfg.first_panel, x2), cfg.radial_order));
}

// ---- solutions ----------------------------------------------------------------------------

const MSpace& BorelSolution::ms() const { return series ? series->ms() : grid->ms(); }

void BorelSolution::eval(cplx t1, cplx t2, cplx* out) const {
    if (series) {
        if (std::abs(t1) > space.rho1 * (1 + 1e-12) || std::abs(t2) > space.rho2 * (1 + 1e-12))
            throw UsageError("BorelSolution::eval: point outside the polydisc");
        series->eval(t1, t2, out);
        return;
    }
    const auto& g = grid->grid();
    const double r1 = std::abs(t1), r2 = std::abs(t2);
    if (r1 > g.r1().hi() * (1 + 1e-12) || r2 > g.r2().hi() * (1 + 1e-12))
        throw UsageError("BorelSolution::eval: radius beyond the grid");
    if (r1 == 0.0 || r2 == 0.0) {
        std::fill(out, out + grid->dim(), cplx(0.0));
        return;
    }
    for (std::size_t a = 0; a < g.n_angles(); ++a) {
        const auto [th1, th2] = g.angles()[a];
        if (std::abs(wrap_angle(std::arg(t1) - th1)) < 1e-9 && std::abs(wrap_angle(std::arg(t2) - th2)) < 1e-9) {
            grid->eval(a, r1, r2, out);
            return;
        }
    }
    throw UsageError("BorelSolution::eval: point not on a grid angle pair");
}

// ---- Picard iteration ----------------------------------------------------------------------

namespace {

struct Loop {
    std::vector<double> trace, ratios;
    int iterations = 0;
    bool converged = false;
    double ratio = 0.0;
};

// w_{n+1} = H(w_n); stops when |w_{n+1} - w_n| <= tol |w_{n+1}|.
template <class State, class HFn, class NormFn>
Loop iterate(State& w, const State* first, HFn H, NormFn norm, const SolverConfig& cfg) {
    Loop L;
    int above = 0;
    double prev = -1.0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        State nw = (it == 1 && first) ? *first : H(w);
        State d = nw;
        d -= w;
        const double inc = norm(d), nrm = norm(nw);
        L.trace.push_back(inc);
        L.iterations = it;
        if (!std::isfinite(inc) || !std::isfinite(nrm))
            throw NonContractionError("Picard iteration diverged to non-finite values at iteration " +
                                      std::to_string(it));
        const double floor = 1e-13 * nrm;
        if (prev > floor && inc > floor) {
            const double r = inc / prev;
            L.ratios.push_back(r);
            L.ratio = std::max(L.ratio, r);
            above = r >= 1.0 ? above + 1 : 0;
            if (above >= 3) {
                std::ostringstream os;
                os << "Picard iteration does not contract: ratio " << r << " for 3 consecutive iterations";
                throw NonContractionError(os.str());
            }
        }
        prev = inc;
        w = std::move(nw);
        if (inc <= cfg.tol * nrm) {
            L.converged = true;
            break;
        }
    }
    return L;
}

}  // namespace

BorelSolution picard_solve(const SolverContext& ctx, cplx eps, const SolverConfig& cfg, Domain domain) {
    ctx.require_valid();
    cfg.check(ctx.spec);
    check_eps(ctx.spec, eps);
    BorelSolution sol;
    sol.domain = domain;
    sol.rep = cfg.rep;
    sol.eps = eps;
    sol.psi_scale = cfg.psi_scale;
    sol.space = solver_space(ctx, cfg, domain);
    const auto& sp = sol.space;
    if (domain != Domain::Sector) {
        const auto b = pm_bounds_disc(ctx.spec, sp.rho1, sp.rho2);
        if (!b.admissible)
            throw PreconditionError("picard_solve: radii violate the disc lower bound (product " +
                                    std::to_string(b.product) + " > " + std::to_string(b.max_product) + ")");
    }
    sol.directions = domain == Domain::Disc ? directions_or_default(ctx) : choose_directions(ctx.spec, ctx.derived);

    Loop L;
    if (cfg.rep == Representation::Series) {
        if (domain != Domain::Disc) throw UsageError("picard_solve: the series representation lives on discs only");
        auto norm = [&](const SeriesFn& f) { return f.disc_norm(sp.rho1, sp.rho2); };
        auto H = [&](const SeriesFn& f) { return apply_H(ctx, f, eps, cfg.psi_scale); };
        SeriesFn zero(ctx.ms, cfg.N_max);
        const SeriesFn first = H(zero);
        SeriesFn psi(ctx.ms, cfg.N_max);
        add_forcing_series(ctx, psi, eps, cfg.psi_scale);
        sol.psi_norm = norm(psi);
        sol.varpi = cfg.varpi > 0.0 ? cfg.varpi : 2.0 * norm(first);
        SeriesFn w = cfg.start_from_forcing ? first : zero;
        L = iterate(w, cfg.start_from_forcing ? nullptr : &first, H, norm, cfg);
        sol.norm = norm(w);
        sol.truncation_indicator = w.last_diagonal_norm(sp.rho1, sp.rho2);
        sol.series = std::move(w);
    } else {
        auto grid = solver_grid(ctx, cfg, domain);
        BorelGridFn zero(sp, grid, ctx.ms);
        auto H = [&](const BorelGridFn& f) { return apply_H(ctx, f, eps, cfg.quad_n, cfg.psi_scale); };
        auto norm = [](const BorelGridFn& f) { return weighted_norm(f); };
        const BorelGridFn first = H(zero);
        BorelGridFn psi = BorelGridFn::from_function(sp, grid, ctx.ms, [&](cplx t1, cplx t2, cplx* out) {
            // Psi = phi0(m) times its value at m = 0
            CVec p = ctx.ms->profile(cfg.psi_scale * eval_profiles(ctx.spec, 0.0, eps, t1, t2).Psi);
            std::copy(p.begin(), p.end(), out);
        });
        sol.psi_norm = norm(psi);
        sol.varpi = cfg.varpi > 0.0 ? cfg.varpi : 2.0 * norm(first);
        BorelGridFn w = cfg.start_from_forcing ? first : zero;
        L = iterate(w, cfg.start_from_forcing ? nullptr : &first, H, norm, cfg);
        sol.norm = norm(w);
        sol.truncation_indicator = std::numeric_limits<double>::quiet_NaN();
        sol.grid = std::move(w);
    }
    sol.trace = std::move(L.trace);
    sol.ratios = std::move(L.ratios);
    sol.iterations = L.iterations;
    sol.converged = L.converged;
    sol.contraction_ratio = L.ratio;
    sol.contraction_ok = L.ratio <= 0.5;
    sol.within_ball = sol.norm <= sol.varpi;
    if (cfg.residual_samples > 0 && ctx.ms->kind() == "power")
        sol.residual = oracle_residual(ctx, sol, residual_points(sol, cfg.residual_samples));
    return sol;
}

// ---- oracle residual -----------------------------------------------------------------------

std::vector<std::pair<cplx, cplx>> residual_points(const BorelSolution& sol, int n) {
    std::vector<std::pair<double, double>> angles;
    double R1, R2;
    if (sol.series) {
        angles = {{sol.directions.d1, sol.directions.d2}, {0.0, 0.0}, {0.7, -0.4}, {2.1, 1.3}};
        R1 = sol.space.rho1;
        R2 = sol.space.rho2;
    } else {
        angles = sol.grid->grid().angles();
        R1 = sol.grid->grid().r1().hi();
        R2 = sol.grid->grid().r2().hi();
    }
    static const double f1[] = {0.83, 0.47, 0.91, 0.29, 0.66}, f2[] = {0.77, 0.88, 0.41, 0.63, 0.95};
    std::vector<std::pair<cplx, cplx>> pts;
    for (int i = 0; i < n; ++i) {
        const auto [a1, a2] = angles[i % angles.size()];
        pts.push_back({std::polar(f1[i % 5] * R1, a1), std::polar(f2[i % 5] * R2, a2)});
    }
    return pts;
}

double oracle_residual(const SolverContext& ctx, const BorelSolution& sol,
                       const std::vector<std::pair<cplx, cplx>>& points, double rel_tol) {
    const auto& s = ctx.spec;
    if (ctx.ms->kind() != "power" || !s.has_constant_symbols())
        throw UsageError("oracle_residual: needs the power-basis carrier");
    const std::size_t J = ctx.ms->dim(), J2 = 2 * J;
    const PowerM& ms2 = ctx.doubled_power_basis();
    const cplx eps = sol.eps;
    const cplx p1 = s.P1.at(eps).coeffs()[0], p2 = s.P2.at(eps).coeffs()[0];
    const PmEvaluator pe(s, ctx.mgrid);
    const double k1 = s.k1, k2 = s.k2;

    std::vector<double> res(points.size(), 0.0);
    parallel_for(points.size(), [&](std::size_t pi) {
        const auto [t1, t2] = points[pi];
        CVec w0(J2, 0.0);
        sol.eval(t1, t2, w0.data());
        // left side P_m omega (constant symbols: a scalar)
        const cplx P = 1.0 / pe.inverse_symbol(t1, t2).constant.value();
        CVec lhs(J2), rhs(J2, 0.0);
        for (std::size_t j = 0; j < J2; ++j) lhs[j] = P * w0[j];

        auto nested = [&](const std::function<void(double, double, double, double, cplx*)>& f) {
            return oracles::tanh_sinh_vec(
                       [&](double x1, double x1c, cplx* out) {
                           const double om1 = x1c < 0.0 ? -x1c : 1.0 - x1;
                           auto in = oracles::tanh_sinh_vec(
                               [&](double x2, double x2c, cplx* o) {
                                   const double om2 = x2c < 0.0 ? -x2c : 1.0 - x2;
                                   f(x1, om1, x2, om2, o);
                               },
                               J2, 0.0, 1.0, 0.1 * rel_tol);
                           std::copy(in.value.begin(), in.value.end(), out);
                       },
                       J2, 0.0, 1.0, rel_tol)
                .value;
        };

        // bilinear term, s = tau^k x in each variable
        CVec a(J2), b(J2);
        auto nl = nested([&](double x1, double om1, double x2, double om2, cplx* o) {
            std::fill(a.begin(), a.end(), cplx(0.0));
            std::fill(b.begin(), b.end(), cplx(0.0));
            sol.eval(t1 * std::pow(om1, 1.0 / k1), t2 * std::pow(om2, 1.0 / k2), a.data());
            sol.eval(t1 * std::pow(x1, 1.0 / k1), t2 * std::pow(x2, 1.0 / k2), b.data());
            std::fill(o, o + J2, cplx(0.0));
            ms2.conv_acc(o, a.data(), b.data(), p1 * p2 / (x1 * om1 * x2 * om2));
        });
        for (std::size_t j = 0; j < J2; ++j) rhs[j] += nl[j];

        // linear kernels
        for (std::size_t ti = 0; ti < s.I.size(); ++ti) {
            const auto& t = s.I[ti];
            const auto [d1, d2] = tuple_shifts(s, t);
            const auto v1 = kernel_terms(d1, t.l2, s.k1), v2 = kernel_terms(d2, t.l4, s.k2);
            const cplx T1 = std::pow(t1, s.k1), T2 = std::pow(t2, s.k2);
            auto lin = nested([&](double x1, double om1, double x2, double om2, cplx* o) {
                std::fill(a.begin(), a.end(), cplx(0.0));
                sol.eval(t1 * std::pow(x1, 1.0 / k1), t2 * std::pow(x2, 1.0 / k2), a.data());
                cplx f1 = 0.0, f2 = 0.0;
                for (const auto& u : v1) {
                    const double Dk = u.D / k1;
                    f1 += u.coef * std::pow(k1, u.p) * std::pow(T1, Dk + u.p) / gamma_fn(Dk) * std::pow(om1, Dk - 1.0) *
                          std::pow(x1, u.p - 1.0);
                }
                for (const auto& u : v2) {
                    const double Dk = u.D / k2;
                    f2 += u.coef * std::pow(k2, u.p) * std::pow(T2, Dk + u.p) / gamma_fn(Dk) * std::pow(om2, Dk - 1.0) *
                          std::pow(x2, u.p - 1.0);
                }
                for (std::size_t j = 0; j < J2; ++j) o[j] = f1 * f2 * a[j];
            });
            const cplx r = s.R_l[ti].coeffs()[0];
            ms2.conv_profile_acc(rhs.data(), lin.data(), std::pow(eps, eps_power(t)) * t.amplitude(eps) * r);
        }

        cplx psi = 0.0;
        for (const auto& [key, amp] : s.forcing)
            psi += sol.psi_scale * amp(eps) * std::pow(t1, key.first) * std::pow(t2, key.second) /
                   (gamma_fn(key.first / k1) * gamma_fn(key.second / k2));
        rhs[0] += psi;

        CVec d(J2);
        for (std::size_t j = 0; j < J2; ++j) d[j] = lhs[j] - rhs[j];
        res[pi] = ms2.norm(d.data()) / ms2.norm(lhs.data());
    });
    return *std::max_element(res.begin(), res.end());
}

// ---- continuation --------------------------------------------------------------------------

std::vector<std::pair<cplx, cplx>> overlap_samples(const std::vector<std::pair<double, double>>& angles, double rho1,
                                                   double rho2, int per_axis) {
    std::vector<std::pair<cplx, cplx>> pts;
    for (const auto& [a1, a2] : angles)
        for (int i = 1; i <= per_axis; ++i)
            for (int j = 1; j <= per_axis; ++j)
                pts.push_back({std::polar(0.95 * rho1 * i / per_axis, a1), std::polar(0.95 * rho2 * j / per_axis, a2)});
    return pts;
}

ContinuationReport continuation_check(const BorelSolution& disc, const BorelSolution& sector,
                                      const BorelSolution& inter, const std::vector<std::pair<cplx, cplx>>& samples) {
    if (samples.empty()) throw UsageError("continuation_check: empty overlap");
    const auto& ms = disc.ms();
    if (&ms != &sector.ms() || &ms != &inter.ms()) throw UsageError("continuation_check: carriers differ");
    const auto& S1 = sector.directions.S1;
    const auto& S2 = sector.directions.S2;
    ContinuationReport r;
    CVec a(ms.dim()), b(ms.dim()), c(ms.dim()), d(ms.dim());
    auto rel = [&](const CVec& x, const CVec& y) {
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = x[j] - y[j];
        const double den = std::max(ms.norm(x.data()), ms.norm(y.data()));
        return den > 0.0 ? ms.norm(d.data()) / den : 0.0;
    };
    for (const auto& [t1, t2] : samples) {
        if (!S1.contains(t1) || !S2.contains(t2) || std::abs(t1) >= disc.space.rho1 || std::abs(t2) >= disc.space.rho2)
            throw UsageError("continuation_check: sample outside the overlap");
        disc.eval(t1, t2, a.data());
        sector.eval(t1, t2, b.data());
        inter.eval(t1, t2, c.data());
        r.disc_sector = std::max(r.disc_sector, rel(a, b));
        r.disc_intersection = std::max(r.disc_intersection, rel(a, c));
        r.sector_intersection = std::max(r.sector_intersection, rel(b, c));
        ++r.samples;
    }
    r.max_rel = std::max({r.disc_sector, r.disc_intersection, r.sector_intersection});
    return r;
}

}  // namespace borel_lab
