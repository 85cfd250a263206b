#include <doctest.h>

#include <cmath>

#include "borel_lab/laplace_paths.hpp"
#include "borel_lab/special_functions.hpp"

using namespace borel_lab;

namespace {

const SolverContext& scenario_a() {
    static const auto ctx = SolverContext::make(builtin_spec("scenario-a"));
    return *ctx;
}

LaplaceParams params(const SolverContext& c, double nu1 = 1.0, double nu2 = 1.0) {
    const auto d = choose_directions(c.spec, c.derived);
    return make_laplace_params(c.spec, d, SectorSpec{0.0, 0.3, c.spec.eps0, false}, 0.5, 0.1, 0.5, nu1, nu2);
}

LaplacePoint point(double eps, double r1, double r2, cplx z) {
    return {std::polar(r1, kPi / 4), std::polar(r2, kPi / 4), z, eps};
}

const BorelSolution& sector_solution() {
    static const BorelSolution sol = [] {
        const auto& c = scenario_a();
        const auto d = choose_directions(c.spec, c.derived);
        SolverConfig cfg;
        cfg.rep = Representation::Collocation;
        cfg.angles = {{d.d1, d.d2}};
        cfg.residual_samples = 0;
        cfg.sector_R1 = 2.0;
        cfg.sector_R2 = 4.0;
        return picard_solve(c, 0.3, cfg, Domain::Sector);
    }();
    return sol;
}

const BorelSolution& disc_solution() {
    static const BorelSolution sol = [] {
        SolverConfig cfg;
        cfg.residual_samples = 0;
        return picard_solve(scenario_a(), 0.3, cfg, Domain::Disc);
    }();
    return sol;
}

double rel(const Scaled& a, const Scaled& b) {
    return std::exp((a - b).log_abs() - std::max(a.log_abs(), b.log_abs()));
}

}  // namespace

TEST_CASE("paths: chaining rules") {
    auto b = PathChain::bent(0.2, 0.9, 0.5, 1.0);
    CHECK(b.pieces().size() == 3);
    CHECK(std::abs(b.end() - std::polar(1.0, 0.9)) < 1e-15);
    CHECK(PathChain::ray(0.3).infinite());
    PathChain c;
    c.then(PathSegment{0.0, 0.0, 1.0});
    CHECK_THROWS_AS(c.then(PathSegment{0.0, 2.0, 3.0}), UsageError);
    CHECK_THROWS_AS(c.then(Arc{1.0, 0.0, 7.0}), UsageError);
    CHECK_THROWS_AS(PathChain::ray(0.0).then(PathSegment{0.0, 1.0, 2.0}), UsageError);
    CHECK_THROWS_AS(PathChain::segment(0.0, 1.0, 0.5), UsageError);
}

TEST_CASE("parameters and scaled numbers") {
    const auto& c = scenario_a();
    auto prm = params(c);
    CHECK(prm.Delta1 > 0.0);
    CHECK(prm.Delta2 > 0.0);
    CHECK(prm.contains(point(0.3, 0.4, 0.4, 0.1)));
    CHECK_FALSE(prm.contains(point(0.3, 0.4, 0.4, cplx(0.0, 0.6))));
    auto bad = prm;
    bad.beta_prime = 2.0;
    CHECK_THROWS_AS(bad.check(c.spec), ConfigError);
    bad = prm;
    bad.T1.radius = 10.0;
    CHECK_THROWS_AS(bad.check(c.spec), ConfigError);
    const auto d = choose_directions(c.spec, c.derived);
    CHECK_THROWS_AS(make_laplace_params(c.spec, d, SectorSpec{0.0, 0.8, 0.5, false}, 0.5, 0.5, 0.5), GeometryError);

    Scaled a{2.0, 800.0}, b{1.0, 800.0 + std::log(2.0)};
    CHECK((a - b).log_abs() < 800.0 - 25.0);
    CHECK((a + b).log_abs() == doctest::Approx(800.0 + std::log(4.0)));
    CHECK(Scaled{}.log_abs() == -kInf);
}

TEST_CASE("monomials reproduce the Gamma closed form") {
    const auto& c = scenario_a();
    const auto prm = params(c);
    const auto& s = c.spec;
    for (auto n : {std::pair{1, 1}, std::pair{2, 3}, std::pair{5, 2}})
        for (cplx z : {cplx(0.0), cplx(1.3, 0.2)}) {
            SeriesFn w(c.ms, 8);
            w.coeff(n) = c.ms->profile(1.0);
            const auto p = point(0.3, 0.4, 0.3, z);
            auto r = laplace_over_paths(s, w, PathChain::ray(kPi / 4), PathChain::ray(kPi / 4), p, prm);
            const cplx T1 = p.eps * p.t1, T2 = p.eps * p.t2;
            const cplx expect = gamma_fn(double(n.first) / s.k1) * gamma_fn(double(n.second) / s.k2) *
                                std::pow(T1, n.first) * std::pow(T2, n.second) * c.ms->inverse_fourier(w.coeff(n).data(), z);
            INFO(n.first << "," << n.second << " z=" << z);
            CHECK(std::abs(r.value.value() - expect) <= 1e-10 * std::abs(expect));
            CHECK(r.R_eff1 > 0.0);
            CHECK(r.log_tail < r.value.log_abs() + std::log(1e-10));
        }
}

TEST_CASE("linearity, zero source, additivity of segments") {
    const auto& c = scenario_a();
    const auto prm = params(c);
    const auto& s = c.spec;
    SeriesFn a(c.ms, 6), b(c.ms, 6);
    a.coeff({1, 2}) = c.ms->profile(cplx(0.5, 1.0));
    a.coeff({3, 1}) = c.ms->profile(2.0);
    b.coeff({2, 2}) = c.ms->profile(-1.5);
    const auto p = point(0.25, 0.45, 0.35, 0.4);
    auto L = [&](const SeriesFn& w, const PathChain& c1, const PathChain& c2) {
        return laplace_over_paths(s, w, c1, c2, p, prm).value;
    };
    const auto r1 = PathChain::ray(kPi / 4), r2 = PathChain::ray(kPi / 4);
    SeriesFn ab = a;
    ab += b;
    CHECK(rel(L(ab, r1, r2), L(a, r1, r2) + L(b, r1, r2)) < 1e-12);
    CHECK(L(SeriesFn(c.ms, 6), r1, r2).value() == cplx(0.0));

    // [0, 1] = [0, 0.4] + [0.4, 1] in the first variable
    const auto whole = L(a, PathChain::segment(kPi / 4, 0.0, 1.0), r2);
    const auto parts = L(a, PathChain::segment(kPi / 4, 0.0, 0.4), r2) + L(a, PathChain::segment(kPi / 4, 0.4, 1.0), r2);
    CHECK(rel(whole, parts) < 1e-10);
    // ray = [0, 0.7] + [0.7, inf)
    const auto ray = L(a, r1, r2);
    const auto split = L(a, PathChain::segment(kPi / 4, 0.0, 0.7), r2) + L(a, PathChain::ray(kPi / 4, 0.7), r2);
    CHECK(rel(ray, split) < 1e-10);

    // t1 = 0 gives 0
    auto p0 = p;
    p0.t1 = 0.0;
    CHECK(laplace_over_paths(s, a, r1, r2, p0, prm).value.value() == cplx(0.0));
}

TEST_CASE("cutting rays further out changes nothing above the tail bound") {
    const auto& c = scenario_a();
    auto prm = params(c);
    SeriesFn a(c.ms, 6);
    a.coeff({2, 1}) = c.ms->profile(1.0);
    const auto p = point(0.4, 0.5, 0.5, 0.0);
    const auto r = PathChain::ray(kPi / 4);
    auto base = laplace_over_paths(c.spec, a, r, r, p, prm);
    prm.R_max = 1.5 * std::max(base.R_eff1, base.R_eff2);
    auto wider = laplace_over_paths(c.spec, a, r, r, p, prm);
    CHECK((wider.value - base.value).log_abs() <= std::max(base.log_tail, std::log(1e-13) + base.value.log_abs()));
    // a short cap leaves a visible tail bound that still covers the change
    prm.R_max = 0.6 * base.R_eff1;
    auto cut = laplace_over_paths(c.spec, a, r, r, p, prm);
    CHECK(cut.log_tail > base.log_tail);
    CHECK((cut.value - base.value).log_abs() <= cut.log_tail);
}

TEST_CASE("non-decaying rays and misuse are rejected") {
    const auto& c = scenario_a();
    const auto prm = params(c);
    SeriesFn a(c.ms, 4);
    a.coeff({1, 1}) = c.ms->profile(1.0);
    const auto p = point(0.3, 0.4, 0.4, 0.0);
    CHECK_THROWS_AS(laplace_over_paths(c.spec, a, PathChain::ray(kPi / 4 + kPi / 2), PathChain::ray(kPi / 4), p, prm),
                    DomainError);
    CHECK_THROWS_AS(laplace_over_paths(c.spec, a, PathChain::ray(kPi / 4), PathChain::ray(kPi / 4 + kPi), p, prm),
                    DomainError);
    auto pz = p;
    pz.z = cplx(0.0, 0.7);
    CHECK_THROWS_AS(laplace_over_paths(c.spec, a, PathChain::ray(kPi / 4), PathChain::ray(kPi / 4), pz, prm), DomainError);
    const auto& disc = disc_solution();
    CHECK_THROWS_AS(laplace_over_paths(c.spec, disc, PathChain::ray(kPi / 4), PathChain::segment(kPi / 4, 0, 0.1), p, prm),
                    UsageError);
    auto pe = p;
    pe.eps = 0.2;
    CHECK_THROWS_AS(
        laplace_over_paths(c.spec, disc, PathChain::segment(kPi / 4, 0, 0.1), PathChain::segment(kPi / 4, 0, 0.1), pe, prm),
        UsageError);
}

TEST_CASE("forcing: closed form and quadrature agree") {
    const auto& c = scenario_a();
    const auto prm = params(c);
    const auto d = choose_directions(c.spec, c.derived);
    for (auto p : {point(0.3, 0.4, 0.3, 0.0), point(0.45, 0.2, 0.5, cplx(-0.8, 0.3))}) {
        p.eps = std::polar(std::abs(p.eps), 0.2);
        const cplx a = forcing_eval(c, p, ForcingMode::ClosedForm, prm, d.d1, d.d2);
        const cplx b = forcing_eval(c, p, ForcingMode::Quadrature, prm, d.d1, d.d2);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
        CHECK(std::abs(a) > 0.0);
    }
    auto p0 = point(0.3, 0.4, 0.3, 0.0);
    p0.t1 = 0.0;
    CHECK(forcing_eval(c, p0, ForcingMode::ClosedForm, prm, d.d1, d.d2) == cplx(0.0));
    CHECK(forcing_eval(c, p0, ForcingMode::Quadrature, prm, d.d1, d.d2) == cplx(0.0));
    CHECK_THROWS_AS(forcing_series(c, 0.6), DomainError);
}

TEST_CASE("deformation: bent and straight paths give the same integral") {
    const auto& c = scenario_a();
    const auto prm = params(c);
    const auto& disc = disc_solution();
    const double h1 = 0.5 * disc.space.rho1, h2 = 0.5 * disc.space.rho2;
    const auto p = point(0.3, 0.45, 0.4, 0.3);
    for (double th : {kPi / 4 - 0.4, kPi / 4 + 0.3}) {
        auto straight = laplace_over_paths(c.spec, disc, PathChain::segment(kPi / 4, 0, h1),
                                           PathChain::segment(kPi / 4, 0, h2), p, prm);
        auto bent = laplace_over_paths(c.spec, disc, PathChain::bent(th, kPi / 4, 0.5 * h1, h1),
                                       PathChain::bent(-th, kPi / 4, 0.5 * h2, h2), p, prm);
        CHECK(rel(straight.value, bent.value) <= 1e-8);
    }
}

TEST_CASE("splitting of the sector solution") {
    const auto& c = scenario_a();
    const auto& sec = sector_solution();
    const auto prm = params(c, sec.space.nu1, sec.space.nu2);
    for (auto p : {point(0.3, 0.4, 0.45, 0.0), point(0.3, 0.2, 0.3, cplx(0.6, -0.2))}) {
        auto r = solution_and_split(c.spec, sec, p, prm);
        CHECK(r.identity_gap <= 1e-9);
        CHECK(r.u.log_abs() <= r.log_bound);
        CHECK(r.log_tail < r.u.log_abs() + std::log(1e-8));

        // J_{1,0} on the directions is J1 with the disc solution in place of the sector one
        const auto& disc = disc_solution();
        auto j10 = j1p_family(c.spec, disc, sec.directions.d1, sec.directions.d2, prm.E, p, prm);
        CHECK(rel(j10, r.J1) <= 1e-6);
    }
    // |u| vanishes with t2
    double prev = kInf;
    for (double r2 : {0.1, 0.01, 0.001}) {
        auto r = solution_and_split(c.spec, sec, point(0.3, 0.4, r2, 0.0), prm);
        CHECK(r.u.log_abs() < prev);
        prev = r.u.log_abs();
    }
    CHECK(prev < std::log(1e-3));
    CHECK_THROWS_AS(solution_and_split(c.spec, disc_solution(), point(0.3, 0.4, 0.4, 0.0), prm), UsageError);
    auto outside = point(0.3, 0.4, 0.4, 0.0);
    outside.t1 = std::polar(0.4, kPi / 4 + 0.5);
    CHECK_THROWS_AS(solution_and_split(c.spec, sec, outside, prm), DomainError);
    CHECK_THROWS_AS(j1p_family(c.spec, disc_solution(), 0.0, 0.0, SectorSpec{2.0, 0.1, 0.5, false},
                               point(0.3, 0.4, 0.4, 0.0), prm),
                    DomainError);
}
