#include <doctest.h>

#include <cmath>

#include "borel_lab/borel_solver.hpp"
#include "borel_lab/oracles.hpp"
#include "borel_lab/special_functions.hpp"

using namespace borel_lab;

namespace {

const SolverContext& scenario_a() {
    static const auto ctx = SolverContext::make(builtin_spec("scenario-a"));
    return *ctx;
}

ProblemSpec remark_with_unit_R() {
    auto s = builtin_spec("paper-remark");
    s.R = ComplexPoly(CVec{1.0});
    return s;
}

double rel_diff(const MSpace& ms, const CVec& a, const CVec& b) {
    CVec d(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) d[j] = a[j] - b[j];
    return ms.norm(d.data()) / std::max(ms.norm(a.data()), ms.norm(b.data()));
}

SolverConfig colloc(std::vector<std::pair<double, double>> angles) {
    SolverConfig c;
    c.rep = Representation::Collocation;
    c.angles = std::move(angles);
    return c;
}

}  // namespace

TEST_CASE("lower bound for P_m on discs") {
    auto s = remark_with_unit_R();
    auto b = pm_bounds_disc(s, 0.6, 0.6);
    CHECK(b.product == doctest::Approx(72.0 * std::pow(0.36, 6)).epsilon(1e-12));
    CHECK(b.product == doctest::Approx(0.157).epsilon(2e-3));
    CHECK(b.admissible);
    CHECK(b.C1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.grid_inf >= b.C1 - 1e-9);
    CHECK_FALSE(pm_bounds_disc(s, 0.9, 0.9).admissible);

    // at the origin only Q remains
    const auto mg = FourierGrid::make(1.0, 4.0);
    PmEvaluator pe(s, mg);
    for (double m : {0.0, 0.7, -3.0}) CHECK(std::abs(pe(0.0, 0.0, m) - s.Q.at_im(m)) < 1e-15);
    CHECK(std::abs(pe.X(0.5, cplx(0.2, 0.1)) - std::pow(3.0 * std::pow(0.5, 3), 2) *
                                                   std::pow(2.0 * std::pow(cplx(0.2, 0.1), 2), 3)) < 1e-15);

    for (const char* name : {"scenario-a", "paper-remark"}) {
        auto sp = builtin_spec(name);
        auto [r1, r2] = default_radii(sp);
        auto bb = pm_bounds_disc(sp, r1, r2);
        INFO(name);
        CHECK(bb.admissible);
        CHECK(bb.C1 == doctest::Approx(0.5 * derived_quantities(sp).r_QR));
        CHECK(bb.grid_inf >= bb.C1 - 1e-9);
    }
}

TEST_CASE("direction choice") {
    auto s = remark_with_unit_R();
    auto dq = derived_quantities(s);
    auto d = choose_directions(s, dq);
    CHECK(std::abs(std::abs(d.d12) - kPi) < 1e-12);
    CHECK(std::abs(wrap_angle(s.delta1 * s.k1 * d.d1 + s.delta2 * s.k2 * d.d2 - kPi)) < 1e-12);
    CHECK(d.C2 > 0.0);
    CHECK(d.S1.half_opening < kPi);
    CHECK_THROWS_AS(directions_for(s, dq, 0.0), GeometryError);

    const auto& a = scenario_a();
    auto da = choose_directions(a.spec, a.derived);
    CHECK(da.C2 > 0.0);
    CHECK(da.d1 == doctest::Approx(kPi / 4));
    CHECK(da.d2 == doctest::Approx(kPi / 4));
    // C2 certifies |P_m| >= C2 |R| (1 + |X|) on the sectors
    PmEvaluator pe(a.spec, a.mgrid);
    for (double r1 : {0.1, 1.0, 3.0})
        for (double r2 : {0.2, 2.0})
            for (double f : {-1.0, 0.0, 1.0}) {
                cplx t1 = std::polar(r1, da.d1 + f * da.S1.half_opening), t2 = std::polar(r2, da.d2 - f * da.S2.half_opening);
                CHECK(std::abs(pe(t1, t2, 0.3)) >= da.C2 * std::abs(a.spec.R.at_im(0.3)) * (1.0 + std::abs(pe.X(t1, t2))) * (1 - 1e-12));
            }

    // Q(im)/R(im) = (1+im)^3 winds around the origin: no admissible direction
    auto w = s;
    w.Q = ComplexPoly(CVec{1.0, 3.0, 3.0, 1.0});
    auto dw = derived_quantities(w);
    CHECK_THROWS_AS(choose_directions(w, dw), GeometryError);
}

TEST_CASE("H at zero is the forcing divided by P_m") {
    const auto& c = scenario_a();
    SeriesFn z(c.ms, 16);
    auto h = apply_H(c, z, 0.3);
    const double psi = 1.0 / std::sqrt(kPi);  // F11 / (Gamma(1/2) Gamma(1))
    // 1/P_m = (1/4) sum (2 tau1^2 tau2^2 / 4)^l
    for (int l = 0; l < 8; ++l) {
        INFO("l=" << l);
        const auto& v = h.coeffs().at({1 + 2 * l, 1 + 2 * l});
        CHECK(std::abs(v[0] - psi / 4.0 * std::pow(0.5, l)) < 1e-15);
        for (std::size_t j = 1; j < v.size(); ++j) CHECK(v[j] == cplx(0.0));
    }
    CHECK(h.coeffs().size() == 8);
    // no tuples: the linear kernels vanish identically
    CHECK(linear_terms(c, h, 0.3).coeffs().empty());

    auto cfg = colloc({{0.2, -0.3}});
    auto sp = solver_space(c, cfg, Domain::Disc);
    BorelGridFn g0(sp, solver_grid(c, cfg, Domain::Disc), c.ms);
    auto hg = apply_H(c, g0, 0.3, 8);
    for (std::size_t i1 = 0; i1 < hg.grid().n1(); i1 += 7)
        for (std::size_t i2 = 0; i2 < hg.grid().n2(); i2 += 5) {
            cplx t1 = hg.tau1(0, i1), t2 = hg.tau2(0, i2);
            cplx expect = psi * t1 * t2 / (4.0 - 2.0 * t1 * t1 * t2 * t2);
            CHECK(std::abs(hg.at(0, i1, i2)[0] - expect) < 1e-15);
        }
}

TEST_CASE("linear kernels shift exponents and match their integrals") {
    auto ctx = SolverContext::make(builtin_spec("scenario-b"));
    const auto& s = ctx->spec;
    const auto& t = s.I[0];
    auto [d1, d2] = tuple_shifts(s, t);
    CHECK(s.k1 * t.l2 + d1 == 5);
    CHECK(s.k2 * t.l4 + d2 == 5);

    const cplx eps(0.3, 0.1);
    // T^{l(k+1)} d^l/dT^l annihilates T^n for n < l: tau^1 in the first variable is mapped to 0
    {
        SeriesFn w(ctx->ms, 16);
        w.coeff({1, 3}) = ctx->ms->profile(1.0);
        auto out = linear_terms(*ctx, w, eps);
        REQUIRE(out.coeffs().size() == 1);
        CHECK(ctx->ms->norm(out.coeffs().begin()->second.data()) < 1e-14);
    }
    for (auto n : {std::pair{2, 3}, std::pair{3, 5}}) {
        SeriesFn w(ctx->ms, 16);
        w.coeff(n) = ctx->ms->profile(1.0);
        auto out = linear_terms(*ctx, w, eps);
        REQUIRE(out.coeffs().size() == 1);
        CHECK(out.coeffs().begin()->first == std::pair{n.first + 5, n.second + 5});

        // reference: each variable's kernel sum applied to tau^n by direct quadrature of the
        // s-integral at tau = 0.7, coefficient of tau^{n+5}
        auto kernel = [&](int n0, int k, int d, int l) {
            const double tau = 0.7, T = std::pow(tau, k);
            auto term = [&](int D, int p, double coef) {
                auto r = oracles::tanh_sinh(
                    [&](double sv, double sc) {
                        double rem = sc > 0 ? sc : T - sv;  // boost: xc = b - x on the upper half
                        if (!(rem > 0.0)) return cplx(0.0);
                        return cplx(std::pow(rem, double(D) / k - 1.0) * std::pow(k, p) * std::pow(sv, p + double(n0) / k - 1.0));
                    },
                    0.0, T, 1e-14);
                return coef * T / gamma_fn(double(D) / k) * r.value.real();
            };
            double sum = term(d, l, 1.0);
            if (l > 1) {
                auto A = mono_op_coeffs(l, k);
                for (int h = 1; h < l; ++h) sum += term(d + k * (l - h), h, A.coeffs[h - 1]);
            }
            return sum / std::pow(tau, n0 + d + k * l);
        };
        const double f = kernel(n.first, s.k1, d1, t.l2) * kernel(n.second, s.k2, d2, t.l4);
        // expected coefficient: eps^e c(eps) R_l * f * (phi0 conv phi0)/sqrt(2pi)
        CVec expect(ctx->ms->dim(), 0.0);
        CVec rp = ctx->ms->profile(0.5);
        const int e = t.Delta - t.l1 + t.l2 - t.l3 + t.l4;
        ctx->ms->conv_profile_acc(expect.data(), rp.data(), std::pow(eps, e) * t.amplitude(eps) * f);
        CHECK(rel_diff(*ctx->ms, out.coeffs().begin()->second, expect) < 1e-10);
    }
}

TEST_CASE("zero forcing gives the zero fixed point after one step") {
    auto s = builtin_spec("scenario-a");
    s.forcing.begin()->second.amplitude = ComplexPoly(CVec{0.0});
    auto ctx = SolverContext::make(s, 4);
    SolverConfig cfg;
    cfg.residual_samples = 0;
    auto sol = picard_solve(*ctx, 0.2, cfg, Domain::Disc);
    CHECK(sol.iterations == 1);
    CHECK(sol.norm == 0.0);
    CHECK(sol.converged);
    auto cc = colloc({{0.5, 0.5}});
    cc.residual_samples = 0;
    auto sg = picard_solve(*ctx, 0.2, cc, Domain::Sector);
    CHECK(sg.iterations == 1);
    CHECK(sg.norm == 0.0);
}

TEST_CASE("Scenario A: contraction, residual, uniqueness") {
    const auto& c = scenario_a();
    SolverConfig cfg;
    for (cplx eps : {cplx(0.5), cplx(-0.2, 0.35)}) {
        auto sol = picard_solve(c, eps, cfg, Domain::Disc);
        INFO("eps=" << eps);
        CHECK(sol.converged);
        CHECK(sol.contraction_ok);
        CHECK(sol.iterations <= 10);
        CHECK(sol.residual <= 10 * cfg.tol);
        CHECK(sol.within_ball);
        CHECK(sol.truncation_indicator < 1e-10);
        // geometric decrease of the increments
        for (std::size_t i = 2; i < sol.trace.size(); ++i)
            if (sol.trace[i - 1] > 1e-13 * sol.norm) CHECK(sol.trace[i] <= (sol.contraction_ratio + 0.05) * sol.trace[i - 1]);

        auto c2 = cfg;
        c2.start_from_forcing = true;
        c2.residual_samples = 0;
        auto other = picard_solve(c, eps, c2, Domain::Disc);
        SeriesFn d = *other.series;
        d -= *sol.series;
        CHECK(d.disc_norm(sol.space.rho1, sol.space.rho2) <= 10 * cfg.tol * sol.norm);
    }
    CHECK_THROWS_AS(picard_solve(c, 0.6, cfg, Domain::Disc), DomainError);
    CHECK_THROWS_AS(picard_solve(c, 0.1, cfg, Domain::Sector), UsageError);
}

TEST_CASE("series and collocation agree on the disc") {
    const auto& c = scenario_a();
    SolverConfig sc;
    sc.residual_samples = 0;
    auto ser = picard_solve(c, 0.4, sc, Domain::Disc);
    auto cc = colloc({{0.3, 1.1}, {-2.0, 0.4}});
    auto col = picard_solve(c, 0.4, cc, Domain::Disc);
    CHECK(col.residual < 1e-8);
    double worst = 0.0;
    CVec a(c.ms->dim()), b(c.ms->dim());
    for (const auto& [t1, t2] : overlap_samples(cc.angles, ser.space.rho1, ser.space.rho2, 4)) {
        ser.eval(t1, t2, a.data());
        col.eval(t1, t2, b.data());
        worst = std::max(worst, rel_diff(*c.ms, a, b));
    }
    CHECK(worst <= 1e-6);
    // the collocation norm sees only its angle pairs
    CHECK(col.norm <= ser.norm * (1 + 1e-6));
}

TEST_CASE("continuation between disc, sector and intersection solutions") {
    const auto& c = scenario_a();
    const auto d = choose_directions(c.spec, c.derived);
    std::vector<std::pair<double, double>> ang{{d.d1, d.d2}, {d.d1 + 0.5 * d.S1.half_opening, d.d2 - 0.5 * d.S2.half_opening}};
    SolverConfig sc;
    sc.residual_samples = 0;
    auto disc = picard_solve(c, 0.3, sc, Domain::Disc);
    auto cc = colloc(ang);
    cc.residual_samples = 0;
    auto sec = picard_solve(c, 0.3, cc, Domain::Sector);
    auto inter = picard_solve(c, 0.3, cc, Domain::Intersection);
    CHECK(sec.contraction_ok);
    auto samples = overlap_samples(ang, disc.space.rho1, disc.space.rho2, 5);
    CHECK(samples.size() >= 50);
    auto rep = continuation_check(disc, sec, inter, samples);
    CHECK(rep.samples == samples.size());
    CHECK(rep.max_rel <= 1e-6);
    CHECK(continuation_check(disc, disc, disc, samples).max_rel == 0.0);
    CHECK_THROWS_AS(continuation_check(disc, sec, inter, {}), UsageError);

    auto pc = cc;
    pc.psi_scale = 1.0 + 1e-3;
    auto perturbed = picard_solve(c, 0.3, pc, Domain::Sector);
    CHECK(continuation_check(disc, perturbed, inter, samples).disc_sector > 1e-4);
}

TEST_CASE("non-contraction is reported as an error") {
    auto s = builtin_spec("scenario-a");
    s.forcing.begin()->second.amplitude = ComplexPoly(CVec{400.0});
    s.forcing.begin()->second.sup_bound = 400.0;
    auto ctx = SolverContext::make(s, 6);
    SolverConfig cfg;
    cfg.residual_samples = 0;
    CHECK_THROWS_AS(picard_solve(*ctx, 0.5, cfg, Domain::Disc), NonContractionError);
}
