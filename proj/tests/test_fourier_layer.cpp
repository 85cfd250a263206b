#include <doctest.h>

#include <cmath>

#include "borel_lab/fourier_layer.hpp"
#include "borel_lab/oracles.hpp"

using namespace borel_lab;

namespace {
ProfileFn closed(const FourierGridPtr& g, const char* tag, double (*f)(double)) {
    return ProfileFn(g, tag, [f](double m) { return cplx(f(m)); });
}
double exp_abs(double m) { return std::exp(-std::abs(m)); }
double exp_2abs(double m) { return std::exp(-2.0 * std::abs(m)); }
double gauss_half(double m) { return std::exp(-0.5 * m * m); }
double gauss(double m) { return std::exp(-m * m); }
double sech(double m) { return 1.0 / std::cosh(m); }
}  // namespace

TEST_CASE("Gauss-Jacobi rules integrate polynomials against their weight") {
    for (auto [a, b] : {std::pair{0.0, 0.0}, {0.5, -0.5}, {2.5, 0.0}, {-0.7, 1.3}}) {
        const auto& r = quad::gauss_jacobi(12, a, b);
        for (int p = 0; p <= 20; ++p) {
            // reference by adaptive quadrature of the weighted monomial
            auto ref = oracles::tanh_sinh(
                [&](double x, double xc) {
                    double one_m = xc > 0 ? xc : 1.0 - x, one_p = xc < 0 ? -xc : 1.0 + x;
                    return cplx(std::pow(one_m, a) * std::pow(one_p, b) * std::pow(x, p));
                },
                -1.0, 1.0, 1e-13);
            double s = 0.0;
            for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], p);
            INFO("a=" << a << " b=" << b << " p=" << p);
            CHECK(std::abs(s - ref.value.real()) < 1e-11 * std::max(1.0, std::abs(s)));
        }
    }
}

TEST_CASE("panel interpolation reproduces smooth functions") {
    quad::PanelGrid g({-1.0, 0.0, 0.5, 2.0}, 12);
    CVec v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(3.0 * g.nodes()[i]);
    for (double x : {-0.9, -0.3, 0.0, 0.25, 0.77, 1.99})
        CHECK(std::abs(g.interpolate(v.data(), x) - std::sin(3.0 * x)) < 1e-7);
    auto r = quad::adaptive_vec(
        [](double x, cplx* o) {
            o[0] = std::exp(x);
            o[1] = cplx(0.0, 1.0) / (1.0 + x * x);
        },
        2, 0.0, 1.0, 1e-14, 0.0);
    CHECK(std::abs(r.value[0] - (std::exp(1.0) - 1.0)) < 1e-13);
    CHECK(std::abs(r.value[1] - cplx(0.0, kPi / 4.0)) < 1e-13);
}

TEST_CASE("E-norm of a reference profile") {
    auto g = FourierGrid::make(1.0, 2.0);
    // (1+m)^2 e^{-m} peaks at m = 1 with value 4/e
    CHECK(e_beta_mu_norm(closed(g, "e2", exp_2abs), 1.0, 2.0) == doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-12));
    auto grid_only = ProfileFn(g, closed(g, "e2", exp_2abs).values());
    CHECK(e_beta_mu_norm(grid_only, 1.0, 2.0) == doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-6));
    CHECK(g->M_cut() >= 40.0);
    CHECK(std::exp(-g->M_cut()) * std::pow(1.0 + g->M_cut(), -2.0) <= g->tail_tol());
}

TEST_CASE("inverse Fourier transform of closed forms") {
    auto g = FourierGrid::make(1.5, 1.0, 0.0, 16, 1.0);
    auto e = closed(g, "exp", exp_abs);
    CHECK(std::abs(inverse_fourier(e, 0.0, 1.5) - std::sqrt(2.0 / kPi)) < 1e-10);
    // (1/sqrt(2pi)) * 2/(1+x^2)
    for (double x : {0.3, 1.7, -2.2})
        CHECK(std::abs(inverse_fourier(e, x, 1.5) - std::sqrt(2.0 / kPi) / (1.0 + x * x)) < 1e-10);
    auto gs = closed(g, "gauss", gauss_half);
    for (cplx x : {cplx(0.0), cplx(1.3), cplx(0.4, 0.3)})
        CHECK(std::abs(inverse_fourier(gs, x, 1.5) - std::exp(-0.5 * x * x)) < 1e-12);
    CHECK_THROWS_AS(inverse_fourier(e, cplx(0.0, 1.6), 1.5), DomainError);
    double tail = inverse_fourier_tail(*g, 1.0, cplx(0.0, 0.5), 1.5, 1.0);
    CHECK(tail < 1e-12);
}

TEST_CASE("m-convolution: values, symmetry and the product rule") {
    auto g = FourierGrid::make(1.0, 1.0, 30.0, 16, 1.0);
    auto ga = closed(g, "gauss", gauss);
    auto psi = convolve_m(ga, ga);
    // (1/sqrt(2pi)) int e^{-2 m1^2} dm1 = 1/2 at m = 0; in general e^{-m^2/2}/2
    CHECK(std::abs(psi(0.0) - 0.5) < 1e-12);
    for (std::size_t i = 0; i < g->size(); i += 37)
        CHECK(std::abs(psi.values()[i] - 0.5 * std::exp(-0.5 * std::pow(g->nodes()[i], 2))) < 1e-12);

    auto e = closed(g, "exp", exp_abs);
    auto s = closed(g, "sech", sech);
    auto es = convolve_m(e, s), se = convolve_m(s, e);
    double diff = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) diff = std::max(diff, std::abs(es.values()[i] - se.values()[i]));
    CHECK(diff < 1e-10);

    // F^{-1}(h * g) = F^{-1}(h) F^{-1}(g) and d/dz F^{-1}(h) = F^{-1}(i m h)
    const ProfileFn profiles[] = {e, s, ga};
    for (const auto& h : profiles) {
        auto hs = convolve_m(h, s);
        for (double z : {0.0, 0.7, -1.9}) {
            cplx lhs = inverse_fourier(hs, z, 1.0);
            cplx rhs = inverse_fourier(h, z, 1.0) * inverse_fourier(s, z, 1.0);
            CHECK(std::abs(lhs - rhs) < 1e-6);
            CVec im(g->size());
            for (std::size_t i = 0; i < g->size(); ++i) im[i] = cplx(0.0, g->nodes()[i]) * h.values()[i];
            auto d = oracles::finite_diff([&](double x) { return inverse_fourier(h, x, 1.0); }, z, 0.05);
            CHECK(std::abs(d.value - inverse_fourier(*g, im.data(), z, 1.0)) < 1e-6);
        }
    }
}

TEST_CASE("power-basis and grid carriers agree") {
    auto g = FourierGrid::make(1.0, 1.5, 24.0, 12, 2.0);
    PowerM pm(g, 6);
    GridM gm(g);
    CHECK(pm.kind() == "power");
    CHECK_FALSE(pm.accepts_symbols());
    CHECK(gm.accepts_symbols());
    // e_1 * e_2 in both carriers
    CVec a = pm.profile(1.0), b(6, 0.0), out(6, 0.0);
    b[1] = 1.0;
    pm.conv_acc(out.data(), a.data(), b.data(), 2.0);
    CHECK(out[2] == cplx(2.0));
    CVec ga = gm.profile(1.0);
    CVec gb = pm.basis_values(2), gout(g->size(), 0.0);
    gm.conv_acc(gout.data(), ga.data(), gb.data(), 2.0);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) err = std::max(err, std::abs(gout[i] - 2.0 * pm.basis_values(3)[i]));
    CHECK(err < 1e-10);
    CVec gp(g->size(), 0.0);
    gm.conv_profile_acc(gp.data(), ga.data(), 1.0);
    for (std::size_t i = 0; i < g->size(); i += 11) CHECK(std::abs(gp[i] - pm.basis_values(2)[i]) < 1e-10);

    // F^{-1}(e_j) = f0^j; norms and point values agree
    CVec c{0.3, -0.2, 0.1, 0.0, 0.05, 0.0};
    CVec vals(g->size(), 0.0);
    for (int j = 1; j <= 6; ++j)
        for (std::size_t i = 0; i < g->size(); ++i) vals[i] += c[j - 1] * pm.basis_values(j)[i];
    for (cplx z : {cplx(0.0), cplx(0.8, 0.2)}) CHECK(std::abs(pm.inverse_fourier(c.data(), z) - gm.inverse_fourier(vals.data(), z)) < 1e-10);
    CHECK(pm.norm(c.data()) == doctest::Approx(gm.norm(vals.data())).epsilon(1e-12));
    CHECK(std::abs(pm.value_at(c.data(), 0.33) - gm.value_at(vals.data(), 0.33)) < 1e-12);

    CVec k = c;
    pm.apply_symbol(k.data(), Symbol::scalar(2.0));
    CHECK(k[0] == cplx(0.6));
    CHECK_THROWS_AS(pm.apply_symbol(k.data(), Symbol::poly_at_im(ComplexPoly(CVec{0.0, 1.0}))), UsageError);
    CVec gv = gm.profile(1.0);
    gm.apply_symbol(gv.data(), Symbol::poly_at_im(ComplexPoly(CVec{1.0, 0.0, 1.0})));
    CHECK(std::abs(gv[0] - (1.0 - std::pow(g->nodes()[0], 2)) * base_profile(g->nodes()[0], 1.0, 1.5)) < 1e-14);
}

TEST_CASE("carrier selection follows the symbols") {
    auto g = FourierGrid::make(1.0, 1.0, 10.0, 8, 4.0);
    CHECK(make_mspace(builtin_spec("scenario-a"), g, 4)->kind() == "power");
    auto s = builtin_spec("scenario-a");
    s.Q = ComplexPoly(CVec{4.0, 0.0, 1.0});
    CHECK(make_mspace(s, g, 4)->kind() == "grid");
}
