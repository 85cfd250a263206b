#include <doctest.h>

#include <cmath>

#include "borel_lab/oracles.hpp"

using namespace borel_lab;
using namespace borel_lab::oracles;

TEST_CASE("adaptive quadrature on closed-form integrals") {
    auto r = adaptive_quad([](double x) { return cplx(x * x); }, 0.0, 1.0, 1e-14);
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-14);
    CHECK(r.error_estimate <= 1e-14);

    // Gaussian tail beyond 40 is far below double precision.
    auto g = adaptive_quad([](double x) { return cplx(std::exp(-x * x)); }, 0.0, 40.0, 1e-13);
    CHECK(std::abs(g.value - std::sqrt(kPi) / 2.0) < 1e-12);

    auto ray = adaptive_quad_ray([](cplx u) { return u * std::exp(-u * u); }, 0.0, 1e-14, 1e-13);
    CHECK(std::abs(ray.value - 0.5) < 1e-12);
}

TEST_CASE("adaptive quadrature handles kinks, reversed limits and complex values") {
    auto f = [](double x) { return cplx(std::exp(-std::abs(x)), std::sin(x)); };
    auto r = adaptive_quad(f, -3.0, 3.0, 1e-13, 0.0, {0.0});
    CHECK(std::abs(r.value - cplx(2.0 * (1.0 - std::exp(-3.0)), 0.0)) < 1e-12);
    auto rev = adaptive_quad(f, 3.0, -3.0, 1e-13, 0.0, {0.0});
    CHECK(std::abs(rev.value + r.value) < 1e-12);
}

TEST_CASE("adaptive quadrature reports budget exhaustion with a partial result") {
    auto nasty = [](double x) { return cplx(std::sin(1.0 / (x + 1e-9))); };
    try {
        adaptive_quad(nasty, 0.0, 1.0, 1e-15, 0.0, {}, 3000);
        FAIL("expected a convergence error");
    } catch (const QuadConvergenceError& e) {
        CHECK(e.partial.evaluations >= 3000);
        CHECK(e.kind() == Error::Kind::Convergence);
    }
}

TEST_CASE("tanh-sinh integrates endpoint singularities") {
    // int_0^1 x^{-1/2} (1-x)^{-1/2} dx = pi
    auto r = tanh_sinh(
        [](double x, double xc) {
            // xc is the signed distance to the nearer endpoint: a - x on the left half, b - x on the right.
            double left = xc < 0 ? -xc : x, right = xc < 0 ? 1.0 - x : xc;
            return cplx(1.0 / std::sqrt(left * right));
        },
        0.0, 1.0, 1e-12);
    CHECK(std::abs(r.value - kPi) < 1e-9);
}

TEST_CASE("symbolic monomial calculus") {
    OpWord t2d{OpFactor::mul_t(2), OpFactor::deriv()};
    CHECK(symbolic_monomial_apply(t2d, 3) == Monomial{3, 4});
    CHECK(symbolic_monomial_apply(irregular_power(1, 2), 3) == Monomial{12, 5});
    CHECK(symbolic_monomial_apply(lifted_derivative(2, 1), 3) == Monomial{6, 5});
    // T^{k(m-l)} (T^{k+1} d)^l with m=2, l=1, k=1 on T^3 gives 3 T^5.
    OpWord corr{OpFactor::mul_t(1), OpFactor::mul_t(2), OpFactor::deriv()};
    auto c = symbolic_monomial_apply(corr, 3);
    CHECK(c == Monomial{3, 5});
    CHECK(12 - 2 * 3 == 6);
    // d/dT annihilates constants.
    CHECK(symbolic_monomial_apply({OpFactor::deriv()}, 0).coeff == 0);
}

TEST_CASE("finite differences with Richardson extrapolation") {
    auto d = finite_diff([](double x) { return cplx(x * x); }, 1.0);
    CHECK(std::abs(d.value - 2.0) < 1e-12);
    CHECK(d.reliable);
    auto e = finite_diff([](double x) { return cplx(std::exp(x)); }, 0.0);
    CHECK(std::abs(e.value - 1.0) < 1e-10);
    auto kink = finite_diff([](double x) { return cplx(std::abs(x)); }, 1e-3, 0.1);
    CHECK_FALSE(kink.reliable);
}

TEST_CASE("golden-section maximisation") {
    auto m = golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
    CHECK(std::abs(m.x - 0.3) < 1e-7);
}
