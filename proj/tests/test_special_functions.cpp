#include <doctest.h>

#include <cmath>

#include "borel_lab/oracles.hpp"
#include "borel_lab/special_functions.hpp"

using namespace borel_lab;

TEST_CASE("gamma and beta against quadrature") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    // Gamma(1/2) = int_0^inf t^{-1/2} e^{-t} dt = 2 int_0^inf e^{-x^2} dx
    auto q = oracles::adaptive_quad([](double x) { return cplx(2.0 * std::exp(-x * x)); }, 0.0, 40.0, 1e-14);
    CHECK(std::abs(gamma_fn(0.5) - q.value.real()) / gamma_fn(0.5) < 1e-12);
    for (double a : {0.1, 0.75, 1.3, 2.5, 7.2, 23.0}) {
        auto g = oracles::adaptive_quad([a](double x) { return cplx(std::pow(x, a - 1.0) * std::exp(-x)); }, 1.0, 200.0,
                                        1e-15, 1e-15);
        // Lower piece by series: int_0^1 x^{a-1} e^{-x} dx = sum (-1)^n / (n! (a+n))
        double low = 0.0, fact = 1.0;
        for (int n = 0; n < 40; ++n) {
            if (n > 0) fact *= n;
            low += ((n % 2) ? -1.0 : 1.0) / (fact * (a + n));
        }
        double ref = g.value.real() + low;
        CHECK(std::abs(gamma_fn(a) - ref) / ref < 1e-12);
    }
    // Log-domain branch stays finite where the linear value overflows.
    CHECK(std::isfinite(log_gamma(400.0)));
    CHECK(log_gamma(60.0) == doctest::Approx(std::lgamma(60.0)));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(beta_fn(-1.0, 1.0), DomainError);
}

TEST_CASE("irregular-operator expansion: spot values") {
    CHECK(mono_op_coeffs(1, 3).exact.empty());
    CHECK(mono_op_coeffs(2, 1).exact == std::vector<std::int64_t>{-2});
    CHECK(mono_op_coeffs(2, 2).exact == std::vector<std::int64_t>{-3});
    CHECK(mono_op_coeffs(3, 1).exact == std::vector<std::int64_t>{6, -6});
    CHECK_THROWS_AS(mono_op_coeffs(0, 1), DomainError);
}

TEST_CASE("irregular-operator expansion reproduces the operator on monomials exactly") {
    for (int m = 1; m <= 6; ++m)
        for (int k = 1; k <= 4; ++k) {
            auto e = mono_op_coeffs(m, k);
            for (int j = 1; j <= 2 * m; ++j) {
                auto lhs = oracles::symbolic_monomial_apply(oracles::lifted_derivative(m, k), j);
                auto rhs = oracles::symbolic_monomial_apply(oracles::irregular_power(k, m), j);
                std::int64_t total = rhs.coeff;
                for (int l = 1; l < m; ++l) {
                    auto w = oracles::irregular_power(k, l);
                    w.insert(w.begin(), oracles::OpFactor::mul_t(k * (m - l)));
                    auto t = oracles::symbolic_monomial_apply(w, j, e.exact[l - 1]);
                    if (t.coeff != 0) CHECK(t.exponent == j + m * k);
                    total += t.coeff;
                }
                if (lhs.coeff != 0) CHECK(lhs.exponent == j + m * k);
                CHECK(total == lhs.coeff);
            }
        }
}

TEST_CASE("Laplace identity for monomials") {
    CHECK(std::abs(laplace_monomial(1, 1, 0.0, 1.0) - 1.0) < 1e-15);
    CHECK(std::abs(laplace_monomial(2, 2, 0.0, 1.0) - 1.0) < 1e-15);
    CHECK(std::abs(laplace_monomial(3, 2, 0.0, 0.5) - 0.3385295) < 1e-7);
    auto v = laplace_monomial_verify(3, 2, 0.0, 0.5);
    CHECK(v.rel_discrepancy < 1e-10);
    auto w = laplace_monomial_verify(2, 5, 0.3, std::polar(0.7, 0.1));
    CHECK(w.rel_discrepancy < 1e-8);
    CHECK_THROWS_AS(laplace_monomial(2, 1, kPi / 2, 1.0), DomainError);
    CHECK_THROWS_AS(laplace_monomial(1, 1, 0.0, 0.0), DomainError);
}

TEST_CASE("Gevrey majorant") {
    auto g = gevrey_majorant(4, 1.0, 2);
    CHECK(g.sup_lhs == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-12));
    for (double M : {0.3, 1.0, 7.0}) {
        auto h = gevrey_majorant(3, M, 3);
        CHECK(h.sup_lhs == doctest::Approx(std::exp(-1.0) / M).epsilon(1e-12));
    }
    // Closed-form sup versus 1-D numerical maximisation over u = r^{-k'}.
    for (int N : {1, 3, 7, 12}) {
        double M = 0.8;
        int kp = 2;
        auto f = [&](double lu) { return (N / static_cast<double>(kp)) * lu - M * std::exp(lu); };
        auto mx = oracles::golden_section_max(f, -20.0, 20.0, 1e-14);
        auto gm = gevrey_majorant(N, M, kp);
        CHECK(std::abs(std::exp(mx.value) - gm.sup_lhs) / gm.sup_lhs < 1e-10);
    }
    double C2 = gevrey_constant(2);
    for (int N = 1; N <= 50; ++N) {
        auto h = gevrey_majorant(N, 1.0, 2);
        CHECK(h.sup_lhs <= C2 * h.rhs_factor);
    }
    CHECK_THROWS_AS(gevrey_majorant(0, 1.0, 2), DomainError);
}
