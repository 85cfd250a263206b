#include <doctest.h>

#include <cmath>
#include <random>

#include "borel_lab/problem_model.hpp"
#include "borel_lab/special_functions.hpp"

using namespace borel_lab;

namespace {
ComplexPoly poly(std::initializer_list<cplx> c) { return ComplexPoly(CVec(c)); }

bool failed(const ValidationReport& r, const std::string& id) {
    auto f = r.find(id);
    REQUIRE(f != nullptr);
    return !f->passed;
}
}  // namespace

TEST_CASE("complex polynomials trim and evaluate") {
    ComplexPoly p(CVec{1.0, 2.0, 0.0, 0.0});
    CHECK(p.degree() == 1);
    CHECK(p(cplx(2.0)) == cplx(5.0));
    CHECK(ComplexPoly().is_zero());
    CHECK(ComplexPoly().degree() == 0);
    CHECK_THROWS_AS(ComplexPoly(CVec{}), ConfigError);
    EpsPoly e({poly({0.5, 0.25}), poly({0.0, 1.0})});
    CHECK(e.degree() == 1);
    CHECK(std::abs(e(0.2, 3.0) - cplx(0.55 + 0.6)) < 1e-15);
}

TEST_CASE("remark instance validates with the expected shifts") {
    auto s = builtin_spec("paper-remark");
    auto r = validate_spec(s);
    for (const auto& f : r.findings) {
        INFO(f.id << ": " << f.detail);
        CHECK(f.passed);
    }
    CHECK(r.valid());
    REQUIRE(r.tuple_shifts.size() == 1);
    CHECK(r.tuple_shifts[0] == std::make_pair(2, 1));
    CHECK(derived_quantities(s).Delta0 == 12);
}

TEST_CASE("positivity of the tuple decomposition is enforced") {
    auto s = builtin_spec("scenario-a");
    IndexTuple t;
    t.l1 = 3;
    t.l2 = 1;
    t.l3 = 2;
    t.l4 = 1;
    t.Delta = 10;
    t.amplitude = {"c", poly({0.1}), 0.1};
    s.I.push_back(t);
    s.R_l.push_back(poly({1.0}));
    auto r = validate_spec(s);
    CHECK_FALSE(r.valid());
    CHECK(failed(r, "tuple[0].decomposition"));
    CHECK(r.tuple_shifts[0].first == 0);
}

TEST_CASE("scenario B validates and exercises the correction sums") {
    auto s = builtin_spec("scenario-b");
    auto r = validate_spec(s);
    for (const auto& f : r.findings) {
        INFO(f.id << ": " << f.detail);
        CHECK(f.passed);
    }
    CHECK(r.tuple_shifts[0] == std::make_pair(1, 2));
    CHECK(s.I[0].l2 > 1);
    CHECK(s.I[0].l4 > 1);
}

TEST_CASE("a broken balance is reported as exactly that finding") {
    for (auto name : builtin_names()) {
        auto s = builtin_spec(name);
        s.delta2 += 1;
        s.Delta0 = s.k1 * s.delta1 + s.k2 * s.delta2;  // keep the other identity intact
        auto r = validate_spec(s);
        int nfail = 0;
        for (const auto& f : r.findings) nfail += !f.passed;
        // the order window of tuples depends only on delta1, so nothing else moves
        CHECK(failed(r, "delta_balance"));
        CHECK(nfail == 1);
    }
}

TEST_CASE("tuple reconstruction is exact for every accepted tuple") {
    for (int k1 = 2; k1 <= 3; ++k1)
        for (int l2 = 1; l2 <= 3; ++l2)
            for (int d = 1; d <= 4; ++d) {
                ProblemSpec s = builtin_spec("scenario-a");
                s.k1 = k1;
                IndexTuple t;
                t.l1 = l2 * (k1 + 1) + d;
                t.l2 = l2;
                auto [a, b] = tuple_shifts(s, t);
                CHECK(a == d);
                CHECK(t.l2 * (k1 + 1) + a == t.l1);
                (void)b;
            }
}

TEST_CASE("malformed input raises config errors, invalid math does not") {
    auto s = builtin_spec("scenario-a");
    s.eps0 = 0.0;
    CHECK_THROWS_AS(validate_spec(s), ConfigError);
    s = builtin_spec("scenario-a");
    s.N1.clear();
    CHECK_THROWS_AS(validate_spec(s), ConfigError);
    s = builtin_spec("scenario-a");
    s.k2 = 5;
    CHECK_NOTHROW(validate_spec(s));
    CHECK(failed(validate_spec(s), "orders"));
}

TEST_CASE("imaginary-axis root check") {
    CHECK(check_no_imaginary_axis_roots(poly({1.0, 0.0, 0.0, 0.0, 1.0})).nonvanishing);
    // X^2 + 1 vanishes at X = i (m = 1).
    auto c = check_no_imaginary_axis_roots(poly({1.0, 0.0, 1.0}));
    CHECK_FALSE(c.nonvanishing);
    CHECK(std::abs(std::abs(c.argmin) - 1.0) < 1e-6);
    // X - 0.3i vanishes at m = 0.3; X - 0.3 does not.
    CHECK_FALSE(check_no_imaginary_axis_roots(poly({cplx(0.0, -0.3), 1.0})).nonvanishing);
    CHECK(check_no_imaginary_axis_roots(poly({-0.3, 1.0})).nonvanishing);
    CHECK_FALSE(check_no_imaginary_axis_roots(poly({0.0})).nonvanishing);
    // -X^2+2 = m^2+2 on the axis.
    CHECK(check_no_imaginary_axis_roots(poly({2.0, 0.0, -1.0})).nonvanishing);
    auto s = builtin_spec("scenario-b");
    s.Q = poly({-1.0, 0.0, -1.0});  // m^2 - 1 on the axis
    CHECK(failed(validate_spec(s), "axis_nonvanishing.Q"));
}

TEST_CASE("derived quantities") {
    auto s = builtin_spec("paper-remark");
    s.R = poly({1.0});
    auto d = derived_quantities(s);
    CHECK(d.r_QR == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.arg_hull.width < 1e-12);
    CHECK(std::abs(wrap_angle(d.arg_hull.start)) < 1e-12);
    CHECK(d.Delta0 == 12);
    auto remark = derived_quantities(builtin_spec("paper-remark"));
    // min over m of (m^4+1)/(m^2+2)
    double best = 1e9;
    for (int i = 0; i <= 200000; ++i) {
        double m = -5.0 + 10.0 * i / 200000.0;
        best = std::min(best, (m * m * m * m + 1) / (m * m + 2));
    }
    CHECK(remark.r_QR == doctest::Approx(best).epsilon(1e-8));
    CHECK(remark.r_QR == doctest::Approx(std::sqrt(5.0) - 2.0 + 0.0).epsilon(0.5));
}

TEST_CASE("angular hulls") {
    auto h = angular_hull({3.0, -3.0});
    CHECK(h.width == doctest::Approx(2.0 * kPi - 6.0));
    CHECK(h.contains(kPi));
    CHECK_FALSE(h.contains(0.0));
    CHECK(h.distance(0.0) == doctest::Approx(3.0));
    auto w = angular_hull({0.0, 2.0, 4.0});
    CHECK(w.width == doctest::Approx(4.0));
}

TEST_CASE("profiles and the forcing constant") {
    auto s = builtin_spec("scenario-a");
    s.forcing.begin()->second.amplitude = poly({1.0});
    auto v = eval_profiles(s, 0.0, 0.1);
    CHECK(std::abs(v.F.begin()->second - 1.0) < 1e-15);
    CHECK(v.Psi == cplx(0.0));
    CHECK(c_psi(s, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-12));
    CHECK_THROWS_AS(eval_profiles(s, 0.0, 0.6), DomainError);

    auto r = builtin_spec("scenario-b");
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> um(-30.0, 30.0), ur(0.0, 1.0);
    double K = k_coeff(r);
    for (int i = 0; i < 200; ++i) {
        double m = um(rng);
        cplx e = std::polar(r.eps0 * ur(rng), 2.0 * kPi * ur(rng));
        auto p = eval_profiles(r, m, e);
        CHECK(std::abs(p.C_l[0]) * std::pow(1.0 + std::abs(m), r.mu) * std::exp(r.beta * std::abs(m)) <=
              K * (1.0 + 1e-12));
    }
}

TEST_CASE("JSON round trip and schema enforcement") {
    for (auto name : builtin_names()) {
        auto s = builtin_spec(name);
        auto text = spec_to_json_text(s);
        auto t = spec_from_json_text(text);
        CHECK(spec_to_json_text(t) == text);
        CHECK(validate_spec(t).valid() == validate_spec(s).valid());
    }
    CHECK_THROWS_AS(spec_from_json_text("{\"k1\": 2}"), ConfigError);
    CHECK_THROWS_AS(spec_from_json_text("not json"), ConfigError);
    auto text = spec_to_json_text(builtin_spec("scenario-a"));
    auto pos = text.find("\"spec_version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 17, "\"spec_version\": 2");
    CHECK_THROWS_AS(spec_from_json_text(text), ConfigError);
    CHECK_THROWS_AS(builtin_spec("nope"), ConfigError);
}
