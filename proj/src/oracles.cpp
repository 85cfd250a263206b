#include "borel_lab/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <queue>

namespace borel_lab::oracles {

namespace {

struct Panel {
    double a, b;
    cplx value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const RealToComplex& f, double a, double b) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    // Boost stores non-negative abscissae; index 0 is the centre and the 7-point Gauss
    // nodes sit at the even Kronrod indices.
    cplx f0 = f(c);
    cplx k = f0 * wk[0];
    cplx g = f0 * wg[0];
    for (std::size_t i = 1; i < xk.size(); ++i) {
        cplx fp = f(c + h * xk[i]);
        cplx fm = f(c - h * xk[i]);
        k += (fp + fm) * wk[i];
        if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
    }
    k *= h;
    g *= h;
    return {a, b, k, std::abs(k - g)};
}

}  // namespace

QuadResult adaptive_quad(const RealToComplex& f, double a, double b, double abs_tol, double rel_tol,
                         const std::vector<double>& breakpoints, long max_evals) {
    if (!(abs_tol > 0.0) && !(rel_tol > 0.0)) throw PreconditionError("adaptive_quad: tolerance must be positive");
    if (a == b) return {};
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel> heap;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push(gk15(f, cuts[i], cuts[i + 1]));
        evals += 15;
    }
    auto totals = [&heap] {
        // Summed in left-to-right panel order so the result does not depend on heap order.
        std::vector<Panel> all;
        auto copy = heap;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
        cplx v = 0.0;
        double e = 0.0;
        for (const auto& p : all) {
            v += p.value;
            e += p.err;
        }
        return std::make_pair(v, e);
    };
    cplx value;
    double err;
    std::tie(value, err) = totals();
    while (true) {
        double target = std::max(abs_tol, rel_tol * std::abs(value));
        if (err <= target) break;
        if (evals >= max_evals) {
            std::tie(value, err) = totals();
            throw QuadConvergenceError("adaptive_quad: evaluation budget exhausted",
                                       QuadResult{sign * value, err, evals});
        }
        Panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Cannot split further in floating point: accept the panel as is.
            worst.err = 0.0;
            heap.push(worst);
            std::tie(value, err) = totals();
            continue;
        }
        Panel l = gk15(f, worst.a, mid);
        Panel r = gk15(f, mid, worst.b);
        evals += 30;
        value += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    std::tie(value, err) = totals();
    return {sign * value, err, evals};
}

QuadResult adaptive_quad_ray(const std::function<cplx(cplx)>& f, double d, double abs_tol, double rel_tol,
                             double r_start) {
    const cplx dir = std::polar(1.0, d);
    auto g = [&](double r) { return f(r * dir) * dir; };
    QuadResult total = adaptive_quad(g, 0.0, r_start, abs_tol / 2, rel_tol / 2);
    double lo = r_start;
    for (int it = 0; it < 200; ++it) {
        double hi = 2.0 * lo;
        QuadResult piece = adaptive_quad(g, lo, hi, abs_tol / 8, rel_tol / 8);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
        double target = std::max(abs_tol, rel_tol * std::abs(total.value));
        if (std::abs(piece.value) < 0.25 * target && it > 0) return total;
        lo = hi;
    }
    throw QuadConvergenceError("adaptive_quad_ray: integrand does not decay along the ray", total);
}

QuadResult tanh_sinh(const std::function<cplx(double, double)>& f, double a, double b, double rel_tol) {
    // Boost's rule is real-valued in our configuration; integrate the two parts.
    boost::math::quadrature::tanh_sinh<double> ts(15);
    long evals = 0;
    double er = 0.0, ei = 0.0, l1 = 0.0;
    double re = ts.integrate(
        [&](double x, double xc) {
            ++evals;
            return f(x, xc).real();
        },
        a, b, rel_tol, &er, &l1);
    double im = ts.integrate(
        [&](double x, double xc) {
            ++evals;
            return f(x, xc).imag();
        },
        a, b, rel_tol, &ei, &l1);
    return {cplx(re, im), er + ei, evals};
}

VecQuadResult tanh_sinh_vec(const std::function<void(double, double, cplx*)>& f, std::size_t dim, double a,
                            double b, double rel_tol, double abs_tol, int max_level) {
    const double half = 0.5 * (b - a), t_max = 4.0;
    VecQuadResult res;
    CVec sum(dim, 0.0), v(dim), prev;
    auto add_node = [&](double t) {
        double u = 0.5 * kPi * std::sinh(t);
        double ch = std::cosh(u);
        double w = half * 0.5 * kPi * std::cosh(t) / (ch * ch);
        if (!(w > 1e-300)) return;
        // distance to the nearer endpoint without cancellation
        double d = half * 2.0 / (1.0 + std::exp(2.0 * std::abs(u)));
        if (!(d > 0.0)) return;
        double x = t >= 0.0 ? b - d : a + d;
        f(x, t >= 0.0 ? -d : d, v.data());
        ++res.evaluations;
        for (std::size_t j = 0; j < dim; ++j) sum[j] += w * v[j];
    };
    double h = 0.5;
    for (int j = 0; j * h <= t_max; ++j) {
        add_node(j * h);
        if (j > 0) add_node(-j * h);
    }
    CVec cur(dim);
    for (std::size_t j = 0; j < dim; ++j) cur[j] = h * sum[j];
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (int j = 1; j * h <= t_max; j += 2) {
            add_node(j * h);
            add_node(-j * h);
        }
        prev = cur;
        double diff = 0.0, mag = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            cur[j] = h * sum[j];
            diff = std::max(diff, std::abs(cur[j] - prev[j]));
            mag = std::max(mag, std::abs(cur[j]));
        }
        res.error_estimate = diff;
        if (level >= 3 && diff <= std::max(abs_tol, rel_tol * mag)) {
            res.value = cur;
            return res;
        }
    }
    res.value = cur;
    res.converged = false;
    return res;
}

// ---- monomial calculus ---------------------------------------------------------------

Monomial symbolic_monomial_apply(const OpWord& word, int j, std::int64_t coeff) {
    Monomial m{coeff, j};
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        if (m.coeff == 0) {
            m.exponent = 0;
            return m;
        }
        if (it->kind == OpFactor::Kind::MulT) {
            m.exponent += it->power;
        } else {
            std::int64_t c;
            if (__builtin_mul_overflow(m.coeff, static_cast<std::int64_t>(m.exponent), &c))
                throw DomainError("symbolic_monomial_apply: integer overflow");
            m.coeff = c;
            m.exponent -= 1;
            if (m.coeff == 0) m.exponent = 0;
        }
    }
    return m;
}

OpWord irregular_power(int k, int power) {
    OpWord w;
    for (int i = 0; i < power; ++i) {
        w.push_back(OpFactor::mul_t(k + 1));
        w.push_back(OpFactor::deriv());
    }
    return w;
}

OpWord lifted_derivative(int m, int k) {
    OpWord w{OpFactor::mul_t(m * (k + 1))};
    for (int i = 0; i < m; ++i) w.push_back(OpFactor::deriv());
    return w;
}

// ---- finite differences ----------------------------------------------------------------

DiffResult finite_diff(const RealToComplex& f, double x, double h, int levels) {
    if (levels < 2) levels = 2;
    std::vector<std::vector<cplx>> T(levels);
    double hh = h;
    for (int i = 0; i < levels; ++i, hh *= 0.5) {
        T[i].resize(i + 1);
        T[i][0] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
        double p = 4.0;
        for (int j = 1; j <= i; ++j, p *= 4.0) T[i][j] = T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) / (p - 1.0);
    }
    DiffResult r;
    r.value = T[levels - 1][levels - 1];
    r.error_estimate = std::abs(T[levels - 1][levels - 1] - T[levels - 2][levels - 2]);
    // A smooth function gives a ladder whose successive diagonal corrections shrink.
    double prev = std::abs(T[1][1] - T[0][0]);
    double last = r.error_estimate;
    r.reliable = std::isfinite(std::abs(r.value)) && (last <= prev || last <= 1e-12 * (1.0 + std::abs(r.value)));
    return r;
}

MaxResult golden_section_max(const std::function<double(double)>& f, double a, double b, double x_tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace borel_lab::oracles
