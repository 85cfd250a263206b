#include "borel_lab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <tuple>

#include "borel_lab/special_functions.hpp"

namespace borel_lab::quad {

namespace {

Rule golub_welsch(int n, double a, double b) {
    if (n < 1) throw UsageError("gauss_jacobi: n must be positive");
    if (!(a > -1.0) || !(b > -1.0)) throw DomainError("gauss_jacobi: exponents must exceed -1");
    Eigen::VectorXd diag(n), off(std::max(n - 1, 1));
    const double ab = a + b;
    for (int i = 0; i < n; ++i) {
        double s = 2.0 * i + ab;
        diag(i) = (i == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    }
    for (int i = 1; i < n; ++i) {
        double s = 2.0 * i + ab;
        double beta = (i == 1) ? 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
                               : 4.0 * i * (i + a) * (i + b) * (i + ab) / (s * s * (s + 1.0) * (s - 1.0));
        off(i - 1) = std::sqrt(beta);
    }
    double mu0 = std::exp((ab + 1.0) * std::log(2.0) + log_gamma(a + 1.0) + log_gamma(b + 1.0) - log_gamma(ab + 2.0));
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    if (n == 1) {
        r.x[0] = diag(0);
        r.w[0] = mu0;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off.head(n - 1));
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v0 * v0;
    }
    return r;
}

}  // namespace

const Rule& gauss_jacobi(int n, double a, double b) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_tuple(n, a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto r = std::make_unique<Rule>(golub_welsch(n, a, b));
    const Rule& ref = *r;
    cache.emplace(key, std::move(r));
    return ref;
}

PanelGrid::PanelGrid(std::vector<double> breaks, int order) : breaks_(std::move(breaks)), order_(order) {
    if (breaks_.size() < 2 || order < 1) throw UsageError("PanelGrid: need two breakpoints and a positive order");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
        if (!(breaks_[i] > breaks_[i - 1])) throw UsageError("PanelGrid: breakpoints must increase");
    const Rule& gl = gauss_legendre(order);
    for (std::size_t p = 0; p + 1 < breaks_.size(); ++p) {
        double c = 0.5 * (breaks_[p] + breaks_[p + 1]), h = 0.5 * (breaks_[p + 1] - breaks_[p]);
        for (int j = 0; j < order; ++j) {
            nodes_.push_back(c + h * gl.x[j]);
            weights_.push_back(h * gl.w[j]);
        }
    }
    bary_.resize(order);
    for (int j = 0; j < order; ++j) {
        double prod = 1.0;
        for (int k = 0; k < order; ++k)
            if (k != j) prod *= (gl.x[j] - gl.x[k]);
        bary_[j] = 1.0 / prod;
    }
}

std::size_t PanelGrid::panel_of(double x) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::ptrdiff_t p = (it - breaks_.begin()) - 1;
    p = std::clamp<std::ptrdiff_t>(p, 0, static_cast<std::ptrdiff_t>(panels()) - 1);
    return static_cast<std::size_t>(p);
}

void PanelGrid::interp_weights(double x, std::size_t& first, double* w) const {
    std::size_t p = panel_of(x);
    first = p * order_;
    double c = 0.5 * (breaks_[p] + breaks_[p + 1]), h = 0.5 * (breaks_[p + 1] - breaks_[p]);
    double t = (x - c) / h;
    const Rule& gl = gauss_legendre(order_);
    double sum = 0.0;
    for (int j = 0; j < order_; ++j) {
        double d = t - gl.x[j];
        if (d == 0.0) {
            std::fill(w, w + order_, 0.0);
            w[j] = 1.0;
            return;
        }
        w[j] = bary_[j] / d;
        sum += w[j];
    }
    for (int j = 0; j < order_; ++j) w[j] /= sum;
}

cplx PanelGrid::interpolate(const cplx* values, double x) const {
    double w[64];
    if (order_ > 64) throw UsageError("PanelGrid: order above 64");
    std::size_t first;
    interp_weights(x, first, w);
    cplx s = 0.0;
    for (int j = 0; j < order_; ++j) s += w[j] * values[first + j];
    return s;
}

cplx pairwise_sum(const cplx* v, std::size_t n) {
    if (n <= 8) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

namespace {

struct VPanel {
    double a, b;
    CVec value;
    double err;
};

VPanel vgk15(const std::function<void(double, cplx*)>& f, std::size_t dim, double a, double b, CVec& buf) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    CVec k(dim, 0.0), g(dim, 0.0);
    buf.resize(2 * dim);
    f(c, buf.data());
    for (std::size_t d = 0; d < dim; ++d) {
        k[d] = buf[d] * wk[0];
        g[d] = buf[d] * wg[0];
    }
    for (std::size_t i = 1; i < xk.size(); ++i) {
        f(c + h * xk[i], buf.data());
        f(c - h * xk[i], buf.data() + dim);
        for (std::size_t d = 0; d < dim; ++d) {
            cplx s = buf[d] + buf[dim + d];
            k[d] += s * wk[i];
            if (i % 2 == 0) g[d] += s * wg[i / 2];
        }
    }
    double err = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        k[d] *= h;
        err = std::max(err, std::abs(k[d] - g[d] * h));
    }
    return {a, b, std::move(k), err};
}

}  // namespace

VecResult adaptive_vec(const std::function<void(double, cplx*)>& f, std::size_t dim, double a, double b,
                       double abs_tol, double rel_tol, const std::vector<double>& breaks, long max_evals) {
    VecResult res;
    res.value.assign(dim, 0.0);
    if (a == b) return res;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> cuts{a};
    for (double x : breaks)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<VPanel> panels;
    CVec buf;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        panels.push_back(vgk15(f, dim, cuts[i], cuts[i + 1], buf));
        res.evaluations += 15;
    }
    auto cmp = [&](std::size_t x, std::size_t y) { return panels[x].err < panels[y].err; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
    for (std::size_t i = 0; i < panels.size(); ++i) heap.push(i);

    auto totals = [&](CVec& val, double& err) {
        val.assign(dim, 0.0);
        err = 0.0;
        // summation in panel creation order: deterministic
        for (const auto& p : panels) {
            for (std::size_t d = 0; d < dim; ++d) val[d] += p.value[d];
            err += p.err;
        }
    };
    CVec val;
    double err;
    totals(val, err);
    for (;;) {
        double mag = 0.0;
        for (auto& v : val) mag = std::max(mag, std::abs(v));
        if (err <= std::max(abs_tol, rel_tol * mag)) break;
        if (res.evaluations >= max_evals) {
            res.converged = false;
            break;
        }
        std::size_t i = heap.top();
        heap.pop();
        VPanel p = panels[i];
        double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            res.converged = false;
            break;
        }
        panels[i] = vgk15(f, dim, p.a, m, buf);
        panels.push_back(vgk15(f, dim, m, p.b, buf));
        res.evaluations += 30;
        heap.push(i);
        heap.push(panels.size() - 1);
        // incremental update of the running totals
        for (std::size_t d = 0; d < dim; ++d) val[d] += panels[i].value[d] + panels.back().value[d] - p.value[d];
        err += panels[i].err + panels.back().err - p.err;
    }
    totals(val, err);
    for (auto& v : val) v *= sign;
    res.value = std::move(val);
    res.error = err;
    return res;
}

}  // namespace borel_lab::quad
