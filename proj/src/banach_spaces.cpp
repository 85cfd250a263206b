#include "borel_lab/banach_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "borel_lab/oracles.hpp"
#include "borel_lab/parallel.hpp"
#include "borel_lab/special_functions.hpp"

namespace borel_lab {

const char* domain_name(Domain d) {
    switch (d) {
        case Domain::Disc: return "disc";
        case Domain::Sector: return "sector";
        case Domain::Intersection: return "intersection";
    }
    return "?";
}

double tau_weight(const SpaceParams& sp, double r1, double r2) {
    if (sp.domain != Domain::Sector) return 1.0 / (r1 * r2);
    return (1.0 + std::pow(r1, 2 * sp.k1)) * (1.0 + std::pow(r2, 2 * sp.k2)) / (r1 * r2) *
           std::exp(-sp.nu1 * std::pow(r1, sp.k1) - sp.nu2 * std::pow(r2, sp.k2));
}

PolarGrid::PolarGrid(std::vector<std::pair<double, double>> angles, quad::PanelGrid r1, quad::PanelGrid r2)
    : angles_(std::move(angles)), r1_(std::move(r1)), r2_(std::move(r2)) {
    if (angles_.empty()) throw UsageError("PolarGrid: no angle pairs");
    if (r1_.lo() != 0.0 || r2_.lo() != 0.0) throw UsageError("PolarGrid: radial grids must start at 0");
}

std::vector<double> radial_breaks(double R, double max_panel, double first_panel, std::vector<double> extra) {
    if (!(R > 0.0) || !(max_panel > 0.0) || !(first_panel > 0.0)) throw UsageError("radial_breaks: bad sizes");
    // protected points, then panels of width min(max_panel, max(first_panel, x)) in between:
    // geometric grading away from the origin, uniform further out
    std::vector<double> keep{0.0, R};
    for (double e : extra)
        if (e > 0.0 && e < R) keep.push_back(e);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    std::vector<double> b{0.0};
    for (std::size_t i = 1; i < keep.size(); ++i) {
        double x = keep[i - 1], q = keep[i];
        for (;;) {
            double w = std::min(max_panel, std::max(first_panel, x));
            if (x + 1.3 * w >= q) {
                b.push_back(q);
                break;
            }
            x += w;
            b.push_back(x);
        }
    }
    return b;
}

// ---- BorelGridFn -------------------------------------------------------------------------

BorelGridFn::BorelGridFn(SpaceParams sp, PolarGridPtr grid, MSpacePtr ms)
    : sp_(sp), grid_(std::move(grid)), ms_(std::move(ms)), dim_(ms_->dim()) {
    data_.assign(grid_->n_angles() * grid_->n1() * grid_->n2() * dim_, 0.0);
    if (sp_.domain != Domain::Sector) {
        if (grid_->r1().hi() > sp_.rho1 * (1 + 1e-12) || grid_->r2().hi() > sp_.rho2 * (1 + 1e-12))
            throw UsageError("BorelGridFn: radial grid exceeds the disc radii");
    }
}

BorelGridFn BorelGridFn::from_function(SpaceParams sp, PolarGridPtr grid, MSpacePtr ms,
                                       const std::function<void(cplx, cplx, cplx*)>& f) {
    BorelGridFn out(sp, std::move(grid), std::move(ms));
    const auto& g = out.grid();
    parallel_for(g.n_angles() * g.n1(), [&](std::size_t ai) {
        std::size_t a = ai / g.n1(), i1 = ai % g.n1();
        for (std::size_t i2 = 0; i2 < g.n2(); ++i2) f(out.tau1(a, i1), out.tau2(a, i2), out.at(a, i1, i2));
    });
    return out;
}

cplx BorelGridFn::tau1(std::size_t a, std::size_t i1) const {
    return std::polar(grid_->r1().nodes()[i1], grid_->angles()[a].first);
}
cplx BorelGridFn::tau2(std::size_t a, std::size_t i2) const {
    return std::polar(grid_->r2().nodes()[i2], grid_->angles()[a].second);
}

void BorelGridFn::eval(std::size_t a, double r1, double r2, cplx* out) const {
    const auto& g1 = grid_->r1();
    const auto& g2 = grid_->r2();
    double w1[64], w2[64];
    std::size_t f1, f2;
    g1.interp_weights(r1, f1, w1);
    g2.interp_weights(r2, f2, w2);
    std::fill(out, out + dim_, cplx(0.0));
    for (int p = 0; p < g1.order(); ++p)
        for (int q = 0; q < g2.order(); ++q) {
            const cplx* v = at(a, f1 + p, f2 + q);
            double w = w1[p] * w2[q];
            for (std::size_t j = 0; j < dim_; ++j) out[j] += w * v[j];
        }
}

bool BorelGridFn::same_layout(const BorelGridFn& o) const {
    return grid_ == o.grid_ && ms_ == o.ms_ && sp_.domain == o.sp_.domain;
}

BorelGridFn& BorelGridFn::operator+=(const BorelGridFn& o) {
    if (!same_layout(o)) throw UsageError("BorelGridFn: layout mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}
BorelGridFn& BorelGridFn::operator-=(const BorelGridFn& o) {
    if (!same_layout(o)) throw UsageError("BorelGridFn: layout mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}
BorelGridFn& BorelGridFn::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

double weighted_norm(const BorelGridFn& f) {
    const auto& g = f.grid();
    const auto& sp = f.space();
    const auto& ms = f.ms();
    if (sp.domain != Domain::Sector && (!(sp.rho1 > 0.0) || !(sp.rho2 > 0.0)))
        throw UsageError("weighted_norm: disc radii missing");
    if (sp.domain == Domain::Sector && (!(sp.nu1 > 0.0) || !(sp.nu2 > 0.0)))
        throw UsageError("weighted_norm: sector rates missing");
    // nodes plus the outer radius of each radial grid
    std::vector<double> r1 = g.r1().nodes(), r2 = g.r2().nodes();
    r1.push_back(g.r1().hi());
    r2.push_back(g.r2().hi());
    std::vector<double> best(g.n_angles() * r1.size(), 0.0);
    parallel_for(best.size(), [&](std::size_t idx) {
        std::size_t a = idx / r1.size(), i1 = idx % r1.size();
        CVec v(f.dim());
        double m = 0.0;
        for (std::size_t i2 = 0; i2 < r2.size(); ++i2) {
            const cplx* p;
            if (i1 < g.n1() && i2 < g.n2()) {
                p = f.at(a, i1, i2);
            } else {
                f.eval(a, r1[i1], r2[i2], v.data());
                p = v.data();
            }
            m = std::max(m, tau_weight(sp, r1[i1], r2[i2]) * ms.norm(p));
        }
        best[idx] = m;
    });
    return *std::max_element(best.begin(), best.end());
}

// ---- radial rules --------------------------------------------------------------------------

namespace {

// Quadrature over x in [0, 1] written as sum_q w[q] F(mult[fi[q]]) G(mult[gi[q]]).
struct RadialRule {
    std::vector<double> mult, w;
    std::vector<std::size_t> fi, gi;
};

// Gauss-Jacobi nodes for int_0^Y y^alpha phi(y) dy.
void jacobi_on(double Y, double alpha, int n, std::vector<double>& y, std::vector<double>& w) {
    const auto& r = quad::gauss_jacobi(n, 0.0, alpha);
    y.resize(n);
    w.resize(n);
    double scale = std::pow(0.5 * Y, alpha + 1.0);
    for (int i = 0; i < n; ++i) {
        y[i] = 0.5 * Y * (1.0 + r.x[i]);
        w[i] = scale * r.w[i];
    }
}

// int_0^1 (1-x)^{sa} x^{sb} F(x^{1/k}) dx
RadialRule b1_rule(int k, double sa, double sb, int n) {
    RadialRule r;
    const double Y = std::pow(0.5, 1.0 / k);
    std::vector<double> y, w;
    // x = y^k on [0, 1/2]
    jacobi_on(Y, k * sb + k - 1.0, n, y, w);
    for (int i = 0; i < n; ++i) {
        r.mult.push_back(y[i]);
        r.w.push_back(w[i] * k * std::pow(1.0 - std::pow(y[i], k), sa));
        r.fi.push_back(r.mult.size() - 1);
    }
    // 1 - x = y^k on [1/2, 1]
    jacobi_on(Y, k * sa + k - 1.0, n, y, w);
    for (int i = 0; i < n; ++i) {
        double x = 1.0 - std::pow(y[i], k);
        r.mult.push_back(std::pow(x, 1.0 / k));
        r.w.push_back(w[i] * k * std::pow(x, sb));
        r.fi.push_back(r.mult.size() - 1);
    }
    r.gi = r.fi;
    return r;
}

// int_0^1 F((1-x)^{1/k}) G(x^{1/k}) dx / (x(1-x))
RadialRule b2_rule(int k, int n) {
    RadialRule r;
    const double Y = std::pow(0.5, 1.0 / k);
    const auto& gl = quad::gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
        double y = 0.5 * Y * (1.0 + gl.x[i]);
        r.mult.push_back(y);
        r.mult.push_back(std::pow(1.0 - std::pow(y, k), 1.0 / k));
    }
    for (int side = 0; side < 2; ++side)
        for (int i = 0; i < n; ++i) {
            double y = r.mult[2 * i];
            r.w.push_back(0.5 * Y * gl.w[i] * k / (y * (1.0 - std::pow(y, k))));
            // left half (x = y^k): F at (1-y^k)^{1/k}, G at y; right half mirrored
            r.fi.push_back(side == 0 ? 2 * i + 1 : 2 * i);
            r.gi.push_back(side == 0 ? 2 * i : 2 * i + 1);
        }
    return r;
}

// tau^{p} on the ray of angle theta: r^p e^{i p theta}
cplx ray_pow(double r, double theta, double p) { return std::polar(std::pow(r, p), p * theta); }

// Matrix of the linear radial map on one grid: (M v)_i = sum_q w_q v(r_i * mult_q).
std::vector<double> radial_matrix(const quad::PanelGrid& g, const RadialRule& rule) {
    const std::size_t n = g.size();
    std::vector<double> M(n * n, 0.0);
    double iw[64];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t q = 0; q < rule.w.size(); ++q) {
            std::size_t first;
            g.interp_weights(g.nodes()[i] * rule.mult[rule.fi[q]], first, iw);
            for (int p = 0; p < g.order(); ++p) M[i * n + first + p] += rule.w[q] * iw[p];
        }
    return M;
}

void require_same_grid(const BorelGridFn& f, const BorelGridFn& g) {
    if (f.grid_ptr() != g.grid_ptr() || f.ms_ptr() != g.ms_ptr() || f.space().domain != g.space().domain)
        throw UsageError("apply_B2: f and g must share grid, carrier and space");
}

}  // namespace

void check_b1_exponents(const SpaceParams& sp, const Sigma& s) {
    for (double v : s)
        if (!(v > -1.0)) throw PreconditionError("B1: every exponent must exceed -1");
    const double k1 = sp.k1, k2 = sp.k2;
    if (sp.domain == Domain::Sector) {
        double e1 = k1 * (s[0] + s[2] + s[4] + 1.0), e2 = k2 * (s[1] + s[3] + s[5] + 1.0);
        if (std::abs(e1 - e2) > 1e-12 * std::max(1.0, std::abs(e1)))
            throw PreconditionError("B1 (sector): k1(s1+s3+s5+1) must equal k2(s2+s4+s6+1)");
        if (sp.delta1 * sp.k1 != sp.delta2 * sp.k2) throw PreconditionError("B1 (sector): delta1 k1 != delta2 k2");
        if (s[0] + s[2] + s[4] + 1.0 > sp.delta1 + 1e-12)
            throw PreconditionError("B1 (sector): s1+s3+s5+1 exceeds delta1");
    } else {
        if (k1 * s[0] + s[2] + s[4] + 1.0 / k1 < -1e-12 || k2 * s[1] + s[3] + s[5] + 1.0 / k2 < -1e-12)
            throw PreconditionError("B1 (disc): k s1 + s3 + s5 + 1/k must be nonnegative");
    }
}

BorelGridFn apply_B1(const BorelGridFn& f, const Sigma& s, const ComplexPoly& P, cplx h_amp, const TauKernel& a,
                     int quad_n) {
    const auto& sp = f.space();
    check_b1_exponents(sp, s);
    const auto& g = f.grid();
    const auto& ms = f.ms();
    const std::size_t n1 = g.n1(), n2 = g.n2(), J = f.dim();
    const auto M1 = radial_matrix(g.r1(), b1_rule(sp.k1, s[2], s[4], quad_n));
    const auto M2 = radial_matrix(g.r2(), b1_rule(sp.k2, s[3], s[5], quad_n));
    const double p1 = sp.k1 * (s[0] + s[2] + s[4] + 1.0), p2 = sp.k2 * (s[1] + s[3] + s[5] + 1.0);
    const Symbol sym = Symbol::poly_at_im(P);

    BorelGridFn out(sp, f.grid_ptr(), f.ms_ptr());
    parallel_for(g.n_angles(), [&](std::size_t ang) {
        const auto [th1, th2] = g.angles()[ang];
        // along r2, then along r1
        CVec tmp(n1 * n2 * J, 0.0);
        for (std::size_t i1 = 0; i1 < n1; ++i1)
            for (std::size_t i2 = 0; i2 < n2; ++i2) {
                cplx* t = tmp.data() + (i1 * n2 + i2) * J;
                for (std::size_t l = 0; l < n2; ++l) {
                    double m = M2[i2 * n2 + l];
                    if (m == 0.0) continue;
                    const cplx* v = f.at(ang, i1, l);
                    for (std::size_t j = 0; j < J; ++j) t[j] += m * v[j];
                }
            }
        CVec acc(J);
        for (std::size_t i1 = 0; i1 < n1; ++i1)
            for (std::size_t i2 = 0; i2 < n2; ++i2) {
                std::fill(acc.begin(), acc.end(), cplx(0.0));
                for (std::size_t l = 0; l < n1; ++l) {
                    double m = M1[i1 * n1 + l];
                    if (m == 0.0) continue;
                    const cplx* t = tmp.data() + (l * n2 + i2) * J;
                    for (std::size_t j = 0; j < J; ++j) acc[j] += m * t[j];
                }
                ms.apply_symbol(acc.data(), sym);
                double r1 = g.r1().nodes()[i1], r2 = g.r2().nodes()[i2];
                cplx t1 = std::polar(r1, th1), t2 = std::polar(r2, th2);
                cplx w = a(t1, t2) * kSqrt2Pi * h_amp * ray_pow(r1, th1, p1) * ray_pow(r2, th2, p2);
                ms.conv_profile_acc(out.at(ang, i1, i2), acc.data(), w);
            }
    });
    return out;
}

BorelGridFn apply_B2(const BorelGridFn& f, const BorelGridFn& gfn, const EpsPoly& P1, const EpsPoly& P2, cplx eps,
                     const TauKernel& a, int quad_n) {
    require_same_grid(f, gfn);
    const auto& sp = f.space();
    const auto& g = f.grid();
    const auto& ms = f.ms();
    const std::size_t n1 = g.n1(), n2 = g.n2(), J = f.dim();
    const ComplexPoly p1 = P1.at(eps), p2 = P2.at(eps);
    const bool shared = (&f == &gfn) && p1.coeffs() == p2.coeffs();

    // symbols applied once on the grid (they commute with radial interpolation)
    auto with_symbol = [&](const BorelGridFn& h, const ComplexPoly& p) {
        BorelGridFn r = h;
        const Symbol sym = Symbol::poly_at_im(p);
        for (std::size_t i = 0; i < r.data().size(); i += J) ms.apply_symbol(r.data().data() + i, sym);
        return r;
    };
    const BorelGridFn fP = with_symbol(f, p1);
    const BorelGridFn gP = shared ? BorelGridFn(sp, f.grid_ptr(), f.ms_ptr()) : with_symbol(gfn, p2);
    const BorelGridFn& gU = shared ? fP : gP;

    const RadialRule R1 = b2_rule(sp.k1, quad_n), R2 = b2_rule(sp.k2, quad_n);
    const std::size_t U1 = R1.mult.size(), U2 = R2.mult.size();
    const int o1 = g.r1().order(), o2 = g.r2().order();

    BorelGridFn out(sp, f.grid_ptr(), f.ms_ptr());
    parallel_for(g.n_angles() * n1, [&](std::size_t ai) {
        const std::size_t ang = ai / n1, i1 = ai % n1;
        const auto [th1, th2] = g.angles()[ang];
        const double r1 = g.r1().nodes()[i1];
        // slabs: r1-interpolated values at r1*mult, for every r2 node
        auto slab = [&](const BorelGridFn& h) {
            CVec S(U1 * n2 * J, 0.0);
            double w[64];
            for (std::size_t u = 0; u < U1; ++u) {
                std::size_t first;
                g.r1().interp_weights(r1 * R1.mult[u], first, w);
                for (int p = 0; p < o1; ++p)
                    for (std::size_t i2 = 0; i2 < n2; ++i2) {
                        const cplx* v = h.at(ang, first + p, i2);
                        cplx* s = S.data() + (u * n2 + i2) * J;
                        for (std::size_t j = 0; j < J; ++j) s[j] += w[p] * v[j];
                    }
            }
            return S;
        };
        const CVec Sf = slab(fP);
        const CVec Sg = shared ? CVec{} : slab(gU);
        CVec Tf(U1 * U2 * J), Tg(shared ? 0 : U1 * U2 * J), acc(J);
        double w[64];
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            const double r2 = g.r2().nodes()[i2];
            std::fill(Tf.begin(), Tf.end(), cplx(0.0));
            std::fill(Tg.begin(), Tg.end(), cplx(0.0));
            for (std::size_t u2 = 0; u2 < U2; ++u2) {
                std::size_t first;
                g.r2().interp_weights(r2 * R2.mult[u2], first, w);
                for (std::size_t u1 = 0; u1 < U1; ++u1) {
                    cplx* tf = Tf.data() + (u1 * U2 + u2) * J;
                    for (int p = 0; p < o2; ++p) {
                        const cplx* s = Sf.data() + (u1 * n2 + first + p) * J;
                        for (std::size_t j = 0; j < J; ++j) tf[j] += w[p] * s[j];
                    }
                    if (!shared) {
                        cplx* tg = Tg.data() + (u1 * U2 + u2) * J;
                        for (int p = 0; p < o2; ++p) {
                            const cplx* s = Sg.data() + (u1 * n2 + first + p) * J;
                            for (std::size_t j = 0; j < J; ++j) tg[j] += w[p] * s[j];
                        }
                    }
                }
            }
            const CVec& TG = shared ? Tf : Tg;
            std::fill(acc.begin(), acc.end(), cplx(0.0));
            // for f = g, reflecting both halves swaps the two factors of a commutative
            // convolution: the q1-right terms equal the q1-left ones
            const std::size_t nq1 = shared ? R1.w.size() / 2 : R1.w.size();
            const double dbl = shared ? 2.0 : 1.0;
            for (std::size_t q1 = 0; q1 < nq1; ++q1)
                for (std::size_t q2 = 0; q2 < R2.w.size(); ++q2) {
                    const cplx* x = Tf.data() + (R1.fi[q1] * U2 + R2.fi[q2]) * J;
                    const cplx* y = TG.data() + (R1.gi[q1] * U2 + R2.gi[q2]) * J;
                    ms.conv_acc(acc.data(), x, y, dbl * R1.w[q1] * R2.w[q2]);
                }
            cplx k = a(std::polar(r1, th1), std::polar(r2, th2)) * kSqrt2Pi;
            cplx* o = out.at(ang, i1, i2);
            for (std::size_t j = 0; j < J; ++j) o[j] = k * acc[j];
        }
    });
    return out;
}

// ---- constants ------------------------------------------------------------------------------

double m_kernel_sup(double mu, double gamma1, double e1, double e2, double M) {
    const double b = mu - e1, c = mu - e2;
    if (!(b + c > 1.0)) throw PreconditionError("m-kernel: exponents too small for integrability");
    const double L = 1e4;
    auto value = [&](double m) {
        auto r = oracles::adaptive_quad(
            [&](double m1) { return cplx(std::pow(1.0 + std::abs(m - m1), -b) * std::pow(1.0 + std::abs(m1), -c)); },
            -L, L, 1e-13, 1e-10, {0.0, m, -1.0, 1.0, m - 1.0, m + 1.0});
        // both tails: |m1| > L contributes at most 2 (L - |m|)^{1-b-c}/(b+c-1)
        double tail = 2.0 * std::pow(L - std::abs(m), 1.0 - b - c) / (b + c - 1.0);
        return std::pow(1.0 + std::abs(m), mu - gamma1) * (r.value.real() + tail);
    };
    // symmetric in m; grid sup on [0, M] then golden-section refinement around the best node
    const int n = 81;
    double best = -1.0, arg = 0.0;
    for (int i = 0; i < n; ++i) {
        double m = M * i / (n - 1);
        double v = value(m);
        if (v > best) best = v, arg = m;
    }
    double h = M / (n - 1);
    auto r = oracles::golden_section_max(value, std::max(0.0, arg - h), std::min(M, arg + h), 1e-6);
    return std::max(best, r.value);
}

double poly_growth_constant(const ComplexPoly& P) {
    const int d = P.degree();
    double best = 0.0;
    auto probe = [&](double m) { best = std::max(best, std::abs(P.at_im(m)) / std::pow(1.0 + std::abs(m), d)); };
    for (int i = -2000; i <= 2000; ++i) probe(i * 0.01);
    for (int i = 0; i <= 400; ++i) {
        double m = std::pow(10.0, 1.0 + i * 0.02);
        probe(m);
        probe(-m);
    }
    return best;
}

double sector_phi_sup(double nu) {
    double best = 0.0;
    for (int i = 0; i <= 600; ++i) {
        double x = std::pow(10.0, -3.0 + i * 0.01);
        for (int j = 0; j <= 400; ++j) {
            double r = j / 400.0;
            best = std::max(best, (1.0 + x * x) / (1.0 + x * x * r * r) * std::exp(nu * x * (r - 1.0)));
        }
    }
    return best;
}

double product_ratio_sup(double p, double q) {
    if (p > q + 1e-12) throw PreconditionError("product_ratio_sup: numerator power exceeds denominator power");
    double best = 0.0;
    const int n = 241;
    for (int i = 0; i < n; ++i) {
        double x = std::pow(10.0, -6.0 + 12.0 * i / (n - 1));
        for (int j = 0; j < n; ++j) {
            double y = std::pow(10.0, -6.0 + 12.0 * j / (n - 1));
            double lx = std::log(x * y);
            // x^p y^p / (1 + x^q y^q) in logs to stay finite at the grid corners
            double v = std::exp(p * lx - std::max(0.0, q * lx) - std::log1p(std::exp(-std::abs(q * lx))));
            best = std::max(best, v);
        }
    }
    return best;
}

namespace {
template <class Fn>
double h_grid_sup(int k, double x_max, int n, Fn&& value) {
    double best = 0.0;
    // h depends on x only through X = x^{2k}: log grid in X (plus X = 0)
    const double lo = -8.0, hi = 2.0 * k * std::log10(x_max);
    const int nx = 8 * n;
    for (int i = 0; i <= nx; ++i) {
        double X = (i == 0) ? 0.0 : std::pow(10.0, lo + (hi - lo) * i / nx);
        for (int j = 0; j <= n; ++j) {
            double r = static_cast<double>(j) / n;
            double h = (1.0 + X) / ((1.0 + r * r * X) * (1.0 + (1.0 - r) * (1.0 - r) * X));
            best = std::max(best, value(h, X));
        }
    }
    return best;
}
}  // namespace

double h_sup(int k, double x_max, int n) {
    return h_grid_sup(k, x_max, n, [](double h, double) { return h; });
}

double h_bound_ratio_sup(int k, double c, double x_max, int n) {
    return h_grid_sup(k, x_max, n, [c](double h, double X) { return h / (c * (1.0 + X) / (4.0 + X)); });
}

OperatorConstants b1_constants(const SpaceParams& sp, const Sigma& s, const ComplexPoly& P, double C1,
                               double gamma1) {
    check_b1_exponents(sp, s);
    if (gamma1 < P.degree()) throw PreconditionError("B1 constant: gamma1 must be at least deg P");
    if (!(sp.mu > P.degree() + 1.0)) throw PreconditionError("B1 constant: mu must exceed deg P + 1");
    OperatorConstants c;
    c.kernel_sup = m_kernel_sup(sp.mu, gamma1, 0.0, P.degree());
    const double k1 = sp.k1, k2 = sp.k2;
    double base = C1 * poly_growth_constant(P) * beta_fn(s[2] + 1.0, s[4] + 1.0 / k1 + 1.0) *
                  beta_fn(s[3] + 1.0, s[5] + 1.0 / k2 + 1.0) * c.kernel_sup;
    const double e1 = k1 * (s[0] + s[2] + s[4] + 1.0), e2 = k2 * (s[1] + s[3] + s[5] + 1.0);
    if (sp.domain == Domain::Sector) {
        c.C = base * sector_phi_sup(sp.nu1) * sector_phi_sup(sp.nu2) * product_ratio_sup(e1, sp.delta1 * k1);
    } else {
        // |tau|^{k(s1+s3+s5+1)} is the power left after dividing by |tau|
        if (e1 < 0.0 || e2 < 0.0) throw PreconditionError("B1 constant: negative radial power, unbounded near 0");
        c.C = base * std::pow(sp.rho1, e1) * std::pow(sp.rho2, e2);
    }
    return c;
}

OperatorConstants b2_constants(const SpaceParams& sp, const ComplexPoly& P1, const ComplexPoly& P2, double C1,
                               double gamma1) {
    const int d1 = P1.degree(), d2 = P2.degree();
    if (gamma1 < std::max(d1, d2)) throw PreconditionError("B2 constant: gamma1 must be at least max deg P");
    if (!(sp.mu > std::max(d1, d2) + 1.0)) throw PreconditionError("B2 constant: mu must exceed max deg P + 1");
    OperatorConstants c;
    c.kernel_sup = m_kernel_sup(sp.mu, gamma1, d1, d2);
    const double k1 = sp.k1, k2 = sp.k2;
    const double G = std::pow(gamma_fn(1.0 / k1) * gamma_fn(1.0 / k2), 2) / (gamma_fn(2.0 / k1) * gamma_fn(2.0 / k2));
    double base = C1 * poly_growth_constant(P1) * poly_growth_constant(P2) * G * c.kernel_sup;
    if (sp.domain == Domain::Sector) {
        if (sp.delta1 * sp.k1 != sp.delta2 * sp.k2 || sp.delta1 * sp.k1 < 1)
            throw PreconditionError("B2 constant (sector): need delta1 k1 = delta2 k2 >= 1");
        c.C = base * h_sup(sp.k1) * h_sup(sp.k2) * product_ratio_sup(1.0, sp.delta1 * k1);
    } else {
        c.C = base * sp.rho1 * sp.rho2;
    }
    return c;
}

}  // namespace borel_lab
