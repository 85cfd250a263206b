#include "borel_lab/fourier_layer.hpp"

#include <algorithm>
#include <cmath>

namespace borel_lab {

namespace {

double weight(double m, double beta, double mu) {
    double a = std::abs(m);
    return std::pow(1.0 + a, mu) * std::exp(beta * a);
}

// Sub-panels for the convolution integral at output m: grid breakpoints and their
// reflections through m, restricted to where both factors live.
std::vector<double> conv_breaks(const FourierGrid& g, double m) {
    const auto& b = g.panels().breaks();
    double M = g.M_cut();
    double lo = std::max(-M, m - M), hi = std::min(M, m + M);
    std::vector<double> cuts;
    cuts.reserve(2 * b.size() + 2);
    cuts.push_back(lo);
    cuts.push_back(hi);
    for (double x : b) {
        if (x > lo && x < hi) cuts.push_back(x);
        double y = m - x;
        if (y > lo && y < hi) cuts.push_back(y);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out;
    for (double x : cuts)
        if (out.empty() || x - out.back() > 1e-13 * (1.0 + std::abs(x))) out.push_back(x);
    if (out.size() == 1) out.push_back(hi);
    return out;
}

template <class F>
void for_conv_nodes(const FourierGrid& g, double m, F&& fn) {
    auto cuts = conv_breaks(g, m);
    const auto& gl = quad::gauss_legendre(g.panels().order());
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        double c = 0.5 * (cuts[p] + cuts[p + 1]), h = 0.5 * (cuts[p + 1] - cuts[p]);
        if (h <= 0.0) continue;
        for (std::size_t j = 0; j < gl.x.size(); ++j) fn(c + h * gl.x[j], h * gl.w[j] / kSqrt2Pi);
    }
}

}  // namespace

// ---- grid ---------------------------------------------------------------------------

std::shared_ptr<const FourierGrid> FourierGrid::make(double beta, double mu, double M_cut, int order,
                                                     double max_panel, double tail_tol, int dyadic_levels) {
    if (!(beta > 0.0) || !(mu > 0.0)) throw PreconditionError("FourierGrid: beta and mu must be positive");
    if (!(max_panel > 0.0) || !(tail_tol > 0.0)) throw PreconditionError("FourierGrid: bad panel width or tolerance");
    double M = M_cut > 0.0 ? M_cut : std::max(40.0 / beta, 40.0);
    if (M_cut <= 0.0)
        while (std::exp(-beta * M) * std::pow(1.0 + M, -mu) > tail_tol) M *= 1.25;
    M = std::max(M, 1.0 + 1e-9);
    std::vector<double> pos;
    for (int j = dyadic_levels; j >= 1; --j) pos.push_back(std::ldexp(1.0, -j));
    pos.push_back(1.0);
    if (M > 1.0) {
        int n = static_cast<int>(std::ceil((M - 1.0) / max_panel - 1e-12));
        for (int i = 1; i <= n; ++i) pos.push_back(1.0 + (M - 1.0) * i / n);
    }
    std::vector<double> br;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) br.push_back(-*it);
    br.push_back(0.0);
    br.insert(br.end(), pos.begin(), pos.end());

    auto g = std::shared_ptr<FourierGrid>(new FourierGrid());
    g->panels_ = quad::PanelGrid(br, order);
    g->M_cut_ = M;
    g->tail_tol_ = tail_tol;
    g->beta_ = beta;
    g->mu_ = mu;
    g->norm_points_ = g->panels_.nodes();
    g->norm_points_.insert(g->norm_points_.end(), br.begin(), br.end());
    std::sort(g->norm_points_.begin(), g->norm_points_.end());
    return g;
}

cplx FourierGrid::interpolate(const cplx* values, double m) const {
    if (m < -M_cut_ || m > M_cut_) return 0.0;
    return panels_.interpolate(values, m);
}

// ---- profiles -----------------------------------------------------------------------

ProfileFn::ProfileFn(FourierGridPtr grid, CVec values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw UsageError("ProfileFn: null grid");
    if (values_.size() != grid_->size()) throw UsageError("ProfileFn: value count does not match the grid");
}

ProfileFn::ProfileFn(FourierGridPtr grid, std::string tag, std::function<cplx(double)> exact)
    : grid_(std::move(grid)), tag_(std::move(tag)), exact_(std::move(exact)) {
    if (!grid_) throw UsageError("ProfileFn: null grid");
    values_.resize(grid_->size());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = exact_(grid_->nodes()[i]);
}

cplx ProfileFn::operator()(double m) const {
    if (exact_) return exact_(m);
    return grid_->interpolate(values_.data(), m);
}

double e_beta_mu_norm(const FourierGrid& g, const cplx* values, double beta, double mu) {
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sup = std::max(sup, weight(g.nodes()[i], beta, mu) * std::abs(values[i]));
    for (double b : g.panels().breaks())
        sup = std::max(sup, weight(b, beta, mu) * std::abs(g.interpolate(values, b)));
    return sup;
}

double e_beta_mu_norm(const ProfileFn& h, double beta, double mu) {
    if (!h.closed_form()) return e_beta_mu_norm(h.grid(), h.values().data(), beta, mu);
    double sup = 0.0;
    for (double m : h.grid().norm_points()) sup = std::max(sup, weight(m, beta, mu) * std::abs(h(m)));
    return sup;
}

cplx inverse_fourier(const FourierGrid& g, const cplx* values, cplx x, double beta) {
    if (!(std::abs(x.imag()) < beta)) throw DomainError("inverse_fourier: x outside the strip |Im x| < beta");
    const auto& m = g.nodes();
    const auto& w = g.weights();
    CVec terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) terms[i] = w[i] * values[i] * std::exp(cplx(0.0, 1.0) * x * m[i]);
    return quad::pairwise_sum(terms.data(), terms.size()) / kSqrt2Pi;
}

cplx inverse_fourier(const ProfileFn& h, cplx x, double beta) {
    return inverse_fourier(h.grid(), h.values().data(), x, beta);
}

double inverse_fourier_tail(const FourierGrid& g, double norm, cplx x, double beta, double mu) {
    double gap = beta - std::abs(x.imag());
    if (!(gap > 0.0)) throw DomainError("inverse_fourier_tail: x outside the strip");
    double M = g.M_cut();
    return 2.0 * norm * std::pow(1.0 + M, -mu) * std::exp(-gap * M) / (gap * kSqrt2Pi);
}

ProfileFn convolve_m(const ProfileFn& h, const ProfileFn& g) {
    if (h.grid_ptr() != g.grid_ptr()) throw UsageError("convolve_m: profiles live on different grids");
    const FourierGrid& G = h.grid();
    CVec out(G.size());
    std::vector<cplx> terms;
    for (std::size_t i = 0; i < G.size(); ++i) {
        double m = G.nodes()[i];
        terms.clear();
        for_conv_nodes(G, m, [&](double m1, double w) { terms.push_back(w * h(m - m1) * g(m1)); });
        out[i] = quad::pairwise_sum(terms.data(), terms.size());
    }
    return ProfileFn(h.grid_ptr(), std::move(out));
}

// ---- symbols ------------------------------------------------------------------------

Symbol Symbol::scalar(cplx c) {
    Symbol s;
    s.constant = c;
    s.f = [c](double) { return c; };
    return s;
}

Symbol Symbol::poly_at_im(const ComplexPoly& p) {
    if (p.degree() == 0) return scalar(p.coeffs()[0]);
    Symbol s;
    s.f = [p](double m) { return p.at_im(m); };
    return s;
}

// ---- GridM --------------------------------------------------------------------------

GridM::GridM(FourierGridPtr g) : MSpace(std::move(g)) {
    const auto& G = *grid_;
    phi0_.resize(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) phi0_[i] = base_profile(G.nodes()[i], G.beta(), G.mu());
    stencils_.resize(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) {
        double m = G.nodes()[i];
        for_conv_nodes(G, m, [&](double m1, double w) {
            stencils_[i].m1.push_back(m1);
            stencils_[i].w.push_back(w);
        });
    }
}

CVec GridM::profile(cplx amp) const {
    CVec v(phi0_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = amp * phi0_[i];
    return v;
}

void GridM::conv_acc(cplx* out, const cplx* a, const cplx* b, cplx w) const {
    const auto& G = *grid_;
    for (std::size_t i = 0; i < G.size(); ++i) {
        const auto& st = stencils_[i];
        double m = G.nodes()[i];
        cplx s = 0.0;
        for (std::size_t k = 0; k < st.m1.size(); ++k)
            s += st.w[k] * G.interpolate(a, m - st.m1[k]) * G.interpolate(b, st.m1[k]);
        out[i] += w * s;
    }
}

void GridM::conv_profile_acc(cplx* out, const cplx* a, cplx w) const {
    const auto& G = *grid_;
    for (std::size_t i = 0; i < G.size(); ++i) {
        const auto& st = stencils_[i];
        double m = G.nodes()[i];
        cplx s = 0.0;
        for (std::size_t k = 0; k < st.m1.size(); ++k)
            s += st.w[k] * base_profile(m - st.m1[k], G.beta(), G.mu()) * G.interpolate(a, st.m1[k]);
        out[i] += w * s;
    }
}

void GridM::apply_symbol(cplx* a, const Symbol& s) const {
    if (s.constant) {
        for (std::size_t i = 0; i < dim(); ++i) a[i] *= *s.constant;
        return;
    }
    for (std::size_t i = 0; i < dim(); ++i) a[i] *= s.f(grid_->nodes()[i]);
}

cplx GridM::inverse_fourier(const cplx* a, cplx z) const { return borel_lab::inverse_fourier(*grid_, a, z, beta()); }

cplx GridM::value_at(const cplx* a, double m) const { return grid_->interpolate(a, m); }

double GridM::norm(const cplx* a) const { return e_beta_mu_norm(*grid_, a, beta(), mu()); }

// ---- PowerM -------------------------------------------------------------------------

PowerM::PowerM(FourierGridPtr g, int J) : MSpace(std::move(g)), J_(J) {
    if (J < 1) throw UsageError("PowerM: J must be positive");
    double b = grid_->beta(), mu = grid_->mu();
    ProfileFn phi(grid_, "phi0", [b, mu](double m) { return cplx(base_profile(m, b, mu)); });
    basis_.push_back(phi.values());
    ProfileFn cur = phi;
    for (int j = 2; j <= J; ++j) {
        cur = convolve_m(cur, phi);
        basis_.push_back(cur.values());
    }
    // weighted basis values at the nodes and breakpoints, point-major
    const auto& G = *grid_;
    for (std::size_t i = 0; i < G.size(); ++i)
        for (int j = 0; j < J_; ++j) wbasis_.push_back(weight(G.nodes()[i], b, mu) * basis_[j][i]);
    for (double x : G.panels().breaks())
        for (int j = 0; j < J_; ++j) wbasis_.push_back(weight(x, b, mu) * G.interpolate(basis_[j].data(), x));
}

CVec PowerM::profile(cplx amp) const {
    CVec v(J_, 0.0);
    v[0] = amp;
    return v;
}

void PowerM::conv_acc(cplx* out, const cplx* a, const cplx* b, cplx w) const {
    // e_{i+1} * e_{j+1} -> e_{i+j+2}, index i+j+1
    for (int i = 0; i + 1 < J_; ++i) {
        if (a[i] == 0.0) continue;
        cplx ai = w * a[i];
        for (int j = 0; i + j + 1 < J_; ++j) out[i + j + 1] += ai * b[j];
    }
}

void PowerM::conv_profile_acc(cplx* out, const cplx* a, cplx w) const {
    for (int i = 0; i + 1 < J_; ++i) out[i + 1] += w * a[i];
}

void PowerM::apply_symbol(cplx* a, const Symbol& s) const {
    if (!s.constant) throw UsageError("PowerM: m-dependent symbols need the grid carrier");
    for (int i = 0; i < J_; ++i) a[i] *= *s.constant;
}

cplx PowerM::f0(cplx z) const { return borel_lab::inverse_fourier(*grid_, basis_[0].data(), z, beta()); }

cplx PowerM::inverse_fourier(const cplx* a, cplx z) const {
    cplx f = f0(z);
    cplx s = 0.0;
    for (int j = J_ - 1; j >= 0; --j) s = (s + a[j]) * f;
    return s;
}

cplx PowerM::value_at(const cplx* a, double m) const {
    cplx s = 0.0;
    for (int j = 0; j < J_; ++j)
        if (a[j] != 0.0) s += a[j] * grid_->interpolate(basis_[j].data(), m);
    return s;
}

double PowerM::norm(const cplx* a) const {
    double sup = 0.0;
    const std::size_t n = wbasis_.size() / J_;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* w = wbasis_.data() + i * J_;
        cplx s = 0.0;
        for (int j = 0; j < J_; ++j) s += a[j] * w[j];
        sup = std::max(sup, std::abs(s));
    }
    return sup;
}

MSpacePtr make_mspace(const ProblemSpec& spec, FourierGridPtr grid, int J) {
    if (spec.has_constant_symbols()) return std::make_shared<PowerM>(std::move(grid), J);
    return std::make_shared<GridM>(std::move(grid));
}

}  // namespace borel_lab
