#pragma once
// The three weighted spaces of functions of (tau1, tau2, m) on polar grids, their norms,
// and the two integral operators the fixed-point map is assembled from.
//
// Representability: every s-integration in B1/B2 runs along the segment [0, tau^k], so
// s^{1/k} keeps the argument of tau. A function known on the rays of a fixed angle pair
// therefore determines B1(f), B2(f, g) on the same rays; polar grids are closed under
// both operators and each angle pair is an independent radial problem.

#include <array>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "borel_lab/common.hpp"
#include "borel_lab/fourier_layer.hpp"
#include "borel_lab/problem_model.hpp"
#include "borel_lab/quadrature.hpp"

namespace borel_lab {

enum class Domain { Disc, Sector, Intersection };
const char* domain_name(Domain d);

struct SpaceParams {
    Domain domain = Domain::Disc;
    int k1 = 2, k2 = 1;
    int delta1 = 1, delta2 = 2;   // only the sector exponent conditions use these
    double beta = 1.0, mu = 2.0;
    double rho1 = 1.0, rho2 = 1.0;  // disc and intersection
    double nu1 = 1.0, nu2 = 1.0;    // sector
};

// Factor multiplying the m-norm of f(tau1, tau2, .) in the norm of the space:
// 1/(r1 r2) on discs, (1+r1^{2k1})(1+r2^{2k2})/(r1 r2) e^{-nu1 r1^k1 - nu2 r2^k2} on sectors.
double tau_weight(const SpaceParams& sp, double r1, double r2);

// Angle pairs (arg tau1, arg tau2) crossed with two radial panel grids.
class PolarGrid {
public:
    PolarGrid(std::vector<std::pair<double, double>> angles, quad::PanelGrid r1, quad::PanelGrid r2);
    const std::vector<std::pair<double, double>>& angles() const { return angles_; }
    const quad::PanelGrid& r1() const { return r1_; }
    const quad::PanelGrid& r2() const { return r2_; }
    std::size_t n_angles() const { return angles_.size(); }
    std::size_t n1() const { return r1_.size(); }
    std::size_t n2() const { return r2_.size(); }

private:
    std::vector<std::pair<double, double>> angles_;
    quad::PanelGrid r1_, r2_;
};
using PolarGridPtr = std::shared_ptr<const PolarGrid>;

// Breakpoints 0 < ... < R: panels of width at most max_panel, refined geometrically
// towards 0 (first panel R0), with the extra points inserted.
std::vector<double> radial_breaks(double R, double max_panel, double first_panel, std::vector<double> extra = {});

// Values on a polar grid: for each (angle pair, r1 node, r2 node) a vector in the
// m-carrier.
class BorelGridFn {
public:
    BorelGridFn(SpaceParams sp, PolarGridPtr grid, MSpacePtr ms);
    // f(tau1, tau2, out) writes the carrier coordinates at the given point.
    static BorelGridFn from_function(SpaceParams sp, PolarGridPtr grid, MSpacePtr ms,
                                     const std::function<void(cplx, cplx, cplx*)>& f);

    const SpaceParams& space() const { return sp_; }
    const PolarGrid& grid() const { return *grid_; }
    const PolarGridPtr& grid_ptr() const { return grid_; }
    const MSpace& ms() const { return *ms_; }
    const MSpacePtr& ms_ptr() const { return ms_; }
    std::size_t dim() const { return dim_; }

    cplx* at(std::size_t a, std::size_t i1, std::size_t i2) { return data_.data() + offset(a, i1, i2); }
    const cplx* at(std::size_t a, std::size_t i1, std::size_t i2) const { return data_.data() + offset(a, i1, i2); }
    CVec& data() { return data_; }
    const CVec& data() const { return data_; }
    cplx tau1(std::size_t a, std::size_t i1) const;
    cplx tau2(std::size_t a, std::size_t i2) const;

    // Panel interpolation in both radii on angle pair a.
    void eval(std::size_t a, double r1, double r2, cplx* out) const;
    bool same_layout(const BorelGridFn& o) const;

    BorelGridFn& operator+=(const BorelGridFn& o);
    BorelGridFn& operator-=(const BorelGridFn& o);
    BorelGridFn& operator*=(cplx s);

private:
    std::size_t offset(std::size_t a, std::size_t i1, std::size_t i2) const {
        return ((a * grid_->n1() + i1) * grid_->n2() + i2) * dim_;
    }
    SpaceParams sp_;
    PolarGridPtr grid_;
    MSpacePtr ms_;
    std::size_t dim_;
    CVec data_;
};

// sup over nodes and the outer break radius of tau_weight * (m-norm).
double weighted_norm(const BorelGridFn& f);

using TauKernel = std::function<cplx(cplx, cplx)>;
using Sigma = std::array<double, 6>;

// Throws PreconditionError unless sigma_j > -1 and the exponent conditions of the
// space hold (discs: k1 s1 + s3 + s5 + 1/k1 >= 0 and the k2 analogue; sectors:
// k1(s1+s3+s5+1) = k2(s2+s4+s6+1), delta1 k1 = delta2 k2, s1+s3+s5+1 <= delta1).
void check_b1_exponents(const SpaceParams& sp, const Sigma& s);

// a(tau) int h(m-m1) tau1^{s1 k1} tau2^{s2 k2} int int (tau1^k1 - s1)^{s3} (tau2^k2 - s2)^{s4}
//   s1^{s5} s2^{s6} P(i m1) f(s1^{1/k1}, s2^{1/k2}, m1) ds2 ds1 dm1,   h = h_amp * phi0.
// Radial integrals: s = tau^k x, the x-range split at 1/2 and the endpoint powers
// absorbed by x = y^k (resp. 1-x = y^k) into Gauss-Jacobi weights; quad_n nodes per half.
BorelGridFn apply_B1(const BorelGridFn& f, const Sigma& sigma, const ComplexPoly& P, cplx h_amp,
                     const TauKernel& a, int quad_n = 12);

// a(tau) tau1^k1 tau2^k2 int int int P1(eps, i(m-m1)) f((tau1^k1-s1)^{1/k1}, ., m-m1)
//   P2(eps, i m1) g(s1^{1/k1}, ., m1) / ((tau1^k1-s1) s1 (tau2^k2-s2) s2) dm1 ds2 ds1.
// With s = tau^k x the measure becomes dx/(x(1-x)) per variable; the same split and
// power substitution leaves a smooth integrand for Gauss-Legendre nodes.
BorelGridFn apply_B2(const BorelGridFn& f, const BorelGridFn& g, const EpsPoly& P1, const EpsPoly& P2, cplx eps,
                     const TauKernel& a, int quad_n = 12);

// ---- constants ----------------------------------------------------------------------

// sup over m of int (1+|m|)^{mu-gamma1} / ((1+|m-m1|)^{mu-e1} (1+|m1|)^{mu-e2}) dm1,
// by oracle quadrature in m1 and a grid sup over m in [-M, M] refined by golden section.
double m_kernel_sup(double mu, double gamma1, double e1, double e2, double M = 20.0);
// sup over m of |P(im)| / (1+|m|)^deg P.
double poly_growth_constant(const ComplexPoly& P);
// sup over x > 0, r in [0, 1] of (1+x^2)/(1+x^2 r^2) exp(nu x (r-1)).
double sector_phi_sup(double nu);
// sup over x, y >= 0 of x^p y^p / (1 + x^q y^q) on a log grid up to 1e6 (p <= q).
double product_ratio_sup(double p, double q);
// h(r, x) = (1+x^{2k}) / ((1+r^2 x^{2k})(1+(1-r)^2 x^{2k})) on [0,1] x [0, x_max], grid sups of
// h itself and of h / (c (1+x^{2k})/(4+x^{2k})). The partial fractions of h give c = 4
// (at x = 0, h = 1 for every r, so c = 3 is too small).
double h_sup(int k, double x_max = 1e3, int n = 400);
double h_bound_ratio_sup(int k, double c, double x_max = 1e3, int n = 400);

struct OperatorConstants {
    double C = 0.0;           // C~1 (per unit K) or C~2
    double kernel_sup = 0.0;  // the m-integral sup
};
// C1: sup of |a|(1+|m|)^gamma1 (times 1+|tau1|^{d1k1}|tau2|^{d2k2} on sectors).
OperatorConstants b1_constants(const SpaceParams& sp, const Sigma& s, const ComplexPoly& P, double C1,
                               double gamma1);
OperatorConstants b2_constants(const SpaceParams& sp, const ComplexPoly& P1, const ComplexPoly& P2, double C1,
                               double gamma1);

}  // namespace borel_lab
