#pragma once
// The m-line: a composite Gauss-Legendre grid, profiles living on it, the E_(beta,mu)
// norm, inverse Fourier transform and m-convolution; plus the two concrete carriers of
// the m-dependence used by the solver (grid values, or coordinates in the basis of
// convolution powers of the base profile).

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "borel_lab/common.hpp"
#include "borel_lab/problem_model.hpp"
#include "borel_lab/quadrature.hpp"

namespace borel_lab {

class FourierGrid {
public:
    // Symmetric grid on [-M_cut, M_cut]; breakpoints 0, +-2^-j (j = 1..dyadic_levels), +-1
    // and then steps of at most max_panel. M_cut = 0 selects max(40/beta, 40), enlarged
    // until e^{-beta M}(1+M)^{-mu} <= tail_tol.
    static std::shared_ptr<const FourierGrid> make(double beta, double mu, double M_cut = 0.0, int order = 16,
                                                   double max_panel = 2.0, double tail_tol = 1e-12,
                                                   int dyadic_levels = 4);

    const quad::PanelGrid& panels() const { return panels_; }
    const std::vector<double>& nodes() const { return panels_.nodes(); }
    const std::vector<double>& weights() const { return panels_.weights(); }
    std::size_t size() const { return panels_.size(); }
    double M_cut() const { return M_cut_; }
    double tail_tol() const { return tail_tol_; }
    double beta() const { return beta_; }
    double mu() const { return mu_; }
    // Off-grid value of grid data (panel-local interpolation); zero outside [-M, M].
    cplx interpolate(const cplx* values, double m) const;
    // Grid nodes plus breakpoints: where sup-type norms are sampled.
    const std::vector<double>& norm_points() const { return norm_points_; }

private:
    quad::PanelGrid panels_;
    double M_cut_ = 0.0, tail_tol_ = 0.0, beta_ = 1.0, mu_ = 1.0;
    std::vector<double> norm_points_;
};
using FourierGridPtr = std::shared_ptr<const FourierGrid>;

// A function of m: values on a grid, optionally backed by a closed form that is used
// for every off-grid evaluation.
class ProfileFn {
public:
    ProfileFn(FourierGridPtr grid, CVec values);
    ProfileFn(FourierGridPtr grid, std::string tag, std::function<cplx(double)> exact);

    cplx operator()(double m) const;
    const CVec& values() const { return values_; }
    const FourierGrid& grid() const { return *grid_; }
    const FourierGridPtr& grid_ptr() const { return grid_; }
    bool closed_form() const { return static_cast<bool>(exact_); }
    const std::string& tag() const { return tag_; }

private:
    FourierGridPtr grid_;
    CVec values_;
    std::string tag_;
    std::function<cplx(double)> exact_;
};

// sup over the grid nodes and breakpoints of (1+|m|)^mu e^{beta|m|} |h(m)|.
double e_beta_mu_norm(const ProfileFn& h, double beta, double mu);
double e_beta_mu_norm(const FourierGrid& g, const cplx* values, double beta, double mu);

// (1/sqrt(2 pi)) int h(m) e^{ixm} dm by the grid rule; |Im x| must be < beta.
cplx inverse_fourier(const ProfileFn& h, cplx x, double beta);
cplx inverse_fourier(const FourierGrid& g, const cplx* values, cplx x, double beta);
// Truncation bound for inverse_fourier of a profile with E-norm `norm` at x.
double inverse_fourier_tail(const FourierGrid& g, double norm, cplx x, double beta, double mu);

// psi(m) = (1/sqrt(2 pi)) int h(m - m1) g(m1) dm1 at every grid node; the m1-integral is
// split at the grid breakpoints and at their reflections through m, so both factors are
// smooth on every sub-panel.
ProfileFn convolve_m(const ProfileFn& h, const ProfileFn& g);

// ---- carriers of the m-dependence for the solver --------------------------------------

// Multiplier m -> s(m); `constant` is set when s does not depend on m.
struct Symbol {
    std::function<cplx(double)> f;
    std::optional<cplx> constant;
    static Symbol scalar(cplx c);
    static Symbol poly_at_im(const ComplexPoly& p);  // m -> p(im)
    cplx operator()(double m) const { return constant ? *constant : f(m); }
};

class MSpace {
public:
    virtual ~MSpace() = default;
    virtual std::string kind() const = 0;
    virtual std::size_t dim() const = 0;
    // amp * phi0, phi0 the base profile (1+|m|)^{-mu} e^{-beta|m|}.
    virtual CVec profile(cplx amp) const = 0;
    // out += w * (1/sqrt(2 pi)) int a(m - m1) b(m1) dm1
    virtual void conv_acc(cplx* out, const cplx* a, const cplx* b, cplx w) const = 0;
    // out += w * (1/sqrt(2 pi)) int phi0(m - m1) a(m1) dm1
    virtual void conv_profile_acc(cplx* out, const cplx* a, cplx w) const = 0;
    // a(m) *= s(m)
    virtual void apply_symbol(cplx* a, const Symbol& s) const = 0;
    virtual cplx inverse_fourier(const cplx* a, cplx z) const = 0;
    virtual cplx value_at(const cplx* a, double m) const = 0;
    // E_(beta, mu) norm of the represented function.
    virtual double norm(const cplx* a) const = 0;
    // True if apply_symbol accepts m-dependent symbols.
    virtual bool accepts_symbols() const = 0;

    const FourierGrid& grid() const { return *grid_; }
    const FourierGridPtr& grid_ptr() const { return grid_; }
    double beta() const { return grid_->beta(); }
    double mu() const { return grid_->mu(); }

protected:
    explicit MSpace(FourierGridPtr g) : grid_(std::move(g)) {}
    FourierGridPtr grid_;
};
using MSpacePtr = std::shared_ptr<const MSpace>;

// Values at the grid nodes.
class GridM : public MSpace {
public:
    explicit GridM(FourierGridPtr g);
    std::string kind() const override { return "grid"; }
    std::size_t dim() const override { return grid_->size(); }
    CVec profile(cplx amp) const override;
    void conv_acc(cplx* out, const cplx* a, const cplx* b, cplx w) const override;
    void conv_profile_acc(cplx* out, const cplx* a, cplx w) const override;
    void apply_symbol(cplx* a, const Symbol& s) const override;
    cplx inverse_fourier(const cplx* a, cplx z) const override;
    cplx value_at(const cplx* a, double m) const override;
    double norm(const cplx* a) const override;
    bool accepts_symbols() const override { return true; }

private:
    // per output node: sub-panel nodes m1 and weights (already divided by sqrt(2 pi))
    struct Stencil {
        std::vector<double> m1, w;
    };
    std::vector<Stencil> stencils_;
    CVec phi0_;
};

// Coordinates c_1..c_J in the basis e_j = phi0^{*j} / (sqrt(2 pi))^{j-1}, for which
// (1/sqrt(2 pi)) e_i * e_j = e_{i+j} and F^{-1}(e_j) = F^{-1}(phi0)^j. Convolution is an
// index shift (terms beyond J are dropped); only constant symbols are admissible.
class PowerM : public MSpace {
public:
    PowerM(FourierGridPtr g, int J);
    std::string kind() const override { return "power"; }
    std::size_t dim() const override { return static_cast<std::size_t>(J_); }
    CVec profile(cplx amp) const override;
    void conv_acc(cplx* out, const cplx* a, const cplx* b, cplx w) const override;
    void conv_profile_acc(cplx* out, const cplx* a, cplx w) const override;
    void apply_symbol(cplx* a, const Symbol& s) const override;
    cplx inverse_fourier(const cplx* a, cplx z) const override;
    cplx value_at(const cplx* a, double m) const override;
    double norm(const cplx* a) const override;
    bool accepts_symbols() const override { return false; }

    // e_j on the grid nodes (j = 1..J), from repeated grid convolution.
    const CVec& basis_values(int j) const { return basis_[j - 1]; }
    // F^{-1}(phi0)(z) by the grid rule.
    cplx f0(cplx z) const;

private:
    int J_;
    std::vector<CVec> basis_;
    CVec wbasis_;
};

// GridM when any symbol depends on m, PowerM(J) otherwise.
MSpacePtr make_mspace(const ProblemSpec& spec, FourierGridPtr grid, int J = 16);

}  // namespace borel_lab
