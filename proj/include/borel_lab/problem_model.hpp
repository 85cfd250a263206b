#pragma once
// Problem instance: orders, index tuples, polynomials and decay profiles, together with
// the arithmetic validation of every standing hypothesis and the profile evaluators.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "borel_lab/common.hpp"

namespace borel_lab {

// Polynomial with complex coefficients in ascending degree. Trailing zeros are trimmed,
// so the leading coefficient is nonzero unless the polynomial is zero.
class ComplexPoly {
public:
    ComplexPoly() : c_{cplx(0.0)} {}
    explicit ComplexPoly(CVec coeffs);
    static ComplexPoly constant(cplx a) { return ComplexPoly(CVec{a}); }

    int degree() const { return is_zero() ? 0 : static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0] == cplx(0.0); }
    const CVec& coeffs() const { return c_; }
    cplx leading() const { return c_.back(); }
    cplx operator()(cplx x) const;
    cplx at_im(double m) const { return (*this)(cplx(0.0, m)); }

private:
    CVec c_;
};

// Polynomial in X whose coefficients are polynomials in eps:  sum_j c_j(eps) X^j.
class EpsPoly {
public:
    EpsPoly() : c_{ComplexPoly()} {}
    explicit EpsPoly(std::vector<ComplexPoly> coeffs);
    int degree() const;  // degree in X
    ComplexPoly at(cplx eps) const;
    cplx operator()(cplx eps, cplx x) const { return at(eps)(x); }
    const std::vector<ComplexPoly>& coeffs() const { return c_; }

private:
    std::vector<ComplexPoly> c_;
};

// eps-dependence of a profile: polynomial amplitude with a declared uniform bound.
struct ProfileAmplitude {
    std::string name;
    ComplexPoly amplitude;
    double sup_bound = 1.0;
    cplx operator()(cplx eps) const { return amplitude(eps); }
};

struct IndexTuple {
    int l1 = 0, l2 = 0, l3 = 0, l4 = 0;
    int Delta = 0;
    int d_k1 = 0, d_k2 = 0;  // filled by validate_spec / derive_tuple_shifts
    ProfileAmplitude amplitude;
};

struct ProblemSpec {
    std::string name;
    int k1 = 2, k2 = 1, delta1 = 1, delta2 = 2, Delta0 = 4;
    double eps0 = 0.5;
    double beta = 1.0, mu = 2.0;
    std::vector<IndexTuple> I;
    ComplexPoly Q, R;
    std::vector<ComplexPoly> R_l;  // one per tuple
    EpsPoly P1, P2;
    std::vector<int> N1, N2;
    std::map<std::pair<int, int>, ProfileAmplitude> forcing;

    // True when Q, R, every R_l and the X-part of P1, P2 are constants; the m-dependence
    // of the Borel solution then stays in the span of convolution powers of the profile.
    bool has_constant_symbols() const;
};

// ---- validation -----------------------------------------------------------------------

struct Finding {
    std::string id;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<Finding> findings;
    std::vector<std::pair<int, int>> tuple_shifts;  // (d_k1, d_k2) per tuple
    bool valid() const;
    const Finding* find(const std::string& id) const;
};

// One finding per hypothesis; never throws on mathematically invalid instances. Only
// malformed input (empty polynomial, eps0 <= 0, empty N sets) raises ConfigError.
ValidationReport validate_spec(const ProblemSpec& spec);

// d_k1 = l1 - l2 (k1+1), d_k2 = l3 - l4 (k2+1) (no positivity check).
std::pair<int, int> tuple_shifts(const ProblemSpec& spec, const IndexTuple& t);

// Result of the imaginary-axis root check: min over R of |P(im)|^2 after refinement.
struct AxisCheck {
    bool nonvanishing = false;
    double min_abs2 = 0.0;
    double argmin = 0.0;
    double extent = 0.0;
};
AxisCheck check_no_imaginary_axis_roots(const ComplexPoly& p);

// ---- derived quantities ---------------------------------------------------------------

// Closed angular interval [start, start + width] (width in [0, 2pi]).
struct AngularInterval {
    double start = 0.0;
    double width = 0.0;
    double center() const { return start + 0.5 * width; }
    bool contains(double a, double slack = 0.0) const;
    // Smallest angular distance from a to the interval (0 if inside).
    double distance(double a) const;
};
// Minimal arc containing the given angles.
AngularInterval angular_hull(std::vector<double> angles);

struct DerivedReport {
    double r_QR = 0.0;
    AngularInterval arg_hull;
    AngularInterval sector_SQR;
    int Delta0 = 0;
    double m_extent = 0.0;
};
DerivedReport derived_quantities(const ProblemSpec& spec, double m_grid_extent = 0.0);

// ---- profiles -------------------------------------------------------------------------

// (1+|m|)^{-mu} e^{-beta|m|}
double base_profile(double m, double beta, double mu);

struct ProfileValues {
    CVec C_l;                                // per tuple
    std::map<std::pair<int, int>, cplx> F;   // per (n1, n2)
    cplx Psi{0.0, 0.0};
};
ProfileValues eval_profiles(const ProblemSpec& spec, double m, cplx eps, cplx tau1 = 0.0, cplx tau2 = 0.0);

// K~ sum rho1^{n1-1}/Gamma(n1/k1) rho2^{n2-1}/Gamma(n2/k2), K~ = max forcing sup bound.
double c_psi(const ProblemSpec& spec, double rho1, double rho2);
// max_l sup bound of the coefficient amplitudes (0 if I is empty).
double k_coeff(const ProblemSpec& spec);

// Checks |amplitude(eps)| <= sup_bound on a polar grid of the closed disc |eps| <= eps0.
bool amplitude_bound_holds(const ProfileAmplitude& a, double eps0, double* observed = nullptr);

// ---- serialization and built-ins ------------------------------------------------------

ProblemSpec spec_from_json_text(const std::string& text);
ProblemSpec load_spec_file(const std::string& path);
std::string spec_to_json_text(const ProblemSpec& spec);

// "paper-remark", "scenario-a", "scenario-b"; throws ConfigError for unknown names.
ProblemSpec builtin_spec(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace borel_lab
