#pragma once
// Reference implementations used by the tests and by the verification modes of the
// numerical modules. They favour robustness over speed and share no code with the
// fixed-grid machinery they are used to check.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "borel_lab/common.hpp"

namespace borel_lab::oracles {

struct QuadResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    long evaluations = 0;
};

// Raised when the refinement budget runs out; carries the best partial result.
struct QuadConvergenceError : ConvergenceError {
    QuadConvergenceError(const std::string& w, QuadResult p) : ConvergenceError(w), partial(p) {}
    QuadResult partial;
};

using RealToComplex = std::function<cplx(double)>;

// Global adaptive Gauss-Kronrod (7/15) with panel splitting. Stops once the summed
// local error estimates fall below max(abs_tol, rel_tol*|I|). Interior breakpoints
// (kinks of the integrand) may be supplied to seed the panel list.
QuadResult adaptive_quad(const RealToComplex& f, double a, double b, double abs_tol,
                         double rel_tol = 0.0, const std::vector<double>& breakpoints = {},
                         long max_evals = 4'000'000);

// Integral of f over the ray r*e^{i d}, r in [0, inf): f is called with the complex
// point u and the integrand includes the Jacobian e^{i d}. The ray is truncated once a
// doubling panel contributes less than a quarter of the tolerance.
QuadResult adaptive_quad_ray(const std::function<cplx(cplx)>& f, double d, double abs_tol,
                             double rel_tol = 0.0, double r_start = 1.0);

// Double-exponential rule for integrands with algebraic endpoint singularities. The
// callback receives (x, distance-to-nearest-endpoint with sign convention of Boost:
// x - a near a, x - b near b) so singular factors can be evaluated without cancellation.
QuadResult tanh_sinh(const std::function<cplx(double, double)>& f, double a, double b, double rel_tol);

struct VecQuadResult {
    CVec value;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;
};

// Vector-valued double-exponential rule on a finite [a, b] with step halving until two
// consecutive levels agree to max(abs_tol, rel_tol |I|_inf). f(x, xc, out) receives the
// signed distance xc to the nearest endpoint as in tanh_sinh.
VecQuadResult tanh_sinh_vec(const std::function<void(double, double, cplx*)>& f, std::size_t dim, double a,
                            double b, double rel_tol, double abs_tol = 0.0, int max_level = 9);

// ---- exact monomial calculus -------------------------------------------------------

// One factor of an operator word: multiplication by T^power, or d/dT.
struct OpFactor {
    enum class Kind { MulT, Deriv } kind;
    int power = 0;
    static OpFactor mul_t(int p) { return {Kind::MulT, p}; }
    static OpFactor deriv() { return {Kind::Deriv, 0}; }
};
using OpWord = std::vector<OpFactor>;  // product in written order: word[0] acts last

struct Monomial {
    std::int64_t coeff = 0;
    int exponent = 0;
    bool operator==(const Monomial&) const = default;
};

// Applies the word to coeff*T^j with exact integer arithmetic (throws on overflow).
Monomial symbolic_monomial_apply(const OpWord& word, int j, std::int64_t coeff = 1);

// (T^{k+1} d/dT)^power as a word.
OpWord irregular_power(int k, int power);
// T^{m(k+1)} (d/dT)^m as a word.
OpWord lifted_derivative(int m, int k);

// ---- derivatives and 1-D maximisation ------------------------------------------------

struct DiffResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    bool reliable = true;  // false when the Richardson ladder is inconsistent
};

// Central differences at h, h/2, ..., h/2^(levels-1) with Richardson extrapolation.
DiffResult finite_diff(const RealToComplex& f, double x, double h = 0.1, int levels = 6);

struct MaxResult {
    double x = 0.0;
    double value = 0.0;
};
// Golden-section search for the maximum of a unimodal function on [a, b].
MaxResult golden_section_max(const std::function<double(double)>& f, double a, double b,
                             double x_tol = 1e-12);

}  // namespace borel_lab::oracles
