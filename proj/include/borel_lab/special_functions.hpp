#pragma once
// Gamma/Beta, the Laplace identity for monomials, the coefficients expressing
// T^{m(k+1)} d^m/dT^m through powers of the irregular operator T^{k+1} d/dT, and the
// Gevrey-type majorant r^{-N} exp(-M r^{-k'}).

#include <cstdint>
#include <vector>

#include "borel_lab/common.hpp"

namespace borel_lab {

// Gamma(a) for a > 0. Uses the C library gamma up to 50 and exp(log Gamma) beyond,
// where the result may overflow to +inf (callers needing big values use log_gamma).
double gamma_fn(double a);
double log_gamma(double a);
// Beta(a, b) = Gamma(a)Gamma(b)/Gamma(a+b), a, b > 0.
double beta_fn(double a, double b);

// T^{m(k+1)} d^m/dT^m = (T^{k+1}d/dT)^m + sum_{l=1}^{m-1} A_{m,l} T^{k(m-l)} (T^{k+1}d/dT)^l.
struct MonoExpansion {
    int m = 1;
    int k = 1;
    std::vector<std::int64_t> exact;  // A_{m,1..m-1}, exact integers
    std::vector<double> coeffs;       // the same values as doubles
};
MonoExpansion mono_op_coeffs(int m, int k);

// Closed form T^n Gamma(n/k) of k * int_{L_d} u^{n-1} exp(-(u/T)^k) du.
cplx laplace_monomial(int k, int n, double d, cplx T);

struct LaplaceCheck {
    cplx closed_form;
    cplx quadrature;
    double rel_discrepancy;
};
// Verification mode: the ray integral is computed by the oracle quadrature.
LaplaceCheck laplace_monomial_verify(int k, int n, double d, cplx T, double rel_tol = 1e-12);

struct GevreyMajorant {
    double sup_lhs;         // sup_{r>0} r^{-N} exp(-M r^{-k'})
    double rhs_factor;      // M^{-N/k'} (N/k')^{1/2} Gamma(N/k')
    double log_sup_lhs;     // logarithms, finite even when the values overflow
    double log_rhs_factor;
};
GevreyMajorant gevrey_majorant(int N, double M, int kprime);

// C_{k'} = 1.01 * max_{N=1..200} sup_lhs / rhs_factor (independent of M).
double gevrey_constant(int kprime);

}  // namespace borel_lab
