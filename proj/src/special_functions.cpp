#include "borel_lab/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "borel_lab/oracles.hpp"

namespace borel_lab {

double gamma_fn(double a) {
    if (!(a > 0.0)) throw DomainError("gamma: argument must be positive");
    if (a <= 50.0) return std::tgamma(a);
    return std::exp(std::lgamma(a));
}

double log_gamma(double a) {
    if (!(a > 0.0)) throw DomainError("log_gamma: argument must be positive");
    return std::lgamma(a);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: arguments must be positive");
    if (a + b <= 50.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Both sides applied to T^j give c(j) T^{j+mk}; with p_l(j) = prod_{i<l} (j + i k) the
// identity reads  j(j-1)...(j-m+1) - p_m(j) = sum_l A_{m,l} p_l(j).  The p_l are monic
// of degree l, so matching coefficients from degree m-1 downwards is a triangular
// solve in exact integer arithmetic.
MonoExpansion mono_op_coeffs(int m, int k) {
    if (m < 1 || k < 1) throw DomainError("mono_op_coeffs: m and k must be positive");
    using Poly = std::vector<__int128>;  // ascending coefficients in j
    auto mul_linear = [](const Poly& p, __int128 c) {  // p(j) * (j + c)
        Poly r(p.size() + 1, 0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            r[i + 1] += p[i];
            r[i] += p[i] * c;
        }
        return r;
    };
    std::vector<Poly> pl(m + 1);
    pl[0] = {1};
    for (int l = 1; l <= m; ++l) pl[l] = mul_linear(pl[l - 1], static_cast<__int128>(l - 1) * k);
    Poly falling{1};
    for (int i = 0; i < m; ++i) falling = mul_linear(falling, -i);

    Poly rest(m + 1, 0);
    for (int i = 0; i <= m; ++i) rest[i] = falling[i] - pl[m][i];
    MonoExpansion out;
    out.m = m;
    out.k = k;
    out.exact.assign(std::max(0, m - 1), 0);
    for (int l = m - 1; l >= 1; --l) {
        __int128 a = rest[l];  // p_l is monic
        out.exact[l - 1] = static_cast<std::int64_t>(a);
        for (int i = 0; i <= l; ++i) rest[i] -= a * pl[l][i];
    }
    for (int i = 0; i <= m; ++i)
        if (rest[i] != 0) throw ConvergenceError("mono_op_coeffs: singular coefficient system");
    out.coeffs.assign(out.exact.begin(), out.exact.end());
    return out;
}

namespace {
void check_laplace_direction(int k, int n, double d, cplx T) {
    if (k < 1 || n < 1) throw DomainError("laplace_monomial: k and n must be positive");
    if (T == cplx(0.0)) throw DomainError("laplace_monomial: T must be nonzero");
    if (!(std::cos(k * (d - std::arg(T))) > 0.0))
        throw DomainError("laplace_monomial: kernel does not decay along the direction d");
}
}  // namespace

cplx laplace_monomial(int k, int n, double d, cplx T) {
    check_laplace_direction(k, n, d, T);
    return std::pow(T, n) * gamma_fn(static_cast<double>(n) / k);
}

LaplaceCheck laplace_monomial_verify(int k, int n, double d, cplx T, double rel_tol) {
    cplx closed = laplace_monomial(k, n, d, T);
    // Natural radial scale of the kernel: |T| / cos(k(d - arg T))^{1/k}.
    double c = std::cos(k * (d - std::arg(T)));
    double scale = std::abs(T) / std::pow(c, 1.0 / k);
    auto f = [&](cplx u) { return static_cast<double>(k) * std::pow(u, n - 1) * std::exp(-std::pow(u / T, k)); };
    auto q = oracles::adaptive_quad_ray(f, d, 1e-300, rel_tol, scale);
    return {closed, q.value, std::abs(q.value - closed) / std::abs(closed)};
}

GevreyMajorant gevrey_majorant(int N, double M, int kprime) {
    if (N < 1 || !(M > 0.0) || kprime < 1) throw DomainError("gevrey_majorant: need N >= 1, M > 0, k' >= 1");
    const double x = static_cast<double>(N) / kprime;
    // r^{-N} exp(-M r^{-k'}) with u = r^{-k'}: u^{x} e^{-M u}, maximal at u = x / M.
    double log_sup = x * std::log(x / M) - x;
    double log_rhs = -x * std::log(M) + 0.5 * std::log(x) + std::lgamma(x);
    return {std::exp(log_sup), std::exp(log_rhs), log_sup, log_rhs};
}

double gevrey_constant(int kprime) {
    static std::mutex mu;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lk(mu);
    if (auto it = cache.find(kprime); it != cache.end()) return it->second;
    double best = 0.0;
    for (int N = 1; N <= 200; ++N) {
        auto g = gevrey_majorant(N, 1.0, kprime);
        best = std::max(best, std::exp(g.log_sup_lhs - g.log_rhs_factor));
    }
    double c = 1.01 * best;
    cache[kprime] = c;
    return c;
}

}  // namespace borel_lab
