#pragma once
// Fixed rules and panel machinery for the main numerical path: Gauss-Legendre and
// Gauss-Jacobi rules (Golub-Welsch), composite panel grids with panel-local barycentric
// interpolation, deterministic pairwise summation and a vector-valued adaptive
// Gauss-Kronrod integrator.

#include <cstddef>
#include <functional>
#include <vector>

#include "borel_lab/common.hpp"

namespace borel_lab::quad {

struct Rule {
    std::vector<double> x, w;
};

// n-point rule for the weight (1-x)^a (1+x)^b on [-1, 1]; a, b > -1. Cached.
const Rule& gauss_jacobi(int n, double a, double b);
inline const Rule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

// Composite Gauss-Legendre rule on consecutive breakpoints.
class PanelGrid {
public:
    PanelGrid() = default;
    PanelGrid(std::vector<double> breaks, int order);

    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    int order() const { return order_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t panels() const { return breaks_.size() - 1; }
    double lo() const { return breaks_.front(); }
    double hi() const { return breaks_.back(); }

    // Panel containing x (clamped to the first/last panel).
    std::size_t panel_of(double x) const;
    // Barycentric interpolation weights for x using the nodes of its panel: values are
    // interpolated as sum_j w[j] * v[first + j], j < order().
    void interp_weights(double x, std::size_t& first, double* w) const;
    cplx interpolate(const cplx* values, double x) const;

private:
    std::vector<double> breaks_, nodes_, weights_, bary_;
    int order_ = 0;
};

// Pairwise (cascade) sum; the order of operations depends only on n.
cplx pairwise_sum(const cplx* v, std::size_t n);
double pairwise_sum(const double* v, std::size_t n);

struct VecResult {
    CVec value;
    double error = 0.0;
    long evaluations = 0;
    bool converged = true;
};

// Adaptive G7/K15 for vector-valued integrands on [a, b]; f(x, out) writes dim values.
// Convergence: summed max-norm panel errors <= max(abs_tol, rel_tol * |I|_inf).
VecResult adaptive_vec(const std::function<void(double, cplx*)>& f, std::size_t dim, double a, double b,
                       double abs_tol, double rel_tol, const std::vector<double>& breaks = {},
                       long max_evals = 200000);

}  // namespace borel_lab::quad
