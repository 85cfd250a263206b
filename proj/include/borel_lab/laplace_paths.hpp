#pragma once
// Contours in the Borel plane (ray segments and circular arcs), the double Laplace and
// inverse Fourier synthesis along them, the forcing term, the three-piece splitting of
// the solution and the family of truncated integrals attached to other directions.
//
// Magnitudes are carried as mantissa * exp(log_scale): the pieces of the splitting decay
// like exp(-c/|eps|^k) and leave the double range long before the fits run out of data.

#include <limits>
#include <variant>
#include <vector>

#include "borel_lab/borel_solver.hpp"
#include "borel_lab/common.hpp"

namespace borel_lab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// {r e^{id} : r_start <= r <= r_end}; r_end = inf for a ray to infinity.
struct PathSegment {
    double d = 0.0;
    double r_start = 0.0;
    double r_end = kInf;
    bool infinite() const { return std::isinf(r_end); }
    cplx start() const { return std::polar(r_start, d); }
    cplx end() const;
};

// {rho e^{i theta}} for theta from theta_start to theta_end (either orientation).
struct Arc {
    double rho = 1.0;
    double theta_start = 0.0, theta_end = 0.0;
    cplx start() const { return std::polar(rho, theta_start); }
    cplx end() const { return std::polar(rho, theta_end); }
};

using PathPiece = std::variant<PathSegment, Arc>;

class PathChain {
public:
    PathChain() = default;
    // Appends a piece; UsageError if it does not start where the chain ends, if a piece
    // is degenerate, or if something follows a ray to infinity.
    PathChain& then(const PathPiece& p);
    const std::vector<PathPiece>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }
    bool infinite() const;
    cplx start() const;
    cplx end() const;  // last finite endpoint

    static PathChain ray(double d, double r_start = 0.0);
    static PathChain segment(double d, double r_start, double r_end);
    // [0, r_mid] e^{i theta} + arc(theta -> d) at r_mid + [r_mid, r_end] e^{i d}.
    static PathChain bent(double theta, double d, double r_mid, double r_end);

private:
    std::vector<PathPiece> pieces_;
};

struct LaplacePoint {
    cplx t1{0.0}, t2{0.0}, z{0.0}, eps{0.0};
};

struct LaplaceParams {
    double beta_prime = 0.5;  // strip half-width for z, < beta
    double R_max = 0.0;       // cap for rays to infinity (0 = chosen from the kernel decay)
    double rel_tol = 1e-12;   // kernel drop at which rays are cut, and quadrature target
    int order = 20;           // Gauss-Legendre nodes per panel
    double phase_step = 1.5;  // max change of |(u/(eps t))^k| per panel
    SectorSpec T1, T2, E;     // bounded sectors for t1, t2 and eps
    double Delta1 = 0.0, Delta2 = 0.0;  // sampled cosine lower bounds
    double nu1 = 1.0, nu2 = 1.0;        // growth rates of the sector solution

    // ConfigError unless 0 < beta' < beta, rel_tol in (0, 1e-3], and the radii of T_j
    // and E keep the kernels dominant: eps0 r_Tj < (Delta_j / nu_j)^{1/k_j}.
    void check(const ProblemSpec& spec) const;
    bool contains(const LaplacePoint& p) const;  // p in T1 x T2 x H_beta' x E
};

// T_j centred on d_j - arg E so that arg(eps t_j) is centred on d_j; Delta_j measured on
// a grid of E x T_j (GeometryError if a cosine is not positive).
LaplaceParams make_laplace_params(const ProblemSpec& spec, const Directions& dirs, const SectorSpec& E,
                                  double r_T, double T_half_opening, double beta_prime, double nu1 = 1.0,
                                  double nu2 = 1.0);
// min over sampled eps in E, t in T of cos(k (d - arg(eps t))).
double cosine_margin(int k, double d, const SectorSpec& E, const SectorSpec& T);

// mantissa * exp(log_scale)
struct Scaled {
    cplx mant{0.0};
    double log_scale = 0.0;
    cplx value() const;                 // may underflow to 0
    double log_abs() const;             // -inf for zero
    Scaled operator+(const Scaled& o) const;
    Scaled operator-(const Scaled& o) const;
    static Scaled of(cplx v) { return {v, 0.0}; }
};

struct LaplaceResult {
    Scaled value;
    double log_tail = -kInf;   // log of the truncation bound (rays beyond R_eff, |m| > M)
    double R_eff1 = 0.0, R_eff2 = 0.0;  // where rays to infinity were cut (0 if none)
    std::size_t nodes1 = 0, nodes2 = 0;
};

// (k1 k2/sqrt(2 pi)) int int int omega(u1,u2,m) exp(-(u1/(eps t1))^k1 - (u2/(eps t2))^k2)
//   e^{izm} du2/u2 du1/u1 dm. Series solutions accept any chain inside their polydisc;
// grid solutions need straight pieces on one of their angle pairs and no arcs.
// DomainError if a ray to infinity meets a non-decaying kernel, or z is outside the strip.
LaplaceResult laplace_over_paths(const ProblemSpec& spec, const BorelSolution& w, const PathChain& c1,
                                 const PathChain& c2, const LaplacePoint& p, const LaplaceParams& prm);
// Same for an entire function given by a finite double power series (no radius limit).
LaplaceResult laplace_over_paths(const ProblemSpec& spec, const SeriesFn& w, const PathChain& c1, const PathChain& c2,
                                 const LaplacePoint& p, const LaplaceParams& prm);

// ---- forcing term ------------------------------------------------------------------------

enum class ForcingMode { ClosedForm, Quadrature };
// f(t1, t2, z, eps): sum of Ff_{n1 n2}(z, eps) (eps t1)^n1 (eps t2)^n2 with Ff the inverse
// Fourier transform of F_{n1 n2}, or the Laplace-Fourier quadrature of Psi along d1, d2.
cplx forcing_eval(const SolverContext& ctx, const LaplacePoint& p, ForcingMode mode, const LaplaceParams& prm,
                  double d1, double d2);
// Psi as a double power series in the carrier of ctx.
SeriesFn forcing_series(const SolverContext& ctx, cplx eps, int N_max = 32);

// ---- splitting -------------------------------------------------------------------------------

struct SplitResult {
    Scaled u, J1, J2, J3;
    double identity_gap = 0.0;  // |J1 + J2 + J3 - u| / |u|
    double log_tail = -kInf;    // largest truncation bound among the four integrals (log)
    double log_bound = kInf;    // log of the a priori bound for |u| assembled from varpi
};
// u over the full rays d1, d2 and its pieces J1 ([0, rho1/2] x [0, rho2/2]),
// J2 ([0, rho1/2] x [rho2/2, inf)), J3 ([rho1/2, inf) x [0, inf)) for a sector solution.
SplitResult solution_and_split(const ProblemSpec& spec, const BorelSolution& sector, const LaplacePoint& p,
                               const LaplaceParams& prm);

// The a priori bound of |u| at p: varpi (k1 k2/sqrt(2 pi)) int (1+|m|)^-mu e^{-(beta-|Im z|)|m|} dm
//   prod_j int_0^inf exp(r^kj (nu_j - Delta_j/|eps t_j|^kj)) / (1 + r^{2kj}) dr   (log).
double log_solution_bound(const ProblemSpec& spec, double varpi, const LaplacePoint& p, const LaplaceParams& prm);

// J_{1,p}: the disc solution over [0, rho1/2] e^{i dp} x [0, rho2/2] e^{i dtp}; DomainError
// unless eps lies in Ep.
Scaled j1p_family(const ProblemSpec& spec, const BorelSolution& disc, double dp, double dtp, const SectorSpec& Ep,
                  const LaplacePoint& p, const LaplaceParams& prm);

}  // namespace borel_lab
