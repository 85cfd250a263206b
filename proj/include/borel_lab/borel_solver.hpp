#pragma once
// The convolution equation in the Borel-Fourier plane: lower bounds for its principal
// symbol P_m, the choice of summation directions, the fixed-point map H_eps in a
// truncated double power series (discs) or on polar collocation grids (all three
// domains), Picard iteration and the cross-checks between the resulting solutions.

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "borel_lab/banach_spaces.hpp"
#include "borel_lab/common.hpp"
#include "borel_lab/fourier_layer.hpp"
#include "borel_lab/problem_model.hpp"

namespace borel_lab {

// Everything that depends only on the problem: validation, derived quantities and the
// m-carrier shared by all solves.
struct SolverContext {
    ProblemSpec spec;
    ValidationReport validation;
    DerivedReport derived;
    FourierGridPtr mgrid;
    MSpacePtr ms;
    // J levels for the power-basis carrier; ignored by the grid carrier.
    static std::shared_ptr<const SolverContext> make(const ProblemSpec& spec, int J = 10,
                                                     FourierGridPtr mgrid = nullptr);
    void require_valid() const;  // PreconditionError listing the failed findings
    // Power basis with twice the levels (built on first use) for residual checks.
    const PowerM& doubled_power_basis() const;

private:
    mutable std::once_flag doubled_once_;
    mutable std::shared_ptr<const PowerM> doubled_;
};
using SolverContextPtr = std::shared_ptr<const SolverContext>;

// P_m(tau1, tau2) = Q(im) - R(im) X,  X = (k1 tau1^k1)^delta1 (k2 tau2^k2)^delta2.
class PmEvaluator {
public:
    PmEvaluator(const ProblemSpec& spec, FourierGridPtr mgrid);
    cplx X(cplx tau1, cplx tau2) const;
    cplx operator()(cplx tau1, cplx tau2, double m) const;
    // Q and R at the m-grid nodes.
    const CVec& Q_nodes() const { return Q_; }
    const CVec& R_nodes() const { return R_; }
    // m -> 1/P_m(tau1, tau2) (a scalar when Q and R are constants).
    Symbol inverse_symbol(cplx tau1, cplx tau2) const;

private:
    const ProblemSpec* spec_;
    FourierGridPtr grid_;
    CVec Q_, R_;
};

struct PmDiscBounds {
    bool admissible = false;
    double product = 0.0;      // (k1 rho1^k1)^delta1 (k2 rho2^k2)^delta2
    double max_product = 0.0;  // r_QR / 2
    double C1 = 0.0;           // r_QR / 2
    double grid_inf = 0.0;     // inf over disc x disc x m samples of |P_m| / |R(im)|
};
PmDiscBounds pm_bounds_disc(const ProblemSpec& spec, double rho1, double rho2);

// Radii with rho2 = 2 rho1, rho1 the largest multiple of 0.05 (or of 0.005 below 0.05)
// whose product is at most r_QR / 4.
std::pair<double, double> default_radii(const ProblemSpec& spec);

struct SectorSpec {
    double d = 0.0;
    double half_opening = 0.0;
    double radius = 0.0;
    bool unbounded = true;
    bool contains(cplx tau) const;
};

struct Directions {
    double d1 = 0.0, d2 = 0.0;
    SectorSpec S1, S2;
    double d12 = 0.0;        // delta1 k1 d1 + delta2 k2 d2
    double distance = 0.0;   // angular distance from d12 to the argument hull
    double C2 = 0.0;         // grid inf of |Q/R - xi| / (1 + |xi|) over the rotated sector
};
// d12 opposite the centre of the argument hull, split evenly between the variables;
// the X-sector of half-opening distance/2 is shared as delta_j k_j alpha_j = distance/4.
Directions choose_directions(const ProblemSpec& spec, const DerivedReport& derived);
// Same split for a prescribed d12 (GeometryError if it lies in the hull).
Directions directions_for(const ProblemSpec& spec, const DerivedReport& derived, double d12);

// ---- series representation -----------------------------------------------------------

// sum over (n1, n2) of c_{n1 n2}(m) tau1^n1 tau2^n2, coefficients in the m-carrier,
// exponents 1..N_max per variable.
class SeriesFn {
public:
    SeriesFn(MSpacePtr ms, int N_max);
    using Key = std::pair<int, int>;
    const std::map<Key, CVec>& coeffs() const { return c_; }
    CVec& coeff(Key k);  // created as zero on first access
    const MSpace& ms() const { return *ms_; }
    const MSpacePtr& ms_ptr() const { return ms_; }
    int N_max() const { return N_; }
    void eval(cplx tau1, cplx tau2, cplx* out) const;
    SeriesFn& operator+=(const SeriesFn& o);
    SeriesFn& operator-=(const SeriesFn& o);
    // sup over the distinguished boundary |tau_j| = rho_j of the carrier norm / (rho1 rho2);
    // equals the disc norm because omega/(tau1 tau2) is holomorphic.
    double disc_norm(double rho1, double rho2, int n_angles = 24) const;
    // Largest disc-norm contribution among the retained terms with n1 + n2 maximal.
    double last_diagonal_norm(double rho1, double rho2) const;

private:
    MSpacePtr ms_;
    int N_;
    std::map<Key, CVec> c_;
};

// ---- solver ---------------------------------------------------------------------------

enum class Representation { Series, Collocation };
const char* representation_name(Representation r);

struct SolverConfig {
    Representation rep = Representation::Series;
    int N_max = 32;
    // collocation: angle pairs (empty = 3 x 3 pairs spanning the direction sectors), radial
    // panels and quadrature size
    std::vector<std::pair<double, double>> angles;
    int radial_order = 10;
    double max_panel = 0.35, first_panel = 0.1;
    double sector_R1 = 0.0, sector_R2 = 0.0;  // 0 selects the default radial extent
    int quad_n = 8;
    double rho1 = 0.0, rho2 = 0.0;  // 0 selects default_radii
    double nu1 = 1.0, nu2 = 1.0;
    double tol = 1e-10;
    int max_iter = 40;
    double varpi = 0.0;  // 0 selects 2 |Psi / P_m|
    double psi_scale = 1.0;  // multiplies the forcing (detector checks)
    bool start_from_forcing = false;  // omega_0 = Psi/P_m instead of 0
    int residual_samples = 4;  // oracle residual points (0 disables)
    void check(const ProblemSpec& spec) const;
};

struct BorelSolution {
    Domain domain = Domain::Disc;
    Representation rep = Representation::Series;
    cplx eps{0.0, 0.0};
    SpaceParams space;
    std::optional<SeriesFn> series;
    std::optional<BorelGridFn> grid;
    std::vector<double> trace;   // increment norms per iteration
    std::vector<double> ratios;  // consecutive increment ratios (above the noise floor)
    double contraction_ratio = 0.0;
    bool contraction_ok = false;  // ratio <= 1/2
    bool converged = false;
    int iterations = 0;
    double norm = 0.0;
    double varpi = 0.0;
    bool within_ball = false;
    double psi_norm = 0.0;  // measured norm of the forcing in the space (C_Psi / D_Psi slot)
    double psi_scale = 1.0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    double truncation_indicator = 0.0;
    Directions directions;

    // Series: any point of the polydisc; grid: points on one of the grid's angle pairs.
    void eval(cplx tau1, cplx tau2, cplx* out) const;
    const MSpace& ms() const;
};

// One application of H_eps (the state must match the representation).
SeriesFn apply_H(const SolverContext& ctx, const SeriesFn& w, cplx eps, double psi_scale = 1.0);
BorelGridFn apply_H(const SolverContext& ctx, const BorelGridFn& w, cplx eps, int quad_n, double psi_scale = 1.0);
// The linear kernels alone (before division by P_m), for exponent bookkeeping.
SeriesFn linear_terms(const SolverContext& ctx, const SeriesFn& w, cplx eps);

// Polar grid used by picard_solve for the given domain and configuration.
PolarGridPtr solver_grid(const SolverContext& ctx, const SolverConfig& cfg, Domain domain);
SpaceParams solver_space(const SolverContext& ctx, const SolverConfig& cfg, Domain domain);

BorelSolution picard_solve(const SolverContext& ctx, cplx eps, const SolverConfig& cfg, Domain domain);

// Relative residual of the convolution equation at the given points, the integrals done
// by nested double-exponential quadrature on the returned omega (power carrier only:
// convolution products are kept to 2J levels so dropped levels count as residual).
double oracle_residual(const SolverContext& ctx, const BorelSolution& sol,
                       const std::vector<std::pair<cplx, cplx>>& points, double rel_tol = 1e-12);
// Default residual points: interior radii on the solution's angle pairs (or the
// directions for series solutions).
std::vector<std::pair<cplx, cplx>> residual_points(const BorelSolution& sol, int n);

struct ContinuationReport {
    std::size_t samples = 0;
    double disc_sector = 0.0, disc_intersection = 0.0, sector_intersection = 0.0;
    double max_rel = 0.0;
};
// Points of (S_d1 cap D(0, rho1)) x (S_d2 cap D(0, rho2)) on the given angle pairs.
std::vector<std::pair<cplx, cplx>> overlap_samples(const std::vector<std::pair<double, double>>& angles,
                                                   double rho1, double rho2, int per_angle);
// Max over samples of |a - b|_m / |b|_m for each pair of solutions (carrier norms).
ContinuationReport continuation_check(const BorelSolution& disc, const BorelSolution& sector,
                                      const BorelSolution& intersection,
                                      const std::vector<std::pair<cplx, cplx>>& samples);

}  // namespace borel_lab
