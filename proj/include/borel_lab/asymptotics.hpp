#pragma once
// Good coverings of the punctured eps-disc, the choice of Laplace directions per sector,
// eps-sweeps of the differences of neighbouring truncated integrals and of the tail
// pieces J2, J3, fits of exp(-M/|eps|^k) decay, and the two-level Gevrey report.

#include <cstdint>
#include <string>
#include <vector>

#include "borel_lab/borel_solver.hpp"
#include "borel_lab/laplace_paths.hpp"

namespace borel_lab {

// ---- coverings ---------------------------------------------------------------------------

struct GoodCovering {
    int varsigma = 0;
    double eps0 = 0.0;
    double overlap_deg = 0.0;
    std::vector<SectorSpec> sectors;  // bisectors 2 pi p / varsigma, bounded by eps0
    double bisector(int p) const { return sectors.at(static_cast<std::size_t>(p)).d; }
    // eps on the ray through the middle of E_p cap E_{p+1}
    double overlap_direction(int p) const;
};

struct CoveringAudit {
    bool consecutive_overlap = false;
    bool no_triple = false;
    bool covers = false;
    int samples = 0;
    std::string diagnostic;  // witness of the first failure
    bool ok() const { return consecutive_overlap && no_triple && covers; }
};
// Sampled on n_args arguments x a few radii of the punctured disc.
CoveringAudit audit_covering(const GoodCovering& c, int n_args = 720);

// GeometryError (with the audit diagnostic) if the covering is not good.
GoodCovering build_good_covering(int varsigma, double eps0, double overlap_deg);

// ---- directions ----------------------------------------------------------------------------

// Link p joins E_p and E_{p+1 mod varsigma}.
enum class LinkCase { Zero, Case1, Case2, Case3 };
const char* link_case_name(LinkCase c);
// Case 1 (first direction shared): order k2; case 2 (second shared): k1; case 3: k2.
int expected_order(LinkCase c, const ProblemSpec& spec);

struct DirectionAssignment {
    std::vector<double> d, dt;          // directions for u1 and u2 per sector
    std::vector<double> nabla, nabla_t;  // sampled cosine margins per sector
    std::vector<LinkCase> links;
};
// T1, T2: the t-sectors (absolute arguments). Directions are shared along links in the
// repeating pattern case 3, case 1, case 2 when the shared direction keeps a positive
// margin on every sector using it; otherwise the sectors get their own. Sector 0 keeps
// (d1, d2). GeometryError if a sector admits no direction.
DirectionAssignment assign_directions(const GoodCovering& cov, const ProblemSpec& spec, const SectorSpec& T1,
                                      const SectorSpec& T2, double d1, double d2);

// ---- sweeps --------------------------------------------------------------------------------

struct SweepPoint {
    cplx t1, t2, z;
};
// n points with |t_j| in [r_T/2, r_T], arguments in the inner 90% of T_j and
// |Im z| < 0.9 beta', Re z in [-2, 2]; fixed by the seed.
std::vector<SweepPoint> sample_points(const SectorSpec& T1, const SectorSpec& T2, double beta_prime, int n,
                                      std::uint64_t seed);

// Geometric ladder from eps0/2 down to eps0/40 by default.
std::vector<double> eps_ladder(double eps0, int n = 12, double hi_frac = 0.5, double lo_frac = 1.0 / 40.0);

struct Sweep {
    std::string name;
    LinkCase tag = LinkCase::Zero;  // links only
    int p = -1;                     // link index, -1 for J2/J3
    int expected_k = 0;
    double arg_eps = 0.0;
    std::vector<double> abs_eps;
    std::vector<double> log_mag;  // log of the sup over the points (-inf for exact zeros)
};

struct SweepSettings {
    SolverConfig disc;    // series solve per eps for the differences
    SolverConfig sector;  // collocation solve per eps for J2, J3 (angles set to (d1, d2))
    LaplaceParams prm;    // strip, tolerances; checks use sector 0
    int workers = 0;
};

// sup over the points of |J_{1,p+1} - J_{1,p}| at each |eps| on the overlap ray of link p.
// The difference is integrated directly over arcs of radius rho/2 (no cancellation).
// DomainError if an eps lies outside E_p cap E_{p+1} or beyond eps0.
Sweep difference_sweep(const SolverContext& ctx, int p, const GoodCovering& cov, const DirectionAssignment& dirs,
                       const std::vector<double>& abs_eps, const std::vector<SweepPoint>& points,
                       const SweepSettings& set);

// sup over the points of |J2| and |J3| of the sector solution for eps = |eps| e^{i arg_eps}.
std::pair<Sweep, Sweep> tail_sweeps(const SolverContext& ctx, const Directions& dirs, const std::vector<double>& abs_eps,
                                    double arg_eps, const std::vector<SweepPoint>& points, const SweepSettings& set);

// ---- fits ----------------------------------------------------------------------------------

struct DecayFit {
    double C = 0.0, log_C = 0.0, M = 0.0, k = 0.0;
    double rms_residual = 0.0;  // in log v
    double max_residual = 0.0;  // largest log v - model
    bool non_exponential = false;  // no decay visible: M ~ 0 or negative
    bool multi_level = false;      // k far from every integer
    std::size_t n = 0;
    double model_log(double abs_eps) const { return log_C - M * std::pow(abs_eps, -k); }
};
// Least squares of log v = log C - M |eps|^-k: (log C, M) linear for each k, k on a grid
// refined by golden section. UsageError for fewer than 6 samples, a span below 3 or
// non-finite logs.
DecayFit fit_decay_log(const std::vector<double>& abs_eps, const std::vector<double>& log_v);
// Same for plain magnitudes (UsageError on nonpositive values).
DecayFit fit_decay(const std::vector<double>& abs_eps, const std::vector<double>& v);
// The linear part alone with k held fixed.
DecayFit fit_decay_fixed_k(const std::vector<double>& abs_eps, const std::vector<double>& log_v, double k);

// ---- report --------------------------------------------------------------------------------

struct SweepFit {
    std::string name;
    LinkCase tag = LinkCase::Zero;
    int p = -1;
    int expected_k = 0;
    double tolerance = 0.0;  // relative, on the fitted exponent
    DecayFit fit;
    bool fitted = false;
    bool consistent = false;
    std::string note;
};

// |v(eps)| <= min_N C K^N (N/k')^{1/2} Gamma(N/k') |eps|^N with C, K from a fixed-k' fit.
struct MajorantCheck {
    std::string name;
    int kprime = 0;
    double log_C = 0.0, K = 0.0;
    double worst_log_margin = 0.0;  // max over samples of log v - log majorant (<= 0 passes)
    std::vector<double> log_majorant;
    bool dominates = false;
};
MajorantCheck majorant_check(const Sweep& s, int kprime);
// log of min over N = 1..200 of C K^N (N/k')^{1/2} Gamma(N/k') r^N
double log_min_majorant(double log_C, double K, int kprime, double r);

struct RSReport {
    std::vector<int> I1, I2;  // links with differences of order k1, resp. k2
    std::vector<int> zero_links;
    std::vector<SweepFit> fits;
    std::vector<MajorantCheck> majorants;
    std::vector<std::string> discrepancies;
    bool hypotheses_hold = false;  // every fit and majorant as the case table predicts
};
// Fits every sweep with positive data, compares with the case table (case 2: 15% of k1,
// case 1: 15% of k2, case 3: 25% of k2, J2: 15% of k2, J3: 15% of k1) and runs the
// majorant checks for J2 (k2) and J3 (k1). Disagreements are listed, not thrown.
RSReport gevrey_report(const ProblemSpec& spec, const DirectionAssignment& dirs, const std::vector<Sweep>& links,
                       const Sweep* J2, const Sweep* J3, double zero_floor = 1e-11);

}  // namespace borel_lab
