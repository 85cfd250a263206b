#include "borel_lab/problem_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "borel_lab/special_functions.hpp"

namespace borel_lab {

using json = nlohmann::json;

// ---- polynomials ----------------------------------------------------------------------

ComplexPoly::ComplexPoly(CVec coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw ConfigError("polynomial with no coefficients");
    while (c_.size() > 1 && c_.back() == cplx(0.0)) c_.pop_back();
}

cplx ComplexPoly::operator()(cplx x) const {
    cplx r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
}

EpsPoly::EpsPoly(std::vector<ComplexPoly> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw ConfigError("eps-polynomial with no coefficients");
    while (c_.size() > 1 && c_.back().is_zero()) c_.pop_back();
}

int EpsPoly::degree() const {
    for (int j = static_cast<int>(c_.size()) - 1; j >= 0; --j)
        if (!c_[j].is_zero()) return j;
    return 0;
}

ComplexPoly EpsPoly::at(cplx eps) const {
    CVec v;
    v.reserve(c_.size());
    for (const auto& p : c_) v.push_back(p(eps));
    return ComplexPoly(v);
}

bool ProblemSpec::has_constant_symbols() const {
    if (Q.degree() != 0 || R.degree() != 0) return false;
    for (const auto& p : R_l)
        if (p.degree() != 0) return false;
    return P1.degree() == 0 && P2.degree() == 0;
}

// ---- validation -----------------------------------------------------------------------

bool ValidationReport::valid() const {
    return std::all_of(findings.begin(), findings.end(), [](const Finding& f) { return f.passed; });
}

const Finding* ValidationReport::find(const std::string& id) const {
    for (const auto& f : findings)
        if (f.id == id) return &f;
    return nullptr;
}

std::pair<int, int> tuple_shifts(const ProblemSpec& spec, const IndexTuple& t) {
    return {t.l1 - t.l2 * (spec.k1 + 1), t.l3 - t.l4 * (spec.k2 + 1)};
}

namespace {

// Real coefficients (ascending) of |P(im)|^2 as a polynomial in real m.
std::vector<double> abs2_on_axis(const ComplexPoly& p) {
    const auto& c = p.coeffs();
    CVec a(c.size());
    cplx ipow = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j, ipow *= cplx(0.0, 1.0)) a[j] = c[j] * ipow;
    std::vector<double> out(2 * c.size() - 1, 0.0);
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t l = 0; l < a.size(); ++l) out[j + l] += (a[j] * std::conj(a[l])).real();
    return out;
}

double horner(const std::vector<double>& p, double x) {
    double r = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
    return r;
}

std::vector<double> derivative(const std::vector<double>& p) {
    if (p.size() <= 1) return {0.0};
    std::vector<double> d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return d;
}

double magnitude_scale(const std::vector<double>& p, double x) {
    double s = 0.0, xp = 1.0;
    for (double c : p) {
        s += std::abs(c) * xp;
        xp *= std::abs(x);
    }
    return s;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

AxisCheck check_no_imaginary_axis_roots(const ComplexPoly& poly) {
    AxisCheck out;
    auto p = abs2_on_axis(poly);
    const std::size_t n = p.size() - 1;
    if (n == 0) {
        out.min_abs2 = p[0];
        out.nonvanishing = p[0] > 0.0;
        return out;
    }
    double extent = 1.0;
    for (std::size_t i = 0; i < n; ++i) extent += std::abs(p[i] / p[n]);
    out.extent = extent;
    auto dp = derivative(p);
    auto ddp = derivative(dp);
    const int G = 4001;
    std::vector<double> xs(G), vs(G);
    for (int i = 0; i < G; ++i) {
        xs[i] = -extent + 2.0 * extent * i / (G - 1);
        vs[i] = horner(p, xs[i]);
    }
    double best = vs[0], best_x = xs[0];
    for (int i = 0; i < G; ++i) {
        bool local_min = (i == 0 || vs[i] <= vs[i - 1]) && (i == G - 1 || vs[i] <= vs[i + 1]);
        if (!local_min) continue;
        // Safeguarded Newton on p' inside the bracket around the grid minimum.
        double lo = xs[std::max(0, i - 1)], hi = xs[std::min(G - 1, i + 1)];
        double x = xs[i];
        for (int it = 0; it < 60; ++it) {
            double g = horner(dp, x), h = horner(ddp, x);
            double xn = (h > 0.0) ? x - g / h : 0.5 * (lo + hi);
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            if (horner(dp, xn) > 0.0) hi = xn; else lo = xn;
            if (std::abs(xn - x) <= 1e-15 * (1.0 + std::abs(x))) {
                x = xn;
                break;
            }
            x = xn;
        }
        double v = horner(p, x);
        if (vs[i] < v) {
            v = vs[i];
            x = xs[i];
        }
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    out.min_abs2 = best;
    out.argmin = best_x;
    // A real root shows up as a minimum equal to zero up to rounding of the terms.
    out.nonvanishing = best > 1e-12 * magnitude_scale(p, best_x);
    return out;
}

ValidationReport validate_spec(const ProblemSpec& s) {
    if (!(s.eps0 > 0.0)) throw ConfigError("eps0 must be positive");
    if (s.N1.empty() || s.N2.empty()) throw ConfigError("N1 and N2 must be nonempty");
    if (s.R_l.size() != s.I.size()) throw ConfigError("one R_l polynomial is required per index tuple");

    ValidationReport rep;
    auto add = [&](std::string id, bool ok, std::string detail) {
        rep.findings.push_back({std::move(id), ok, std::move(detail)});
    };
    add("orders", s.k1 > s.k2 && s.k2 >= 1, "k1=" + std::to_string(s.k1) + ", k2=" + std::to_string(s.k2));
    add("positive_deltas", s.delta1 >= 1 && s.delta2 >= 1,
        "delta1=" + std::to_string(s.delta1) + ", delta2=" + std::to_string(s.delta2));
    add("delta_balance", s.delta1 * s.k1 == s.delta2 * s.k2,
        "delta1*k1=" + std::to_string(s.delta1 * s.k1) + ", delta2*k2=" + std::to_string(s.delta2 * s.k2));
    add("Delta0", s.Delta0 == s.k1 * s.delta1 + s.k2 * s.delta2,
        "Delta0=" + std::to_string(s.Delta0) + ", expected " + std::to_string(s.k1 * s.delta1 + s.k2 * s.delta2));
    add("positive_parameters", s.beta > 0.0 && s.mu > 0.0, "beta=" + fmt(s.beta) + ", mu=" + fmt(s.mu));

    int maxdegRl = 0;
    bool chain = s.Q.degree() >= s.R.degree();
    for (std::size_t i = 0; i < s.I.size(); ++i) {
        const auto& t = s.I[i];
        auto [d1, d2] = tuple_shifts(s, t);
        rep.tuple_shifts.emplace_back(d1, d2);
        std::string p = "tuple[" + std::to_string(i) + "].";
        add(p + "decomposition", t.l2 >= 1 && t.l4 >= 1 && d1 >= 1 && d2 >= 1,
            "d_k1=" + std::to_string(d1) + ", d_k2=" + std::to_string(d2));
        int lower = t.l1 - t.l2 + t.l3 - t.l4 + 1;
        add(p + "Delta_bound", t.Delta >= lower,
            "Delta_l=" + std::to_string(t.Delta) + ", lower bound " + std::to_string(lower));
        int a = t.l1 - t.l2, b = t.l3 - t.l4;
        add(p + "order_window", a == b && s.k1 <= a && a <= s.delta1 * s.k1,
            "l1-l2=" + std::to_string(a) + ", l3-l4=" + std::to_string(b) + ", window [" + std::to_string(s.k1) + ", " +
                std::to_string(s.delta1 * s.k1) + "]");
        maxdegRl = std::max(maxdegRl, s.R_l[i].degree());
        chain = chain && s.R.degree() >= s.R_l[i].degree();
    }
    add("degree_chain", chain,
        "deg Q=" + std::to_string(s.Q.degree()) + ", deg R=" + std::to_string(s.R.degree()) +
            ", max deg R_l=" + std::to_string(maxdegRl));
    int degP = std::max(s.P1.degree(), s.P2.degree());
    add("degree_R_vs_P", s.R.degree() >= degP,
        "deg R=" + std::to_string(s.R.degree()) + ", max deg P=" + std::to_string(degP));
    double mu_min = std::max(degP, maxdegRl) + 1.0;
    add("mu_threshold", s.mu > mu_min, "mu=" + fmt(s.mu) + " must exceed " + fmt(mu_min));

    auto axis = [&](const std::string& id, const ComplexPoly& p) {
        auto c = check_no_imaginary_axis_roots(p);
        add(id, c.nonvanishing, "min |P(im)|^2=" + fmt(c.min_abs2) + " at m=" + fmt(c.argmin));
        return c.nonvanishing;
    };
    bool axisQ = axis("axis_nonvanishing.Q", s.Q);
    bool axisR = axis("axis_nonvanishing.R", s.R);
    for (std::size_t i = 0; i < s.R_l.size(); ++i) axis("axis_nonvanishing.R_l[" + std::to_string(i) + "]", s.R_l[i]);

    if (axisQ && axisR) {
        auto d = derived_quantities(s);
        add("sector_QR", d.arg_hull.width < 2.0 * kPi - 1e-6, "arg hull width=" + fmt(d.arg_hull.width));
    } else {
        add("sector_QR", false, "Q or R vanishes on the imaginary axis");
    }

    bool npos = std::all_of(s.N1.begin(), s.N1.end(), [](int n) { return n >= 1; }) &&
                std::all_of(s.N2.begin(), s.N2.end(), [](int n) { return n >= 1; });
    add("forcing_orders_positive", npos, "N1, N2 must contain positive integers");
    bool all_profiles = true;
    for (int a : s.N1)
        for (int b : s.N2) all_profiles = all_profiles && s.forcing.count({a, b}) > 0;
    add("forcing_profiles", all_profiles, "a profile is required for every (n1, n2) in N1 x N2");

    for (std::size_t i = 0; i < s.I.size(); ++i) {
        double obs = 0.0;
        bool ok = amplitude_bound_holds(s.I[i].amplitude, s.eps0, &obs);
        add("amplitude_bound.tuple[" + std::to_string(i) + "]", ok,
            "sup |K_l(eps)|=" + fmt(obs) + " vs bound " + fmt(s.I[i].amplitude.sup_bound));
    }
    for (const auto& [key, amp] : s.forcing) {
        double obs = 0.0;
        bool ok = amplitude_bound_holds(amp, s.eps0, &obs);
        add("amplitude_bound.F[" + std::to_string(key.first) + "," + std::to_string(key.second) + "]", ok,
            "sup |K_n(eps)|=" + fmt(obs) + " vs bound " + fmt(amp.sup_bound));
    }
    return rep;
}

// ---- angular intervals ----------------------------------------------------------------

bool AngularInterval::contains(double a, double slack) const {
    double d = std::fmod(a - start, 2.0 * kPi);
    if (d < 0.0) d += 2.0 * kPi;
    return d <= width + slack || d >= 2.0 * kPi - slack;
}

double AngularInterval::distance(double a) const {
    if (contains(a)) return 0.0;
    double d = std::fmod(a - start, 2.0 * kPi);
    if (d < 0.0) d += 2.0 * kPi;
    return std::min(d - width, 2.0 * kPi - d);
}

AngularInterval angular_hull(std::vector<double> angles) {
    if (angles.empty()) return {};
    for (auto& a : angles) a = wrap_angle(a);
    std::sort(angles.begin(), angles.end());
    double best_gap = angles.front() + 2.0 * kPi - angles.back();
    std::size_t best_i = 0;  // hull starts at angles[best_i]
    for (std::size_t i = 1; i < angles.size(); ++i) {
        double gap = angles[i] - angles[i - 1];
        if (gap > best_gap) {
            best_gap = gap;
            best_i = i;
        }
    }
    return {angles[best_i], 2.0 * kPi - best_gap};
}

DerivedReport derived_quantities(const ProblemSpec& s, double m_grid_extent) {
    DerivedReport out;
    out.Delta0 = s.Delta0;
    double extent = m_grid_extent;
    if (!(extent > 0.0)) {
        double ratio = 0.0;
        for (const auto* p : {&s.Q, &s.R})
            for (std::size_t i = 0; i + 1 < p->coeffs().size(); ++i) ratio += std::abs(p->coeffs()[i] / p->leading());
        extent = std::max(50.0, 10.0 * (1.0 + ratio));
    }
    out.m_extent = extent;
    std::vector<double> ms{0.0};
    for (int i = 0; i <= 400; ++i) {
        double m = 1e-3 * std::pow(extent / 1e-3, i / 400.0);
        ms.push_back(m);
        ms.push_back(-m);
    }
    for (int i = 0; i <= 2000; ++i) ms.push_back(-extent + 2.0 * extent * i / 2000.0);
    std::sort(ms.begin(), ms.end());

    double rmin = std::numeric_limits<double>::infinity(), rmin_m = 0.0;
    std::vector<double> args;
    for (double m : ms) {
        cplx r = s.R.at_im(m);
        if (std::abs(r) == 0.0) throw DomainError("derived_quantities: R(im) vanishes at a sample point");
        cplx v = s.Q.at_im(m) / r;
        args.push_back(std::arg(v));
        if (std::abs(v) < rmin) {
            rmin = std::abs(v);
            rmin_m = m;
        }
    }
    // Local refinement of the sampled infimum.
    auto absq = [&](double m) { return std::abs(s.Q.at_im(m) / s.R.at_im(m)); };
    {
        double lo = rmin_m - 2.0 * extent / 2000.0, hi = rmin_m + 2.0 * extent / 2000.0;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
        for (int it = 0; it < 100; ++it) {
            if (absq(c) < absq(d)) hi = d; else lo = c;
            c = hi - g * (hi - lo);
            d = lo + g * (hi - lo);
        }
        rmin = std::min(rmin, absq(0.5 * (lo + hi)));
    }
    int dq = s.Q.degree(), dr = s.R.degree();
    cplx lead = s.Q.leading() / s.R.leading();
    if (dq == dr) rmin = std::min(rmin, std::abs(lead));
    double base = std::arg(lead) + (dq - dr) * kPi / 2.0;
    args.push_back(base);
    args.push_back(base + (dq - dr) * kPi);
    out.r_QR = rmin;
    out.arg_hull = angular_hull(args);
    double margin = std::min(0.1, std::max(0.0, (2.0 * kPi - out.arg_hull.width) / 4.0));
    out.sector_SQR = {out.arg_hull.start - margin, out.arg_hull.width + 2.0 * margin};
    return out;
}

// ---- profiles -------------------------------------------------------------------------

double base_profile(double m, double beta, double mu) {
    double a = std::abs(m);
    return std::pow(1.0 + a, -mu) * std::exp(-beta * a);
}

ProfileValues eval_profiles(const ProblemSpec& s, double m, cplx eps, cplx tau1, cplx tau2) {
    if (std::abs(eps) > s.eps0 * (1.0 + 1e-12)) throw DomainError("eval_profiles: eps outside D(0, eps0)");
    ProfileValues v;
    double phi = base_profile(m, s.beta, s.mu);
    for (const auto& t : s.I) v.C_l.push_back(t.amplitude(eps) * phi);
    for (const auto& [key, amp] : s.forcing) {
        cplx F = amp(eps) * phi;
        v.F[key] = F;
        v.Psi += F * std::pow(tau1, key.first) / gamma_fn(static_cast<double>(key.first) / s.k1) *
                 std::pow(tau2, key.second) / gamma_fn(static_cast<double>(key.second) / s.k2);
    }
    return v;
}

double c_psi(const ProblemSpec& s, double rho1, double rho2) {
    double K = 0.0;
    for (const auto& [key, amp] : s.forcing) K = std::max(K, amp.sup_bound);
    double sum = 0.0;
    for (int n1 : s.N1)
        for (int n2 : s.N2)
            sum += std::pow(rho1, n1 - 1) / gamma_fn(static_cast<double>(n1) / s.k1) * std::pow(rho2, n2 - 1) /
                   gamma_fn(static_cast<double>(n2) / s.k2);
    return K * sum;
}

double k_coeff(const ProblemSpec& s) {
    double K = 0.0;
    for (const auto& t : s.I) K = std::max(K, t.amplitude.sup_bound);
    return K;
}

bool amplitude_bound_holds(const ProfileAmplitude& a, double eps0, double* observed) {
    double sup = std::abs(a(0.0));
    for (int i = 1; i <= 40; ++i) {
        double r = eps0 * i / 40.0;
        for (int j = 0; j < 128; ++j) sup = std::max(sup, std::abs(a(std::polar(r, 2.0 * kPi * j / 128.0))));
    }
    if (observed) *observed = sup;
    return sup <= a.sup_bound * (1.0 + 1e-12);
}

// ---- JSON -----------------------------------------------------------------------------

namespace {

cplx coeff_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("coefficient must be [re, im]");
}

ComplexPoly poly_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a nonempty coefficient array");
    CVec c;
    for (const auto& e : j) c.push_back(coeff_from_json(e));
    return ComplexPoly(c);
}

json poly_to_json(const ComplexPoly& p) {
    json a = json::array();
    for (auto c : p.coeffs()) a.push_back({c.real(), c.imag()});
    return a;
}

template <class T>
T req(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

ProblemSpec spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("spec must be a JSON object");
    if (!j.contains("spec_version")) throw ConfigError("missing field 'spec_version'");
    if (req<int>(j, "spec_version") != 1) throw ConfigError("unsupported spec_version (expected 1)");

    ProblemSpec s;
    s.name = j.value("name", std::string("unnamed"));
    s.k1 = req<int>(j, "k1");
    s.k2 = req<int>(j, "k2");
    s.delta1 = req<int>(j, "delta1");
    s.delta2 = req<int>(j, "delta2");
    s.Delta0 = req<int>(j, "Delta0");
    s.eps0 = req<double>(j, "eps0");
    s.beta = req<double>(j, "beta");
    s.mu = req<double>(j, "mu");
    if (!(s.eps0 > 0.0)) throw ConfigError("eps0 must be positive");
    s.Q = poly_from_json(req<json>(j, "Q"), "Q");
    s.R = poly_from_json(req<json>(j, "R"), "R");
    auto eps_poly = [&](const char* key) {
        json a = req<json>(j, key);
        if (!a.is_array() || a.empty()) throw ConfigError(std::string(key) + ": expected a nonempty array");
        std::vector<ComplexPoly> cs;
        for (const auto& e : a) cs.push_back(poly_from_json(e, key));
        return EpsPoly(cs);
    };
    s.P1 = eps_poly("P1");
    s.P2 = eps_poly("P2");

    std::map<std::string, ProfileAmplitude> amps;
    if (j.contains("amplitudes")) {
        for (const auto& [name, a] : j.at("amplitudes").items()) {
            ProfileAmplitude pa;
            pa.name = name;
            pa.amplitude = poly_from_json(req<json>(a, "coeffs"), "amplitude " + name);
            pa.sup_bound = req<double>(a, "sup_bound");
            amps[name] = pa;
        }
    }
    auto amp_ref = [&](const json& e) {
        std::string n = req<std::string>(e, "amplitude");
        auto it = amps.find(n);
        if (it == amps.end()) throw ConfigError("unknown amplitude '" + n + "'");
        return it->second;
    };
    for (const auto& e : j.value("I", json::array())) {
        IndexTuple t;
        auto l = req<std::vector<int>>(e, "l");
        if (l.size() != 4) throw ConfigError("index tuple needs four entries");
        t.l1 = l[0];
        t.l2 = l[1];
        t.l3 = l[2];
        t.l4 = l[3];
        t.Delta = req<int>(e, "Delta");
        t.amplitude = amp_ref(e);
        s.R_l.push_back(poly_from_json(req<json>(e, "R_l"), "R_l"));
        auto [d1, d2] = tuple_shifts(s, t);
        t.d_k1 = d1;
        t.d_k2 = d2;
        s.I.push_back(t);
    }
    s.N1 = req<std::vector<int>>(j, "N1");
    s.N2 = req<std::vector<int>>(j, "N2");
    if (s.N1.empty() || s.N2.empty()) throw ConfigError("N1 and N2 must be nonempty");
    for (const auto& e : req<json>(j, "forcing")) {
        auto n = req<std::vector<int>>(e, "n");
        if (n.size() != 2) throw ConfigError("forcing entry needs n = [n1, n2]");
        s.forcing[{n[0], n[1]}] = amp_ref(e);
    }
    return s;
}

ProblemSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return spec_from_json_text(ss.str());
}

std::string spec_to_json_text(const ProblemSpec& s) {
    json j;
    j["spec_version"] = 1;
    j["name"] = s.name;
    j["k1"] = s.k1;
    j["k2"] = s.k2;
    j["delta1"] = s.delta1;
    j["delta2"] = s.delta2;
    j["Delta0"] = s.Delta0;
    j["eps0"] = s.eps0;
    j["beta"] = s.beta;
    j["mu"] = s.mu;
    j["Q"] = poly_to_json(s.Q);
    j["R"] = poly_to_json(s.R);
    for (const auto* key : {"P1", "P2"}) {
        const EpsPoly& p = std::string(key) == "P1" ? s.P1 : s.P2;
        json a = json::array();
        for (const auto& c : p.coeffs()) a.push_back(poly_to_json(c));
        j[key] = a;
    }
    json amps = json::object();
    json I = json::array();
    for (std::size_t i = 0; i < s.I.size(); ++i) {
        const auto& t = s.I[i];
        amps[t.amplitude.name] = {{"coeffs", poly_to_json(t.amplitude.amplitude)}, {"sup_bound", t.amplitude.sup_bound}};
        I.push_back({{"l", {t.l1, t.l2, t.l3, t.l4}}, {"Delta", t.Delta}, {"R_l", poly_to_json(s.R_l[i])},
                     {"amplitude", t.amplitude.name}});
    }
    json forcing = json::array();
    for (const auto& [key, a] : s.forcing) {
        amps[a.name] = {{"coeffs", poly_to_json(a.amplitude)}, {"sup_bound", a.sup_bound}};
        forcing.push_back({{"n", {key.first, key.second}}, {"amplitude", a.name}});
    }
    j["amplitudes"] = amps;
    j["I"] = I;
    j["N1"] = s.N1;
    j["N2"] = s.N2;
    j["forcing"] = forcing;
    return j.dump(2);
}

// ---- built-in instances ---------------------------------------------------------------

namespace {

ProfileAmplitude amp(const std::string& name, CVec coeffs, double bound) {
    return {name, ComplexPoly(std::move(coeffs)), bound};
}

ComplexPoly poly(std::initializer_list<cplx> c) { return ComplexPoly(CVec(c)); }

}  // namespace

std::vector<std::string> builtin_names() { return {"paper-remark", "scenario-a", "scenario-b"}; }

ProblemSpec builtin_spec(const std::string& name) {
    ProblemSpec s;
    s.name = name;
    if (name == "scenario-a") {
        // Minimal two-level instance: no linear tuples, constant symbols.
        s.k1 = 2;
        s.k2 = 1;
        s.delta1 = 1;
        s.delta2 = 2;
        s.Delta0 = 4;
        s.eps0 = 0.5;
        s.beta = 1.0;
        s.mu = 2.0;
        s.Q = poly({4.0});
        s.R = poly({1.0});
        s.P1 = EpsPoly({poly({0.5, 0.25})});
        s.P2 = EpsPoly({poly({0.5})});
        s.N1 = {1};
        s.N2 = {1};
        s.forcing[{1, 1}] = amp("F11", {1.0}, 1.0);
        return s;
    }
    if (name == "paper-remark") {
        // Orders and the single tuple (6,1,7,2) with Delta = 11; the factor -X^2+2 is read
        // as the symbol of both right-hand linear terms.
        s.k1 = 3;
        s.k2 = 2;
        s.delta1 = 2;
        s.delta2 = 3;
        s.Delta0 = 12;
        s.eps0 = 0.5;
        s.beta = 1.0;
        s.mu = 4.0;
        s.Q = poly({1.0, 0.0, 0.0, 0.0, 1.0});
        s.R = poly({2.0, 0.0, -1.0});
        IndexTuple t;
        t.l1 = 6;
        t.l2 = 1;
        t.l3 = 7;
        t.l4 = 2;
        t.Delta = 11;
        t.d_k1 = 2;
        t.d_k2 = 1;
        t.amplitude = amp("c_6172", {0.05, 0.02}, 0.06);
        s.I.push_back(t);
        s.R_l.push_back(poly({2.0, 0.0, -1.0}));
        s.P1 = EpsPoly({poly({0.05}), poly({0.0, 0.02})});
        s.P2 = EpsPoly({poly({0.05}), poly({0.0}), poly({0.01})});
        s.N1 = {1};
        s.N2 = {1};
        s.forcing[{1, 1}] = amp("F11", {0.2}, 0.2);
        return s;
    }
    if (name == "scenario-b") {
        // Tuple (7,2,8,3): l2, l4 > 1 so every correction sum in the linear kernels is
        // populated; non-constant symbols exercise the grid-based m layer.
        s.k1 = 2;
        s.k2 = 1;
        s.delta1 = 3;
        s.delta2 = 6;
        s.Delta0 = 12;
        s.eps0 = 0.5;
        s.beta = 1.0;
        s.mu = 3.0;
        s.Q = poly({2.0, 0.0, -1.0});
        s.R = poly({1.0, -0.5});
        IndexTuple t;
        t.l1 = 7;
        t.l2 = 2;
        t.l3 = 8;
        t.l4 = 3;
        t.Delta = 11;
        t.d_k1 = 1;
        t.d_k2 = 2;
        t.amplitude = amp("c_7283", {0.1}, 0.1);
        s.I.push_back(t);
        s.R_l.push_back(poly({0.5}));
        s.P1 = EpsPoly({poly({0.1})});
        s.P2 = EpsPoly({poly({0.1}), poly({0.05})});
        s.N1 = {1};
        s.N2 = {1};
        s.forcing[{1, 1}] = amp("F11", {0.5}, 0.5);
        return s;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace borel_lab
