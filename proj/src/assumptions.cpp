#include "mwlab/assumptions.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"
#include "mwlab/sampling.hpp"

namespace mwlab {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::holds_with_margin: return "holds-with-margin";
        case Verdict::fails: return "fails";
    }
    return "fails";
}

std::vector<const ConditionCheck*> AssumptionReport::violations() const {
    std::vector<const ConditionCheck*> out;
    for (const auto& c : conditions)
        if (!c.ok) out.push_back(&c);
    return out;
}

namespace {

// Result of scanning a pointwise min-eigenvalue condition over samples.
struct EigScan {
    double worst = std::numeric_limits<double>::infinity();
    double tol_at_worst = 0.0;        // violation tolerance at the worst point
    double equal_tol_at_worst = 0.0;  // equality-band width at the worst point
    Vec witness;
};

ConditionCheck eig_condition(const std::string& id, const EigScan& s,
                             const std::string& detail) {
    ConditionCheck c;
    c.id = id;
    c.margin = s.worst;
    c.witness = s.witness;
    c.detail = detail;
    c.ok = s.worst >= -s.tol_at_worst;
    c.equality = c.ok && s.worst <= s.equal_tol_at_worst;
    return c;
}

// min eigenvalue of (1-coef) G + (r/2) dG/dr over the samples, either on the
// full space or restricted to the tangent complement of the radial direction.
EigScan scan_inequality(const MetricField& field, const std::vector<Vec>& pts,
                        double coef, bool tangent_only) {
    EigScan s;
    for (const auto& x : pts) {
        const Mat G = field.metric(x);
        const Mat dG = field.radial_derivative(x);
        const double r = x.norm();
        Mat M = (1.0 - coef) * G + 0.5 * r * dG;
        if (tangent_only) {
            const Mat T = tangent_basis(x);
            M = Mat(T.transpose() * M * T);
        }
        const double ev =
            Eigen::SelfAdjointEigenSolver<Mat>(M).eigenvalues().minCoeff();
        if (ev < s.worst) {
            const double scale = 1.0 + G.cwiseAbs().maxCoeff();
            s.worst = ev;
            s.tol_at_worst = 1e-10 * scale;
            s.equal_tol_at_worst = 1e-8 * scale;
            s.witness = x;
        }
    }
    return s;
}

ConditionCheck radial_eigenvector_condition(const MetricField& field,
                                            const std::vector<Vec>& pts) {
    ConditionCheck c;
    c.id = "radial-eigenvector";
    c.detail = "G x/|x| = x/|x| over the sampled region";
    double worst = 0.0;
    double tol = 1e-10;
    for (const auto& x : pts) {
        const Mat G = field.metric(x);
        const Vec xhat = x / x.norm();
        const double dev = (G * xhat - xhat).cwiseAbs().maxCoeff();
        if (dev > worst) {
            worst = dev;
            tol = 1e-10 * (1.0 + G.cwiseAbs().maxCoeff());
            c.witness = x;
        }
    }
    c.margin = tol - worst;
    c.ok = worst <= tol;
    return c;
}

ConditionCheck det_power_law_condition(AssumptionReport& rep,
                                       const MetricField& field,
                                       const std::vector<Vec>& pts) {
    const DetFit fit = metric_determinant_fit(field, pts);
    rep.c0 = fit.c0;
    rep.d = fit.d;
    rep.det_residual = fit.max_residual;
    ConditionCheck c;
    c.id = "determinant-power-law";
    c.detail = "log det G linear in log r; worst log-scale misfit " +
               format_double(fit.max_residual);
    c.ok = fit.max_residual <= 1e-8;
    c.margin = 1e-8 - fit.max_residual;
    return c;
}

ConditionCheck exponent_bound_condition(AssumptionReport& rep, double bound,
                                        const std::string& bound_text) {
    ConditionCheck c;
    c.id = "exponent-lower-bound";
    c.detail = "fitted d = " + format_double(rep.d) + " against " + bound_text;
    rep.exponent_bound = bound_text + " = " + format_double(bound);
    const double margin = rep.d - bound;
    c.margin = margin;
    c.ok = margin >= -1e-9;
    c.equality = c.ok && margin <= 1e-9;
    return c;
}

void scan_damping_bounds(AssumptionReport& rep, const DampingProfile& damping,
                         const RadialMetricParams& params, double r_lo,
                         double r_hi, int count) {
    for (double r : linspace(r_lo, r_hi, count)) {
        rep.damping_sup = std::max(rep.damping_sup, damping.value(r));
        rep.damping_grad_sup =
            std::max(rep.damping_grad_sup, std::abs(damping.derivative(r)));
        rep.damping_lap_sup =
            std::max(rep.damping_lap_sup, std::abs(damping.laplacian(params, r)));
    }
}

// Smallest C with |Delta_g a| <= C a + eps over sampled radii, for a ladder
// of eps values. A sample with a ~ 0 but |Delta_g a| > eps is a hard
// violation (no finite C works).
std::vector<CepsEntry> ceps_table(const DampingProfile& damping,
                                  const RadialMetricParams& params,
                                  double r_lo, double r_hi, int count) {
    std::vector<CepsEntry> table;
    const auto radii = linspace(r_lo, r_hi, count);
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        CepsEntry e;
        e.eps = eps;
        for (double r : radii) {
            const double a = damping.value(r);
            const double lap = std::abs(damping.laplacian(params, r));
            if (a > 1e-12 * damping.a0) {
                e.c_eps = std::max(e.c_eps, std::max(0.0, (lap - eps) / a));
            } else if (lap > eps) {
                e.hard_violation = true;
                Vec w(1);
                w(0) = r;
                e.witness = w;
            }
        }
        table.push_back(std::move(e));
    }
    return table;
}

ConditionCheck damping_regularity_condition(const std::vector<CepsEntry>& t) {
    ConditionCheck c;
    c.id = "damping-laplacian-bound";
    c.detail = "|Delta_g a| <= C_eps a + eps admits finite C_eps";
    for (const auto& e : t)
        if (e.hard_violation) {
            c.ok = false;
            c.witness = e.witness;
            c.detail = "no finite C works at eps = " + format_double(e.eps);
        }
    return c;
}

ConditionCheck damping_coverage_condition(const DampingProfile& damping,
                                          double r_lo_outer, double r_hi_outer,
                                          bool need_collar, int count) {
    ConditionCheck c;
    c.id = "damping-coverage";
    c.detail = "a >= a0 on the required region";
    const double floor = damping.a0 * (1.0 - 1e-12);
    double worst = std::numeric_limits<double>::infinity();
    double worst_r = 0.0;
    auto scan = [&](double lo, double hi) {
        for (double r : linspace(lo, hi, count)) {
            const double a = damping.value(r);
            if (a < worst) {
                worst = a;
                worst_r = r;
            }
        }
    };
    scan(r_lo_outer, r_hi_outer);
    if (need_collar) {
        if (!damping.has_collar()) {
            c.ok = false;
            c.detail =
                "obstacle collar required: a >= a0 near the boundary needs "
                "eps1 > 0";
            return c;
        }
        scan(damping.d1, damping.d1 + damping.eps1);
    }
    c.margin = worst - floor;
    c.ok = worst >= floor;
    if (!c.ok) {
        Vec w(1);
        w(0) = worst_r;
        c.witness = w;
        c.detail = "a(" + format_double(worst_r) + ") = " +
                   format_double(worst) + " < a0";
    }
    return c;
}

void finalize_verdict(AssumptionReport& rep) {
    bool any_fail = false, any_equality = false;
    for (const auto& c : rep.conditions) {
        any_fail |= !c.ok;
        any_equality |= (c.ok && c.equality);
    }
    rep.verdict = any_fail ? Verdict::fails
                  : any_equality ? Verdict::holds
                                 : Verdict::holds_with_margin;
    rep.damping_coverage_ok = true;
    for (const auto& c : rep.conditions)
        if (c.id == "damping-coverage") rep.damping_coverage_ok = c.ok;
}

void require_delta(double delta) {
    if (!(delta > 0.0) || !(delta <= 1.0))
        throw ConfigError("assumption check: delta must lie in (0, 1]");
}

} // namespace

double alpha_max_at(const MetricField& field, const Vec& x) {
    const Mat G = field.metric(x);
    const Mat dG = field.radial_derivative(x);
    const Mat T = tangent_basis(x);
    const double r = x.norm();
    const Mat A = T.transpose() * (0.5 * r * dG) * T;
    const Mat B = T.transpose() * G * T;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, B);
    return 1.0 + es.eigenvalues().minCoeff();
}

double delta_max_at(const MetricField& field, const Vec& x) {
    const Mat G = field.metric(x);
    const Mat dG = field.radial_derivative(x);
    const double r = x.norm();
    const Mat A = G + 0.5 * r * dG;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, G);
    return es.eigenvalues().minCoeff();
}

AssumptionReport check_assumption_A(const MetricField& field,
                                    const DomainSpec& dom, double alpha,
                                    const DampingProfile& damping,
                                    const SamplerConfig& cfg) {
    if (!(dom.r_obstacle > 0.0) || !(dom.r_max > dom.r_obstacle))
        throw DomainError("assumption A: need 0 < r_obstacle < r_max");
    AssumptionReport rep;
    rep.assumption = "A";
    rep.alpha = alpha;

    const auto pts = shell_points(field.dimension(), dom.r_obstacle,
                                  dom.r_max, cfg.radii, cfg.directions,
                                  cfg.seed);

    ConditionCheck no_damp;
    no_damp.id = "damping-absent";
    no_damp.detail = "hypothesis requires a == 0";
    no_damp.ok = !damping.active();
    if (!no_damp.ok) no_damp.margin = -damping.a0;
    rep.conditions.push_back(std::move(no_damp));

    rep.conditions.push_back(radial_eigenvector_condition(field, pts));
    rep.conditions.push_back(eig_condition(
        "tangent-inequality", scan_inequality(field, pts, alpha, true),
        "(1-alpha) G + (r/2) dG/dr >= 0 on tangent vectors, alpha = " +
            format_double(alpha)));
    rep.conditions.push_back(det_power_law_condition(rep, field, pts));
    rep.conditions.push_back(exponent_bound_condition(
        rep, 2.0 * (1.0 - field.dimension()), "d >= 2(1-n)"));

    rep.alpha_max = std::numeric_limits<double>::infinity();
    for (const auto& x : pts)
        rep.alpha_max = std::min(rep.alpha_max, alpha_max_at(field, x));

    finalize_verdict(rep);
    return rep;
}

AssumptionReport check_assumption_B(const MetricField& field,
                                    const DomainSpec& dom, double delta,
                                    const DampingProfile& damping,
                                    const SamplerConfig& cfg) {
    require_delta(delta);
    damping.validate();
    if (!damping.active())
        throw ConfigError("assumption B: requires active damping (a0 > 0)");
    if (!(dom.r_obstacle > 0.0) || !(dom.r_max > dom.r_obstacle))
        throw DomainError("assumption B: need 0 < r_obstacle < r_max");
    if (!(damping.R0 > dom.r_obstacle))
        throw ConfigError("assumption B: R0 must exceed the obstacle radius");

    AssumptionReport rep;
    rep.assumption = "B";
    rep.delta = delta;

    const double r_hi = std::min(damping.R0, dom.r_max);
    const auto pts = shell_points(field.dimension(), dom.r_obstacle, r_hi,
                                  cfg.radii, cfg.directions, cfg.seed);

    rep.conditions.push_back(eig_condition(
        "full-vector-inequality", scan_inequality(field, pts, delta, false),
        "(1-delta) G + (r/2) dG/dr >= 0 on all vectors, delta = " +
            format_double(delta)));
    rep.conditions.push_back(damping_coverage_condition(
        damping, damping.R0 - damping.eps0, dom.r_max, /*need_collar=*/true,
        4 * cfg.radii));

    const DetFit fit = metric_determinant_fit(field, pts);
    rep.c0 = fit.c0;
    rep.d = fit.d;
    rep.det_residual = fit.max_residual;
    const RadialMetricParams params{field.dimension(), fit.c0, fit.d, 1.0};
    rep.ceps = ceps_table(damping, params, dom.r_obstacle, dom.r_max,
                          16 * cfg.radii);
    rep.conditions.push_back(damping_regularity_condition(rep.ceps));
    scan_damping_bounds(rep, damping, params, dom.r_obstacle, dom.r_max,
                        16 * cfg.radii);

    rep.delta_max = std::numeric_limits<double>::infinity();
    for (const auto& x : pts)
        rep.delta_max = std::min(rep.delta_max, delta_max_at(field, x));

    finalize_verdict(rep);
    return rep;
}

AssumptionReport check_assumption_C(const MetricField& field,
                                    const DomainSpec& dom, double delta,
                                    const DampingProfile& damping,
                                    const SamplerConfig& cfg) {
    require_delta(delta);
    damping.validate();
    if (!damping.active())
        throw ConfigError("assumption C: requires active damping (a0 > 0)");
    if (!(dom.r_obstacle > 0.0) || !(dom.r_max > dom.r_obstacle))
        throw DomainError("assumption C: need 0 < r_obstacle < r_max");
    if (!(damping.R0 > dom.r_obstacle))
        throw ConfigError("assumption C: R0 must exceed the obstacle radius");

    AssumptionReport rep;
    rep.assumption = "C";
    rep.delta = delta;

    const double r_hi = std::min(damping.R0, dom.r_max);
    const auto pts = shell_points(field.dimension(), dom.r_obstacle, r_hi,
                                  cfg.radii, cfg.directions, cfg.seed);

    rep.conditions.push_back(radial_eigenvector_condition(field, pts));
    rep.conditions.push_back(det_power_law_condition(rep, field, pts));
    rep.conditions.push_back(eig_condition(
        "full-vector-inequality", scan_inequality(field, pts, delta, false),
        "(1-delta) G + (r/2) dG/dr >= 0 on all vectors, delta = " +
            format_double(delta)));
    rep.conditions.push_back(damping_coverage_condition(
        damping, damping.R0 - damping.eps0, dom.r_max, /*need_collar=*/false,
        4 * cfg.radii));
    rep.conditions.push_back(exponent_bound_condition(
        rep, 2.0 * (field.dimension() - 1) * (delta - 1.0),
        "d >= 2(n-1)(delta-1)"));

    const RadialMetricParams params{field.dimension(), rep.c0, rep.d, 1.0};
    rep.ceps = ceps_table(damping, params, dom.r_obstacle, dom.r_max,
                          16 * cfg.radii);
    scan_damping_bounds(rep, damping, params, dom.r_obstacle, dom.r_max,
                        16 * cfg.radii);

    rep.delta_max = std::numeric_limits<double>::infinity();
    for (const auto& x : pts)
        rep.delta_max = std::min(rep.delta_max, delta_max_at(field, x));

    finalize_verdict(rep);
    return rep;
}

AssumptionReport check_appendix_condition(const MetricField& field,
                                          double r_lo, double r_hi,
                                          double delta,
                                          const SamplerConfig& cfg) {
    require_delta(delta);
    if (!(r_lo > 0.0) || !(r_hi > r_lo))
        throw DomainError(
            "appendix check: need 0 < r_lo < r_hi (origin excluded)");
    AssumptionReport rep;
    rep.assumption = "appendix";
    rep.delta = delta;

    const auto pts = shell_points(field.dimension(), r_lo, r_hi, cfg.radii,
                                  cfg.directions, cfg.seed);
    rep.conditions.push_back(radial_eigenvector_condition(field, pts));
    rep.conditions.push_back(det_power_law_condition(rep, field, pts));
    rep.conditions.push_back(eig_condition(
        "full-vector-inequality", scan_inequality(field, pts, delta, false),
        "(1-delta) G + (r/2) dG/dr >= 0 on all vectors, delta = " +
            format_double(delta)));
    rep.conditions.push_back(exponent_bound_condition(
        rep, 2.0 * (field.dimension() - 1) * (delta - 1.0),
        "d >= 2(n-1)(delta-1)"));

    rep.delta_max = std::numeric_limits<double>::infinity();
    for (const auto& x : pts)
        rep.delta_max = std::min(rep.delta_max, delta_max_at(field, x));

    finalize_verdict(rep);
    return rep;
}

BoundaryCheck
check_boundary_condition(const MetricField& field,
                         const std::vector<std::pair<Vec, Vec>>& samples,
                         double tol) {
    BoundaryCheck out;
    for (const auto& [x, nu] : samples) {
        const Mat G = field.metric(x);
        const double g_norm = std::sqrt(nu.dot(G * nu));
        if (std::abs(g_norm - 1.0) > 1e-8)
            throw GeometryError(
                "boundary check: normal is not g-unit (|nu|_g = " +
                format_double(g_norm) + ") at |x| = " +
                format_double(x.norm()));
        // <grad_g r, nu>_g = dr(nu) = (x/|x|) . nu for any metric.
        const double val = (x / x.norm()).dot(nu);
        if (val > out.max_value) {
            out.max_value = val;
            out.witness = x;
        }
    }
    out.ok = out.max_value <= tol;
    return out;
}

std::vector<std::pair<Vec, Vec>>
sphere_boundary_samples(const MetricField& field, double d1, int count,
                        std::uint64_t seed) {
    if (!(d1 > 0.0))
        throw DomainError("sphere_boundary_samples: d1 must be > 0");
    std::vector<std::pair<Vec, Vec>> out;
    for (const auto& dir : sphere_directions(field.dimension(), count, seed)) {
        const Vec x = d1 * dir;
        const Mat G = field.metric(x);
        Vec nu = -dir;
        nu /= std::sqrt(nu.dot(G * nu));
        out.emplace_back(x, nu);
    }
    return out;
}

} // namespace mwlab
