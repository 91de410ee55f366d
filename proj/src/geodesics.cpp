#include "mwlab/geodesics.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"
#include "mwlab/sampling.hpp"

namespace mwlab {

double g_speed(const MetricField& field, const GeodesicState& s) {
    const Mat G = field.metric(s.x);
    return std::sqrt(s.v.dot(G * s.v));
}

namespace {

// Velocity derivative: a^k = -Gamma^k_{ij} v^i v^j, assembled without forming
// Christoffel symbols: G a = -(S - q/2) with S_l = sum_ij d_i g_{jl} v^i v^j
// and q_l = v^T (dG/dx_l) v.
Vec acceleration(const MetricField& field, const Vec& x, const Vec& v) {
    const Mat G = field.metric(x);
    const auto dG = field.spatial_derivative(x);
    const int n = static_cast<int>(x.size());
    Mat Dv = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) Dv += v(k) * dG[k];
    Vec rhs = Dv * v;
    for (int l = 0; l < n; ++l) rhs(l) -= 0.5 * v.dot(dG[l] * v);
    return Eigen::LLT<Mat>(G).solve(-rhs);
}

} // namespace

GeodesicState geodesic_step(const MetricField& field, const GeodesicState& s,
                            double h) {
    const Vec k1x = s.v;
    const Vec k1v = acceleration(field, s.x, s.v);
    const Vec k2x = s.v + 0.5 * h * k1v;
    const Vec k2v =
        acceleration(field, s.x + 0.5 * h * k1x, s.v + 0.5 * h * k1v);
    const Vec k3x = s.v + 0.5 * h * k2v;
    const Vec k3v =
        acceleration(field, s.x + 0.5 * h * k2x, s.v + 0.5 * h * k2v);
    const Vec k4x = s.v + h * k3v;
    const Vec k4v = acceleration(field, s.x + h * k3x, s.v + h * k3v);
    GeodesicState out;
    out.x = s.x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    out.v = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    out.t = s.t + h;
    if (!out.x.allFinite() || !out.v.allFinite())
        throw StepError("geodesic_step: non-finite state at t = " +
                        format_double(out.t));
    return out;
}

bool Region::contains(const Vec& x) const {
    if (kind == Kind::ball) return (x - center).norm() < radius;
    const double r = x.norm();
    return r > r_lo && r < r_hi;
}

Region Region::ball(const Vec& center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("region: ball radius must be > 0");
    Region r;
    r.kind = Kind::ball;
    r.n = static_cast<int>(center.size());
    r.center = center;
    r.radius = radius;
    return r;
}

Region Region::shell(int n, double r_lo, double r_hi) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo))
        throw ConfigError("region: shell needs 0 < r_lo < r_hi");
    Region r;
    r.kind = Kind::shell;
    r.n = n;
    r.r_lo = r_lo;
    r.r_hi = r_hi;
    return r;
}

TraceResult trace_until_exit(const MetricField& field, const Region& region,
                             GeodesicState initial, double t_max, double h,
                             bool record_path, double bisection_tol) {
    if (!(h > 0.0)) throw ConfigError("trace_until_exit: h must be > 0");
    const double speed = g_speed(field, initial);
    if (std::abs(speed - 1.0) > 1e-6)
        throw ConfigError("trace_until_exit: initial g-speed " +
                          format_double(speed) + " is not unit within 1e-6");
    TraceResult out;
    if (!region.contains(initial.x)) {
        out.exited = true;
        out.exit_time = 0.0;
        out.final_state = std::move(initial);
        return out;
    }
    GeodesicState s = std::move(initial);
    if (record_path) out.path.push_back(s);
    while (s.t < t_max) {
        GeodesicState next = geodesic_step(field, s, h);
        if (!region.contains(next.x)) {
            // refine the crossing time within (s.t, s.t + h] by bisection on
            // the partial-step length
            double lo = 0.0, hi = h;
            while (hi - lo > bisection_tol) {
                const double mid = 0.5 * (lo + hi);
                if (region.contains(geodesic_step(field, s, mid).x))
                    lo = mid;
                else
                    hi = mid;
            }
            out.exited = true;
            out.final_state = geodesic_step(field, s, hi);
            out.exit_time = s.t + hi;
            if (record_path) out.path.push_back(out.final_state);
            return out;
        }
        s = std::move(next);
        if (record_path) out.path.push_back(s);
    }
    out.exited = false;
    out.final_state = std::move(s);
    return out;
}

std::vector<GeodesicState> sample_geodesic_ics(const MetricField& field,
                                               const Region& region, int count,
                                               std::uint64_t seed) {
    if (count < 1)
        throw ConfigError("sample_geodesic_ics: count must be >= 1");
    const int n = field.dimension();
    if (region.n != n)
        throw ConfigError("sample_geodesic_ics: region/metric dimension mismatch");
    const auto pos_dirs = sphere_directions(n, count, seed);
    const auto vel_dirs = sphere_directions(n, count, seed + 777);
    std::vector<GeodesicState> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const bool adversarial = (i % 5 == 4);
        GeodesicState s;
        if (region.kind == Region::Kind::ball) {
            if (adversarial) {
                // near-rim, aimed through the center: the diameter chord
                s.x = region.center + region.radius * (1.0 - 1e-6) * pos_dirs[i];
                s.v = -pos_dirs[i];
            } else {
                const double u =
                    halton(static_cast<std::uint64_t>(i) + 1 +
                               (seed % 65536) * 104729ULL, 41);
                s.x = region.center +
                      region.radius * 0.999 * std::pow(u, 1.0 / n) *
                          pos_dirs[i];
                s.v = vel_dirs[i];
            }
        } else {
            if (adversarial) {
                // tangential start on the central sphere of the shell
                const double r = 0.5 * (region.r_lo + region.r_hi);
                s.x = r * pos_dirs[i];
                const Vec xhat = s.x / s.x.norm();
                Vec tang = vel_dirs[i] - vel_dirs[i].dot(xhat) * xhat;
                if (tang.norm() < 1e-9) tang = tangent_basis(s.x).col(0);
                s.v = tang;
            } else {
                const double u =
                    halton(static_cast<std::uint64_t>(i) + 1 +
                               (seed % 65536) * 104729ULL, 41);
                const double r = region.r_lo +
                                 (region.r_hi - region.r_lo) *
                                     (0.001 + 0.998 * u);
                s.x = r * pos_dirs[i];
                s.v = vel_dirs[i];
            }
        }
        s.v /= g_speed(field, s);
        s.t = 0.0;
        out.push_back(std::move(s));
    }
    return out;
}

GccReport check_gcc(const MetricField& field, const Region& region,
                    double delta, const Vec& x0,
                    const std::vector<GeodesicState>& ics, double t_budget,
                    double h, double slack, int threads) {
    if (!(delta > 0.0) || !(delta <= 1.0))
        throw ConfigError("check_gcc: delta must lie in (0, 1]");
    if (x0.size() != field.dimension())
        throw ConfigError("check_gcc: x0 dimension mismatch");
    if (ics.empty()) throw ConfigError("check_gcc: no initial conditions");

    GccReport rep;
    rep.sample_count = static_cast<int>(ics.size());

    // sup |x - x0|_g over a dense deterministic sample of the region closure,
    // with the boundary (where the sup typically lives) sampled explicitly.
    std::vector<Vec> pts;
    if (region.kind == Region::Kind::ball) {
        for (const auto& d : sphere_directions(region.n, 4096, 17))
            pts.push_back(region.center + region.radius * d);
        for (auto& p :
             ball_points(region.n, region.center, region.radius, 1024, 18))
            pts.push_back(std::move(p));
    } else {
        for (const auto& d : sphere_directions(region.n, 2048, 17)) {
            pts.push_back(region.r_lo * d);
            pts.push_back(region.r_hi * d);
        }
        for (auto& p :
             shell_points(region.n, region.r_lo, region.r_hi, 48, 64, 18))
            pts.push_back(std::move(p));
    }
    for (const auto& s : ics) pts.push_back(s.x);
    for (const auto& p : pts) {
        const Vec y = p - x0;
        if (y.norm() == 0.0) continue;
        const double dist = std::sqrt(y.dot(field.metric(p) * y));
        rep.sup_distance = std::max(rep.sup_distance, dist);
    }
    rep.bound = (2.0 / delta) * rep.sup_distance;
    if (t_budget < rep.bound)
        throw ConfigError("check_gcc: time budget " + format_double(t_budget) +
                          " is below the escape bound " +
                          format_double(rep.bound) +
                          "; trapped verdicts would be unreliable");

    rep.samples.resize(ics.size());
    parallel_for(ics.size(), threads, [&](std::size_t i) {
        GccSample out;
        out.initial = ics[i];
        const TraceResult tr =
            trace_until_exit(field, region, ics[i], t_budget, h);
        out.exited = tr.exited;
        out.exit_time = tr.exited ? tr.exit_time : t_budget;
        rep.samples[i] = std::move(out);
    });

    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const auto& s = rep.samples[i];
        if (!s.exited) {
            rep.all_exited = false;
            rep.non_exiting.push_back(static_cast<int>(i));
        } else if (s.exit_time > rep.max_exit_time) {
            rep.max_exit_time = s.exit_time;
            rep.argmax = static_cast<int>(i);
        }
    }
    rep.within_bound =
        rep.all_exited && rep.max_exit_time <= rep.bound + slack;
    return rep;
}

} // namespace mwlab
