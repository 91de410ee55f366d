#pragma once
// Geodesic flow in Cartesian coordinates for an arbitrary MetricField, plus
// the geodesic-escape (no-trapping) Monte Carlo: integrate a family of
// unit-speed initial conditions until each leaves a region and compare the
// worst exit time against the escape bound (2/delta) sup |x - x0|_g.

#include <cstdint>
#include <vector>

#include "mwlab/metric.hpp"

namespace mwlab {

struct GeodesicState {
    Vec x;
    Vec v;
    double t = 0.0;
};

// sqrt(v^T G(x) v) — conserved along exact geodesics.
double g_speed(const MetricField& field, const GeodesicState& s);

// One classical RK4 step of x'' + Gamma(x)(x', x') = 0.
GeodesicState geodesic_step(const MetricField& field, const GeodesicState& s,
                            double h);

struct Region {
    enum class Kind { ball, shell };
    Kind kind = Kind::ball;
    int n = 3;
    Vec center;                      // ball
    double radius = 0.0;             // ball
    double r_lo = 0.0, r_hi = 0.0;   // shell about the origin

    bool contains(const Vec& x) const; // strict interior
    static Region ball(const Vec& center, double radius);
    static Region shell(int n, double r_lo, double r_hi);
};

struct TraceResult {
    bool exited = false;
    double exit_time = 0.0;
    GeodesicState final_state;
    std::vector<GeodesicState> path; // nonempty only when record_path
};

// Integrate until the trajectory leaves the region (exit time refined by
// bisection to bisection_tol) or t exceeds t_max. The initial state must be
// unit g-speed within 1e-6 (ConfigError otherwise); an initial state already
// outside the region exits at time 0.
TraceResult trace_until_exit(const MetricField& field, const Region& region,
                             GeodesicState initial, double t_max,
                             double h = 1e-3, bool record_path = false,
                             double bisection_tol = 1e-8);

// Deterministic unit-g-speed initial conditions inside the region. Every
// fifth sample is adversarial: near-boundary inward-radial for balls (the
// diameter chord that maximizes the exit time in the flat case), mid-radius
// tangential for shells (trapped candidates on a central sphere).
std::vector<GeodesicState> sample_geodesic_ics(const MetricField& field,
                                               const Region& region, int count,
                                               std::uint64_t seed = 0);

struct GccSample {
    GeodesicState initial;
    bool exited = false;
    double exit_time = 0.0;
};

struct GccReport {
    int sample_count = 0;
    bool all_exited = true;
    double max_exit_time = 0.0;
    int argmax = -1;
    double sup_distance = 0.0; // sup over region samples of |x - x0|_g
    double bound = 0.0;        // (2/delta) * sup_distance
    bool within_bound = true;  // max_exit_time <= bound + slack
    std::vector<GccSample> samples;
    std::vector<int> non_exiting; // indices of trajectories that never left
};

// The time budget must cover the theoretical bound (ConfigError otherwise:
// a smaller budget could label escaping geodesics as trapped).
GccReport check_gcc(const MetricField& field, const Region& region,
                    double delta, const Vec& x0,
                    const std::vector<GeodesicState>& ics, double t_budget,
                    double h = 1e-3, double slack = 1e-4, int threads = 1);

} // namespace mwlab
