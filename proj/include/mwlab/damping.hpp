#pragma once
// Radial damping coefficient a(r) >= 0 assembled from C^2 quintic-smoothstep
// ramps. Two components with disjoint supports:
//   outer plateau:  a = 0 for r <= R0 - eps0 - ramp, rises through one
//                   smoothstep, a = a0 exactly for r >= R0 - eps0
//   obstacle collar (optional, eps1 > 0): a = a0 exactly on [d1, d1 + eps1],
//                   falls to 0 by d1 + eps1 + collar_ramp
// so the damped region always covers {r >= R0 - eps0} and, when the collar is
// enabled, a neighborhood of the obstacle sphere.

#include "mwlab/metric.hpp"

namespace mwlab {

struct DampingProfile {
    double a0 = 0.0;   // plateau level; a0 == 0 disables damping entirely
    double R0 = 0.0;
    double eps0 = 0.0;
    double ramp = 1.0; // outer ramp width
    double d1 = 0.0;   // obstacle radius (collar geometry only)
    double eps1 = 0.0; // collar plateau width; 0 disables the collar
    double collar_ramp = 0.0;

    bool active() const { return a0 > 0.0; }
    bool has_collar() const { return active() && eps1 > 0.0; }
    bool operator==(const DampingProfile&) const = default;

    double value(double r) const;
    double derivative(double r) const;
    double second_derivative(double r) const;

    // Laplace-Beltrami of the radial function a on the reduced geometry:
    // a'' + ((n + d/2 - 1)/r) a'.
    double laplacian(const RadialMetricParams& params, double r) const;

    // ConfigError when the ramp geometry is inconsistent (overlapping
    // supports, eps0 outside (0, R0 - d1), 2 eps1 >= eps0, ...).
    void validate() const;
};

inline DampingProfile no_damping() { return DampingProfile{}; }

} // namespace mwlab
