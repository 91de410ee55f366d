#include "mwlab/damping.hpp"

#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"

namespace mwlab {

// Outer component: a0 * S((r - foot)/ramp) with foot = R0 - eps0 - ramp.
// Collar component: a0 for r <= d1 + eps1, a0 * (1 - S(tau)) across the
// collar ramp, 0 beyond. Supports are disjoint (validate()), so the sum is
// C^2 and equals a0 exactly on the covered sets.

// Plateaus and zero regions are selected by explicit range tests so the
// profile is exactly a0 / exactly 0 there regardless of floating-point
// rounding in the ramp coordinate.

double DampingProfile::value(double r) const {
    if (!active()) return 0.0;
    double a = 0.0;
    const double foot = R0 - eps0 - ramp;
    if (r >= R0 - eps0)
        a = a0;
    else if (r > foot)
        a = a0 * smoothstep((r - foot) / ramp);
    if (has_collar()) {
        if (r <= d1 + eps1)
            a += a0;
        else if (r < d1 + eps1 + collar_ramp)
            a += a0 * (1.0 - smoothstep((r - (d1 + eps1)) / collar_ramp));
    }
    return a;
}

double DampingProfile::derivative(double r) const {
    if (!active()) return 0.0;
    double da = 0.0;
    const double foot = R0 - eps0 - ramp;
    if (r > foot && r < R0 - eps0)
        da = a0 * smoothstep_d1((r - foot) / ramp) / ramp;
    if (has_collar() && r > d1 + eps1 && r < d1 + eps1 + collar_ramp)
        da -= a0 * smoothstep_d1((r - (d1 + eps1)) / collar_ramp) / collar_ramp;
    return da;
}

double DampingProfile::second_derivative(double r) const {
    if (!active()) return 0.0;
    double dda = 0.0;
    const double foot = R0 - eps0 - ramp;
    if (r > foot && r < R0 - eps0)
        dda = a0 * smoothstep_d2((r - foot) / ramp) / (ramp * ramp);
    if (has_collar() && r > d1 + eps1 && r < d1 + eps1 + collar_ramp)
        dda -= a0 * smoothstep_d2((r - (d1 + eps1)) / collar_ramp) /
               (collar_ramp * collar_ramp);
    return dda;
}

double DampingProfile::laplacian(const RadialMetricParams& params,
                                 double r) const {
    return second_derivative(r) + delta_g_r(params, r) * derivative(r);
}

void DampingProfile::validate() const {
    if (a0 < 0.0) throw ConfigError("damping: a0 must be >= 0");
    if (!active()) return;
    if (!(R0 > 0.0)) throw ConfigError("damping: R0 must be > 0");
    if (!(eps0 > 0.0)) throw ConfigError("damping: eps0 must be > 0");
    if (!(ramp > 0.0)) throw ConfigError("damping: ramp must be > 0");
    const double foot = R0 - eps0 - ramp;
    if (!(foot > 0.0))
        throw ConfigError(
            "damping: outer ramp foot R0 - eps0 - ramp must be > 0");
    if (d1 > 0.0 && !(eps0 < R0 - d1))
        throw ConfigError("damping: need 0 < eps0 < R0 - d1");
    if (eps1 > 0.0) {
        if (!(d1 > 0.0))
            throw ConfigError("damping: collar requires the obstacle radius d1");
        if (!(collar_ramp > 0.0))
            throw ConfigError("damping: collar_ramp must be > 0");
        if (!(2.0 * eps1 < eps0))
            throw ConfigError("damping: need 2 eps1 < eps0");
        if (!(d1 + eps1 + collar_ramp <= foot))
            throw ConfigError(
                "damping: collar support overlaps the outer ramp "
                "(d1 + eps1 + collar_ramp must be <= R0 - eps0 - ramp)");
    }
}

} // namespace mwlab
