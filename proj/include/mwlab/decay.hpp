#pragma once

// Decay-rate fitting and the stability dichotomy checks: uniform exponential
// rate (rate independent of the data size) versus data-dependent rate, plus
// the boundedness check of the time-integrated Morawetz densities on free
// (undamped) runs.

#include <functional>
#include <string>
#include <vector>

#include "mwlab/damping.hpp"
#include "mwlab/functionals.hpp"
#include "mwlab/grid.hpp"
#include "mwlab/solver.hpp"

namespace mwlab {

// Least-squares fit of log E(t) ~ log(C1 E(0)) - C2 t over [t1, t2].
// C1/C2 are reported only when the fit explains the data (R^2 >= 0.9);
// otherwise they are zeroed and the verdict says so.
struct DecayFit {
    double t1 = 0.0;
    double t2 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double r_squared = 0.0;
    bool monotone = false;    // E nonincreasing across the window
    bool exponential = false; // R^2 >= threshold
    std::string verdict;      // "exponential" | "no exponential regime detected"
};

inline constexpr double kExponentialFitThreshold = 0.9;

// Fit over an explicit window [t1, t2] (clipped to recorded samples).
// FitError: fewer than two samples in the window, or any E <= 0 there,
// or E(0) <= 0 (the C1 normalization needs it).
DecayFit fit_exponential_rate(const DiagnosticsSeries& series, double t1,
                              double t2);

// Fit over [transient_fraction * T, T] where T is the last recorded time.
DecayFit fit_exponential_rate(const DiagnosticsSeries& series,
                              double transient_fraction = 0.1);

// One amplitude of a uniformity sweep. Rows whose fit is impossible
// (e.g. amplitude 0 gives E == 0) are kept as degenerate with a note.
struct SweepRow {
    double amplitude = 0.0;
    DecayFit fit;
    bool degenerate = false;
    std::string note;
};

struct UniformitySweep {
    std::vector<SweepRow> rows;
    double c2_spread = 0.0; // (max-min)/|mean| of C2 over exponential rows
};

// Run the same scenario with the initial data scaled by each amplitude and
// fit each energy trace. `run` must be safe to call concurrently for
// distinct amplitudes (each call should build its own operator). Negative
// amplitudes or an empty list -> ConfigError; simulation failures are
// rethrown annotated with the amplitude.
UniformitySweep uniformity_sweep(
    const std::function<DiagnosticsSeries(double amplitude)>& run,
    const std::vector<double>& amplitudes, double transient_fraction = 0.1,
    int threads = 0);

// Time-integrated Morawetz densities, normalized by E(0), at one horizon.
struct MorawetzRow {
    double T = 0.0;
    double I1_over_E0 = 0.0;
    double I2_over_E0 = 0.0;
    double I3_over_E0 = 0.0;
    double boundary_mass_max = 0.0; // max outer-band monitor over [0, T]
    bool tainted = false;           // monitor exceeded 1e-4 (truncation bias)
};

struct MorawetzCheck {
    std::vector<MorawetzRow> rows; // one per horizon, ascending
    bool i2_covered = true; // d > 2(3-n); at equality I2 is not covered
    // Relative change of each integral between the two largest horizons.
    double growth_i1 = 0.0;
    double growth_i2 = 0.0;
    double growth_i3 = 0.0;
    bool bounded = true; // covered integrals changed by <= 5%
};

// Free-run boundedness of the time-integrated Morawetz densities: runs to
// the largest horizon and evaluates the cumulative integrals at each one.
// Requires a == 0 and d >= 2(3-n) (ConfigError naming the violated
// condition otherwise). The inner wall of the annulus automatically
// satisfies the star-shapedness sign condition (the radius decreases along
// the outward normal there), so no geometric precheck is needed beyond the
// (c0, d) constraint. alpha is the tangent-inequality coefficient entering
// the angular density.
MorawetzCheck morawetz_boundedness_check(const RadialGrid& grid,
                                         const DampingProfile& damping,
                                         const InitialData& data,
                                         SolverConfig cfg, double alpha,
                                         std::vector<double> horizons);

} // namespace mwlab
