#include "mwlab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "mwlab/errors.hpp"

namespace mwlab {

namespace {

// |u|^{p+1} with a fast path for the cubic nonlinearity (p = 3)
inline double abs_pow_p1(const std::complex<double>& z, double p) {
    const double a2 = std::norm(z);
    if (p == 3.0) return a2 * a2;
    return std::pow(a2, 0.5 * (p + 1.0));
}

} // namespace

double mass_integral(const VecC& u, const QuadratureContext& ctx) {
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += ctx.q[i] * std::norm(u(i));
    return s;
}

double kinetic_integral(const VecC& u, const QuadratureContext& ctx) {
    double s = 0.0;
    for (const auto& e : ctx.edges) s += e.c * std::norm(u(e.i2) - u(e.i1));
    return s;
}

double potential_integral(const VecC& u, const QuadratureContext& ctx,
                          double p) {
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i)
        s += ctx.q[i] * abs_pow_p1(u(i), p);
    return 2.0 / (p + 1.0) * s;
}

double energy(const VecC& u, const QuadratureContext& ctx, double p) {
    return 0.5 * (mass_integral(u, ctx) + kinetic_integral(u, ctx) +
                  potential_integral(u, ctx, p));
}

double morawetz_density_p1(const VecC& u, const QuadratureContext& ctx,
                           double p) {
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i)
        s += ctx.q[i] * abs_pow_p1(u(i), p) / ctx.radius[i];
    return s;
}

double morawetz_density_r3(const VecC& u, const QuadratureContext& ctx) {
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double r = ctx.radius[i];
        s += ctx.q[i] * std::norm(u(i)) / (r * r * r);
    }
    return s;
}

double morawetz_density_ang(const VecC& u, const QuadratureContext& ctx,
                            double alpha) {
    double s = 0.0;
    for (const auto& e : ctx.edges) {
        if (!e.angular) continue;
        s += (alpha / e.r) * e.c * std::norm(u(e.i2) - u(e.i1));
    }
    return s;
}

double damping_overlap(const VecC& u, const QuadratureContext& ctx, double p) {
    const bool with_potential = p > 1.0; // linear runs pass p = 1
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i)
        s += ctx.q[i] * ctx.a[i] *
             (std::norm(u(i)) +
              (with_potential ? abs_pow_p1(u(i), p) : 0.0));
    for (const auto& e : ctx.edges) {
        const double abar = 0.5 * (ctx.a[e.i1] + ctx.a[e.i2]);
        if (abar != 0.0) s += abar * e.c * std::norm(u(e.i2) - u(e.i1));
    }
    return s;
}

double interior_mass(const VecC& u, const QuadratureContext& ctx) {
    if (!(ctx.r_interior > 0.0)) return 0.0;
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i)
        if (ctx.radius[i] <= ctx.r_interior) s += ctx.q[i] * std::norm(u(i));
    return s;
}

double outer_band_mass(const VecC& u, const QuadratureContext& ctx) {
    if (!(ctx.r_boundary_band > 0.0)) return 0.0;
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i)
        if (ctx.radius[i] >= ctx.r_boundary_band)
            s += ctx.q[i] * std::norm(u(i));
    return s;
}

DissipationResiduals dissipation_residuals(const VecC& u0, const VecC& u1,
                                           double dt,
                                           const QuadratureContext& ctx,
                                           double p) {
    const VecC v = 0.5 * (u0 + u1);

    // mass identity: M(u1) - M(u0) + 2 dt <a v, v>
    double av = 0.0;
    for (int i = 0; i < v.size(); ++i)
        av += ctx.q[i] * ctx.a[i] * std::norm(v(i));
    const double mass_res =
        std::abs(mass_integral(u1, ctx) - mass_integral(u0, ctx) +
                 2.0 * dt * av);

    // energy identity on G = kinetic + potential:
    //   G(u1) - G(u0) + dt (2 D_kin + 2 D_pot - <(L_h a) v, v>)
    // where D_kin uses the link-averaged damping (the choice that makes the
    // summation-by-parts manipulation exact) and L_h a is the *discrete*
    // Laplacian of the damping profile.
    double dkin = 0.0;
    for (const auto& e : ctx.edges) {
        const double abar = 0.5 * (ctx.a[e.i1] + ctx.a[e.i2]);
        if (abar != 0.0) dkin += abar * e.c * std::norm(v(e.i2) - v(e.i1));
    }
    double dpot = 0.0;
    double lap_term = 0.0;
    const bool with_potential = (p > 1.0);
    for (int i = 0; i < v.size(); ++i) {
        const double qv = ctx.q[i] * std::norm(v(i));
        if (with_potential && ctx.a[i] != 0.0)
            dpot += ctx.q[i] * ctx.a[i] * abs_pow_p1(v(i), p);
        lap_term += qv * ctx.lap_a[i];
    }
    const double g0 = kinetic_integral(u0, ctx) +
                      (with_potential ? potential_integral(u0, ctx, p) : 0.0);
    const double g1 = kinetic_integral(u1, ctx) +
                      (with_potential ? potential_integral(u1, ctx, p) : 0.0);
    const double energy_res =
        std::abs(g1 - g0 + dt * (2.0 * dkin + 2.0 * dpot - lap_term));
    return {mass_res, energy_res};
}

MorawetzIntegrals morawetz_integrals(const DiagnosticsSeries& series,
                                     double t1, double t2) {
    const auto& t = series.t;
    const double tol = 1e-12 * (1.0 + std::abs(t2));
    std::size_t lo = 0, hi = 0;
    bool any = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t1 - tol && t[i] <= t2 + tol) {
            if (!any) lo = i;
            hi = i;
            any = true;
        }
    }
    if (!any || hi <= lo)
        throw ConfigError("morawetz_integrals: window [" +
                          std::to_string(t1) + ", " + std::to_string(t2) +
                          "] covers fewer than two recorded times");
    MorawetzIntegrals out;
    for (std::size_t i = lo; i < hi; ++i) {
        const double h = 0.5 * (t[i + 1] - t[i]);
        out.I1 += h * (series.morawetz_p1[i] + series.morawetz_p1[i + 1]);
        out.I2 += h * (series.morawetz_r3[i] + series.morawetz_r3[i + 1]);
        out.I3 += h * (series.morawetz_ang[i] + series.morawetz_ang[i + 1]);
    }
    return out;
}

double observability_ratio(const DiagnosticsSeries& series, double T,
                           bool with_interior_term) {
    const auto& t = series.t;
    if (t.size() < 2)
        throw ConfigError("observability_ratio: series has fewer than two rows");
    const double tol = 1e-12 * (1.0 + std::abs(T));
    std::size_t hi = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] <= T + tol) hi = i;
    if (hi == 0)
        throw ConfigError("observability_ratio: T precedes the first record");

    double int_energy = 0.0, int_overlap = 0.0, int_interior = 0.0;
    for (std::size_t i = 0; i < hi; ++i) {
        const double h = 0.5 * (t[i + 1] - t[i]);
        int_energy += h * (series.energy[i] + series.energy[i + 1]);
        int_overlap +=
            h * (series.damping_overlap[i] + series.damping_overlap[i + 1]);
        if (with_interior_term)
            int_interior +=
                h * (series.interior_mass[i] + series.interior_mass[i + 1]);
    }
    const double numerator = series.energy.front() + int_energy;
    const double denominator = int_overlap + int_interior;
    if (denominator <= 1e-14 * numerator)
        throw ObservabilityError(
            "observability ratio is vacuous: the solution never meets the "
            "damping region (denominator " +
            std::to_string(denominator) + " vs numerator " +
            std::to_string(numerator) + ")");
    return numerator / denominator;
}

} // namespace mwlab
