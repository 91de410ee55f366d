#pragma once

// Quadratures for every quantity the stabilization theory bounds: mass,
// energy, Morawetz densities, dissipation-identity residuals, and
// observability ratios. All functionals evaluate against a QuadratureContext
// describing the discrete geometry (node weights + kinetic edge list), so
// radial and warped states share one implementation.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mwlab {

using VecC = Eigen::VectorXcd;

// Discrete geometry underlying all quadratures.
//  - q: node quadrature weights (volume element integrated over the cell);
//    exactly 0 on Dirichlet rows.
//  - edges: the flux stencil of the discrete Laplacian; kinetic energy
//    integral = sum_e c_e |u_{i2} - u_{i1}|^2, which equals -<L_h u, u>_q
//    exactly for Dirichlet states.
//  - a / lap_a: damping values and their *discrete* Laplacian at the nodes
//    (the discrete one keeps the energy identity exact; an analytic Laplacian
//    would leave an O(dr^2) floor).
struct QuadratureContext {
    struct Edge {
        int i1 = 0;
        int i2 = 0;
        double c = 0.0;      // flux coefficient (volume-integrated)
        double r = 0.0;      // representative radius of the edge
        bool angular = false;
    };

    std::vector<double> q;
    std::vector<double> radius;
    std::vector<Edge> edges;
    std::vector<double> a;
    std::vector<double> lap_a;

    double r_interior = 0.0;    // inner-region cutoff for interior_mass
    double r_boundary_band = 0.0; // radius threshold of the outer monitor band
};

// sum q |u|^2  (the w-weighted squared L2 norm)
double mass_integral(const VecC& u, const QuadratureContext& ctx);

// sum c |du|^2 over edges  (= integral of |grad_g u|_g^2)
double kinetic_integral(const VecC& u, const QuadratureContext& ctx);

// (2/(p+1)) sum q |u|^{p+1}
double potential_integral(const VecC& u, const QuadratureContext& ctx,
                          double p);

// E = 1/2 (mass + kinetic + potential) with the conventions above, i.e.
// 1/2 ∫(|u|^2 + |grad u|^2) + 1/(p+1) ∫|u|^{p+1}.
double energy(const VecC& u, const QuadratureContext& ctx, double p);

// Morawetz densities: m1 = ∫ |u|^{p+1}/r, m2 = ∫ |u|^2/r^3,
// m3 = ∫ (alpha/r)(|grad u|^2 - |u_r|^2) — the angular-gradient excess,
// identically 0 for radial states.
double morawetz_density_p1(const VecC& u, const QuadratureContext& ctx,
                           double p);
double morawetz_density_r3(const VecC& u, const QuadratureContext& ctx);
double morawetz_density_ang(const VecC& u, const QuadratureContext& ctx,
                            double alpha);

// ∫ a (|u|^2 + |grad u|^2 + |u|^{p+1}); the gradient term uses link-averaged
// damping on each edge, matching the dissipation identity. The |u|^{p+1}
// term is included only for p > 1 (linear runs pass p = 1).
double damping_overlap(const VecC& u, const QuadratureContext& ctx, double p);

// ∫_{r <= r_interior} |u|^2 (the lower-order observability term)
double interior_mass(const VecC& u, const QuadratureContext& ctx);

// ∫_{r >= r_boundary_band} |u|^2 (absolute; callers normalize by M(0))
double outer_band_mass(const VecC& u, const QuadratureContext& ctx);

// Per-step dissipation-identity residuals (absolute increments) for the
// midpoint scheme, evaluated at v = (u0+u1)/2:
//   mass:   M(u1) - M(u0) + 2 dt <a v, v>
//   energy: G(u1) - G(u0) + dt (2 D_kin + 2 D_pot - <(L_h a) v, v>)
// with G = kinetic + potential, D_kin = sum_e abar_e c_e |dv|^2,
// D_pot = sum q a |v|^{p+1}.
struct DissipationResiduals {
    double mass = 0.0;
    double energy = 0.0;
};
DissipationResiduals dissipation_residuals(const VecC& u0, const VecC& u1,
                                           double dt,
                                           const QuadratureContext& ctx,
                                           double p);

// Time series of diagnostics recorded by a run. The first eleven columns are
// the CSV contract; the remaining columns feed observability analysis.
struct DiagnosticsSeries {
    std::vector<double> t;
    std::vector<double> mass;
    std::vector<double> energy;
    std::vector<double> kinetic;
    std::vector<double> potential;
    std::vector<double> morawetz_p1;
    std::vector<double> morawetz_r3;
    std::vector<double> morawetz_ang;
    std::vector<double> mass_identity_residual;   // |increment| / M(0)
    std::vector<double> energy_identity_residual; // |increment| / G(0)
    std::vector<double> outer_boundary_mass;      // band mass / M(0)

    std::vector<double> damping_overlap; // ∫a(|u|^2+|grad u|^2+|u|^{p+1})
    std::vector<double> interior_mass;   // ∫_{r<=R0-eps0}|u|^2

    double mass0 = 0.0;   // M at t=0
    double gnorm0 = 0.0;  // kinetic+potential at t=0

    std::size_t rows() const { return t.size(); }
};

// Time-trapezoid of the three Morawetz densities over [t1, t2] (clamped to
// the recorded range). Empty or degenerate window -> ConfigError.
struct MorawetzIntegrals {
    double I1 = 0.0;
    double I2 = 0.0;
    double I3 = 0.0;
};
MorawetzIntegrals morawetz_integrals(const DiagnosticsSeries& series,
                                     double t1, double t2);

// Observability ratio over [0, T]:
//   [E(0) + ∫_0^T E dt] / [∫_0^T ∫ a(|u|^2+|grad u|^2+|u|^{p+1}) dt]
// with_interior_term adds ∫_0^T interior_mass dt to the denominator (the
// pre-compactness form of the inequality). Denominator <= 1e-14 * numerator
// -> ObservabilityError (vacuous run).
double observability_ratio(const DiagnosticsSeries& series, double T,
                           bool with_interior_term = false);

} // namespace mwlab
