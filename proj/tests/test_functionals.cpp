#include "mwlab/functionals.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "mwlab/errors.hpp"
#include "mwlab/grid.hpp"
#include "oracles.hpp"

using namespace mwlab;
using namespace std::complex_literals;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Hand-built quadrature context for a radial grid: node weights w_j*dr with
// Dirichlet rows zeroed, flux edges (j, j+1) with coefficient w(r_{j+1/2})/dr.
QuadratureContext radial_context(const RadialGrid& g) {
    QuadratureContext ctx;
    ctx.q.assign(g.size(), 0.0);
    ctx.radius = g.r;
    for (int j = 1; j < g.J; ++j) ctx.q[j] = g.w[j] * g.dr;
    for (int j = 0; j < g.J; ++j) {
        QuadratureContext::Edge e;
        e.i1 = j;
        e.i2 = j + 1;
        e.c = g.wm[j] / g.dr;
        e.r = 0.5 * (g.r[j] + g.r[j + 1]);
        e.angular = false;
        ctx.edges.push_back(e);
    }
    ctx.a.assign(g.size(), 0.0);
    ctx.lap_a.assign(g.size(), 0.0);
    ctx.r_boundary_band = g.r_out - 0.05 * (g.r_out - g.r_in);
    return ctx;
}

VecC random_state(int size, std::uint64_t seed, bool dirichlet = true) {
    oracle::Rng rng(seed);
    VecC u(size);
    for (int i = 0; i < size; ++i)
        u(i) = std::complex<double>(2.0 * rng.uniform() - 1.0,
                                    2.0 * rng.uniform() - 1.0);
    if (dirichlet) {
        u(0) = 0.0;
        u(size - 1) = 0.0;
    }
    return u;
}

} // namespace

TEST_CASE("functionals: single-node bump against hand quadrature (n=3 flat, "
          "p=3)") {
    const RadialGrid g = make_radial_grid(3, 1.0, 0.0, 1.0, 3.0, 4);
    QuadratureContext ctx = radial_context(g);
    VecC u = VecC::Zero(5);
    u(2) = 1.0; // r = 2

    // q_2 = w(2)*dr = 16*pi*0.5 = 8*pi
    const double q2 = 8.0 * kPi;
    CHECK(mass_integral(u, ctx) == doctest::Approx(q2).epsilon(1e-14));
    // edges (1,2) and (2,3): c = 4*pi*r_mid^2/dr
    const double kin =
        4.0 * kPi * (1.75 * 1.75 + 2.25 * 2.25) / 0.5;
    CHECK(kinetic_integral(u, ctx) == doctest::Approx(kin).epsilon(1e-14));
    CHECK(potential_integral(u, ctx, 3.0) ==
          doctest::Approx(0.5 * q2).epsilon(1e-14));
    CHECK(energy(u, ctx, 3.0) ==
          doctest::Approx(0.5 * (q2 + kin + 0.5 * q2)).epsilon(1e-14));
    CHECK(morawetz_density_p1(u, ctx, 3.0) ==
          doctest::Approx(q2 / 2.0).epsilon(1e-14));
    CHECK(morawetz_density_r3(u, ctx) ==
          doctest::Approx(q2 / 8.0).epsilon(1e-14));
    CHECK(morawetz_density_ang(u, ctx, 1.0) == 0.0); // radial: exactly zero
}

TEST_CASE("functionals: scaling laws under u -> lambda u") {
    const RadialGrid g = make_radial_grid(3, 1.0, 2.0, 1.0, 5.0, 32);
    QuadratureContext ctx = radial_context(g);
    const VecC u = random_state(g.size(), 99);
    const double lam = 1.7;
    const VecC v = lam * u;
    const double p = 2.5;
    CHECK(mass_integral(v, ctx) ==
          doctest::Approx(lam * lam * mass_integral(u, ctx)).epsilon(1e-12));
    CHECK(kinetic_integral(v, ctx) ==
          doctest::Approx(lam * lam * kinetic_integral(u, ctx))
              .epsilon(1e-12));
    CHECK(potential_integral(v, ctx, p) ==
          doctest::Approx(std::pow(lam, p + 1.0) *
                          potential_integral(u, ctx, p))
              .epsilon(1e-12));
}

TEST_CASE("functionals: additivity for disjointly supported states") {
    const RadialGrid g = make_radial_grid(3, 1.0, 0.0, 1.0, 5.0, 40);
    QuadratureContext ctx = radial_context(g);
    VecC u = VecC::Zero(g.size());
    VecC v = VecC::Zero(g.size());
    u(5) = 1.2 - 0.3i;
    u(6) = 0.4i;
    v(20) = -0.7 + 0.2i;
    v(21) = 1.1;
    const VecC s = u + v;
    const double p = 3.0;
    CHECK(mass_integral(s, ctx) ==
          doctest::Approx(mass_integral(u, ctx) + mass_integral(v, ctx))
              .epsilon(1e-13));
    CHECK(kinetic_integral(s, ctx) ==
          doctest::Approx(kinetic_integral(u, ctx) + kinetic_integral(v, ctx))
              .epsilon(1e-13));
    CHECK(potential_integral(s, ctx, p) ==
          doctest::Approx(potential_integral(u, ctx, p) +
                          potential_integral(v, ctx, p))
              .epsilon(1e-13));
}

TEST_CASE("functionals: angular Morawetz density on a warped grid") {
    WarpedProfile prof;
    prof.kind = WarpedProfile::Kind::modulated;
    prof.s = 1.0;
    prof.q = 1.0;
    prof.eps = 0.0; // pure surface-of-revolution: gamma = r^2
    prof.m_theta = 0;
    const int J = 24, K = 64;
    const WarpedGrid wg = make_warped_grid(prof, 1.0, 3.0, J, K);

    QuadratureContext ctx;
    ctx.q.assign(wg.size(), 0.0);
    ctx.radius.assign(wg.size(), 0.0);
    for (int j = 0; j <= J; ++j)
        for (int k = 0; k < K; ++k) {
            ctx.radius[wg.idx(j, k)] = wg.r[j];
            if (j > 0 && j < J)
                ctx.q[wg.idx(j, k)] = wg.omega[wg.idx(j, k)] * wg.dr * wg.dtheta;
        }
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
            QuadratureContext::Edge e;
            e.i1 = wg.idx(j, k);
            e.i2 = wg.idx(j + 1, k);
            e.c = wg.omega_rmid[j * K + k] * wg.dtheta / wg.dr;
            e.r = 0.5 * (wg.r[j] + wg.r[j + 1]);
            e.angular = false;
            ctx.edges.push_back(e);
        }
    for (int j = 1; j < J; ++j)
        for (int k = 0; k < K; ++k) {
            QuadratureContext::Edge e;
            e.i1 = wg.idx(j, k);
            e.i2 = wg.idx(j, (k + 1) % K);
            e.c = wg.flux_tmid[wg.idx(j, k)] * wg.dr / wg.dtheta;
            e.r = wg.r[j];
            e.angular = true;
            ctx.edges.push_back(e);
        }
    ctx.a.assign(wg.size(), 0.0);
    ctx.lap_a.assign(wg.size(), 0.0);

    // u = h(r) e^{i m theta} with h supported away from the boundary
    const int m = 2;
    VecC u = VecC::Zero(wg.size());
    for (int j = 1; j < J; ++j)
        for (int k = 0; k < K; ++k) {
            const double h = std::exp(-8.0 * (wg.r[j] - 2.0) * (wg.r[j] - 2.0));
            u(wg.idx(j, k)) =
                h * std::exp(std::complex<double>(0.0, m * wg.theta[k]));
        }

    // theta-independent modulus: the angular density is strictly positive and
    // matches sum over angular edges of (alpha/r) c |du|^2; analytically
    // m3 -> alpha * m^2 * (2 sin(m dtheta/2)/(m dtheta))^2 * sum_j h^2/(r^2) w...
    const double alpha = 0.7;
    const double m3 = morawetz_density_ang(u, ctx, alpha);
    CHECK(m3 > 0.0);

    // independent quadrature: for gamma = r^2, beta = 1/r^2, omega = r:
    // m3 = alpha * |2 sin(m dtheta/2)/dtheta|^2 * sum_j h_j^2/(r_j^2) * r_j * dr * 2pi / r_j
    const double disc_mode =
        std::pow(2.0 * std::sin(0.5 * m * wg.dtheta) / wg.dtheta, 2);
    double expect = 0.0;
    for (int j = 1; j < J; ++j) {
        const double h = std::exp(-8.0 * (wg.r[j] - 2.0) * (wg.r[j] - 2.0));
        // (alpha/r) * (1/sqrt(gamma)) * |u_theta-diff|^2 * dr/dtheta summed over K
        expect += (alpha / wg.r[j]) * (1.0 / wg.r[j]) * disc_mode *
                  wg.dtheta * wg.dtheta * h * h * K * wg.dr / wg.dtheta;
    }
    CHECK(m3 == doctest::Approx(expect).epsilon(1e-10));

    // a theta-independent state has exactly zero angular density
    VecC flat = VecC::Zero(wg.size());
    for (int j = 1; j < J; ++j)
        for (int k = 0; k < K; ++k) flat(wg.idx(j, k)) = 1.0 / wg.r[j];
    CHECK(morawetz_density_ang(flat, ctx, alpha) == 0.0);
}

TEST_CASE("functionals: dissipation residual formulas reduce correctly") {
    const RadialGrid g = make_radial_grid(3, 1.0, 0.0, 1.0, 5.0, 32);
    QuadratureContext ctx = radial_context(g);
    const VecC u0 = random_state(g.size(), 7);
    const VecC u1 = random_state(g.size(), 8);

    // a == 0: the mass residual is exactly the mass increment
    const auto res = dissipation_residuals(u0, u1, 0.01, ctx, 3.0);
    CHECK(res.mass ==
          doctest::Approx(std::abs(mass_integral(u1, ctx) -
                                   mass_integral(u0, ctx)))
              .epsilon(1e-13));
}

TEST_CASE("functionals: Morawetz time integrals and window handling") {
    DiagnosticsSeries s;
    s.t = {0.0, 1.0, 2.0};
    s.morawetz_p1 = {1.0, 2.0, 3.0};
    s.morawetz_r3 = {0.5, 0.5, 0.5};
    s.morawetz_ang = {0.0, 1.0, 0.0};
    const auto full = morawetz_integrals(s, 0.0, 2.0);
    CHECK(full.I1 == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(full.I2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(full.I3 == doctest::Approx(1.0).epsilon(1e-14));
    const auto tail = morawetz_integrals(s, 1.0, 2.0);
    CHECK(tail.I1 == doctest::Approx(2.5).epsilon(1e-14));
    CHECK_THROWS_AS(morawetz_integrals(s, 5.0, 6.0), ConfigError);
    CHECK_THROWS_AS(morawetz_integrals(s, 1.0, 1.0), ConfigError);
}

TEST_CASE("functionals: observability ratio and vacuous-run guard") {
    DiagnosticsSeries s;
    s.t = {0.0, 1.0, 2.0};
    s.energy = {1.0, 1.0, 1.0};
    s.damping_overlap = {0.5, 0.5, 0.5};
    s.interior_mass = {0.25, 0.25, 0.25};
    CHECK(observability_ratio(s, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(observability_ratio(s, 2.0, true) ==
          doctest::Approx(3.0 / 1.5).epsilon(1e-14));

    DiagnosticsSeries zero;
    zero.t = {0.0, 1.0};
    zero.energy = {0.0, 0.0};
    zero.damping_overlap = {0.0, 0.0};
    zero.interior_mass = {0.0, 0.0};
    CHECK_THROWS_AS(observability_ratio(zero, 1.0), ObservabilityError);

    DiagnosticsSeries vac;
    vac.t = {0.0, 1.0};
    vac.energy = {1.0, 1.0};
    vac.damping_overlap = {0.0, 0.0};
    vac.interior_mass = {0.0, 0.0};
    CHECK_THROWS_AS(observability_ratio(vac, 1.0), ObservabilityError);
}
