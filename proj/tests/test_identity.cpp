#include "mwlab/identity.hpp"

#include <cmath>

#include "doctest.h"
#include "mwlab/damping.hpp"
#include "mwlab/errors.hpp"
#include "mwlab/grid.hpp"
#include "mwlab/solver.hpp"

using namespace mwlab;

namespace {

DampingProfile outer_damping() {
    DampingProfile a;
    a.a0 = 1.0;
    a.R0 = 6.0;
    a.eps0 = 2.0;
    a.ramp = 1.0;
    a.d1 = 1.0;
    a.validate();
    return a;
}

// One full identity evaluation: run the scheme and return the report.
MultiplierTerms run_and_report(int J, double dt, double t_final,
                               const DampingProfile& damping,
                               const RadialMultiplier& H,
                               const ScalarMultiplier& P, double wave_k) {
    const RadialGrid g = make_radial_grid(3, 1.0, 0.0, 1.0, 8.0, J);
    auto op = make_radial_operator(g, damping);
    InitialData d;
    d.kind = InitialData::Kind::gaussian;
    d.amplitude = 1.0;
    d.center = 3.0;
    d.width = 0.5;
    d.k = wave_k;
    const FieldState init = make_initial_data(d, g);
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_final = t_final;
    cfg.p = 3.0;
    MultiplierIdentityAccumulator acc(g, *op, H, P, cfg.p, cfg.nonlinear);
    run_simulation(*op, init, cfg, {}, acc.observer());
    return acc.report();
}

} // namespace

TEST_CASE("vector multiplier profiles: frozen values and validation") {
    RadialMultiplier unit;
    unit.kind = RadialMultiplier::Kind::unit;
    unit.validate();
    CHECK(unit.b(5.0) == 1.0);
    CHECK(unit.db(5.0) == 0.0);
    CHECK(unit.h(5.0) == 5.0);
    CHECK(unit.dh(5.0) == 1.0);

    RadialMultiplier inv;
    inv.kind = RadialMultiplier::Kind::inverse_r;
    inv.validate();
    CHECK(inv.b(2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(inv.db(2.0) == doctest::Approx(-0.25).epsilon(1e-15));
    // H = x/r is the unit radial field: h = 1, dh = 0
    CHECK(inv.h(2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(inv.dh(2.0) == doctest::Approx(0.0).epsilon(1e-15));

    RadialMultiplier cut;
    cut.kind = RadialMultiplier::Kind::cutoff;
    cut.R0 = 6.0;
    cut.eps0 = 2.0;
    cut.validate();
    CHECK(cut.b(3.9) == 1.0); // plateau is exact
    CHECK(cut.b(4.0) == 1.0);
    CHECK(cut.b(5.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cut.b(6.0) == 0.0);
    CHECK(cut.b(7.0) == 0.0);
    CHECK(cut.db(4.0) == 0.0); // C^1 at both seams
    CHECK(cut.db(6.0) == 0.0);
    // d/dr [1 - S((r-4)/2)] at r=5: -S'(1/2)/2 = -1.875/2
    CHECK(cut.db(5.0) == doctest::Approx(-0.9375).epsilon(1e-14));

    RadialMultiplier bad = cut;
    bad.eps0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cut;
    bad.R0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cut;
    bad.eps0 = 7.0; // plateau would extend below r = 0
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("scalar multiplier profiles: frozen values and validation") {
    ScalarMultiplier c;
    c.kind = ScalarMultiplier::Kind::constant;
    c.c = 0.7;
    c.validate();
    CHECK(c.beta(3.0) == 0.7);
    CHECK(c.dbeta(3.0) == 0.0);
    CHECK(c.d2beta(3.0) == 0.0);

    ScalarMultiplier s;
    s.kind = ScalarMultiplier::Kind::half_dim_over_r;
    s.n = 3;
    s.validate();
    // beta = (n-1)/(2r): beta(2) = 1/2, beta' = -(n-1)/(2r^2), beta'' = (n-1)/r^3
    CHECK(s.beta(2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.dbeta(2.0) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(s.d2beta(2.0) == doctest::Approx(0.25).epsilon(1e-15));

    ScalarMultiplier bad = s;
    bad.n = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero solution: every term and residual is exactly zero") {
    const RadialGrid g = make_radial_grid(3, 1.0, 0.0, 1.0, 8.0, 60);
    auto op = make_radial_operator(g, outer_damping());
    InitialData d;
    d.kind = InitialData::Kind::zero;
    const FieldState init = make_initial_data(d, g);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 5e-3;
    RadialMultiplier H;
    H.kind = RadialMultiplier::Kind::inverse_r;
    ScalarMultiplier P;
    P.kind = ScalarMultiplier::Kind::half_dim_over_r;
    P.n = 3;
    MultiplierIdentityAccumulator acc(g, *op, H, P, cfg.p, cfg.nonlinear);
    run_simulation(*op, init, cfg, {}, acc.observer());
    const MultiplierTerms t = acc.report();
    CHECK(t.boundary == 0.0);
    CHECK(t.time_boundary == 0.0);
    CHECK(t.dh_form == 0.0);
    CHECK(t.damping == 0.0);
    CHECK(t.divergence == 0.0);
    CHECK(t.p_bulk == 0.0);
    CHECK(t.p_laplacian == 0.0);
    CHECK(t.h_residual == 0.0);
    CHECK(t.p_residual == 0.0);
    CHECK(t.residual == 0.0);
}

TEST_CASE("report before any observed step throws ConfigError") {
    const RadialGrid g = make_radial_grid(3, 1.0, 0.0, 1.0, 8.0, 60);
    auto op = make_radial_operator(g, no_damping());
    RadialMultiplier H;
    H.kind = RadialMultiplier::Kind::unit;
    ScalarMultiplier P;
    P.kind = ScalarMultiplier::Kind::constant;
    MultiplierIdentityAccumulator acc(g, *op, H, P, 3.0, true);
    CHECK_THROWS_AS(acc.report(), ConfigError);
}

TEST_CASE("free nonlinear run: residual falls >= 1.5x per joint refinement "
          "(H = radial unit field, P = (n-1)/(2r))") {
    RadialMultiplier H;
    H.kind = RadialMultiplier::Kind::inverse_r;
    ScalarMultiplier P;
    P.kind = ScalarMultiplier::Kind::half_dim_over_r;
    P.n = 3;
    const DampingProfile a = no_damping();
    const MultiplierTerms c0 = run_and_report(80, 4e-3, 0.08, a, H, P, 1.0);
    const MultiplierTerms c1 = run_and_report(160, 2e-3, 0.08, a, H, P, 1.0);
    const MultiplierTerms c2 = run_and_report(320, 1e-3, 0.08, a, H, P, 1.0);
    CHECK(c0.residual > 0.0);
    CHECK(c0.residual < 0.5); // sane at the coarsest level
    CHECK(c0.residual / c1.residual >= 1.5);
    CHECK(c1.residual / c2.residual >= 1.5);
    // this H is the unit radial field: its covariant-derivative form vanishes
    // on radial states
    CHECK(c2.dh_form == 0.0);
}

TEST_CASE("damped run with the cutoff multiplier: residual falls >= 1.5x "
          "per joint refinement") {
    RadialMultiplier H;
    H.kind = RadialMultiplier::Kind::cutoff;
    H.R0 = 6.0;
    H.eps0 = 2.0;
    ScalarMultiplier P;
    P.kind = ScalarMultiplier::Kind::half_dim_over_r;
    P.n = 3;
    const DampingProfile a = outer_damping();
    const MultiplierTerms c0 = run_and_report(100, 4e-3, 0.08, a, H, P, 2.0);
    const MultiplierTerms c1 = run_and_report(200, 2e-3, 0.08, a, H, P, 2.0);
    CHECK(c0.residual > 0.0);
    CHECK(c0.residual / c1.residual >= 1.5);
    // the wave has reached the damping layer, so the damping term is live
    CHECK(std::abs(c1.damping) > 0.0);
}

TEST_CASE("multiplier_identity_residual matches the accumulator report") {
    const RadialGrid g = make_radial_grid(3, 1.0, 0.0, 1.0, 8.0, 90);
    auto op = make_radial_operator(g, outer_damping());
    InitialData d;
    d.kind = InitialData::Kind::gaussian;
    d.amplitude = 0.8;
    d.center = 3.0;
    d.width = 0.5;
    d.k = 1.0;
    const FieldState init = make_initial_data(d, g);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 0.05;
    RadialMultiplier H;
    H.kind = RadialMultiplier::Kind::cutoff;
    H.R0 = 6.0;
    H.eps0 = 2.0;
    ScalarMultiplier P;
    P.kind = ScalarMultiplier::Kind::half_dim_over_r;
    P.n = 3;

    MultiplierIdentityAccumulator acc(g, *op, H, P, cfg.p, cfg.nonlinear);
    run_simulation(*op, init, cfg, {}, acc.observer());
    const MultiplierTerms t = acc.report();
    CHECK(t.residual ==
          doctest::Approx(std::max(t.h_residual, t.p_residual))
              .epsilon(1e-15));

    const double r =
        multiplier_identity_residual(g, *op, init, cfg, H, P);
    CHECK(r == doctest::Approx(t.residual).epsilon(1e-12));
}
