#include "mwlab/identity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"

namespace mwlab {

namespace {

using Cplx = std::complex<double>;

// Node gradient: centered in the interior, one-sided at the Dirichlet rows
// (the first-order boundary reconstruction).
void node_gradient(const VecC& u, double dr, VecC& out) {
    const int J = static_cast<int>(u.size()) - 1;
    out.resize(J + 1);
    out(0) = (u(1) - u(0)) / dr;
    for (int j = 1; j < J; ++j) out(j) = (u(j + 1) - u(j - 1)) / (2.0 * dr);
    out(J) = (u(J) - u(J - 1)) / dr;
}

} // namespace

void RadialMultiplier::validate() const {
    if (kind != Kind::cutoff) return;
    if (!(R0 > 0.0))
        throw ConfigError("vector multiplier: cutoff needs R0 > 0");
    if (!(eps0 > 0.0))
        throw ConfigError("vector multiplier: cutoff needs eps0 > 0");
    if (eps0 > R0)
        throw ConfigError(
            "vector multiplier: cutoff plateau would extend below r = 0 "
            "(eps0 > R0)");
}

double RadialMultiplier::b(double r) const {
    switch (kind) {
        case Kind::unit:
            return 1.0;
        case Kind::inverse_r:
            return 1.0 / r;
        case Kind::cutoff:
            if (r <= R0 - eps0) return 1.0;
            if (r >= R0) return 0.0;
            return 1.0 - smoothstep((r - (R0 - eps0)) / eps0);
    }
    return 0.0;
}

double RadialMultiplier::db(double r) const {
    switch (kind) {
        case Kind::unit:
            return 0.0;
        case Kind::inverse_r:
            return -1.0 / (r * r);
        case Kind::cutoff:
            if (r <= R0 - eps0 || r >= R0) return 0.0;
            return -smoothstep_d1((r - (R0 - eps0)) / eps0) / eps0;
    }
    return 0.0;
}

double RadialMultiplier::dh(double r) const {
    switch (kind) {
        case Kind::unit:
            return 1.0;
        case Kind::inverse_r:
            return 0.0; // h = r/r = 1
        case Kind::cutoff:
            return b(r) + r * db(r);
    }
    return 0.0;
}

void ScalarMultiplier::validate() const {
    if (kind == Kind::half_dim_over_r && n < 2)
        throw ConfigError("scalar multiplier: (n-1)/(2r) needs n >= 2");
}

double ScalarMultiplier::beta(double r) const {
    return kind == Kind::constant ? c : (n - 1) / (2.0 * r);
}

double ScalarMultiplier::dbeta(double r) const {
    return kind == Kind::constant ? 0.0 : -(n - 1) / (2.0 * r * r);
}

double ScalarMultiplier::d2beta(double r) const {
    return kind == Kind::constant ? 0.0 : (n - 1) / (r * r * r);
}

MultiplierIdentityAccumulator::MultiplierIdentityAccumulator(
    const RadialGrid& grid, const DiscreteOperator& op,
    const RadialMultiplier& H, const ScalarMultiplier& P, double p,
    bool nonlinear)
    : grid_(grid), H_(H), P_(P), p_(p), nonlinear_(nonlinear),
      q_(op.quadrature().q), a_(op.damping_values()) {
    H_.validate();
    P_.validate();
    if (op.size() != grid.size())
        throw ConfigError(
            "multiplier identity: operator does not match the radial grid "
            "(warped runs are not supported)");
}

void MultiplierIdentityAccumulator::observe(const StepContext& c) {
    const double dt = c.after.t - c.before.t;
    const int J = grid_.J;
    if (!any_) {
        first_u_ = c.before.u;
        any_ = true;
    }
    last_u_ = c.after.u;

    VecC vr;
    node_gradient(c.v, grid_.dr, vr);

    // Boundary flux: 1/2 <H,nu> |du/dnu|^2 dGamma, outward normal of the
    // annulus (inward-pointing at the inner wall).
    const double flux_out =
        0.5 * H_.h(grid_.r[J]) * grid_.w[J] * std::norm(vr(J));
    const double flux_in =
        0.5 * H_.h(grid_.r[0]) * grid_.w[0] * std::norm(vr(0));
    boundary_ += dt * (flux_out - flux_in);

    // Exponent of the volume weight: w ~ r^{n-1+d/2}, so
    // div H = b (n + d/2) + r b'.
    const double dim = grid_.n + 0.5 * grid_.d;
    for (int j = 1; j < J; ++j) {
        const double r = grid_.r[j];
        const double qj = q_[j];
        const Cplx vj = c.v(j);
        const Cplx du = c.after.u(j) - c.before.u(j);
        const double momentum = std::imag(vj * std::conj(du)) / dt;
        const double grad2 = std::norm(vr(j));
        const double amp2 = std::norm(vj);
        const double pot =
            nonlinear_ ? std::pow(amp2, 0.5 * (p_ + 1.0)) : 0.0;

        dh_form_ += dt * qj * H_.dh(r) * grad2;
        damping_ += dt * qj * a_[j] * H_.h(r) *
                    std::imag(vj * std::conj(vr(j)));
        divergence_ += dt * qj * 0.5 *
                       (momentum - grad2 - 2.0 / (p_ + 1.0) * pot) *
                       (H_.b(r) * dim + r * H_.db(r));

        const double beta = P_.beta(r);
        p_momentum_ += dt * qj * beta * momentum;
        p_gradient_ += dt * qj * beta * grad2;
        p_potential_ += dt * qj * beta * pot;
        const double lap_beta =
            P_.d2beta(r) + (grid_.n - 1 + 0.5 * grid_.d) / r * P_.dbeta(r);
        p_laplacian_ += dt * qj * (-0.5) * amp2 * lap_beta;
    }
}

StepObserver MultiplierIdentityAccumulator::observer() {
    return [this](const StepContext& c) { observe(c); };
}

MultiplierTerms MultiplierIdentityAccumulator::report() const {
    if (!any_)
        throw ConfigError("multiplier identity: no steps were observed");

    // Time-boundary term 1/2 Im(u H(conj u)) from the stored endpoint states.
    auto time_term = [&](const VecC& u) {
        VecC ur;
        node_gradient(u, grid_.dr, ur);
        double s = 0.0;
        for (int j = 1; j < grid_.J; ++j)
            s += q_[j] * H_.h(grid_.r[j]) *
                 std::imag(u(j) * std::conj(ur(j)));
        return 0.5 * s;
    };

    MultiplierTerms t;
    t.boundary = boundary_;
    t.time_boundary = time_term(last_u_) - time_term(first_u_);
    t.dh_form = dh_form_;
    t.damping = damping_;
    t.divergence = divergence_;
    t.p_momentum = p_momentum_;
    t.p_gradient = p_gradient_;
    t.p_potential = p_potential_;
    t.p_bulk = p_momentum_ - p_gradient_ - p_potential_;
    t.p_laplacian = p_laplacian_;

    const double h_scale = std::max(
        {std::abs(t.boundary), std::abs(t.time_boundary),
         std::abs(t.dh_form), std::abs(t.damping), std::abs(t.divergence)});
    const double h_gap = std::abs(
        t.boundary - (t.time_boundary + t.dh_form + t.damping + t.divergence));
    t.h_residual = h_scale > 0.0 ? h_gap / h_scale : 0.0;

    const double p_scale =
        std::max({std::abs(t.p_momentum), std::abs(t.p_gradient),
                  std::abs(t.p_potential), std::abs(t.p_laplacian)});
    t.p_residual =
        p_scale > 0.0 ? std::abs(t.p_bulk - t.p_laplacian) / p_scale : 0.0;

    t.residual = std::max(t.h_residual, t.p_residual);
    return t;
}

double multiplier_identity_residual(const RadialGrid& grid,
                                    DiscreteOperator& op,
                                    const FieldState& initial,
                                    const SolverConfig& cfg,
                                    const RadialMultiplier& H,
                                    const ScalarMultiplier& P) {
    MultiplierIdentityAccumulator acc(grid, op, H, P, cfg.p, cfg.nonlinear);
    run_simulation(op, initial, cfg, {}, acc.observer());
    return acc.report().residual;
}

} // namespace mwlab
