#pragma once

// Crank-Nicolson time stepping for the damped nonlinear Schrödinger system
// on the radial and warped reductions. The scheme solves
//   i (u+ - u)/dt + L_h v + i a v - |v|^{p-1} v = 0,  v = (u+ + u)/2,
// by fixed-point iteration on the nonlinearity; the midpoint treatment makes
// the discrete mass and energy dissipation identities hold to solver
// tolerance, mirroring the continuous ones.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mwlab/damping.hpp"
#include "mwlab/functionals.hpp"
#include "mwlab/grid.hpp"

namespace mwlab {

struct FieldState {
    double t = 0.0;
    VecC u; // radial: size J+1; warped: (J+1)*K, index j*K+k
};

struct SolverConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    double p = 3.0;
    bool nonlinear = true;
    double fp_tolerance = 1e-12; // absolute, w-weighted L2 norm of v-update
    int fp_max_iterations = 50;
};

// Spatial discretization + damping with a prepared Crank-Nicolson solve.
// apply_laplacian uses the stored boundary entries of the input as values
// (so it is exact on non-Dirichlet data such as the damping profile);
// solve() returns the interior solution with Dirichlet rows set to 0.
class DiscreteOperator {
  public:
    virtual ~DiscreteOperator() = default;

    virtual int size() const = 0;
    virtual void apply_laplacian(const VecC& u, VecC& out) const = 0;
    virtual void prepare(double dt) = 0; // factor A+ = I + (dt/2)a - (i dt/2)L_h
    virtual void solve(const VecC& rhs, VecC& out) const = 0;
    virtual void enforce_boundary(VecC& u) const = 0;

    virtual const std::vector<double>& damping_values() const = 0;
    virtual const QuadratureContext& quadrature() const = 0;
};

std::unique_ptr<DiscreteOperator> make_radial_operator(
    const RadialGrid& grid, const DampingProfile& damping);

std::unique_ptr<DiscreteOperator> make_warped_operator(
    const WarpedGrid& grid, const DampingProfile& damping);

struct StepStats {
    int iterations = 0;
    double fp_residual = 0.0;
};

// One Crank-Nicolson step. prepare(dt) must already have been called with
// cfg.dt. Throws StepError on fixed-point non-convergence or non-finite
// output.
FieldState step_crank_nicolson(const FieldState& state,
                               const SolverConfig& cfg, DiscreteOperator& op,
                               StepStats* stats = nullptr);

// Initial-data descriptors. gaussian: A exp(-(r-center)^2/(2 width^2))
// * exp(i k (r-center)), smoothly windowed to zero at both Dirichlet rows
// over boundary_margin (default 2*width). ring: gaussian * exp(i mexp theta)
// (warped grids only).
struct InitialData {
    enum class Kind { zero, gaussian, ring };
    Kind kind = Kind::gaussian;
    double amplitude = 1.0;
    double center = 3.0;
    double width = 0.5;
    double k = 0.0;
    int m_theta = 0;
    double boundary_margin = -1.0; // <0: use 2*width
    bool operator==(const InitialData&) const = default;
};

FieldState make_initial_data(const InitialData& d, const RadialGrid& grid);
FieldState make_initial_data(const InitialData& d, const WarpedGrid& grid);

// Per-step observation hook: states before/after the step and the midpoint
// v = (before.u + after.u)/2 the identities are evaluated at.
struct StepContext {
    int step_index = 0;
    double t_mid = 0.0;
    const FieldState& before;
    const FieldState& after;
    const VecC& v;
};
using StepObserver = std::function<void(const StepContext&)>;

struct RunSettings {
    int diag_stride = 1;   // record diagnostics every this many steps
    double alpha = 0.0;    // coefficient of the angular Morawetz density
};

struct SimulationResult {
    DiagnosticsSeries series;
    FieldState final_state;
};

// Advance from the initial state to t_final (round(t_final/dt) steps),
// recording diagnostics every diag_stride steps (plus t=0 and the final
// step). Residual columns hold the residual of the step ending at the row's
// time. Deterministic for fixed inputs. StepError carries the step index.
SimulationResult run_simulation(DiscreteOperator& op,
                                const FieldState& initial,
                                const SolverConfig& cfg,
                                const RunSettings& settings = {},
                                const StepObserver& observer = {});

} // namespace mwlab
