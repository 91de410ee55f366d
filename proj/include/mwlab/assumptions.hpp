#pragma once
// Structural-hypothesis checkers. Each checker samples the metric (and the
// damping profile where relevant) over a deterministic low-discrepancy point
// set and reports per-condition margins, witnesses for violations, the fitted
// determinant power law, and admissible-parameter envelopes.
//
// Verdict semantics: "fails" when some condition is violated beyond its
// tolerance; "holds" when every condition is satisfied but the binding
// inequality sits at equality (|margin| within tolerance); "holds_with_margin"
// when every inequality is satisfied with strictly positive margin.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mwlab/damping.hpp"
#include "mwlab/metric.hpp"

namespace mwlab {

enum class Verdict { holds, holds_with_margin, fails };
std::string to_string(Verdict v);

struct ConditionCheck {
    std::string id;       // stable semantic id ("tangent-inequality", ...)
    bool ok = true;
    bool equality = false; // satisfied but with ~zero margin
    double margin = 0.0;   // signed; negative means violated by this much
    Vec witness;           // worst sample point (empty when not applicable)
    std::string detail;
};

// Row of the damping-regularity table: smallest C with |Delta_g a| <= C a + eps
// over the sampled points; hard_violation marks a sample with a ~ 0 but
// |Delta_g a| > eps (no finite C can exist there).
struct CepsEntry {
    double eps = 0.0;
    double c_eps = 0.0;
    bool hard_violation = false;
    Vec witness;
};

struct SamplerConfig {
    int radii = 64;
    int directions = 128;
    std::uint64_t seed = 0;
};

// Sampling stand-in for the exterior domain: sphere obstacle of radius
// r_obstacle, truncated at r_max.
struct DomainSpec {
    double r_obstacle = 1.0;
    double r_max = 10.0;
};

struct AssumptionReport {
    std::string assumption; // "A", "B", "C", "appendix"
    Verdict verdict = Verdict::holds;
    std::vector<ConditionCheck> conditions;

    // fitted determinant power law det G ~ c0 r^d over the sampled region
    double c0 = 1.0, d = 0.0, det_residual = 0.0;

    // envelopes
    double alpha = std::numeric_limits<double>::quiet_NaN();      // requested (A)
    double alpha_max = std::numeric_limits<double>::quiet_NaN();  // inf over samples (A)
    double delta = std::numeric_limits<double>::quiet_NaN();      // requested (B/C/appendix)
    double delta_max = std::numeric_limits<double>::quiet_NaN();  // inf over samples

    bool damping_coverage_ok = true;
    std::vector<CepsEntry> ceps;                 // B (informational for C)
    double damping_sup = 0.0;                    // sup a over samples
    double damping_grad_sup = 0.0;               // sup |a'|
    double damping_lap_sup = 0.0;                // sup |Delta_g a|
    std::string exponent_bound;                  // the bound the fit was tested against

    std::vector<const ConditionCheck*> violations() const;
};

// (A): no damping; radial unit eigenvector; tangent-restricted inequality for
// the supplied constant alpha; determinant power law with d >= 2(1-n).
AssumptionReport check_assumption_A(const MetricField& field,
                                    const DomainSpec& dom, double alpha,
                                    const DampingProfile& damping,
                                    const SamplerConfig& cfg = {});

// (B): full-vector inequality with delta on the ball-of-influence r <= R0;
// damping active with a >= a0 on {r >= R0 - eps0} and on the obstacle collar;
// finite damping-regularity table.
AssumptionReport check_assumption_B(const MetricField& field,
                                    const DomainSpec& dom, double delta,
                                    const DampingProfile& damping,
                                    const SamplerConfig& cfg = {});

// (C): radial unit eigenvector and determinant power law on r <= R0,
// full-vector inequality there, outer damping coverage, and the exponent
// bound d >= 2(n-1)(delta-1).
AssumptionReport check_assumption_C(const MetricField& field,
                                    const DomainSpec& dom, double delta,
                                    const DampingProfile& damping,
                                    const SamplerConfig& cfg = {});

// Bounded-domain variant on the annulus [r_lo, r_hi] (origin excluded):
// radial eigenvector + determinant power law + full-vector inequality +
// exponent bound, no damping conditions.
AssumptionReport check_appendix_condition(const MetricField& field,
                                          double r_lo, double r_hi,
                                          double delta,
                                          const SamplerConfig& cfg = {});

// Largest admissible Morawetz weight at x: 1 plus the minimum generalized
// eigenvalue of (r/2) dG/dr against G on the tangent space.
double alpha_max_at(const MetricField& field, const Vec& x);

// Largest delta with (1-delta) G + (r/2) dG/dr >= 0 at x: the minimum
// generalized eigenvalue of (G + (r/2) dG/dr) against G.
double delta_max_at(const MetricField& field, const Vec& x);

// Outward-normal sign check <grad_g r, nu>_g <= tol over (point, normal)
// samples. Normals must be outward g-unit vectors of the domain (for the
// exterior of a sphere they point into the obstacle); a normal that is not
// g-unit within 1e-8 raises GeometryError.
struct BoundaryCheck {
    bool ok = true;
    double max_value = -std::numeric_limits<double>::infinity();
    Vec witness;
};
BoundaryCheck
check_boundary_condition(const MetricField& field,
                         const std::vector<std::pair<Vec, Vec>>& samples,
                         double tol = 1e-10);

// (point, outward g-unit normal) samples for the sphere obstacle |x| = d1 of
// an exterior domain (normals point into the obstacle, i.e. along -x).
std::vector<std::pair<Vec, Vec>>
sphere_boundary_samples(const MetricField& field, double d1, int count,
                        std::uint64_t seed = 0);

} // namespace mwlab
