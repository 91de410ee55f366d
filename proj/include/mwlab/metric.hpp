#pragma once
// Riemannian metrics on exterior domains of R^n with a distinguished origin.
// The shipped families share the "tangent profile" form
//     G(x) = P_r + f(r) (I - P_r),     P_r = (x/r) (x/r)^T,  r = |x|,
// i.e. the radial direction is a unit eigenvector and every tangent direction
// carries the scalar profile f(r) > 0:
//   flat            f = 1
//   example21       f = 1 for r < d1/2, f = r^m for r >= d1, C^2 quintic
//                   smoothstep blend in between
//   power_tangent   f = r^m everywhere (no blend; singular limit at r -> 0)
//   trapped_sphere  f = exp(-2 (r - r2) / r2), which solves
//                   dG/dr = -(2/r2) G (I - P_r) and makes |x| = r2 a totally
//                   geodesic ("trapped") sphere
// det G = f^{n-1}, so example21/power_tangent have det G = r^{m(n-1)} outside
// the blend. A user-supplied metric gets finite-difference fallbacks for both
// derivative evaluators.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mwlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class MetricField {
public:
    virtual ~MetricField() = default;

    int dimension() const { return n_; }
    const std::string& family() const { return family_; }

    // G(x). Throws DomainError at x = 0 and GeometryError if the evaluation
    // is not symmetric positive definite.
    Mat metric(const Vec& x) const;

    // dG/dr along the ray through x (direction x/|x|). Analytic for the
    // shipped families; central differences with step 1e-4 * |x| otherwise.
    Mat radial_derivative(const Vec& x) const;

    // Coordinate partials dG/dx_k for k = 0..n-1. Analytic when available;
    // otherwise reassembled from directional central differences with step
    // 1e-4 * |x| along the radial direction and 1e-5 along each tangent
    // direction.
    std::vector<Mat> spatial_derivative(const Vec& x) const;

    bool has_analytic_spatial_derivative() const { return analytic_spatial_; }

    // True when G(x) x/|x| = x/|x| holds by construction (all tangent-profile
    // families). User metrics return false and are checked by sampling.
    bool radial_unit_eigenvector() const { return radial_eigenvector_; }

protected:
    MetricField(int n, std::string family, bool analytic_spatial,
                bool radial_eigenvector);

    virtual void eval(const Vec& x, Mat& G) const = 0;
    // Return false to request the finite-difference fallback.
    virtual bool eval_radial_derivative(const Vec& x, Mat& dG) const;
    virtual bool eval_spatial_derivative(const Vec& x,
                                         std::vector<Mat>& dG) const;

    void check_point(const Vec& x) const;

    int n_;
    std::string family_;
    bool analytic_spatial_;
    bool radial_eigenvector_;
};

std::unique_ptr<MetricField> make_flat_metric(int n);
std::unique_ptr<MetricField> make_example21_metric(int n, double m, double d1);
std::unique_ptr<MetricField> make_power_tangent_metric(int n, double m);
std::unique_ptr<MetricField> make_trapped_sphere_metric(int n, double r2);
// Arbitrary user evaluator; derivative evaluators fall back to finite
// differences and no structural property is assumed.
std::unique_ptr<MetricField>
make_user_metric(int n, std::function<Mat(const Vec&)> eval);

// --- operations -------------------------------------------------------------

// Validated metric evaluation (same contract as MetricField::metric).
Mat eval_metric(const MetricField& field, const Vec& x);

// Least-squares fit of log det G = log c0 + d log r over the samples;
// max_residual is the worst absolute log-scale misfit.
struct DetFit {
    double c0 = 1.0;
    double d = 0.0;
    double max_residual = 0.0;
};
DetFit metric_determinant_fit(const MetricField& field,
                              const std::vector<Vec>& samples);

// Quadratic form <D_X H, X>_g of the multiplier field H = b(s)(x - center),
// s = |x - center|, given the scalar values b = b(s) and b_prime = b'(s):
//     b <(G + (s/2) dG/ds) X, X>  +  s b' <s_hat, G X>^2
// where dG/ds is the directional derivative of G along s_hat = (x-center)/s.
// The cross-profile term uses the g-radial component exactly as stated; it
// matches the covariant derivative whenever G s_hat = s_hat along the ray
// (all shipped families with center 0; flat with any center).
double dh_quadratic_form(const MetricField& field, const Vec& x, const Vec& X,
                         const Vec& center, double b, double b_prime);

// Euclidean-orthonormal basis of the orthogonal complement of x, as the
// columns of an n x (n-1) matrix (deterministic Householder construction).
// When G x/|x| = x/|x| this also spans the g-orthogonal complement of the
// radial direction.
Mat tangent_basis(const Vec& x);

// Scalar facts of the radially reduced geometry with det G = c0 r^d.
struct RadialMetricParams {
    int n = 3;
    double c0 = 1.0;
    double d = 0.0;
    double alpha = 1.0;  // constant Morawetz weight profile alpha(r)
};

// Laplace-Beltrami of the radius: Delta_g r = (n + d/2 - 1) / r.
double delta_g_r(const RadialMetricParams& params, double r);

// div_g of H = b(r) x: b (n + d/2) + r b'.
double divergence_of_radial_field(const RadialMetricParams& params, double r,
                                  double b, double b_prime);

} // namespace mwlab
