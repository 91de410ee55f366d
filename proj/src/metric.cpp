#include "mwlab/metric.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"

namespace mwlab {

MetricField::MetricField(int n, std::string family, bool analytic_spatial,
                         bool radial_eigenvector)
    : n_(n),
      family_(std::move(family)),
      analytic_spatial_(analytic_spatial),
      radial_eigenvector_(radial_eigenvector) {
    if (n < 2) throw ConfigError("metric: dimension must be >= 2");
}

void MetricField::check_point(const Vec& x) const {
    if (x.size() != n_)
        throw DomainError("metric: point has dimension " +
                          std::to_string(x.size()) + ", metric expects " +
                          std::to_string(n_));
    if (!x.allFinite()) throw DomainError("metric: non-finite point");
    if (x.norm() == 0.0)
        throw DomainError("metric: |x| = 0 is outside the admissible domain");
}

bool MetricField::eval_radial_derivative(const Vec&, Mat&) const {
    return false;
}

bool MetricField::eval_spatial_derivative(const Vec&,
                                          std::vector<Mat>&) const {
    return false;
}

Mat MetricField::metric(const Vec& x) const {
    check_point(x);
    Mat G(n_, n_);
    eval(x, G);
    const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw GeometryError("metric: evaluation is not symmetric at |x| = " +
                            format_double(x.norm()));
    Eigen::LLT<Mat> llt(G);
    if (llt.info() != Eigen::Success)
        throw GeometryError(
            "metric: evaluation is not positive definite at |x| = " +
            format_double(x.norm()));
    return G;
}

Mat MetricField::radial_derivative(const Vec& x) const {
    check_point(x);
    Mat dG(n_, n_);
    if (eval_radial_derivative(x, dG)) return dG;
    const double r = x.norm();
    const Vec dir = x / r;
    const double h = 1e-4 * r;
    return (metric(x + h * dir) - metric(x - h * dir)) / (2.0 * h);
}

Mat tangent_basis(const Vec& x) {
    const int n = static_cast<int>(x.size());
    if (x.norm() == 0.0)
        throw DomainError("tangent_basis: |x| = 0 has no radial direction");
    Mat col(n, 1);
    col.col(0) = x / x.norm();
    Eigen::HouseholderQR<Mat> qr(col);
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    return Q.rightCols(n - 1);
}

std::vector<Mat> MetricField::spatial_derivative(const Vec& x) const {
    check_point(x);
    std::vector<Mat> dG;
    if (eval_spatial_derivative(x, dG)) return dG;
    // Directional central differences along the radial direction (step
    // proportional to r) and each tangent direction (absolute step), then
    // reassembled into coordinate partials.
    const double r = x.norm();
    const Vec xhat = x / r;
    const double h_rad = 1e-4 * r;
    const double h_tan = 1e-5;
    const Mat T = tangent_basis(x);
    const Mat d_rad =
        (metric(x + h_rad * xhat) - metric(x - h_rad * xhat)) / (2.0 * h_rad);
    std::vector<Mat> d_tan;
    for (int a = 0; a < n_ - 1; ++a) {
        const Vec t = T.col(a);
        d_tan.push_back((metric(x + h_tan * t) - metric(x - h_tan * t)) /
                        (2.0 * h_tan));
    }
    dG.assign(n_, Mat::Zero(n_, n_));
    for (int k = 0; k < n_; ++k) {
        dG[k] = xhat(k) * d_rad;
        for (int a = 0; a < n_ - 1; ++a) dG[k] += T(k, a) * d_tan[a];
    }
    return dG;
}

namespace {

// G(x) = P_r + f(r)(I - P_r): shared implementation of every shipped family.
class TangentProfileMetric final : public MetricField {
public:
    TangentProfileMetric(int n, std::string family,
                         std::function<double(double)> f,
                         std::function<double(double)> fp)
        : MetricField(n, std::move(family), /*analytic_spatial=*/true,
                      /*radial_eigenvector=*/true),
          f_(std::move(f)),
          fp_(std::move(fp)) {}

protected:
    void eval(const Vec& x, Mat& G) const override {
        const double r = x.norm();
        const double f = f_(r);
        const Vec xhat = x / r;
        G = f * Mat::Identity(n_, n_) +
            (1.0 - f) * (xhat * xhat.transpose());
    }

    bool eval_radial_derivative(const Vec& x, Mat& dG) const override {
        const double r = x.norm();
        const Vec xhat = x / r;
        dG = fp_(r) * (Mat::Identity(n_, n_) - xhat * xhat.transpose());
        return true;
    }

    bool eval_spatial_derivative(const Vec& x,
                                 std::vector<Mat>& dG) const override {
        const double r = x.norm();
        const double f = f_(r), fp = fp_(r);
        const double r2 = r * r, r4 = r2 * r2;
        const Vec xhat = x / r;
        const Mat IP = Mat::Identity(n_, n_) - xhat * xhat.transpose();
        dG.assign(n_, Mat(n_, n_));
        for (int k = 0; k < n_; ++k) {
            Mat dP(n_, n_);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    dP(i, j) = ((i == k ? x(j) : 0.0) +
                                (j == k ? x(i) : 0.0)) /
                                   r2 -
                               2.0 * x(i) * x(j) * x(k) / r4;
            dG[k] = fp * xhat(k) * IP + (1.0 - f) * dP;
        }
        return true;
    }

private:
    std::function<double(double)> f_, fp_;
};

class UserMetric final : public MetricField {
public:
    UserMetric(int n, std::function<Mat(const Vec&)> eval)
        : MetricField(n, "user", /*analytic_spatial=*/false,
                      /*radial_eigenvector=*/false),
          fn_(std::move(eval)) {}

protected:
    void eval(const Vec& x, Mat& G) const override { G = fn_(x); }

private:
    std::function<Mat(const Vec&)> fn_;
};

} // namespace

std::unique_ptr<MetricField> make_flat_metric(int n) {
    return std::make_unique<TangentProfileMetric>(
        n, "flat", [](double) { return 1.0; }, [](double) { return 0.0; });
}

std::unique_ptr<MetricField> make_example21_metric(int n, double m,
                                                   double d1) {
    if (!(d1 > 0.0))
        throw ConfigError("example21 metric: obstacle radius d1 must be > 0");
    auto f = [m, d1](double r) {
        if (r >= d1) return std::pow(r, m);
        if (r <= 0.5 * d1) return 1.0;
        const double s = smoothstep((r - 0.5 * d1) / (0.5 * d1));
        return (1.0 - s) + s * std::pow(r, m);
    };
    auto fp = [m, d1](double r) {
        if (r >= d1) return m * std::pow(r, m - 1.0);
        if (r <= 0.5 * d1) return 0.0;
        const double tau = (r - 0.5 * d1) / (0.5 * d1);
        const double s = smoothstep(tau);
        const double ds = smoothstep_d1(tau) * 2.0 / d1;
        return ds * (std::pow(r, m) - 1.0) + s * m * std::pow(r, m - 1.0);
    };
    return std::make_unique<TangentProfileMetric>(n, "example21", f, fp);
}

std::unique_ptr<MetricField> make_power_tangent_metric(int n, double m) {
    return std::make_unique<TangentProfileMetric>(
        n, "power_tangent",
        [m](double r) { return std::pow(r, m); },
        [m](double r) { return m * std::pow(r, m - 1.0); });
}

std::unique_ptr<MetricField> make_trapped_sphere_metric(int n, double r2) {
    if (!(r2 > 0.0))
        throw ConfigError("trapped_sphere metric: r2 must be > 0");
    return std::make_unique<TangentProfileMetric>(
        n, "trapped_sphere",
        [r2](double r) { return std::exp(-2.0 * (r - r2) / r2); },
        [r2](double r) {
            return -(2.0 / r2) * std::exp(-2.0 * (r - r2) / r2);
        });
}

std::unique_ptr<MetricField> make_user_metric(int n,
                                              std::function<Mat(const Vec&)> eval) {
    return std::make_unique<UserMetric>(n, std::move(eval));
}

Mat eval_metric(const MetricField& field, const Vec& x) {
    return field.metric(x);
}

DetFit metric_determinant_fit(const MetricField& field,
                              const std::vector<Vec>& samples) {
    if (samples.size() < 2)
        throw FitError("determinant fit: need at least two samples");
    std::vector<double> lr, ld;
    lr.reserve(samples.size());
    ld.reserve(samples.size());
    for (const auto& x : samples) {
        const Mat G = field.metric(x);
        Eigen::LLT<Mat> llt(G);
        // log det from the Cholesky factor (det > 0 is guaranteed by metric()).
        double logdet = 0.0;
        for (int i = 0; i < G.rows(); ++i)
            logdet += 2.0 * std::log(llt.matrixL()(i, i));
        lr.push_back(std::log(x.norm()));
        ld.push_back(logdet);
    }
    const std::size_t n = lr.size();
    double mr = 0.0, md = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mr += lr[i];
        md += ld[i];
    }
    mr /= static_cast<double>(n);
    md /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lr[i] - mr) * (lr[i] - mr);
        sxy += (lr[i] - mr) * (ld[i] - md);
    }
    if (sxx < 1e-20)
        throw FitError("determinant fit: samples span no radial range");
    DetFit fit;
    fit.d = sxy / sxx;
    const double intercept = md - fit.d * mr;
    fit.c0 = std::exp(intercept);
    for (std::size_t i = 0; i < n; ++i)
        fit.max_residual = std::max(
            fit.max_residual, std::abs(ld[i] - (intercept + fit.d * lr[i])));
    return fit;
}

double dh_quadratic_form(const MetricField& field, const Vec& x, const Vec& X,
                         const Vec& center, double b, double b_prime) {
    const Vec y = x - center;
    const double s = y.norm();
    if (s == 0.0)
        throw DomainError(
            "dh_quadratic_form: x coincides with the multiplier center");
    const Mat G = field.metric(x);
    Mat dGds;
    if (center.norm() == 0.0) {
        dGds = field.radial_derivative(x);
    } else {
        const Vec shat = y / s;
        const auto dG = field.spatial_derivative(x);
        dGds = Mat::Zero(G.rows(), G.cols());
        for (int k = 0; k < G.rows(); ++k) dGds += shat(k) * dG[k];
    }
    const Vec shat = y / s;
    const Vec GX = G * X;
    const double core = X.dot(GX) + 0.5 * s * X.dot(dGds * X);
    const double radial = shat.dot(GX);
    return b * core + s * b_prime * radial * radial;
}

double delta_g_r(const RadialMetricParams& params, double r) {
    if (!(r > 0.0)) throw DomainError("delta_g_r: r must be > 0");
    return (params.n + 0.5 * params.d - 1.0) / r;
}

double divergence_of_radial_field(const RadialMetricParams& params, double r,
                                  double b, double b_prime) {
    if (!(r > 0.0))
        throw DomainError("divergence_of_radial_field: r must be > 0");
    return b * (params.n + 0.5 * params.d) + r * b_prime;
}

} // namespace mwlab
