#include "mwlab/grid.hpp"

#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"

namespace mwlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double RadialGrid::weight(double radius) const {
    return std::sqrt(c0) * unit_sphere_area(n) *
           std::pow(radius, n - 1 + 0.5 * d);
}

RadialGrid make_radial_grid(int n, double c0, double d, double r_in,
                            double r_out, int J) {
    if (n < 1) throw GridError("radial grid: dimension must be >= 1");
    if (!(c0 > 0.0)) throw GridError("radial grid: c0 must be > 0");
    if (!(r_in > 0.0))
        throw GridError("radial grid: r_in must be > 0 (origin excluded)");
    if (!(r_out > r_in)) throw GridError("radial grid: need r_out > r_in");
    if (J < 4) throw GridError("radial grid: need at least 4 cells");

    RadialGrid g;
    g.n = n;
    g.c0 = c0;
    g.d = d;
    g.r_in = r_in;
    g.r_out = r_out;
    g.J = J;
    g.dr = (r_out - r_in) / J;
    g.r.resize(J + 1);
    g.w.resize(J + 1);
    g.wm.resize(J);
    for (int j = 0; j <= J; ++j) {
        g.r[j] = (j == J) ? r_out : r_in + j * g.dr;
        g.w[j] = g.weight(g.r[j]);
        if (!(g.w[j] > 0.0) || !std::isfinite(g.w[j]))
            throw GridError("radial grid: non-positive weight at r = " +
                            format_double(g.r[j]));
    }
    for (int j = 0; j < J; ++j) {
        g.wm[j] = g.weight(0.5 * (g.r[j] + g.r[j + 1]));
        if (!(g.wm[j] > 0.0) || !std::isfinite(g.wm[j]))
            throw GridError("radial grid: non-positive midpoint weight");
    }
    return g;
}

double WarpedProfile::gamma(double r, double theta) const {
    switch (kind) {
    case Kind::radial_equivalent: {
        const double root = std::sqrt(c0) * unit_sphere_area(n) *
                            std::pow(r, n - 1 + 0.5 * d) / kTwoPi;
        return root * root;
    }
    case Kind::modulated: {
        const double root =
            s * std::pow(r, q) * (1.0 + eps * std::cos(m_theta * theta));
        return root * root;
    }
    }
    throw GridError("warped profile: unknown kind");
}

WarpedGrid make_warped_grid(const WarpedProfile& profile, double r_in,
                            double r_out, int J, int K) {
    if (!(r_in > 0.0))
        throw GridError("warped grid: r_in must be > 0 (origin excluded)");
    if (!(r_out > r_in)) throw GridError("warped grid: need r_out > r_in");
    if (J < 4) throw GridError("warped grid: need at least 4 radial cells");
    if (K < 4) throw GridError("warped grid: need at least 4 angular nodes");

    WarpedGrid g;
    g.profile = profile;
    g.r_in = r_in;
    g.r_out = r_out;
    g.J = J;
    g.K = K;
    g.dr = (r_out - r_in) / J;
    g.dtheta = kTwoPi / K;
    g.r.resize(J + 1);
    for (int j = 0; j <= J; ++j) g.r[j] = (j == J) ? r_out : r_in + j * g.dr;
    g.theta.resize(K);
    for (int k = 0; k < K; ++k) g.theta[k] = k * g.dtheta;

    g.omega.resize(g.size());
    g.beta.resize(g.size());
    g.flux_tmid.resize(g.size());
    g.omega_rmid.resize(static_cast<std::size_t>(J) * K);

    auto checked = [](double value, const char* what) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw GridError(std::string("warped grid: non-positive ") + what);
        return value;
    };
    for (int j = 0; j <= J; ++j)
        for (int k = 0; k < K; ++k) {
            const double gam =
                checked(profile.gamma(g.r[j], g.theta[k]), "gamma at a node");
            g.omega[g.idx(j, k)] = std::sqrt(gam);
            g.beta[g.idx(j, k)] = 1.0 / gam;
            const double gmid = checked(
                profile.gamma(g.r[j], g.theta[k] + 0.5 * g.dtheta),
                "gamma at an angular midpoint");
            g.flux_tmid[g.idx(j, k)] = 1.0 / std::sqrt(gmid);
        }
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
            const double gmid = checked(
                profile.gamma(0.5 * (g.r[j] + g.r[j + 1]), g.theta[k]),
                "gamma at a radial midpoint");
            g.omega_rmid[static_cast<std::size_t>(j) * K + k] = std::sqrt(gmid);
        }
    return g;
}

} // namespace mwlab
