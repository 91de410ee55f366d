#pragma once

// Discretization grids for the radial and warped-product reductions of the
// exterior-domain problem. Both carry the volume weight sqrt(det G) baked
// into node and flux coefficients so that the conservative Laplacian and all
// quadratures share one source of truth.

#include <vector>

namespace mwlab {

// 1-D radial grid on [r_in, r_out] with J cells (nodes 0..J, Dirichlet at
// both ends). The volume weight is w(r) = sqrt(c0) * sigma_{n-1} * r^{n-1+d/2},
// i.e. the angular integral of the determinant-power-law volume element.
struct RadialGrid {
    int n = 3;
    double c0 = 1.0;
    double d = 0.0;
    double r_in = 1.0;
    double r_out = 10.0;
    int J = 100;
    double dr = 0.0;

    std::vector<double> r;   // node radii, size J+1
    std::vector<double> w;   // node weights w(r_j), size J+1
    std::vector<double> wm;  // midpoint weights w(r_{j+1/2}), size J

    // volume weight at an arbitrary radius
    double weight(double radius) const;
    int size() const { return J + 1; }
};

RadialGrid make_radial_grid(int n, double c0, double d, double r_in,
                            double r_out, int J);

// Angular profile gamma(r, theta) for the warped-product metric
// g = dr^2 + gamma d(theta)^2 on (r, theta) in [r_in, r_out] x S^1.
struct WarpedProfile {
    enum class Kind {
        radial_equivalent,  // gamma(r) chosen so the theta-integrated weight
                            // matches the radial grid's w(r) node-for-node
        modulated,          // gamma = (s * r^q * (1 + eps*cos(m*theta)))^2
    };
    Kind kind = Kind::radial_equivalent;

    // radial_equivalent parameters (shared with the radial reduction)
    int n = 3;
    double c0 = 1.0;
    double d = 0.0;

    // modulated parameters
    double s = 1.0;
    double q = 1.0;
    double eps = 0.0;
    int m_theta = 0;

    double gamma(double r, double theta) const;
};

// 2-D warped grid: J+1 radial nodes (Dirichlet at j=0 and j=J), K periodic
// angular nodes theta_k = k*dtheta. State index: idx = j*K + k (k fastest).
// The volume weight is omega = sqrt(gamma); the angular flux coefficient is
// omega * (1/gamma) = 1/sqrt(gamma) at angular midpoints.
struct WarpedGrid {
    WarpedProfile profile;
    double r_in = 1.0;
    double r_out = 10.0;
    int J = 100;
    int K = 16;
    double dr = 0.0;
    double dtheta = 0.0;

    std::vector<double> r;          // size J+1
    std::vector<double> theta;      // size K
    std::vector<double> omega;      // node sqrt(gamma), size (J+1)*K
    std::vector<double> omega_rmid; // sqrt(gamma) at (r_{j+1/2}, theta_k), size J*K
    std::vector<double> flux_tmid;  // 1/sqrt(gamma) at (r_j, theta_{k+1/2}), size (J+1)*K
    std::vector<double> beta;       // 1/gamma at nodes, size (J+1)*K

    int idx(int j, int k) const { return j * K + k; }
    int size() const { return (J + 1) * K; }
};

WarpedGrid make_warped_grid(const WarpedProfile& profile, double r_in,
                            double r_out, int J, int K);

} // namespace mwlab
