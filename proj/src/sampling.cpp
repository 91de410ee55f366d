#include "mwlab/sampling.hpp"

#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"

namespace mwlab {

namespace {

constexpr std::uint32_t kPrimes[] = {2,  3,  5,  7,  11, 13,
                                     17, 19, 23, 29, 31, 37};
constexpr int kPrimeCount = 12;

// Standard-normal point from the Halton sequence via Box-Muller. The seed
// offsets the start of the sequence so distinct seeds give distinct (still
// deterministic) point sets.
Vec gaussian_point(int n, std::uint64_t index, std::uint64_t seed) {
    const std::uint64_t idx = index + 1 + (seed % 65536) * 7919ULL;
    Vec z(n);
    for (int j = 0; j < n; j += 2) {
        const double u1 = halton(idx, kPrimes[j % kPrimeCount]);
        const double u2 = halton(idx, kPrimes[(j + 1) % kPrimeCount]);
        const double rho = std::sqrt(-2.0 * std::log(u1));
        z(j) = rho * std::cos(2.0 * M_PI * u2);
        if (j + 1 < n) z(j + 1) = rho * std::sin(2.0 * M_PI * u2);
    }
    return z;
}

} // namespace

std::vector<Vec> sphere_directions(int n, int count, std::uint64_t seed) {
    if (n < 1) throw DomainError("sphere_directions: dimension must be >= 1");
    if (count < 0) throw DomainError("sphere_directions: negative count");
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    if (n == 1) {
        for (int i = 0; i < count; ++i) {
            Vec d(1);
            d(0) = (i % 2 == 0) ? 1.0 : -1.0;
            out.push_back(d);
        }
        return out;
    }
    std::uint64_t index = 0;
    for (int i = 0; i < count; ++i) {
        Vec z = gaussian_point(n, index++, seed);
        while (z.norm() < 1e-12) z = gaussian_point(n, index++, seed);
        out.push_back(z / z.norm());
    }
    return out;
}

std::vector<Vec> shell_points(int n, double r_lo, double r_hi, int radii,
                              int directions, std::uint64_t seed) {
    if (!(r_lo > 0.0) || !(r_hi >= r_lo))
        throw DomainError("shell_points: need 0 < r_lo <= r_hi");
    const auto rs = linspace(r_lo, r_hi, radii);
    const auto dirs = sphere_directions(n, directions, seed);
    std::vector<Vec> out;
    out.reserve(rs.size() * dirs.size());
    for (double r : rs)
        for (const auto& d : dirs) out.push_back(r * d);
    return out;
}

std::vector<Vec> ball_points(int n, const Vec& center, double radius,
                             int count, std::uint64_t seed) {
    if (!(radius > 0.0)) throw DomainError("ball_points: radius must be > 0");
    if (center.size() != n)
        throw DomainError("ball_points: center dimension mismatch");
    const auto dirs = sphere_directions(n, count, seed);
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    const std::uint32_t radial_base = kPrimes[n % kPrimeCount];
    for (int i = 0; i < count; ++i) {
        const double u =
            halton(static_cast<std::uint64_t>(i) + 1 + (seed % 65536) * 104729ULL,
                   radial_base);
        out.push_back(center + radius * std::pow(u, 1.0 / n) * dirs[i]);
    }
    return out;
}

} // namespace mwlab
