#pragma once
// Deterministic low-discrepancy point sets used by the assumption checkers and
// the geodesic Monte Carlo. Directions come from Halton sequences pushed
// through Box-Muller and normalized, so every run with the same seed sees the
// same samples on every platform.

#include <cstdint>
#include <vector>

#include "mwlab/metric.hpp"

namespace mwlab {

// `count` Euclidean-unit directions in R^n (n >= 1). For n == 1 alternates
// +1/-1.
std::vector<Vec> sphere_directions(int n, int count, std::uint64_t seed = 0);

// Tensor grid: `radii` evenly spaced radii on [r_lo, r_hi] (endpoints
// included) times `directions` quasi-random unit directions.
std::vector<Vec> shell_points(int n, double r_lo, double r_hi, int radii,
                              int directions, std::uint64_t seed = 0);

// `count` quasi-uniform points of the open ball B(center, radius)
// (radius scaled by u^{1/n} so density is uniform in volume).
std::vector<Vec> ball_points(int n, const Vec& center, double radius,
                             int count, std::uint64_t seed = 0);

} // namespace mwlab
