#pragma once
// Small numeric utilities used across modules: the C^2 quintic smoothstep that
// every blend/ramp in the project is built from, deterministic low-discrepancy
// sequences, FNV hashing, and locale-free shortest-round-trip double formatting.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mwlab {

// Quintic smoothstep S(t) = 6t^5 - 15t^4 + 10t^3 clamped to [0,1].
// S(0)=0, S(1)=1 and S', S'' vanish at both ends, so piecewise constructions
// glued with S are C^2.
double smoothstep(double t);
double smoothstep_d1(double t);  // dS/dt
double smoothstep_d2(double t);  // d2S/dt2

// Surface measure of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

// Halton radical-inverse in the given prime base, 1-based index (never 0).
double halton(std::uint64_t index, std::uint32_t base);

// FNV-1a 64-bit hash, used for scenario fingerprints.
std::uint64_t fnv1a64(std::string_view s);

// Shortest decimal string that round-trips the double (std::to_chars).
// Deterministic and locale-independent; used by every text emitter.
std::string format_double(double v);

// Evenly spaced grid of `count` values on [lo, hi] including both endpoints
// (count >= 2), or the single midpoint when count == 1.
std::vector<double> linspace(double lo, double hi, int count);

// Run fn(i) for i in [0, count) on up to `threads` workers. Work is split in
// contiguous blocks; fn must be safe to call concurrently for distinct i.
// threads <= 1 runs serially. Exceptions propagate (first one wins).
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

} // namespace mwlab
