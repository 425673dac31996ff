#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hydec {

/// Invalid configuration or data (bad bounds, malformed files, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A control or state violates a hard constraint of the plant.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical solver failed (LP breakdown, budget exceeded, ...).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A certified bound was violated (lower bound above upper bound, ...).
struct CertificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw ConfigError("linspace: need at least one point");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
    out.back() = hi;
    return out;
}

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

/// splitmix64; used to derive independent per-component and per-path seeds
/// from the single root seed so results do not depend on thread scheduling.
inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic parallel loop: [0, n) is split into fixed blocks and each
/// block writes only to its own slots, so results are identical regardless
/// of how many threads run.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                         unsigned threads = 0) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n <= 1) {
        body(0, n);
        return;
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

/// Process-wide default worker count (0 = hardware concurrency).
inline unsigned& worker_threads() {
    static unsigned n = 0;
    return n;
}

}  // namespace hydec
