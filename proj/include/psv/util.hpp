#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace psv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
/// std:: distributions so that seeded runs reproduce bit-for-bit across
/// platforms and standard library versions.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Derive an independent child seed.
    std::uint64_t fork(std::uint64_t salt) {
        Rng child(state ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
        return child.next();
    }
};

/// Neumaier-compensated accumulator; deterministic for a fixed add order.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

int default_jobs();

/// Runs fn(begin, end, tile_index) over [0, count) split into tiles.
/// Tiles are claimed dynamically but results must be written to tile-local
/// storage by the caller; combining them in tile order keeps reductions
/// deterministic regardless of scheduling.
void parallel_tiles(std::int64_t count, std::int64_t tile_size, int jobs,
                    const std::function<void(std::int64_t, std::int64_t, std::size_t)>& fn);

std::string format_double(double v);

}  // namespace psv
