#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include <Eigen/Core>

namespace mbps {

// SplitMix64 step. Fixed algorithm so that seeded streams are identical
// across platforms and worker counts.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Collapse a list of 64-bit words into one seed. Used to derive independent
// per-task streams, e.g. seed_hash({master, generation, candidate}).
inline std::uint64_t seed_hash(std::initializer_list<std::uint64_t> words)
{
    std::uint64_t s = 0x8f1bbcdcbfa53e0bULL;
    for (std::uint64_t w : words) {
        s ^= w + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        splitmix64(s);
    }
    std::uint64_t final = s;
    return splitmix64(final);
}

// Small self-contained generator (SplitMix64 stream + Box-Muller normals).
// Cheap to construct, so every parallel task owns its own instance.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : _state(seed) {}

    std::uint64_t next_u64() { return splitmix64(_state); }

    // uniform on (0, 1]
    double uniform()
    {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal()
    {
        if (_has_spare) {
            _has_spare = false;
            return _spare;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * std::numbers::pi * u2;
        _spare = r * std::sin(t);
        _has_spare = true;
        return r * std::cos(t);
    }

    Eigen::VectorXd normal_vector(int n)
    {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i)
            v(i) = normal();
        return v;
    }

private:
    std::uint64_t _state;
    double _spare = 0.0;
    bool _has_spare = false;
};

} // namespace mbps
