#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "wirefilm/grid.hpp"

namespace wf {

struct VectorField3 {
    std::array<std::vector<double>, 3> comp;

    static VectorField3 zeros(const Grid3& g)
    {
        VectorField3 f;
        for (auto& c : f.comp) c.assign(g.num_nodes(), 0.0);
        return f;
    }
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    return splitmix64(base ^ splitmix64(stream + 0x51ed2701));
}

// mt19937_64-backed uniforms with an explicit bit mapping, so draws are
// identical across standard libraries.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double unit()  // [0,1)
    {
        return double(eng() >> 11) * 0x1.0p-53;
    }
    double sym()  // [-1,1]
    {
        return 2.0 * unit() - 1.0;
    }
    std::uint64_t index(std::uint64_t n) { return eng() % n; }
};

}  // namespace wf
