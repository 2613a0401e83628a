#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vrinr {

// All structured errors thrown by the library derive from this.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// splitmix64, used to derive independent RNG streams from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Accumulates the discrete decisions (relu signs, mask bits, lattice cells)
// taken during a forward pass. Two evaluations with the same signature lie on
// the same smooth piece of the loss, which is what finite differences require.
struct StateSig {
    std::uint64_t h = 1469598103934665603ull;

    void add(std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    }
    void add_bit(bool b) { add(b ? 0x9e37ull : 0x79b9ull); }

    friend bool operator==(const StateSig& a, const StateSig& b) { return a.h == b.h; }
};

}  // namespace vrinr
