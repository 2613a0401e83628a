#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vrinr/nn.hpp"

namespace vrinr {

// First six are the standard spatial-hash primes; the tail covers configs
// with feature codes longer than 3 (d = 3 + F > 6).
inline constexpr std::array<std::uint64_t, 12> kHashPrimes = {
    1ull,          2654435761ull, 805459861ull,  3674653429ull,
    2097192037ull, 1434869437ull, 2165219737ull, 2654435789ull,
    3267000013ull, 3628273133ull, 2962133363ull, 3859657669ull};

// View over one level's trainable feature table (rows live in the flat
// parameter vector).
struct HashTableView {
    int log2_size = 16;
    int feat_dim = 4;
    std::span<const double> entries;  // 2^log2_size x feat_dim, row-major
};

// The 2^d lattice corners around a quantized STT code, d = 3 + F.
// Corner n uses ceil along dimension j iff bit j of n is set.
struct VertexNeighborhood {
    int dim = 6;
    std::vector<int> lo, hi;          // floor/ceil integer coordinate per dimension
    std::vector<double> v_min, v_max; // de-quantized corner positions in [-1,1]

    int corner_count() const { return 1 << dim; }
    int corner_coord(int n, int j) const { return (n >> j) & 1 ? hi[j] : lo[j]; }
};

VertexNeighborhood quantize_vertices(std::span<const double> stt, int grid_resolution);
void quantize_vertices_into(std::span<const double> stt, int grid_resolution,
                            VertexNeighborhood& nb);

std::uint64_t hash_index(std::span<const int> vertex, int log2_size);

// Row n of the result is table.entries[hash_index(corner n)]. Slot indices are
// returned so backward can scatter-add into the same rows.
void lookup(const VertexNeighborhood& nb, const HashTableView& table,
            std::vector<double>& feats, std::vector<std::uint64_t>& slots);

// Input to the weight network: concat(stt, stt - v_min, v_max - stt).
std::vector<double> weight_net_input(std::span<const double> stt, const VertexNeighborhood& nb);

// w = softmax(mlp(weight_net_input)); partition of unity by construction.
std::vector<double> interp_weights(const nn::Mlp2& weight_mlp, std::span<const double> stt,
                                   const VertexNeighborhood& nb, nn::Mlp2Cache& cache,
                                   StateSig* sig = nullptr);

std::vector<double> interpolate(std::span<const double> w, std::span<const double> feats,
                                int feat_dim);

}  // namespace vrinr
