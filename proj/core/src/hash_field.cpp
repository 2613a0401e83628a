#include "vrinr/hash_field.hpp"

#include <cmath>

namespace vrinr {

VertexNeighborhood quantize_vertices(std::span<const double> stt, int grid_resolution) {
    VertexNeighborhood nb;
    quantize_vertices_into(stt, grid_resolution, nb);
    return nb;
}

void quantize_vertices_into(std::span<const double> stt, int grid_resolution,
                            VertexNeighborhood& nb) {
    if (grid_resolution < 2) throw Error("quantize_vertices: grid_resolution must be >= 2");
    nb.dim = static_cast<int>(stt.size());
    nb.lo.resize(nb.dim);
    nb.hi.resize(nb.dim);
    nb.v_min.resize(nb.dim);
    nb.v_max.resize(nb.dim);
    const double bins = grid_resolution - 1.0;
    for (int j = 0; j < nb.dim; ++j) {
        const double c = stt[j];
        if (c < -1.0 - 1e-9 || c > 1.0 + 1e-9)
            throw Error("quantize_vertices: component outside [-1,1]");
        const double u = std::clamp((c + 1.0) / 2.0 * bins, 0.0, bins);
        nb.lo[j] = static_cast<int>(std::floor(u));
        nb.hi[j] = static_cast<int>(std::ceil(u));
        nb.v_min[j] = nb.lo[j] / bins * 2.0 - 1.0;
        nb.v_max[j] = nb.hi[j] / bins * 2.0 - 1.0;
    }
}

std::uint64_t hash_index(std::span<const int> vertex, int log2_size) {
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < vertex.size(); ++j)
        acc ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(vertex[j])) *
               kHashPrimes[j % kHashPrimes.size()];
    return acc & ((1ull << log2_size) - 1);
}

void lookup(const VertexNeighborhood& nb, const HashTableView& table,
            std::vector<double>& feats, std::vector<std::uint64_t>& slots) {
    const int n_corners = nb.corner_count();
    const int fd = table.feat_dim;
    feats.resize(static_cast<std::size_t>(n_corners) * fd);
    slots.resize(n_corners);
    std::vector<int> vertex(nb.dim);
    for (int n = 0; n < n_corners; ++n) {
        for (int j = 0; j < nb.dim; ++j) vertex[j] = nb.corner_coord(n, j);
        const std::uint64_t slot = hash_index(vertex, table.log2_size);
        slots[n] = slot;
        const double* row = table.entries.data() + slot * fd;
        for (int k = 0; k < fd; ++k) feats[static_cast<std::size_t>(n) * fd + k] = row[k];
    }
}

std::vector<double> weight_net_input(std::span<const double> stt, const VertexNeighborhood& nb) {
    std::vector<double> in;
    in.reserve(3 * stt.size());
    for (double v : stt) in.push_back(v);
    for (std::size_t j = 0; j < stt.size(); ++j) in.push_back(stt[j] - nb.v_min[j]);
    for (std::size_t j = 0; j < stt.size(); ++j) in.push_back(nb.v_max[j] - stt[j]);
    return in;
}

std::vector<double> interp_weights(const nn::Mlp2& weight_mlp, std::span<const double> stt,
                                   const VertexNeighborhood& nb, nn::Mlp2Cache& cache,
                                   StateSig* sig) {
    if (weight_mlp.out_act != nn::OutAct::softmax)
        throw Error("interp_weights: weight mlp must have softmax output");
    const std::vector<double> in = weight_net_input(stt, nb);
    nn::mlp2_forward(weight_mlp, in, cache, sig);
    return cache.y;
}

std::vector<double> interpolate(std::span<const double> w, std::span<const double> feats,
                                int feat_dim) {
    if (w.size() * feat_dim != feats.size())
        throw DimensionError("interpolate: weight/feature shape mismatch");
    std::vector<double> out(feat_dim, 0.0);
    for (std::size_t n = 0; n < w.size(); ++n)
        for (int k = 0; k < feat_dim; ++k) out[k] += w[n] * feats[n * feat_dim + k];
    return out;
}

}  // namespace vrinr
