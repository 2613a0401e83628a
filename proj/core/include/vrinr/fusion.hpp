#pragma once

#include "vrinr/model.hpp"

namespace vrinr {

// w_att = sigmoid(mlp(v_coarser)), componentwise in (0,1).
std::vector<double> attention_weights(const nn::Mlp2& att_mlp, std::span<const double> v_coarser,
                                      nn::Mlp2Cache& cache, StateSig* sig = nullptr);

// Elementwise gate: v' = w_att * v.
std::vector<double> refine(std::span<const double> v, std::span<const double> w_att);

// Concatenation in level order, finest first.
std::vector<double> fuse(const std::vector<std::vector<double>>& levels);

// rgb = sigmoid(color_mlp(v_hr)).
std::vector<double> decode_color(const nn::Mlp2& color_mlp, std::span<const double> v_hr,
                                 nn::Mlp2Cache& cache, StateSig* sig = nullptr);

// Everything forward_pixel computed, kept for the backward pass.
struct PixelCache {
    Coord coord{};
    int frame = 0;

    struct Level {
        std::vector<double> patch;
        nn::Mlp2Cache tex;           // tex.y is the texture code xi
        std::vector<double> stt;
        VertexNeighborhood nb;
        std::vector<std::uint64_t> slots;
        std::vector<double> feats;   // corner_count x feat_dim
        std::vector<double> gin;     // weight-net input
        nn::Mlp2Cache weights;       // weights.y are the interpolation weights
        std::vector<double> v_raw;
        nn::Mlp2Cache att;           // att.y is the gate applied at this level (1..L-1)
        std::vector<double> v_refined;
    };
    std::vector<Level> levels;
    std::vector<double> v_hr;
    nn::Mlp2Cache color;
    std::vector<double> rgb;
};

// Full per-coordinate forward map: patches -> texture codes -> STT -> hashed
// features with learned interpolation -> top-down attention -> color.
// `upsampled` must already be at the target resolution.
void forward_pixel(const Model& model, const FrameSequence& upsampled, const Coord& coord,
                   PixelCache& cache, StateSig* sig = nullptr);

// Accumulates d(loss)/d(params) into `grad` (same layout as model.params())
// given d(loss)/d(rgb).
void backward_pixel(const Model& model, const PixelCache& cache, std::span<const double> drgb,
                    std::span<double> grad);

}  // namespace vrinr
