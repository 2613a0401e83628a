#pragma once

#include <vector>

#include "vrinr/nn.hpp"
#include "vrinr/video.hpp"

namespace vrinr {

// One resolution level of the hierarchy. Level 1 is the finest (smallest
// patch); coarser levels read larger patches and quantize on coarser grids.
struct LevelConfig {
    int level = 1;
    int patch_size = 3;       // odd, pixels on the target-resolution grid
    int grid_resolution = 64; // bins per dimension for lattice quantization
};

// Pixels of a patch_size x patch_size window centered at the pixel nearest to
// (x, y), edge-clamped, flattened row-major with 3 channels.
std::vector<double> extract_patch(const FrameSequence& frames, int frame, double x, double y,
                                  const LevelConfig& cfg);
void extract_patch_into(const FrameSequence& frames, int frame, double x, double y,
                        const LevelConfig& cfg, std::vector<double>& patch);

// xi = tanh(mlp(flatten(patch))), every component strictly inside (-1,1).
std::vector<double> encode_texture(const nn::Mlp2& texture_mlp, std::span<const double> patch,
                                   nn::Mlp2Cache& cache, StateSig* sig = nullptr);

// [x, y, t, xi_1 .. xi_F]; every component must be in [-1,1].
std::vector<double> assemble_stt(const Coord& coord, std::span<const double> xi);

}  // namespace vrinr
