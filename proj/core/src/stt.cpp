#include "vrinr/stt.hpp"

namespace vrinr {

std::vector<double> extract_patch(const FrameSequence& frames, int frame, double x, double y,
                                  const LevelConfig& cfg) {
    std::vector<double> patch;
    extract_patch_into(frames, frame, x, y, cfg, patch);
    return patch;
}

void extract_patch_into(const FrameSequence& frames, int frame, double x, double y,
                        const LevelConfig& cfg, std::vector<double>& patch) {
    const int p = cfg.patch_size;
    if (p > 2 * std::max(frames.h, frames.w))
        throw DimensionError("extract_patch: patch_size " + std::to_string(p) +
                             " too large for " + std::to_string(frames.h) + "x" +
                             std::to_string(frames.w) + " frame");
    const int cc = denorm_index(x, frames.w);
    const int cr = denorm_index(y, frames.h);
    const int half = p / 2;
    patch.resize(static_cast<std::size_t>(p) * p * 3);
    std::size_t k = 0;
    for (int dr = -half; dr <= half; ++dr) {
        const int r = std::clamp(cr + dr, 0, frames.h - 1);
        for (int dc = -half; dc <= half; ++dc) {
            const int c = std::clamp(cc + dc, 0, frames.w - 1);
            for (int ch = 0; ch < 3; ++ch) patch[k++] = frames.at(frame, r, c, ch);
        }
    }
}

std::vector<double> encode_texture(const nn::Mlp2& texture_mlp, std::span<const double> patch,
                                   nn::Mlp2Cache& cache, StateSig* sig) {
    if (texture_mlp.out_act != nn::OutAct::tanh_act)
        throw Error("encode_texture: texture mlp must have tanh output");
    nn::mlp2_forward(texture_mlp, patch, cache, sig);
    return cache.y;
}

std::vector<double> assemble_stt(const Coord& coord, std::span<const double> xi) {
    std::vector<double> stt;
    stt.reserve(3 + xi.size());
    stt.push_back(coord.x);
    stt.push_back(coord.y);
    stt.push_back(coord.t);
    for (double v : xi) stt.push_back(v);
    for (double v : stt)
        if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9)
            throw Error("assemble_stt: component " + std::to_string(v) + " outside [-1,1]");
    return stt;
}

}  // namespace vrinr
