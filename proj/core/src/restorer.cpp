#include "vrinr/restorer.hpp"

#include <cmath>

namespace vrinr {

FrameSequence NoiseSpec::apply(const FrameSequence& seq) const {
    switch (kind) {
        case Kind::none:
            return seq;
        case Kind::gaussian:
            return add_gaussian_noise(seq, level, seed);
        case Kind::poisson:
            return add_poisson_noise(seq, level, seed);
    }
    throw Error("NoiseSpec: unknown kind");
}

FrameSequence restore(const Model& model, const FrameSequence& lr, double scale) {
    if (!(scale > 0.0)) throw Error("restore: scale must be positive");
    const int out_h = static_cast<int>(std::lround(lr.h * scale));
    const int out_w = static_cast<int>(std::lround(lr.w * scale));
    if (out_h < 1 || out_w < 1) throw DimensionError("restore: degenerate target dims");

    const FrameSequence upsampled = bicubic_resize(lr, out_h, out_w);
    const CoordGrid grid = make_coord_grid(lr.t, out_h, out_w);
    FrameSequence out(lr.t, out_h, out_w);
    out.frame_rate = lr.frame_rate;
    PixelCache cache;
    for (std::size_t i = 0; i < grid.coords.size(); ++i) {
        forward_pixel(model, upsampled, grid.coords[i], cache);
        for (int ch = 0; ch < 3; ++ch)
            out.data[i * 3 + ch] = std::clamp(cache.rgb[ch], 0.0, 1.0);
    }
    return out;
}

std::pair<FrameSequence, FrameSequence> restore_noisy(const Model& model,
                                                      const FrameSequence& lr_clean,
                                                      const NoiseSpec& noise, double scale) {
    FrameSequence noisy = noise.apply(lr_clean);
    FrameSequence restored = restore(model, noisy, scale);
    return {std::move(noisy), std::move(restored)};
}

}  // namespace vrinr
