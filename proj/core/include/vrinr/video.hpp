#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrinr/common.hpp"

namespace vrinr {

// T x H x W x 3 video, channel values in [0,1], double precision.
struct FrameSequence {
    int t = 0, h = 0, w = 0;
    std::vector<double> data;  // t-major, then row, col, channel
    std::optional<double> frame_rate;

    FrameSequence() = default;
    FrameSequence(int t_, int h_, int w_, double fill = 0.0)
        : t(t_), h(h_), w(w_), data(static_cast<std::size_t>(t_) * h_ * w_ * 3, fill) {}

    double& at(int f, int r, int c, int ch) {
        return data[((static_cast<std::size_t>(f) * h + r) * w + c) * 3 + ch];
    }
    double at(int f, int r, int c, int ch) const {
        return data[((static_cast<std::size_t>(f) * h + r) * w + c) * 3 + ch];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(t) * h * w; }
};

struct Coord {
    double x, y, t;
};

// Dense pixel-center grid over (T, H, W), every component normalized to [-1,1].
struct CoordGrid {
    int t = 0, h = 0, w = 0;
    std::vector<Coord> coords;  // frame-major, row-major within frame
};

FrameSequence load_frames(const std::string& dir_path);
void save_frames(const FrameSequence& seq, const std::string& dir_path);

// Catmull-Rom bicubic (a = -0.5), pixel-center alignment, edge clamp,
// output clamped to [0,1]. Operates on a single frame of `src`.
void bicubic_resize_frame(const FrameSequence& src, int frame, int out_h, int out_w,
                          FrameSequence& dst, int dst_frame);
FrameSequence bicubic_resize(const FrameSequence& seq, int out_h, int out_w);

FrameSequence degrade_downsample(const FrameSequence& hr, double scale);

// sigma on the 0..255 scale; output clamped to [0,1].
FrameSequence add_gaussian_noise(const FrameSequence& seq, double sigma, std::uint64_t seed);
// out = clamp(Poisson(in * lambda) / lambda, 0, 1).
FrameSequence add_poisson_noise(const FrameSequence& seq, double lambda, std::uint64_t seed);

CoordGrid make_coord_grid(int t, int h, int w);

// Pixel-center normalization helpers: col index -> x in [-1,1] and back.
inline double norm_coord(int index, int extent) {
    return 2.0 * (index + 0.5) / extent - 1.0;
}
inline int denorm_index(double c, int extent) {
    int i = static_cast<int>(std::floor((c + 1.0) / 2.0 * extent));
    return std::min(std::max(i, 0), extent - 1);
}

}  // namespace vrinr
