#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "vrinr/video.hpp"

namespace vrinr::testing {

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = std::filesystem::temp_directory_path() /
               ("vrinr_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

inline FrameSequence random_video(int t, int h, int w, std::uint64_t seed) {
    FrameSequence seq(t, h, w);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& v : seq.data) v = dist(rng);
    return seq;
}

// Smooth moving pattern, more like natural video than white noise.
inline FrameSequence smooth_video(int t, int h, int w) {
    FrameSequence seq(t, h, w);
    for (int f = 0; f < t; ++f)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                seq.at(f, r, c, 0) = 0.5 + 0.5 * std::sin(2.0 * M_PI * c / 16.0 + 0.4 * f);
                seq.at(f, r, c, 1) = 0.5 + 0.5 * std::cos(2.0 * M_PI * r / 12.0 - 0.3 * f);
                const double cx = 0.25 * w + 2.0 * f, cy = 0.3 * h + 1.5 * f;
                const double blob =
                    std::exp(-((c - cx) * (c - cx) + (r - cy) * (r - cy)) / 18.0);
                seq.at(f, r, c, 2) =
                    std::clamp(blob + 0.2 * std::sin(c * r / 40.0 + f), 0.0, 1.0);
            }
    return seq;
}

}  // namespace vrinr::testing
