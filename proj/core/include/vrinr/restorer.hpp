#pragma once

#include "vrinr/fusion.hpp"

namespace vrinr {

// Gaussian sigma is on the 0..255 scale; Poisson lambda is the intensity level.
struct NoiseSpec {
    enum class Kind { none, gaussian, poisson };
    Kind kind = Kind::none;
    double level = 0.0;
    std::uint64_t seed = 0;

    FrameSequence apply(const FrameSequence& seq) const;
};

// Evaluate the fitted coordinate network on the dense grid of
// round(H*scale) x round(W*scale). Any positive scale is accepted.
FrameSequence restore(const Model& model, const FrameSequence& lr, double scale);

// Degrade the clean LR input with `noise`, then restore; returns
// (noisy_input, restored) so callers can compute both metrics.
std::pair<FrameSequence, FrameSequence> restore_noisy(const Model& model,
                                                      const FrameSequence& lr_clean,
                                                      const NoiseSpec& noise, double scale);

}  // namespace vrinr
