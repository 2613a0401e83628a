#pragma once

#include <limits>
#include <vector>

#include "vrinr/video.hpp"

namespace vrinr {

// Per-frame PSNR in dB; identical frames report +infinity.
std::vector<double> psnr_per_frame(const FrameSequence& a, const FrameSequence& b);

// Mean over finite frames; all frames identical -> +infinity.
double psnr(const FrameSequence& a, const FrameSequence& b);

// Standard SSIM: 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03, dynamic
// range 1, valid-region windowing, per channel then averaged.
std::vector<double> ssim_per_frame(const FrameSequence& a, const FrameSequence& b);
double ssim(const FrameSequence& a, const FrameSequence& b);

}  // namespace vrinr
