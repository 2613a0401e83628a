#pragma once

#include <string>
#include <vector>

#include "vrinr/trainer.hpp"

namespace vrinr {

struct GradCheckGroup {
    std::string name;
    double worst_rel = 0.0;
    std::int64_t checked = 0;
    std::int64_t excluded = 0;  // coordinates straddling a relu/mask/cell kink
    bool passed = true;
};

struct GradCheckReport {
    std::vector<GradCheckGroup> groups;
    double tolerance = 1e-4;
    bool passed = true;
};

// Standalone two-layer MLP checks, one per output activation.
GradCheckReport gradcheck_mlp(std::uint64_t seed);

// End-to-end: backprop gradient of the full PEA loss on a 2-frame 6x6 video
// at x2 (L=2, N={8,4}, 2^8 table) against central finite differences h=1e-5,
// every parameter group.
GradCheckReport gradcheck_pipeline(std::uint64_t seed);

}  // namespace vrinr
