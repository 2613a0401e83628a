#pragma once

#include <span>
#include <vector>

#include "vrinr/common.hpp"

namespace vrinr {

struct PeaConfig {
    double tau = 0.01;      // reconstruction mask threshold
    double epsilon = 0.005; // boost threshold
    double delta = 0.001;   // boost constant
    double alpha = 5.0;     // boost weight
};

// Per-pixel scalar error: mean over the 3 channels of squared difference.
std::vector<double> pixel_loss(std::span<const double> pred, std::span<const double> gt);

// 1 where err > tau, else 0. Treated as a constant in gradients.
std::vector<double> recon_mask(std::span<const double> errs, double tau);

// Mean over ALL pixels of err * mask.
double masked_loss(std::span<const double> errs, std::span<const double> mask);

// Mean over pixels of err + delta * [err < epsilon].
double boost_loss(std::span<const double> errs, double epsilon, double delta);

double pea_total(std::span<const double> errs, const PeaConfig& cfg);

// d(pea_total)/d(pred), with masks and indicators held constant. Also returns
// the loss value and, optionally, mixes the discrete mask states into `sig`.
double pea_loss_and_grad(std::span<const double> pred, std::span<const double> gt,
                         const PeaConfig& cfg, std::span<double> dpred,
                         StateSig* sig = nullptr);

}  // namespace vrinr
