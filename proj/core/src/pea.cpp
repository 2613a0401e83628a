#include "vrinr/pea.hpp"

namespace vrinr {

std::vector<double> pixel_loss(std::span<const double> pred, std::span<const double> gt) {
    if (pred.size() != gt.size() || pred.size() % 3 != 0)
        throw DimensionError("pixel_loss: shape mismatch");
    const std::size_t n = pred.size() / 3;
    std::vector<double> errs(n);
    for (std::size_t p = 0; p < n; ++p) {
        double acc = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = pred[p * 3 + c] - gt[p * 3 + c];
            acc += d * d;
        }
        errs[p] = acc / 3.0;
    }
    return errs;
}

std::vector<double> recon_mask(std::span<const double> errs, double tau) {
    std::vector<double> mask(errs.size());
    for (std::size_t i = 0; i < errs.size(); ++i) mask[i] = errs[i] > tau ? 1.0 : 0.0;
    return mask;
}

double masked_loss(std::span<const double> errs, std::span<const double> mask) {
    if (errs.size() != mask.size()) throw DimensionError("masked_loss: shape mismatch");
    if (errs.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < errs.size(); ++i) acc += errs[i] * mask[i];
    return acc / static_cast<double>(errs.size());
}

double boost_loss(std::span<const double> errs, double epsilon, double delta) {
    if (errs.empty()) return 0.0;
    double acc = 0.0;
    for (double e : errs) acc += e + (e < epsilon ? delta : 0.0);
    return acc / static_cast<double>(errs.size());
}

double pea_total(std::span<const double> errs, const PeaConfig& cfg) {
    return masked_loss(errs, recon_mask(errs, cfg.tau)) +
           cfg.alpha * boost_loss(errs, cfg.epsilon, cfg.delta);
}

double pea_loss_and_grad(std::span<const double> pred, std::span<const double> gt,
                         const PeaConfig& cfg, std::span<double> dpred, StateSig* sig) {
    if (pred.size() != gt.size() || dpred.size() != pred.size() || pred.size() % 3 != 0)
        throw DimensionError("pea_loss_and_grad: shape mismatch");
    const std::size_t n = pred.size() / 3;
    const double inv_n = 1.0 / static_cast<double>(n);
    double masked = 0.0, boost = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        double err = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = pred[p * 3 + c] - gt[p * 3 + c];
            err += d * d;
        }
        err /= 3.0;
        const bool masked_in = err > cfg.tau;
        const bool boosted = err < cfg.epsilon;
        if (sig) {
            sig->add_bit(masked_in);
            sig->add_bit(boosted);
        }
        masked += masked_in ? err : 0.0;
        boost += err + (boosted ? cfg.delta : 0.0);
        const double coeff =
            ((masked_in ? 1.0 : 0.0) + cfg.alpha) * (2.0 / 3.0) * inv_n;
        for (int c = 0; c < 3; ++c)
            dpred[p * 3 + c] = coeff * (pred[p * 3 + c] - gt[p * 3 + c]);
    }
    return (masked + cfg.alpha * boost) * inv_n;
}

}  // namespace vrinr
