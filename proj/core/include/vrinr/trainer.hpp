#pragma once

#include <iosfwd>
#include <random>

#include "vrinr/config.hpp"
#include "vrinr/fusion.hpp"
#include "vrinr/pea.hpp"

namespace vrinr {

struct TrainConfig {
    double scale_train = 4.0;
    int epochs = 100;
    int batch_coords = 4096;
    double lr0 = 1e-4;
    int lr_halve_every = 100;
    std::uint64_t seed = 0;
    bool use_pea = true;  // false: plain MSE ablation
    PeaConfig pea;
    ModelConfig model;

    // lr(epoch) = lr0 * 0.5^floor(epoch / lr_halve_every)
    double lr_at_epoch(int epoch) const;

    KvConfig to_kv() const;
    static TrainConfig from_kv(const KvConfig& kv);
};

struct Checkpoint {
    static constexpr char kMagic[9] = "VRINR001";

    TrainConfig cfg;
    Model model;
    nn::AdamState adam;
    std::int64_t epoch = 0;
    std::string rng_state;  // serialized mt19937_64
    bool diverged = false;  // set by fit on non-finite loss; not serialized
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// lr = bicubic downsample of hr; hr kept as ground truth.
std::pair<FrameSequence, FrameSequence> build_pairs(const FrameSequence& hr, double scale);

// n coordinates drawn uniformly without replacement, paired with ground-truth
// RGB values. gt must have the grid's dimensions.
void sample_batch(const CoordGrid& grid, const FrameSequence& gt, int n, std::mt19937_64& rng,
                  std::vector<Coord>& coords, std::vector<double>& gt_pixels);

// Full-dataset PEA loss at the model's current parameters; the oracle target
// for end-to-end gradient checks.
double dataset_pea_loss(const Model& model, const FrameSequence& upsampled, const CoordGrid& grid,
                        const FrameSequence& gt, const PeaConfig& pea, StateSig* sig = nullptr);

// Backprop gradient of dataset_pea_loss; returns the loss.
double dataset_pea_grad(const Model& model, const FrameSequence& upsampled, const CoordGrid& grid,
                        const FrameSequence& gt, const PeaConfig& pea, std::span<double> grad);

struct FitOptions {
    std::ostream* log = nullptr;        // line records: epoch,step,lr,loss,psnr
    Checkpoint* resume_from = nullptr;  // continue a previous run
};

// Per-video fitting: degrade to LR, upsample back, then fit the coordinate
// network with Adam on PEA (or plain MSE) batches.
Checkpoint fit(const FrameSequence& hr_video, const TrainConfig& cfg, const FitOptions& opts = {});

}  // namespace vrinr
