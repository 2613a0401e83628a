#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrinr/hash_field.hpp"
#include "vrinr/nn.hpp"
#include "vrinr/stt.hpp"

namespace vrinr {

struct ModelConfig {
    int levels = 3;
    int feature_code_dim = 3;           // F; STT dim is 3 + F
    int hidden = 64;                    // hidden units of every MLP
    int feat_dim = 4;                   // hash feature vector length per level
    int table_log2 = 16;                // table entries per level = 2^table_log2
    std::vector<int> patch_sizes = {3, 5, 7};       // finest first, strictly increasing
    std::vector<int> grid_resolutions = {64, 32, 16};
    bool attention = true;              // top-down gating on/off (ablation)
    bool raw_coarse_attention = false;  // gate from raw rather than refined coarser feature

    int stt_dim() const { return 3 + feature_code_dim; }
    int corner_count() const { return 1 << stt_dim(); }
    void validate() const;
};

// All trainable state in one flat double vector, addressed through a layout.
class Model {
public:
    Model() = default;
    Model(const ModelConfig& cfg, std::uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    const nn::ParamLayout& layout() const { return layout_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    LevelConfig level_config(int level) const;  // level is 1-based

    nn::Mlp2 texture_mlp(int level) const;
    nn::Mlp2 weight_mlp(int level) const;
    nn::Mlp2 attention_mlp(int level) const;  // valid for 1 <= level < L
    nn::Mlp2 color_mlp() const;
    HashTableView table(int level) const;

    // Gradient views into an external buffer laid out like params().
    nn::Mlp2Grad texture_grad(std::span<double> g, int level) const;
    nn::Mlp2Grad weight_grad(std::span<double> g, int level) const;
    nn::Mlp2Grad attention_grad(std::span<double> g, int level) const;
    nn::Mlp2Grad color_grad(std::span<double> g) const;
    std::span<double> table_grad(std::span<double> g, int level) const;

private:
    struct MlpSlots {
        std::int64_t w1 = 0, b1 = 0, w2 = 0, b2 = 0;
        int in = 0, out = 0;
    };
    struct LevelSlots {
        MlpSlots texture, weights, attention;
        std::int64_t table = 0;
    };

    nn::Mlp2 make_view(const MlpSlots& s, nn::OutAct act, const char* what, int level) const;
    nn::Mlp2Grad make_grad(std::span<double> g, const MlpSlots& s) const;
    void check_level(int level) const;

    ModelConfig cfg_;
    nn::ParamLayout layout_;
    std::vector<double> params_;
    std::vector<LevelSlots> slots_;
    MlpSlots color_;
};

}  // namespace vrinr
