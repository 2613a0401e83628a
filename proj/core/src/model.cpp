#include "vrinr/model.hpp"

#include <random>

namespace vrinr {

void ModelConfig::validate() const {
    if (levels < 1) throw Error("ModelConfig: levels must be >= 1");
    if (feature_code_dim < 1) throw Error("ModelConfig: feature_code_dim must be >= 1");
    if (static_cast<int>(patch_sizes.size()) != levels ||
        static_cast<int>(grid_resolutions.size()) != levels)
        throw Error("ModelConfig: patch_sizes/grid_resolutions must have one entry per level");
    for (int l = 0; l < levels; ++l) {
        if (patch_sizes[l] % 2 == 0) throw Error("ModelConfig: patch sizes must be odd");
        if (grid_resolutions[l] < 2) throw Error("ModelConfig: grid resolutions must be >= 2");
        if (l > 0 && patch_sizes[l] <= patch_sizes[l - 1])
            throw Error("ModelConfig: patch sizes must increase with level");
    }
    if (table_log2 < 1 || table_log2 > 30) throw Error("ModelConfig: table_log2 out of range");
    if (hidden < 1 || feat_dim < 1) throw Error("ModelConfig: degenerate dims");
}

Model::Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    const int d = cfg_.stt_dim();
    slots_.resize(cfg_.levels);
    auto add_mlp = [this](MlpSlots& s, const std::string& prefix, int in, int out) {
        s.in = in;
        s.out = out;
        s.w1 = layout_.add(prefix + ".w1", {cfg_.hidden, in});
        s.b1 = layout_.add(prefix + ".b1", {cfg_.hidden});
        s.w2 = layout_.add(prefix + ".w2", {out, cfg_.hidden});
        s.b2 = layout_.add(prefix + ".b2", {out});
    };
    for (int l = 0; l < cfg_.levels; ++l) {
        const std::string prefix = "level" + std::to_string(l + 1);
        const int patch_len = 3 * cfg_.patch_sizes[l] * cfg_.patch_sizes[l];
        add_mlp(slots_[l].texture, prefix + ".texture", patch_len, cfg_.feature_code_dim);
        add_mlp(slots_[l].weights, prefix + ".weights", 3 * d, cfg_.corner_count());
        slots_[l].table = layout_.add(prefix + ".table", {1ll << cfg_.table_log2, cfg_.feat_dim});
        if (l + 1 < cfg_.levels)
            add_mlp(slots_[l].attention, prefix + ".attention", cfg_.feat_dim, cfg_.feat_dim);
    }
    add_mlp(color_, "color", cfg_.levels * cfg_.feat_dim, 3);

    params_.assign(layout_.total, 0.0);
    std::uint64_t tensor_index = 0;
    for (const auto& slot : layout_.slots) {
        if (slot.name.ends_with(".table")) {
            std::mt19937_64 rng(mix_seed(seed, tensor_index));
            std::uniform_real_distribution<double> dist(-1e-4, 1e-4);
            for (std::int64_t i = 0; i < slot.size; ++i) params_[slot.offset + i] = dist(rng);
        }
        ++tensor_index;
    }
    // MLPs are initialized per 4-slot group so fan-in/out are known.
    tensor_index = 0;
    auto span_of = [this](std::int64_t off, std::int64_t n) {
        return std::span<double>(params_.data() + off, static_cast<std::size_t>(n));
    };
    auto init_mlp = [&](const MlpSlots& s) {
        nn::init_mlp2_params(span_of(s.w1, static_cast<std::int64_t>(cfg_.hidden) * s.in),
                             span_of(s.b1, cfg_.hidden),
                             span_of(s.w2, static_cast<std::int64_t>(s.out) * cfg_.hidden),
                             span_of(s.b2, s.out), s.in, cfg_.hidden, s.out,
                             mix_seed(seed ^ 0xabcdef, tensor_index++));
    };
    for (int l = 0; l < cfg_.levels; ++l) {
        init_mlp(slots_[l].texture);
        init_mlp(slots_[l].weights);
        if (l + 1 < cfg_.levels) init_mlp(slots_[l].attention);
    }
    init_mlp(color_);
}

void Model::check_level(int level) const {
    if (level < 1 || level > cfg_.levels)
        throw Error("Model: level " + std::to_string(level) + " out of range 1.." +
                    std::to_string(cfg_.levels));
}

LevelConfig Model::level_config(int level) const {
    check_level(level);
    return {level, cfg_.patch_sizes[level - 1], cfg_.grid_resolutions[level - 1]};
}

nn::Mlp2 Model::make_view(const MlpSlots& s, nn::OutAct act, const char* what, int level) const {
    nn::Mlp2 m;
    m.in_dim = s.in;
    m.hidden_dim = cfg_.hidden;
    m.out_dim = s.out;
    m.out_act = act;
    m.name = level > 0 ? std::string(what) + "@level" + std::to_string(level) : what;
    const double* p = params_.data();
    m.w1 = {p + s.w1, static_cast<std::size_t>(cfg_.hidden) * s.in};
    m.b1 = {p + s.b1, static_cast<std::size_t>(cfg_.hidden)};
    m.w2 = {p + s.w2, static_cast<std::size_t>(s.out) * cfg_.hidden};
    m.b2 = {p + s.b2, static_cast<std::size_t>(s.out)};
    return m;
}

nn::Mlp2Grad Model::make_grad(std::span<double> g, const MlpSlots& s) const {
    if (g.size() != params_.size()) throw DimensionError("Model: gradient buffer size mismatch");
    nn::Mlp2Grad r;
    r.w1 = g.subspan(s.w1, static_cast<std::size_t>(cfg_.hidden) * s.in);
    r.b1 = g.subspan(s.b1, cfg_.hidden);
    r.w2 = g.subspan(s.w2, static_cast<std::size_t>(s.out) * cfg_.hidden);
    r.b2 = g.subspan(s.b2, s.out);
    return r;
}

nn::Mlp2 Model::texture_mlp(int level) const {
    check_level(level);
    return make_view(slots_[level - 1].texture, nn::OutAct::tanh_act, "texture", level);
}

nn::Mlp2 Model::weight_mlp(int level) const {
    check_level(level);
    return make_view(slots_[level - 1].weights, nn::OutAct::softmax, "weights", level);
}

nn::Mlp2 Model::attention_mlp(int level) const {
    check_level(level);
    if (level >= cfg_.levels) throw Error("Model: coarsest level has no attention mlp");
    return make_view(slots_[level - 1].attention, nn::OutAct::sigmoid, "attention", level);
}

nn::Mlp2 Model::color_mlp() const { return make_view(color_, nn::OutAct::sigmoid, "color", 0); }

HashTableView Model::table(int level) const {
    check_level(level);
    HashTableView t;
    t.log2_size = cfg_.table_log2;
    t.feat_dim = cfg_.feat_dim;
    t.entries = {params_.data() + slots_[level - 1].table,
                 static_cast<std::size_t>(1ll << cfg_.table_log2) * cfg_.feat_dim};
    return t;
}

nn::Mlp2Grad Model::texture_grad(std::span<double> g, int level) const {
    check_level(level);
    return make_grad(g, slots_[level - 1].texture);
}

nn::Mlp2Grad Model::weight_grad(std::span<double> g, int level) const {
    check_level(level);
    return make_grad(g, slots_[level - 1].weights);
}

nn::Mlp2Grad Model::attention_grad(std::span<double> g, int level) const {
    check_level(level);
    if (level >= cfg_.levels) throw Error("Model: coarsest level has no attention mlp");
    return make_grad(g, slots_[level - 1].attention);
}

nn::Mlp2Grad Model::color_grad(std::span<double> g) const { return make_grad(g, color_); }

std::span<double> Model::table_grad(std::span<double> g, int level) const {
    check_level(level);
    if (g.size() != params_.size()) throw DimensionError("Model: gradient buffer size mismatch");
    return g.subspan(slots_[level - 1].table,
                     static_cast<std::size_t>(1ll << cfg_.table_log2) * cfg_.feat_dim);
}

}  // namespace vrinr
