#include "vrinr/fusion.hpp"

namespace vrinr {

std::vector<double> attention_weights(const nn::Mlp2& att_mlp, std::span<const double> v_coarser,
                                      nn::Mlp2Cache& cache, StateSig* sig) {
    if (att_mlp.out_act != nn::OutAct::sigmoid)
        throw Error("attention_weights: attention mlp must have sigmoid output");
    nn::mlp2_forward(att_mlp, v_coarser, cache, sig);
    return cache.y;
}

std::vector<double> refine(std::span<const double> v, std::span<const double> w_att) {
    if (v.size() != w_att.size()) throw DimensionError("refine: length mismatch");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * w_att[i];
    return out;
}

std::vector<double> fuse(const std::vector<std::vector<double>>& levels) {
    std::vector<double> out;
    for (const auto& v : levels) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::vector<double> decode_color(const nn::Mlp2& color_mlp, std::span<const double> v_hr,
                                 nn::Mlp2Cache& cache, StateSig* sig) {
    if (color_mlp.out_act != nn::OutAct::sigmoid)
        throw Error("decode_color: color mlp must have sigmoid output");
    nn::mlp2_forward(color_mlp, v_hr, cache, sig);
    return cache.y;
}

void forward_pixel(const Model& model, const FrameSequence& upsampled, const Coord& coord,
                   PixelCache& cache, StateSig* sig) {
    const ModelConfig& cfg = model.config();
    const int L = cfg.levels;
    const int fd = cfg.feat_dim;
    cache.coord = coord;
    cache.frame = denorm_index(coord.t, upsampled.t);
    cache.levels.resize(L);

    for (int l = 1; l <= L; ++l) {
        auto& lv = cache.levels[l - 1];
        const LevelConfig lcfg = model.level_config(l);
        extract_patch_into(upsampled, cache.frame, coord.x, coord.y, lcfg, lv.patch);
        nn::mlp2_forward(model.texture_mlp(l), lv.patch, lv.tex, sig);  // xi = tanh(...)

        const int d = cfg.stt_dim();
        lv.stt.resize(d);
        lv.stt[0] = coord.x;
        lv.stt[1] = coord.y;
        lv.stt[2] = coord.t;
        for (int f = 0; f < d - 3; ++f) lv.stt[3 + f] = lv.tex.y[f];
        for (double v : lv.stt)
            if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9)
                throw Error("forward_pixel: STT component outside [-1,1]");

        quantize_vertices_into(lv.stt, lcfg.grid_resolution, lv.nb);
        if (sig)
            for (int j = 0; j < lv.nb.dim; ++j) sig->add(static_cast<std::uint64_t>(lv.nb.lo[j]));
        lookup(lv.nb, model.table(l), lv.feats, lv.slots);

        lv.gin.resize(static_cast<std::size_t>(3) * d);
        for (int j = 0; j < d; ++j) {
            lv.gin[j] = lv.stt[j];
            lv.gin[d + j] = lv.stt[j] - lv.nb.v_min[j];
            lv.gin[2 * d + j] = lv.nb.v_max[j] - lv.stt[j];
        }
        nn::mlp2_forward(model.weight_mlp(l), lv.gin, lv.weights, sig);

        lv.v_raw.assign(fd, 0.0);
        for (int n = 0; n < lv.nb.corner_count(); ++n) {
            const double wn = lv.weights.y[n];
            const double* frow = lv.feats.data() + static_cast<std::size_t>(n) * fd;
            for (int k = 0; k < fd; ++k) lv.v_raw[k] += wn * frow[k];
        }
    }

    // Top-down refinement: coarsest level keeps unit gates.
    cache.levels[L - 1].v_refined = cache.levels[L - 1].v_raw;
    for (int l = L - 1; l >= 1; --l) {
        auto& lv = cache.levels[l - 1];
        if (!cfg.attention) {
            lv.v_refined = lv.v_raw;
            continue;
        }
        const auto& coarser = cache.levels[l];
        const std::vector<double>& src =
            cfg.raw_coarse_attention ? coarser.v_raw : coarser.v_refined;
        nn::mlp2_forward(model.attention_mlp(l), src, lv.att, sig);
        lv.v_refined.resize(fd);
        for (int k = 0; k < fd; ++k) lv.v_refined[k] = lv.att.y[k] * lv.v_raw[k];
    }

    cache.v_hr.resize(static_cast<std::size_t>(L) * fd);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < fd; ++k)
            cache.v_hr[static_cast<std::size_t>(l) * fd + k] = cache.levels[l].v_refined[k];
    nn::mlp2_forward(model.color_mlp(), cache.v_hr, cache.color, sig);
    cache.rgb = cache.color.y;
}

void backward_pixel(const Model& model, const PixelCache& cache, std::span<const double> drgb,
                    std::span<double> grad) {
    const ModelConfig& cfg = model.config();
    const int L = cfg.levels;
    const int fd = cfg.feat_dim;
    if (static_cast<int>(cache.levels.size()) != L)
        throw Error("backward_pixel: cache does not match model");

    std::vector<double> dv_hr(static_cast<std::size_t>(L) * fd, 0.0);
    nn::mlp2_backward(model.color_mlp(), cache.color, drgb, model.color_grad(grad), dv_hr);

    std::vector<std::vector<double>> d_refined(L), d_raw(L);
    for (int l = 0; l < L; ++l) {
        d_refined[l].assign(dv_hr.begin() + static_cast<std::size_t>(l) * fd,
                            dv_hr.begin() + static_cast<std::size_t>(l + 1) * fd);
        d_raw[l].assign(fd, 0.0);
    }

    // Reverse of the top-down cascade, finest first so gate gradients reach
    // the coarser features they were computed from.
    for (int l = 1; l <= L - 1; ++l) {
        const auto& lv = cache.levels[l - 1];
        if (!cfg.attention) {
            for (int k = 0; k < fd; ++k) d_raw[l - 1][k] += d_refined[l - 1][k];
            continue;
        }
        std::vector<double> dgate(fd);
        for (int k = 0; k < fd; ++k) {
            d_raw[l - 1][k] += lv.att.y[k] * d_refined[l - 1][k];
            dgate[k] = lv.v_raw[k] * d_refined[l - 1][k];
        }
        std::vector<double> dsrc(fd, 0.0);
        nn::mlp2_backward(model.attention_mlp(l), lv.att, dgate, model.attention_grad(grad, l),
                          dsrc);
        if (cfg.raw_coarse_attention)
            for (int k = 0; k < fd; ++k) d_raw[l][k] += dsrc[k];
        else
            for (int k = 0; k < fd; ++k) d_refined[l][k] += dsrc[k];
    }
    for (int k = 0; k < fd; ++k) d_raw[L - 1][k] += d_refined[L - 1][k];

    for (int l = 1; l <= L; ++l) {
        const auto& lv = cache.levels[l - 1];
        const int n_corners = lv.nb.corner_count();
        const int d = lv.nb.dim;

        // v_raw = sum_n w_n * feats_n
        std::vector<double> dw(n_corners, 0.0);
        std::span<double> tgrad = model.table_grad(grad, l);
        for (int n = 0; n < n_corners; ++n) {
            const double* frow = lv.feats.data() + static_cast<std::size_t>(n) * fd;
            double* grow = tgrad.data() + lv.slots[n] * fd;
            const double wn = lv.weights.y[n];
            for (int k = 0; k < fd; ++k) {
                dw[n] += frow[k] * d_raw[l - 1][k];
                grow[k] += wn * d_raw[l - 1][k];  // scatter-add into shared rows
            }
        }

        std::vector<double> dgin(static_cast<std::size_t>(3) * d, 0.0);
        nn::mlp2_backward(model.weight_mlp(l), lv.weights, dw, model.weight_grad(grad, l), dgin);

        // gin = [stt, stt - v_min, v_max - stt]; corners are locally constant.
        std::vector<double> dxi(d - 3);
        for (int j = 3; j < d; ++j) dxi[j - 3] = dgin[j] + dgin[d + j] - dgin[2 * d + j];
        nn::mlp2_backward(model.texture_mlp(l), lv.tex, dxi, model.texture_grad(grad, l), {});
    }
}

}  // namespace vrinr
