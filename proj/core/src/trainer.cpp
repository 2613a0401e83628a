#include "vrinr/trainer.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace vrinr {

double TrainConfig::lr_at_epoch(int epoch) const {
    return lr0 * std::pow(0.5, static_cast<double>(epoch / lr_halve_every));
}

KvConfig TrainConfig::to_kv() const {
    KvConfig kv;
    kv.set_double("train.scale", scale_train);
    kv.set_int("train.epochs", epochs);
    kv.set_int("train.batch_coords", batch_coords);
    kv.set_double("train.lr0", lr0);
    kv.set_int("train.lr_halve_every", lr_halve_every);
    kv.set_int("train.seed", static_cast<std::int64_t>(seed));
    kv.set("train.loss", use_pea ? "pea" : "mse");
    kv.set_double("pea.tau", pea.tau);
    kv.set_double("pea.epsilon", pea.epsilon);
    kv.set_double("pea.delta", pea.delta);
    kv.set_double("pea.alpha", pea.alpha);
    kv.set_int("model.levels", model.levels);
    kv.set_int("model.feature_code_dim", model.feature_code_dim);
    kv.set_int("model.hidden", model.hidden);
    kv.set_int("model.feat_dim", model.feat_dim);
    kv.set_int("model.table_log2", model.table_log2);
    kv.set_int_list("model.patch_sizes", model.patch_sizes);
    kv.set_int_list("model.grid_resolutions", model.grid_resolutions);
    kv.set_bool("model.attention", model.attention);
    kv.set_bool("model.raw_coarse_attention", model.raw_coarse_attention);
    return kv;
}

TrainConfig TrainConfig::from_kv(const KvConfig& kv) {
    TrainConfig c;
    c.scale_train = kv.get_double("train.scale", c.scale_train);
    c.epochs = static_cast<int>(kv.get_int("train.epochs", c.epochs));
    c.batch_coords = static_cast<int>(kv.get_int("train.batch_coords", c.batch_coords));
    c.lr0 = kv.get_double("train.lr0", c.lr0);
    c.lr_halve_every = static_cast<int>(kv.get_int("train.lr_halve_every", c.lr_halve_every));
    c.seed = static_cast<std::uint64_t>(kv.get_int("train.seed", 0));
    const std::string loss = kv.get_string("train.loss", "pea");
    if (loss == "pea")
        c.use_pea = true;
    else if (loss == "mse")
        c.use_pea = false;
    else
        throw ConfigError("key 'train.loss': expected 'pea' or 'mse', got '" + loss + "'");
    c.pea.tau = kv.get_double("pea.tau", c.pea.tau);
    c.pea.epsilon = kv.get_double("pea.epsilon", c.pea.epsilon);
    c.pea.delta = kv.get_double("pea.delta", c.pea.delta);
    c.pea.alpha = kv.get_double("pea.alpha", c.pea.alpha);
    c.model.levels = static_cast<int>(kv.get_int("model.levels", c.model.levels));
    c.model.feature_code_dim =
        static_cast<int>(kv.get_int("model.feature_code_dim", c.model.feature_code_dim));
    c.model.hidden = static_cast<int>(kv.get_int("model.hidden", c.model.hidden));
    c.model.feat_dim = static_cast<int>(kv.get_int("model.feat_dim", c.model.feat_dim));
    c.model.table_log2 = static_cast<int>(kv.get_int("model.table_log2", c.model.table_log2));
    c.model.patch_sizes = kv.get_int_list("model.patch_sizes", c.model.patch_sizes);
    c.model.grid_resolutions =
        kv.get_int_list("model.grid_resolutions", c.model.grid_resolutions);
    c.model.attention = kv.get_bool("model.attention", c.model.attention);
    c.model.raw_coarse_attention =
        kv.get_bool("model.raw_coarse_attention", c.model.raw_coarse_attention);
    c.model.validate();
    return c;
}

std::pair<FrameSequence, FrameSequence> build_pairs(const FrameSequence& hr, double scale) {
    return {degrade_downsample(hr, scale), hr};
}

void sample_batch(const CoordGrid& grid, const FrameSequence& gt, int n, std::mt19937_64& rng,
                  std::vector<Coord>& coords, std::vector<double>& gt_pixels) {
    const std::size_t total = grid.coords.size();
    if (n < 1 || static_cast<std::size_t>(n) > total)
        throw Error("sample_batch: batch size " + std::to_string(n) + " out of range");
    if (gt.t != grid.t || gt.h != grid.h || gt.w != grid.w)
        throw DimensionError("sample_batch: ground truth does not match grid");

    std::vector<std::uint32_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0u);
    coords.resize(n);
    gt_pixels.resize(static_cast<std::size_t>(n) * 3);
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, total - 1);
        std::swap(idx[i], idx[dist(rng)]);
        const std::size_t k = idx[i];
        coords[i] = grid.coords[k];
        for (int ch = 0; ch < 3; ++ch) gt_pixels[static_cast<std::size_t>(i) * 3 + ch] =
            gt.data[k * 3 + ch];
    }
}

double dataset_pea_loss(const Model& model, const FrameSequence& upsampled, const CoordGrid& grid,
                        const FrameSequence& gt, const PeaConfig& pea, StateSig* sig) {
    const std::size_t n = grid.coords.size();
    PixelCache cache;
    double masked = 0.0, boost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        forward_pixel(model, upsampled, grid.coords[i], cache, sig);
        double err = 0.0;
        for (int ch = 0; ch < 3; ++ch) {
            const double d = cache.rgb[ch] - gt.data[i * 3 + ch];
            err += d * d;
        }
        err /= 3.0;
        const bool masked_in = err > pea.tau;
        const bool boosted = err < pea.epsilon;
        if (sig) {
            sig->add_bit(masked_in);
            sig->add_bit(boosted);
        }
        masked += masked_in ? err : 0.0;
        boost += err + (boosted ? pea.delta : 0.0);
    }
    return (masked + pea.alpha * boost) / static_cast<double>(n);
}

double dataset_pea_grad(const Model& model, const FrameSequence& upsampled, const CoordGrid& grid,
                        const FrameSequence& gt, const PeaConfig& pea, std::span<double> grad) {
    const std::size_t n = grid.coords.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    PixelCache cache;
    double masked = 0.0, boost = 0.0;
    double drgb[3];
    for (std::size_t i = 0; i < n; ++i) {
        forward_pixel(model, upsampled, grid.coords[i], cache);
        double err = 0.0;
        for (int ch = 0; ch < 3; ++ch) {
            const double d = cache.rgb[ch] - gt.data[i * 3 + ch];
            err += d * d;
        }
        err /= 3.0;
        const bool masked_in = err > pea.tau;
        masked += masked_in ? err : 0.0;
        boost += err + (err < pea.epsilon ? pea.delta : 0.0);
        const double coeff = ((masked_in ? 1.0 : 0.0) + pea.alpha) * (2.0 / 3.0) * inv_n;
        for (int ch = 0; ch < 3; ++ch)
            drgb[ch] = coeff * (cache.rgb[ch] - gt.data[i * 3 + ch]);
        backward_pixel(model, cache, drgb, grad);
    }
    return (masked + pea.alpha * boost) * inv_n;
}

Checkpoint fit(const FrameSequence& hr_video, const TrainConfig& cfg, const FitOptions& opts) {
    if (!(cfg.scale_train > 1.0)) throw Error("fit: training scale must be > 1");
    const auto [lr, hr] = build_pairs(hr_video, cfg.scale_train);
    const FrameSequence upsampled = bicubic_resize(lr, hr.h, hr.w);
    const CoordGrid grid = make_coord_grid(hr.t, hr.h, hr.w);
    const std::size_t total = grid.coords.size();
    const int batch = static_cast<int>(std::min<std::size_t>(cfg.batch_coords, total));
    const int steps_per_epoch = static_cast<int>((total + batch - 1) / batch);

    Checkpoint ckpt;
    std::mt19937_64 rng;
    int start_epoch = 0;
    if (opts.resume_from) {
        ckpt = *opts.resume_from;
        std::istringstream in(ckpt.rng_state);
        in >> rng;
        start_epoch = static_cast<int>(ckpt.epoch);
    } else {
        ckpt.cfg = cfg;
        ckpt.model = Model(cfg.model, cfg.seed);
        ckpt.adam.m.assign(ckpt.model.params().size(), 0.0);
        ckpt.adam.v.assign(ckpt.model.params().size(), 0.0);
        rng.seed(mix_seed(cfg.seed, 0x7261696eull));
    }

    const PeaConfig pea = cfg.use_pea ? cfg.pea : PeaConfig{-1.0, 0.0, 0.0, 0.0};

    std::vector<double> grad(ckpt.model.params().size());
    std::vector<Coord> coords;
    std::vector<double> gt_pixels;
    std::vector<double> backup_params, backup_m, backup_v;
    PixelCache cache;
    double drgb[3];

    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        const double lr_e = cfg.lr_at_epoch(epoch);
        double epoch_mse = 0.0;
        std::size_t epoch_px = 0;
        for (int step = 0; step < steps_per_epoch; ++step) {
            sample_batch(grid, hr, batch, rng, coords, gt_pixels);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double inv_n = 1.0 / batch;
            double masked = 0.0, boost = 0.0, mse = 0.0;
            for (int i = 0; i < batch; ++i) {
                forward_pixel(ckpt.model, upsampled, coords[i], cache);
                double err = 0.0;
                for (int ch = 0; ch < 3; ++ch) {
                    const double d = cache.rgb[ch] - gt_pixels[static_cast<std::size_t>(i) * 3 + ch];
                    err += d * d;
                }
                err /= 3.0;
                mse += err;
                const bool masked_in = err > pea.tau;
                masked += masked_in ? err : 0.0;
                boost += err + (err < pea.epsilon ? pea.delta : 0.0);
                const double coeff = ((masked_in ? 1.0 : 0.0) + pea.alpha) * (2.0 / 3.0) * inv_n;
                for (int ch = 0; ch < 3; ++ch)
                    drgb[ch] =
                        coeff * (cache.rgb[ch] - gt_pixels[static_cast<std::size_t>(i) * 3 + ch]);
                backward_pixel(ckpt.model, cache, drgb, grad);
            }
            const double loss = (masked + pea.alpha * boost) * inv_n;
            mse *= inv_n;
            epoch_mse += mse * batch;
            epoch_px += batch;
            if (!std::isfinite(loss)) {
                // Divergence: hand back the last finite state.
                if (!backup_params.empty()) {
                    ckpt.model.params() = backup_params;
                    ckpt.adam.m = backup_m;
                    ckpt.adam.v = backup_v;
                    ckpt.adam.step_count -= 1;
                }
                ckpt.epoch = epoch;
                ckpt.diverged = true;
                if (opts.log)
                    (*opts.log) << "# aborted: non-finite loss at epoch " << epoch << '\n';
                std::ostringstream out;
                out << rng;
                ckpt.rng_state = out.str();
                return ckpt;
            }
            backup_params = ckpt.model.params();
            backup_m = ckpt.adam.m;
            backup_v = ckpt.adam.v;
            nn::adam_step(ckpt.model.params(), grad, ckpt.adam, lr_e);
            if (opts.log) {
                const double psnr_batch = mse > 0.0 ? 10.0 * std::log10(1.0 / mse) : 99.0;
                (*opts.log) << epoch << ',' << step << ',' << lr_e << ',' << loss << ','
                            << psnr_batch << '\n';
            }
        }
        if (opts.log) {
            const double em = epoch_mse / static_cast<double>(epoch_px);
            (*opts.log) << "# epoch " << epoch << " train_psnr "
                        << (em > 0.0 ? 10.0 * std::log10(1.0 / em) : 99.0) << '\n';
            opts.log->flush();
        }
        ckpt.epoch = epoch + 1;
    }

    std::ostringstream out;
    out << rng;
    ckpt.rng_state = out.str();
    return ckpt;
}

namespace {

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_u64(std::ofstream& out, std::uint64_t v) { write_bytes(out, &v, sizeof v); }

void write_string(std::ofstream& out, const std::string& s) {
    write_u64(out, s.size());
    write_bytes(out, s.data(), s.size());
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
    write_u64(out, v.size());
    write_bytes(out, v.data(), v.size() * sizeof(double));
}

void read_bytes(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw IoError("truncated checkpoint '" + path + "'");
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
    std::uint64_t v = 0;
    read_bytes(in, &v, sizeof v, path);
    return v;
}

std::string read_string(std::ifstream& in, const std::string& path) {
    const std::uint64_t n = read_u64(in, path);
    if (n > (1ull << 32)) throw IoError("corrupt checkpoint '" + path + "'");
    std::string s(n, '\0');
    read_bytes(in, s.data(), n, path);
    return s;
}

std::vector<double> read_doubles(std::ifstream& in, const std::string& path) {
    const std::uint64_t n = read_u64(in, path);
    if (n > (1ull << 32)) throw IoError("corrupt checkpoint '" + path + "'");
    std::vector<double> v(n);
    read_bytes(in, v.data(), n * sizeof(double), path);
    return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    write_bytes(out, Checkpoint::kMagic, 8);
    write_string(out, ckpt.cfg.to_kv().serialize());
    const nn::ParamLayout& layout = ckpt.model.layout();
    write_u64(out, layout.slots.size());
    for (const auto& slot : layout.slots) {
        write_string(out, slot.name);
        write_u64(out, slot.shape.size());
        for (auto d : slot.shape) write_u64(out, static_cast<std::uint64_t>(d));
        write_u64(out, static_cast<std::uint64_t>(slot.offset));
    }
    write_doubles(out, ckpt.model.params());
    write_doubles(out, ckpt.adam.m);
    write_doubles(out, ckpt.adam.v);
    write_u64(out, static_cast<std::uint64_t>(ckpt.adam.step_count));
    write_bytes(out, &ckpt.adam.beta1, sizeof(double));
    write_bytes(out, &ckpt.adam.beta2, sizeof(double));
    write_bytes(out, &ckpt.adam.eps, sizeof(double));
    write_u64(out, static_cast<std::uint64_t>(ckpt.epoch));
    write_string(out, ckpt.rng_state);
    if (!out) throw IoError("failed to write checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    char magic[8];
    read_bytes(in, magic, 8, path);
    if (std::memcmp(magic, Checkpoint::kMagic, 8) != 0)
        throw IoError("'" + path + "' is not a VRINR001 checkpoint");

    Checkpoint ckpt;
    ckpt.cfg = TrainConfig::from_kv(KvConfig::parse_string(read_string(in, path), path));
    ckpt.model = Model(ckpt.cfg.model, ckpt.cfg.seed);

    const std::uint64_t n_slots = read_u64(in, path);
    if (n_slots != ckpt.model.layout().slots.size())
        throw IoError("checkpoint '" + path + "' layout does not match its config");
    for (std::uint64_t i = 0; i < n_slots; ++i) {
        const auto& expect = ckpt.model.layout().slots[i];
        if (read_string(in, path) != expect.name)
            throw IoError("checkpoint '" + path + "' layout does not match its config");
        const std::uint64_t ndim = read_u64(in, path);
        std::vector<std::int64_t> shape(ndim);
        for (auto& d : shape) d = static_cast<std::int64_t>(read_u64(in, path));
        const std::int64_t offset = static_cast<std::int64_t>(read_u64(in, path));
        if (shape != expect.shape || offset != expect.offset)
            throw IoError("checkpoint '" + path + "' layout does not match its config");
    }

    ckpt.model.params() = read_doubles(in, path);
    if (ckpt.model.params().size() != static_cast<std::size_t>(ckpt.model.layout().total))
        throw IoError("checkpoint '" + path + "' parameter vector size mismatch");
    ckpt.adam.m = read_doubles(in, path);
    ckpt.adam.v = read_doubles(in, path);
    if (ckpt.adam.m.size() != ckpt.model.params().size() ||
        ckpt.adam.v.size() != ckpt.model.params().size())
        throw IoError("checkpoint '" + path + "' optimizer state size mismatch");
    ckpt.adam.step_count = static_cast<std::int64_t>(read_u64(in, path));
    read_bytes(in, &ckpt.adam.beta1, sizeof(double), path);
    read_bytes(in, &ckpt.adam.beta2, sizeof(double), path);
    read_bytes(in, &ckpt.adam.eps, sizeof(double), path);
    ckpt.epoch = static_cast<std::int64_t>(read_u64(in, path));
    ckpt.rng_state = read_string(in, path);
    return ckpt;
}

}  // namespace vrinr
