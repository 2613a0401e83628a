// vrinr: per-video fitting and arbitrary-scale restoration from the command line.
//
// Subcommands: degrade, train, restore, evaluate, gradcheck.
// Exit codes: 0 success, 1 runtime/check failure, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "vrinr/gradcheck.hpp"
#include "vrinr/metrics.hpp"
#include "vrinr/restorer.hpp"
#include "vrinr/trainer.hpp"

namespace {

using namespace vrinr;

int cmd_degrade(const std::string& in_dir, const std::string& out_dir, double scale,
                double gaussian, double poisson, std::uint64_t seed) {
    FrameSequence seq = load_frames(in_dir);
    if (scale > 1.0) seq = degrade_downsample(seq, scale);
    if (gaussian > 0.0) seq = add_gaussian_noise(seq, gaussian, seed);
    if (poisson > 0.0) seq = add_poisson_noise(seq, poisson, seed);
    save_frames(seq, out_dir);

    KvConfig manifest;
    manifest.set("in", in_dir);
    manifest.set_double("scale", scale);
    manifest.set_double("gaussian", gaussian);
    manifest.set_double("poisson", poisson);
    manifest.set_int("seed", static_cast<std::int64_t>(seed));
    manifest.set_int("frames", seq.t);
    manifest.set_int("height", seq.h);
    manifest.set_int("width", seq.w);
    std::ofstream mf(out_dir + "/degrade.json");
    mf << "{\n";
    bool first = true;
    for (const auto& key : {"in", "scale", "gaussian", "poisson", "seed", "frames", "height",
                            "width"}) {
        if (!first) mf << ",\n";
        first = false;
        mf << "  \"" << key << "\": \"" << manifest.get_string(key, "") << "\"";
    }
    mf << "\n}\n";
    return 0;
}

int cmd_train(const std::string& hr_dir, const std::string& out_ckpt,
              const std::string& config_path, double scale, int epochs, std::uint64_t seed,
              bool have_seed, const std::string& log_path) {
    KvConfig kv;
    if (!config_path.empty()) kv = KvConfig::parse_file(config_path);
    if (scale > 0.0) kv.set_double("train.scale", scale);
    if (epochs >= 0) kv.set_int("train.epochs", epochs);
    if (have_seed) kv.set_int("train.seed", static_cast<std::int64_t>(seed));
    const TrainConfig cfg = TrainConfig::from_kv(kv);

    std::ofstream log_file;
    FitOptions opts;
    if (!log_path.empty()) {
        log_file.open(log_path);
        if (!log_file) throw IoError("cannot write log '" + log_path + "'");
        opts.log = &log_file;
    } else {
        opts.log = &std::cerr;
    }

    // Single clip: --hr holds frames directly. Multi-clip: --hr holds one
    // subdirectory per clip; each gets its own fit (same loop, same config)
    // and its own checkpoint under --out treated as a directory.
    if (std::filesystem::exists(std::filesystem::path(hr_dir) / "frame_00000.png")) {
        Checkpoint ckpt = fit(load_frames(hr_dir), cfg, opts);
        save_checkpoint(ckpt, out_ckpt);
        if (ckpt.diverged) {
            std::cerr << "training diverged at epoch " << ckpt.epoch
                      << "; checkpoint holds the last finite state\n";
            return 1;
        }
        return 0;
    }

    std::vector<std::filesystem::path> clips;
    for (const auto& entry : std::filesystem::directory_iterator(hr_dir))
        if (entry.is_directory()) clips.push_back(entry.path());
    if (clips.empty()) throw IoError("no frames or clip directories in '" + hr_dir + "'");
    std::sort(clips.begin(), clips.end());
    std::filesystem::create_directories(out_ckpt);
    int rc = 0;
    for (const auto& clip : clips) {
        (*opts.log) << "# clip " << clip.filename().string() << '\n';
        Checkpoint ckpt = fit(load_frames(clip.string()), cfg, opts);
        save_checkpoint(ckpt, (std::filesystem::path(out_ckpt) /
                               (clip.filename().string() + ".bin")).string());
        if (ckpt.diverged) {
            std::cerr << "training diverged on clip '" << clip.filename().string()
                      << "' at epoch " << ckpt.epoch << '\n';
            rc = 1;
        }
    }
    return rc;
}

int cmd_restore(const std::string& ckpt_path, const std::string& lr_dir,
                const std::string& out_dir, double scale, double gaussian, double poisson,
                std::uint64_t seed) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    FrameSequence lr = load_frames(lr_dir);
    NoiseSpec noise;
    if (gaussian > 0.0) noise = {NoiseSpec::Kind::gaussian, gaussian, seed};
    else if (poisson > 0.0) noise = {NoiseSpec::Kind::poisson, poisson, seed};
    auto [noisy, restored] = restore_noisy(ckpt.model, lr, noise, scale);
    save_frames(restored, out_dir);
    return 0;
}

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir,
                 const std::string& report_path) {
    const FrameSequence pred = load_frames(pred_dir);
    const FrameSequence gt = load_frames(gt_dir);
    if (pred.t != gt.t)
        throw DimensionError("evaluate: frame counts differ (" + std::to_string(pred.t) + " vs " +
                             std::to_string(gt.t) + ")");
    const std::vector<double> p = psnr_per_frame(pred, gt);
    const std::vector<double> s = ssim_per_frame(pred, gt);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!report_path.empty()) {
        file.open(report_path);
        if (!file) throw IoError("cannot write report '" + report_path + "'");
        out = &file;
    }
    (*out) << "frame,psnr_db,ssim\n";
    for (int f = 0; f < pred.t; ++f) (*out) << f << ',' << p[f] << ',' << s[f] << '\n';
    (*out) << "mean," << psnr(pred, gt) << ',' << ssim(pred, gt) << '\n';
    std::cout << "PSNR " << psnr(pred, gt) << " dB, SSIM " << ssim(pred, gt) << " over " << pred.t
              << " frames\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
    int rc = 0;
    for (const GradCheckReport& report : {gradcheck_mlp(seed), gradcheck_pipeline(seed)}) {
        for (const auto& g : report.groups) {
            std::cout << (g.passed ? "ok   " : "FAIL ") << g.name << "  worst_rel " << g.worst_rel
                      << "  checked " << g.checked << "  excluded " << g.excluded << '\n';
            if (!g.passed) {
                std::cerr << "gradient check failed for " << g.name << " (worst_rel "
                          << g.worst_rel << " > " << report.tolerance << ")\n";
                rc = 1;
            }
        }
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VR-INR video restoration: per-video training, arbitrary-scale restoration, "
                 "zero-shot denoising"};
    app.require_subcommand(1);

    std::string in_dir, out_dir, hr_dir, lr_dir, ckpt_path, config_path, report_path, log_path;
    std::string pred_dir, gt_dir;
    double scale = 0.0, gaussian = 0.0, poisson = 0.0;
    int epochs = -1;
    std::uint64_t seed = 0;
    bool deterministic = false;

    auto* degrade = app.add_subcommand("degrade", "Downsample and/or add noise to frames");
    degrade->add_option("--in", in_dir, "input frame directory")->required();
    degrade->add_option("--out", out_dir, "output frame directory")->required();
    degrade->add_option("--scale", scale, "bicubic downsampling factor (> 1)");
    degrade->add_option("--gaussian", gaussian, "gaussian noise sigma on the 0..255 scale");
    degrade->add_option("--poisson", poisson, "poisson noise intensity level");
    degrade->add_option("--seed", seed, "noise seed");

    auto* train = app.add_subcommand(
        "train", "Fit the model to one video (or one model per clip subdirectory)");
    train->add_option("--hr", hr_dir, "frame directory, or a directory of clip directories")
        ->required();
    train->add_option("--out", ckpt_path,
                      "output checkpoint path (a directory in multi-clip mode)")
        ->required();
    train->add_option("--scale", scale, "training downsampling scale (default 4)");
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--config", config_path, "key=value config file");
    auto* train_seed = train->add_option("--seed", seed, "training seed");
    train->add_option("--log", log_path, "training log file (default stderr)");
    train->add_flag("--deterministic", deterministic,
                    "serial reductions (training is single-threaded and deterministic already)");

    auto* restore_cmd = app.add_subcommand("restore", "Restore frames at any scale");
    restore_cmd->add_option("--ckpt", ckpt_path, "checkpoint path")->required();
    restore_cmd->add_option("--lr", lr_dir, "low-resolution frame directory")->required();
    restore_cmd->add_option("--scale", scale, "upscaling factor (any positive real)")->required();
    restore_cmd->add_option("--out", out_dir, "output frame directory")->required();
    restore_cmd->add_option("--gaussian", gaussian, "add gaussian noise to the input first");
    restore_cmd->add_option("--poisson", poisson, "add poisson noise to the input first");
    restore_cmd->add_option("--seed", seed, "noise seed");

    auto* evaluate = app.add_subcommand("evaluate", "PSNR/SSIM between two frame directories");
    evaluate->add_option("--pred", pred_dir, "predicted frames")->required();
    evaluate->add_option("--gt", gt_dir, "ground-truth frames")->required();
    evaluate->add_option("--report", report_path, "CSV report path (default stdout)");

    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
    gradcheck->add_option("--seed", seed, "check seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (degrade->parsed())
            return cmd_degrade(in_dir, out_dir, scale, gaussian, poisson, seed);
        if (train->parsed())
            return cmd_train(hr_dir, ckpt_path, config_path, scale, epochs, seed,
                             train_seed->count() > 0, log_path);
        if (restore_cmd->parsed())
            return cmd_restore(ckpt_path, lr_dir, out_dir, scale, gaussian, poisson, seed);
        if (evaluate->parsed()) return cmd_evaluate(pred_dir, gt_dir, report_path);
        if (gradcheck->parsed()) return cmd_gradcheck(seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
