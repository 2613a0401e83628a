#include "vrinr/video.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <random>

namespace fs = std::filesystem;

namespace vrinr {

namespace {

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void read_png_rgb8(const std::string& path, int& h, int& w, std::vector<unsigned char>& out) {
    PngReadCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open '" + path + "'");
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) throw IoError("libpng init failed for '" + path + "'");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("failed to decode '" + path + "'");

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);
    const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    const int color_type = png_get_color_type(ctx.png, ctx.info);
    if (bit_depth != 8 || color_type != PNG_COLOR_TYPE_RGB)
        throw IoError("'" + path + "' is not an 8-bit RGB PNG");

    w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    out.resize(static_cast<std::size_t>(h) * w * 3);
    std::vector<png_bytep> rows(h);
    for (int r = 0; r < h; ++r) rows[r] = out.data() + static_cast<std::size_t>(r) * w * 3;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);
}

void write_png_rgb8(const std::string& path, int h, int w, const std::vector<unsigned char>& px) {
    PngWriteCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) throw IoError("cannot write '" + path + "'");
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) throw IoError("libpng init failed for '" + path + "'");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("failed to encode '" + path + "'");

    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    std::vector<png_bytep> rows(h);
    for (int r = 0; r < h; ++r)
        rows[r] = const_cast<png_bytep>(px.data() + static_cast<std::size_t>(r) * w * 3);
    png_write_image(ctx.png, rows.data());
    png_write_end(ctx.png, nullptr);
}

}  // namespace

FrameSequence load_frames(const std::string& dir_path) {
    if (!fs::is_directory(dir_path)) throw IoError("'" + dir_path + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir_path)) {
        const std::string name = e.path().filename().string();
        if (name.size() == 15 && name.starts_with("frame_") && name.ends_with(".png"))
            files.push_back(e.path());
    }
    if (files.empty()) throw IoError("no frame_%05d.png files in '" + dir_path + "'");
    std::sort(files.begin(), files.end());

    FrameSequence seq;
    for (std::size_t f = 0; f < files.size(); ++f) {
        int h = 0, w = 0;
        std::vector<unsigned char> px;
        read_png_rgb8(files[f].string(), h, w, px);
        if (f == 0) {
            seq = FrameSequence(static_cast<int>(files.size()), h, w);
        } else if (h != seq.h || w != seq.w) {
            throw IoError("ragged frame dimensions in '" + files[f].string() + "'");
        }
        double* dst = seq.data.data() + f * static_cast<std::size_t>(h) * w * 3;
        for (std::size_t i = 0; i < px.size(); ++i) dst[i] = px[i] / 255.0;
    }
    return seq;
}

void save_frames(const FrameSequence& seq, const std::string& dir_path) {
    fs::create_directories(dir_path);
    const std::size_t frame_vals = static_cast<std::size_t>(seq.h) * seq.w * 3;
    std::vector<unsigned char> px(frame_vals);
    for (int f = 0; f < seq.t; ++f) {
        const double* src = seq.data.data() + f * frame_vals;
        for (std::size_t i = 0; i < frame_vals; ++i) {
            const double v = std::clamp(src[i], 0.0, 1.0);
            px[i] = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));  // round half up
        }
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05d.png", f);
        write_png_rgb8((fs::path(dir_path) / name).string(), seq.h, seq.w, px);
    }
}

namespace {

// Catmull-Rom weight, a = -0.5.
double cubic_weight(double x) {
    x = std::abs(x);
    if (x < 1.0) return ((1.5 * x - 2.5) * x) * x + 1.0;
    if (x < 2.0) return (((-0.5 * x + 2.5) * x) - 4.0) * x + 2.0;
    return 0.0;
}

}  // namespace

void bicubic_resize_frame(const FrameSequence& src, int frame, int out_h, int out_w,
                          FrameSequence& dst, int dst_frame) {
    if (out_h < 1 || out_w < 1) throw DimensionError("bicubic_resize: degenerate output dims");
    const double sy = static_cast<double>(src.h) / out_h;
    const double sx = static_cast<double>(src.w) / out_w;
    for (int r = 0; r < out_h; ++r) {
        const double fy = (r + 0.5) * sy - 0.5;
        const int iy = static_cast<int>(std::floor(fy));
        double wy[4];
        for (int k = 0; k < 4; ++k) wy[k] = cubic_weight(fy - (iy - 1 + k));
        for (int c = 0; c < out_w; ++c) {
            const double fx = (c + 0.5) * sx - 0.5;
            const int ix = static_cast<int>(std::floor(fx));
            double wx[4];
            for (int k = 0; k < 4; ++k) wx[k] = cubic_weight(fx - (ix - 1 + k));
            double acc[3] = {0.0, 0.0, 0.0};
            for (int ky = 0; ky < 4; ++ky) {
                const int rr = std::clamp(iy - 1 + ky, 0, src.h - 1);
                for (int kx = 0; kx < 4; ++kx) {
                    const int cc = std::clamp(ix - 1 + kx, 0, src.w - 1);
                    const double wgt = wy[ky] * wx[kx];
                    for (int ch = 0; ch < 3; ++ch) acc[ch] += wgt * src.at(frame, rr, cc, ch);
                }
            }
            for (int ch = 0; ch < 3; ++ch)
                dst.at(dst_frame, r, c, ch) = std::clamp(acc[ch], 0.0, 1.0);
        }
    }
}

FrameSequence bicubic_resize(const FrameSequence& seq, int out_h, int out_w) {
    FrameSequence out(seq.t, out_h, out_w);
    out.frame_rate = seq.frame_rate;
    for (int f = 0; f < seq.t; ++f) bicubic_resize_frame(seq, f, out_h, out_w, out, f);
    return out;
}

FrameSequence degrade_downsample(const FrameSequence& hr, double scale) {
    if (!(scale > 1.0)) throw Error("degrade_downsample: scale must be > 1");
    const int out_h = std::max(1, static_cast<int>(std::lround(hr.h / scale)));
    const int out_w = std::max(1, static_cast<int>(std::lround(hr.w / scale)));
    return bicubic_resize(hr, out_h, out_w);
}

FrameSequence add_gaussian_noise(const FrameSequence& seq, double sigma, std::uint64_t seed) {
    FrameSequence out = seq;
    if (sigma == 0.0) return out;
    const double s = sigma / 255.0;
    const std::size_t frame_vals = static_cast<std::size_t>(seq.h) * seq.w * 3;
    for (int f = 0; f < seq.t; ++f) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(f)));
        std::normal_distribution<double> dist(0.0, s);
        double* p = out.data.data() + f * frame_vals;
        for (std::size_t i = 0; i < frame_vals; ++i) p[i] = std::clamp(p[i] + dist(rng), 0.0, 1.0);
    }
    return out;
}

FrameSequence add_poisson_noise(const FrameSequence& seq, double lambda, std::uint64_t seed) {
    if (!(lambda > 0.0)) throw Error("add_poisson_noise: lambda must be > 0");
    FrameSequence out = seq;
    const std::size_t frame_vals = static_cast<std::size_t>(seq.h) * seq.w * 3;
    for (int f = 0; f < seq.t; ++f) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(f)));
        double* p = out.data.data() + f * frame_vals;
        for (std::size_t i = 0; i < frame_vals; ++i) {
            const double mean = p[i] * lambda;
            if (mean <= 0.0) {
                p[i] = 0.0;
                continue;
            }
            std::poisson_distribution<long> dist(mean);
            p[i] = std::clamp(dist(rng) / lambda, 0.0, 1.0);
        }
    }
    return out;
}

CoordGrid make_coord_grid(int t, int h, int w) {
    if (t < 1 || h < 1 || w < 1) throw DimensionError("make_coord_grid: positive dims required");
    CoordGrid g;
    g.t = t;
    g.h = h;
    g.w = w;
    g.coords.reserve(static_cast<std::size_t>(t) * h * w);
    for (int f = 0; f < t; ++f)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                g.coords.push_back({norm_coord(c, w), norm_coord(r, h), norm_coord(f, t)});
    return g;
}

}  // namespace vrinr
