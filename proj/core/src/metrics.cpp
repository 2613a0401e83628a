#include "vrinr/metrics.hpp"

#include <cmath>

namespace vrinr {

static void check_same_shape(const FrameSequence& a, const FrameSequence& b) {
    if (a.t != b.t || a.h != b.h || a.w != b.w)
        throw DimensionError("metrics: frame sequence shapes differ");
}

std::vector<double> psnr_per_frame(const FrameSequence& a, const FrameSequence& b) {
    check_same_shape(a, b);
    const std::size_t frame_vals = static_cast<std::size_t>(a.h) * a.w * 3;
    std::vector<double> out(a.t);
    for (int f = 0; f < a.t; ++f) {
        const double* pa = a.data.data() + f * frame_vals;
        const double* pb = b.data.data() + f * frame_vals;
        double mse = 0.0;
        for (std::size_t i = 0; i < frame_vals; ++i) {
            const double d = pa[i] - pb[i];
            mse += d * d;
        }
        mse /= static_cast<double>(frame_vals);
        out[f] = mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / mse);
    }
    return out;
}

double psnr(const FrameSequence& a, const FrameSequence& b) {
    const std::vector<double> per = psnr_per_frame(a, b);
    double acc = 0.0;
    int finite = 0;
    for (double v : per)
        if (std::isfinite(v)) {
            acc += v;
            ++finite;
        }
    if (finite == 0) return std::numeric_limits<double>::infinity();
    return acc / finite;
}

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::vector<double>& gaussian_window() {
    static const std::vector<double> win = [] {
        std::vector<double> w(kWin);
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i) {
            const double d = i - (kWin - 1) / 2.0;
            w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
            sum += w[i];
        }
        for (double& v : w) v /= sum;
        return w;
    }();
    return win;
}

}  // namespace

std::vector<double> ssim_per_frame(const FrameSequence& a, const FrameSequence& b) {
    check_same_shape(a, b);
    if (a.h < kWin || a.w < kWin)
        throw DimensionError("ssim: frames smaller than the 11x11 window");
    const std::vector<double>& win = gaussian_window();
    std::vector<double> out(a.t);
    for (int f = 0; f < a.t; ++f) {
        double frame_acc = 0.0;
        for (int ch = 0; ch < 3; ++ch) {
            double ch_acc = 0.0;
            std::size_t windows = 0;
            for (int r0 = 0; r0 + kWin <= a.h; ++r0) {
                for (int c0 = 0; c0 + kWin <= a.w; ++c0) {
                    double ma = 0.0, mb = 0.0, va = 0.0, vb = 0.0, cov = 0.0;
                    for (int i = 0; i < kWin; ++i)
                        for (int j = 0; j < kWin; ++j) {
                            const double wgt = win[i] * win[j];
                            const double xa = a.at(f, r0 + i, c0 + j, ch);
                            const double xb = b.at(f, r0 + i, c0 + j, ch);
                            ma += wgt * xa;
                            mb += wgt * xb;
                            va += wgt * xa * xa;
                            vb += wgt * xb * xb;
                            cov += wgt * xa * xb;
                        }
                    va -= ma * ma;
                    vb -= mb * mb;
                    cov -= ma * mb;
                    const double num = (2.0 * ma * mb + kC1) * (2.0 * cov + kC2);
                    const double den = (ma * ma + mb * mb + kC1) * (va + vb + kC2);
                    ch_acc += num / den;
                    ++windows;
                }
            }
            frame_acc += ch_acc / static_cast<double>(windows);
        }
        out[f] = frame_acc / 3.0;
    }
    return out;
}

double ssim(const FrameSequence& a, const FrameSequence& b) {
    const std::vector<double> per = ssim_per_frame(a, b);
    double acc = 0.0;
    for (double v : per) acc += v;
    return acc / static_cast<double>(per.size());
}

}  // namespace vrinr
