#include "vrinr/nn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vrinr::nn {

// Four accumulators keep the dot product off the FP-add latency chain without
// reassociating the sum nondeterministically.
static double dot4(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

static void check_dims(const Mlp2& p, std::size_t xlen) {
    if (static_cast<int>(xlen) != p.in_dim)
        throw DimensionError("mlp '" + p.name + "': input length " + std::to_string(xlen) +
                             " != in_dim " + std::to_string(p.in_dim));
    if (p.w1.size() != static_cast<std::size_t>(p.hidden_dim) * p.in_dim ||
        p.b1.size() != static_cast<std::size_t>(p.hidden_dim) ||
        p.w2.size() != static_cast<std::size_t>(p.out_dim) * p.hidden_dim ||
        p.b2.size() != static_cast<std::size_t>(p.out_dim))
        throw DimensionError("mlp '" + p.name + "': parameter spans do not match dims");
}

void mlp2_forward(const Mlp2& p, std::span<const double> x, Mlp2Cache& cache, StateSig* sig) {
    check_dims(p, x.size());
    cache.x.assign(x.begin(), x.end());
    cache.z1.resize(p.hidden_dim);
    cache.h.resize(p.hidden_dim);
    cache.y.resize(p.out_dim);

    for (int i = 0; i < p.hidden_dim; ++i) {
        const double* row = p.w1.data() + static_cast<std::size_t>(i) * p.in_dim;
        const double acc = p.b1[i] + dot4(row, x.data(), p.in_dim);
        cache.z1[i] = acc;
        cache.h[i] = acc > 0.0 ? acc : 0.0;  // relu, subgradient at 0 is 0
        if (sig) sig->add_bit(acc > 0.0);
    }
    for (int i = 0; i < p.out_dim; ++i) {
        const double* row = p.w2.data() + static_cast<std::size_t>(i) * p.hidden_dim;
        cache.y[i] = p.b2[i] + dot4(row, cache.h.data(), p.hidden_dim);
    }
    switch (p.out_act) {
        case OutAct::none:
            break;
        case OutAct::tanh_act:
            for (double& v : cache.y) v = std::tanh(v);
            break;
        case OutAct::sigmoid:
            for (double& v : cache.y) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case OutAct::softmax: {
            double mx = *std::max_element(cache.y.begin(), cache.y.end());
            double sum = 0.0;
            for (double& v : cache.y) {
                v = std::exp(v - mx);
                sum += v;
            }
            for (double& v : cache.y) v /= sum;
            break;
        }
    }
}

void mlp2_backward(const Mlp2& p, const Mlp2Cache& cache, std::span<const double> dy,
                   const Mlp2Grad& grad, std::span<double> dx) {
    if (static_cast<int>(dy.size()) != p.out_dim)
        throw DimensionError("mlp '" + p.name + "': cotangent length mismatch");
    if (static_cast<int>(cache.y.size()) != p.out_dim ||
        static_cast<int>(cache.x.size()) != p.in_dim)
        throw DimensionError("mlp '" + p.name + "': stale cache");

    // Jacobian of the output activation. Scratch is thread_local to keep the
    // training inner loop allocation-free.
    thread_local std::vector<double> dz2;
    dz2.resize(p.out_dim);
    switch (p.out_act) {
        case OutAct::none:
            std::copy(dy.begin(), dy.end(), dz2.begin());
            break;
        case OutAct::tanh_act:
            for (int i = 0; i < p.out_dim; ++i) dz2[i] = dy[i] * (1.0 - cache.y[i] * cache.y[i]);
            break;
        case OutAct::sigmoid:
            for (int i = 0; i < p.out_dim; ++i) dz2[i] = dy[i] * cache.y[i] * (1.0 - cache.y[i]);
            break;
        case OutAct::softmax: {
            double dot = 0.0;
            for (int i = 0; i < p.out_dim; ++i) dot += dy[i] * cache.y[i];
            for (int i = 0; i < p.out_dim; ++i) dz2[i] = cache.y[i] * (dy[i] - dot);
            break;
        }
    }

    thread_local std::vector<double> dh;
    dh.assign(p.hidden_dim, 0.0);
    for (int i = 0; i < p.out_dim; ++i) {
        const double g = dz2[i];
        const double* row = p.w2.data() + static_cast<std::size_t>(i) * p.hidden_dim;
        double* grow = grad.w2.data() + static_cast<std::size_t>(i) * p.hidden_dim;
        for (int j = 0; j < p.hidden_dim; ++j) {
            grow[j] += g * cache.h[j];
            dh[j] += g * row[j];
        }
        grad.b2[i] += g;
    }
    for (int i = 0; i < p.hidden_dim; ++i) {
        const double g = cache.z1[i] > 0.0 ? dh[i] : 0.0;
        if (g == 0.0) {
            continue;
        }
        const double* row = p.w1.data() + static_cast<std::size_t>(i) * p.in_dim;
        double* grow = grad.w1.data() + static_cast<std::size_t>(i) * p.in_dim;
        for (int j = 0; j < p.in_dim; ++j) {
            grow[j] += g * cache.x[j];
            if (!dx.empty()) dx[j] += g * row[j];
        }
        grad.b1[i] += g;
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& s, double lr) {
    if (params.size() != grads.size() || s.m.size() != params.size() ||
        s.v.size() != params.size())
        throw DimensionError("adam_step: shape mismatch");
    if (!(lr > 0.0)) throw NumericError("adam_step: lr must be positive");
    for (double g : grads)
        if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");

    s.step_count += 1;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step_count));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step_count));
    for (std::size_t i = 0; i < params.size(); ++i) {
        s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grads[i];
        s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grads[i] * grads[i];
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

std::int64_t ParamLayout::add(const std::string& name, std::vector<std::int64_t> shape) {
    std::int64_t size = 1;
    for (auto d : shape) size *= d;
    slots.push_back({name, std::move(shape), total, size});
    total += size;
    return slots.back().offset;
}

const TensorSlot& ParamLayout::find(const std::string& name) const {
    for (const auto& s : slots)
        if (s.name == name) return s;
    throw Error("ParamLayout: no tensor named '" + name + "'");
}

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<double> params, double h) {
    if (!(h > 0.0)) throw NumericError("finite_diff_grad: h must be positive");
    std::vector<double> g(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + h;
        const double fp = f(params);
        params[i] = orig - h;
        const double fm = f(params);
        params[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericError("finite_diff_grad: non-finite objective at coordinate " +
                               std::to_string(i));
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

void init_mlp2_params(std::span<double> w1, std::span<double> b1, std::span<double> w2,
                      std::span<double> b2, int in_dim, int hidden_dim, int out_dim,
                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&rng](std::span<double> w, int fan_in, int fan_out) {
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : w) v = dist(rng);
    };
    fill(w1, in_dim, hidden_dim);
    std::fill(b1.begin(), b1.end(), 0.0);
    fill(w2, hidden_dim, out_dim);
    std::fill(b2.begin(), b2.end(), 0.0);
}

}  // namespace vrinr::nn
