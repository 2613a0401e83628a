#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vrinr/common.hpp"

namespace vrinr::nn {

enum class OutAct { none, tanh_act, sigmoid, softmax };

// Two-layer MLP: y = act_out(w2 * relu(w1 * x + b1) + b2).
// Non-owning view into a flat parameter vector; w1 is [hidden x in] row-major,
// w2 is [out x hidden] row-major.
struct Mlp2 {
    int in_dim = 0;
    int hidden_dim = 0;
    int out_dim = 0;
    OutAct out_act = OutAct::none;
    std::string name;  // for error messages
    std::span<const double> w1, b1, w2, b2;
};

// Mutable gradient views matching a Mlp2's parameters. Backward accumulates
// with += so several calls can share one buffer.
struct Mlp2Grad {
    std::span<double> w1, b1, w2, b2;
};

struct Mlp2Cache {
    std::vector<double> x;   // input
    std::vector<double> z1;  // hidden pre-activation
    std::vector<double> h;   // relu(z1)
    std::vector<double> y;   // output after out_act
};

void mlp2_forward(const Mlp2& p, std::span<const double> x, Mlp2Cache& cache,
                  StateSig* sig = nullptr);

// dx may be empty if the input gradient is not needed.
void mlp2_backward(const Mlp2& p, const Mlp2Cache& cache, std::span<const double> dy,
                   const Mlp2Grad& grad, std::span<double> dx);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& s,
               double lr);

// Named tensor slot in the flat parameter vector.
struct TensorSlot {
    std::string name;
    std::vector<std::int64_t> shape;
    std::int64_t offset = 0;
    std::int64_t size = 0;
};

struct ParamLayout {
    std::vector<TensorSlot> slots;
    std::int64_t total = 0;

    std::int64_t add(const std::string& name, std::vector<std::int64_t> shape);
    const TensorSlot& find(const std::string& name) const;
};

// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h over every coordinate.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<double> params, double h);

// Glorot-uniform weights, zero biases, written into the given slices.
void init_mlp2_params(std::span<double> w1, std::span<double> b1, std::span<double> w2,
                      std::span<double> b2, int in_dim, int hidden_dim, int out_dim,
                      std::uint64_t seed);

}  // namespace vrinr::nn
