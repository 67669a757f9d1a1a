#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "network.hpp"
#include "ops_count.hpp"

// AdaBound: Adam moments with step sizes clipped into a band that narrows
// around final_lr, so training starts adaptive and ends SGD-like.
//   lower(t) = final_lr * (1 - 1/(gamma*t + 1))
//   upper(t) = final_lr * (1 + 1/(gamma*t))

namespace mimovq {

struct AdaBoundConfig {
    double lr = 1e-3;        // initial step size
    double final_lr = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double gamma = 1e-3;     // bound convergence speed
};

inline double adabound_lower_bound(const AdaBoundConfig& c, std::uint64_t t) {
    return c.final_lr * (1.0 - 1.0 / (c.gamma * t + 1.0));
}

inline double adabound_upper_bound(const AdaBoundConfig& c, std::uint64_t t) {
    return c.final_lr * (1.0 + 1.0 / (c.gamma * t));
}

// Flat-parameter-vector optimizer state.  One instance per tensor; all
// instances of a training loop step once per iteration so their clocks agree.
struct AdaBound {
    AdaBoundConfig config;
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    explicit AdaBound(std::size_t size, AdaBoundConfig cfg = {})
        : config(cfg), m(size, 0.0), v(size, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads) {
        if (params.size() != m.size() || grads.size() != m.size())
            throw std::invalid_argument("adabound: parameter/gradient size mismatch");
        ++t;
        const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
        const double step_size = config.lr * std::sqrt(bc2) / bc1;
        const double lo = adabound_lower_bound(config, t);
        const double hi = adabound_upper_bound(config, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double g = grads[i];
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
            const double eta = std::clamp(step_size / (std::sqrt(v[i]) + config.eps), lo, hi);
            params[i] -= eta * m[i];
        }
        ops::add_macs(7ull * params.size());
    }
};

// Paired per-layer optimizer states for a whole network.
struct NetworkOptimizer {
    std::vector<AdaBound> weight_states;
    std::vector<AdaBound> bias_states;

    NetworkOptimizer(const DenseNetwork& net, AdaBoundConfig cfg = {}) {
        for (const Layer& l : net.layers) {
            weight_states.emplace_back(l.w.size(), cfg);
            bias_states.emplace_back(l.b.size(), cfg);
        }
    }

    void step(DenseNetwork& net, const std::vector<LayerGradient>& grads) {
        if (grads.size() != net.layers.size())
            throw std::invalid_argument("optimizer: gradient count mismatch");
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            weight_states[l].step(net.layers[l].w, grads[l].w);
            bias_states[l].step(net.layers[l].b, grads[l].b);
        }
    }
};

}  // namespace mimovq
