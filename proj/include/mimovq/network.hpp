#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ops_count.hpp"
#include "rng.hpp"

// Dense feed-forward network with explicit forward, loss and backward passes.
// Hidden layers use ReLU; the final layer carries one of the output heads:
//   softmax         + cross-entropy          (one-hot targets)
//   cluster_softmax + per-cluster cross-entropy (concatenated one-hots)
//   sigmoid         + summed binary cross-entropy (bit targets)
//   linear          + half squared error
// All four pairings share the output delta (prediction - target), and batch
// losses/gradients are sums (not means) over the batch.

namespace mimovq {

inline constexpr double kLogClip = 1e-12;

enum class Activation { Relu, Linear, Softmax, ClusterSoftmax, Sigmoid };

struct ActivationSpec {
    Activation kind = Activation::Relu;
    int clusters = 0;      // cluster_softmax only
    int cluster_size = 0;  // cluster_softmax only
};

inline ActivationSpec relu_activation() { return {Activation::Relu, 0, 0}; }
inline ActivationSpec linear_activation() { return {Activation::Linear, 0, 0}; }
inline ActivationSpec softmax_activation() { return {Activation::Softmax, 0, 0}; }
inline ActivationSpec sigmoid_activation() { return {Activation::Sigmoid, 0, 0}; }
inline ActivationSpec cluster_softmax_activation(int clusters, int cluster_size) {
    if (clusters < 1 || cluster_size < 1)
        throw std::invalid_argument("cluster_softmax_activation: bad cluster shape");
    return {Activation::ClusterSoftmax, clusters, cluster_size};
}

inline bool is_head_activation(Activation a) {
    return a == Activation::Softmax || a == Activation::ClusterSoftmax || a == Activation::Sigmoid;
}

inline std::string to_string(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Linear: return "linear";
        case Activation::Softmax: return "softmax";
        case Activation::ClusterSoftmax: return "cluster_softmax";
        case Activation::Sigmoid: return "sigmoid";
    }
    throw std::invalid_argument("unknown activation");
}

// Row-major real matrix used for batches and weight tensors.
struct RealBatch {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    RealBatch() = default;
    RealBatch(int r, int c)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }
};

struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
    ActivationSpec activation;
};

struct DenseNetwork {
    std::vector<Layer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }

    bool all_parameters_zero() const {
        for (const Layer& l : layers) {
            for (double v : l.w)
                if (v != 0.0) return false;
            for (double v : l.b)
                if (v != 0.0) return false;
        }
        return true;
    }
};

inline void validate_network(const DenseNetwork& net) {
    if (net.layers.empty()) throw std::invalid_argument("network: no layers");
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        if (l.in < 1 || l.out < 1) throw std::invalid_argument("network: empty layer");
        if (l.w.size() != static_cast<std::size_t>(l.in) * l.out || l.b.size() != static_cast<std::size_t>(l.out))
            throw std::invalid_argument("network: parameter shape mismatch");
        if (i + 1 < net.layers.size()) {
            if (net.layers[i + 1].in != l.out) throw std::invalid_argument("network: layer dims do not chain");
            if (is_head_activation(l.activation.kind))
                throw std::invalid_argument("network: output head used on a hidden layer");
        }
        if (l.activation.kind == Activation::ClusterSoftmax &&
            l.activation.clusters * l.activation.cluster_size != l.out)
            throw std::invalid_argument("network: cluster shape does not match layer width");
    }
}

// Glorot/Xavier uniform initialization, zero biases.
inline DenseNetwork make_dense_network(const std::vector<int>& dims, ActivationSpec head, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("make_dense_network: need input and output dims");
    DenseNetwork net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.in = dims[i];
        l.out = dims[i + 1];
        l.activation = (i + 2 < dims.size()) ? relu_activation() : head;
        const double limit = std::sqrt(6.0 / (l.in + l.out));
        l.w.resize(static_cast<std::size_t>(l.in) * l.out);
        for (double& v : l.w) v = (2.0 * rng.uniform() - 1.0) * limit;
        l.b.assign(l.out, 0.0);
        net.layers.push_back(std::move(l));
    }
    validate_network(net);
    return net;
}

namespace detail {

// Z = X W^T + b  (X: batch x in, W: out x in)
inline RealBatch affine_forward(const RealBatch& x, const Layer& l) {
    if (x.cols != l.in) throw std::invalid_argument("forward: input width does not match layer");
    RealBatch z(x.rows, l.out);
    for (int i = 0; i < x.rows; ++i) {
        const double* xi = x.row(i);
        double* zi = z.row(i);
        for (int o = 0; o < l.out; ++o) {
            const double* wo = l.w.data() + static_cast<std::size_t>(o) * l.in;
            double acc = l.b[o];
            for (int k = 0; k < l.in; ++k) acc += wo[k] * xi[k];
            zi[o] = acc;
        }
    }
    ops::add_macs(static_cast<std::uint64_t>(x.rows) * l.out * l.in);
    return z;
}

inline void apply_activation(const ActivationSpec& act, RealBatch& z) {
    switch (act.kind) {
        case Activation::Linear:
            return;
        case Activation::Relu:
            for (double& v : z.data)
                if (v < 0.0) v = 0.0;
            return;
        case Activation::Sigmoid:
            for (double& v : z.data) v = 1.0 / (1.0 + std::exp(-v));
            return;
        case Activation::Softmax:
        case Activation::ClusterSoftmax: {
            const int width = (act.kind == Activation::Softmax) ? z.cols : act.cluster_size;
            const int groups = z.cols / width;
            for (int i = 0; i < z.rows; ++i) {
                double* zi = z.row(i);
                for (int g = 0; g < groups; ++g) {
                    double* seg = zi + static_cast<std::size_t>(g) * width;
                    double mx = seg[0];
                    for (int k = 1; k < width; ++k) mx = std::max(mx, seg[k]);
                    double sum = 0.0;
                    for (int k = 0; k < width; ++k) {
                        seg[k] = std::exp(seg[k] - mx);
                        sum += seg[k];
                    }
                    for (int k = 0; k < width; ++k) seg[k] /= sum;
                }
            }
            return;
        }
    }
}

}  // namespace detail

struct ForwardCache {
    // pre[l] holds the pre-activation of layer l, act[l] its activation;
    // act[l] doubles as the input of layer l+1.
    std::vector<RealBatch> pre;
    std::vector<RealBatch> act;
};

inline RealBatch forward_batch(const DenseNetwork& net, const RealBatch& x,
                               ForwardCache* cache = nullptr) {
    validate_network(net);
    RealBatch a = x;
    if (cache) {
        cache->pre.clear();
        cache->act.clear();
    }
    for (const Layer& l : net.layers) {
        RealBatch z = detail::affine_forward(a, l);
        if (cache) cache->pre.push_back(z);
        detail::apply_activation(l.activation, z);
        if (cache) cache->act.push_back(z);
        a = std::move(z);
    }
    return a;
}

inline std::vector<double> forward(const DenseNetwork& net, std::span<const double> input) {
    RealBatch x(1, static_cast<int>(input.size()));
    for (std::size_t i = 0; i < input.size(); ++i) x.data[i] = input[i];
    RealBatch y = forward_batch(net, x);
    return {y.data.begin(), y.data.end()};
}

// -- losses --------------------------------------------------------------------

// Loss of one output/target pair under the given head.  Batch losses sum these.
inline double loss(std::span<const double> output, std::span<const double> target,
                   const ActivationSpec& head) {
    if (output.size() != target.size()) throw std::invalid_argument("loss: output/target length mismatch");
    switch (head.kind) {
        case Activation::Softmax:
        case Activation::ClusterSoftmax: {
            double s = 0.0;
            for (std::size_t j = 0; j < output.size(); ++j)
                if (target[j] != 0.0) s -= target[j] * std::log(std::max(output[j], kLogClip));
            return s;
        }
        case Activation::Sigmoid: {
            double s = 0.0;
            for (std::size_t j = 0; j < output.size(); ++j) {
                s -= target[j] * std::log(std::max(output[j], kLogClip));
                s -= (1.0 - target[j]) * std::log(std::max(1.0 - output[j], kLogClip));
            }
            return s;
        }
        case Activation::Linear: {
            double s = 0.0;
            for (std::size_t j = 0; j < output.size(); ++j) {
                const double d = output[j] - target[j];
                s += 0.5 * d * d;
            }
            return s;
        }
        case Activation::Relu:
            throw std::invalid_argument("loss: relu is not an output head");
    }
    throw std::invalid_argument("loss: unknown head");
}

// -- backward ------------------------------------------------------------------

struct LayerGradient {
    std::vector<double> w;  // same shape as Layer::w
    std::vector<double> b;
};

struct BackwardResult {
    double loss = 0.0;  // summed over the batch
    std::vector<LayerGradient> gradients;
};

inline BackwardResult backward_batch(const DenseNetwork& net, const RealBatch& x,
                                     const RealBatch& targets) {
    ForwardCache cache;
    const RealBatch out = forward_batch(net, x, &cache);
    if (targets.rows != x.rows || targets.cols != out.cols)
        throw std::invalid_argument("backward: target shape mismatch");

    BackwardResult res;
    const ActivationSpec& head = net.layers.back().activation;
    for (int i = 0; i < out.rows; ++i)
        res.loss += loss({out.row(i), static_cast<std::size_t>(out.cols)},
                         {targets.row(i), static_cast<std::size_t>(out.cols)}, head);

    res.gradients.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        res.gradients[l].w.assign(net.layers[l].w.size(), 0.0);
        res.gradients[l].b.assign(net.layers[l].b.size(), 0.0);
    }

    // Output delta: prediction - target for every supported head pairing.
    RealBatch delta(out.rows, out.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i) delta.data[i] = out.data[i] - targets.data[i];

    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
        const Layer& layer = net.layers[l];
        const RealBatch& input = (l == 0) ? x : cache.act[l - 1];
        LayerGradient& grad = res.gradients[l];

        // dW = delta^T X, db = column sums of delta.
        for (int i = 0; i < delta.rows; ++i) {
            const double* di = delta.row(i);
            const double* xi = input.row(i);
            for (int o = 0; o < layer.out; ++o) {
                const double d = di[o];
                if (d == 0.0) continue;
                double* gw = grad.w.data() + static_cast<std::size_t>(o) * layer.in;
                for (int k = 0; k < layer.in; ++k) gw[k] += d * xi[k];
                grad.b[o] += d;
            }
        }
        ops::add_macs(static_cast<std::uint64_t>(delta.rows) * layer.out * layer.in);

        if (l == 0) break;

        // delta_prev = (delta W) .* relu'(pre_{l-1})
        RealBatch prev(delta.rows, layer.in);
        for (int i = 0; i < delta.rows; ++i) {
            const double* di = delta.row(i);
            double* pi = prev.row(i);
            for (int o = 0; o < layer.out; ++o) {
                const double d = di[o];
                if (d == 0.0) continue;
                const double* wo = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
                for (int k = 0; k < layer.in; ++k) pi[k] += d * wo[k];
            }
        }
        ops::add_macs(static_cast<std::uint64_t>(delta.rows) * layer.out * layer.in);

        const RealBatch& pre = cache.pre[l - 1];
        const Activation hidden = net.layers[l - 1].activation.kind;
        if (hidden == Activation::Relu) {
            for (std::size_t i = 0; i < prev.data.size(); ++i)
                if (pre.data[i] <= 0.0) prev.data[i] = 0.0;
        } else if (hidden != Activation::Linear) {
            throw std::invalid_argument("backward: unsupported hidden activation");
        }
        delta = std::move(prev);
    }
    return res;
}

inline BackwardResult backward(const DenseNetwork& net, std::span<const double> input,
                               std::span<const double> target) {
    RealBatch x(1, static_cast<int>(input.size()));
    for (std::size_t i = 0; i < input.size(); ++i) x.data[i] = input[i];
    RealBatch t(1, static_cast<int>(target.size()));
    for (std::size_t i = 0; i < target.size(); ++i) t.data[i] = target[i];
    return backward_batch(net, x, t);
}

}  // namespace mimovq
