#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "adabound.hpp"
#include "dataset.hpp"
#include "network.hpp"
#include "rng.hpp"

// Mini-batch training loops.  Two data regimes:
//   train()        — sample batches (with replacement) from a fixed dataset
//   train_stream() — pull a freshly generated batch every iteration
// Both are fully determined by the seed in TrainingConfig.

namespace mimovq {

struct TrainingConfig {
    int iterations = 1000;
    int batch_size = 500;
    std::uint64_t seed = 1;
    AdaBoundConfig optimizer;
};

struct TrainResult {
    std::vector<double> loss_trace;  // summed batch loss per iteration
};

// Fills X/T with a batch; sample count is X.rows.
using BatchSource = std::function<void(Rng& rng, RealBatch& x, RealBatch& t)>;

inline TrainResult train_stream(DenseNetwork& net, const BatchSource& next_batch,
                                const TrainingConfig& config) {
    validate_network(net);
    if (config.iterations < 1) throw std::invalid_argument("train: iterations must be positive");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch size must be positive");

    NetworkOptimizer opt(net, config.optimizer);
    Rng rng(derive_seed(config.seed, 0x7261696eull));  // training stream
    TrainResult result;
    result.loss_trace.reserve(config.iterations);
    RealBatch x, t;
    for (int it = 0; it < config.iterations; ++it) {
        next_batch(rng, x, t);
        if (x.rows == 0 || x.rows != t.rows) throw std::invalid_argument("train: bad batch");
        BackwardResult back = backward_batch(net, x, t);
        opt.step(net, back.gradients);
        result.loss_trace.push_back(back.loss);
    }
    return result;
}

inline TrainResult train(DenseNetwork& net, const std::vector<TrainingSample>& dataset,
                         const TrainingConfig& config) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    const int in_dim = static_cast<int>(dataset.front().input.size());
    const int out_dim = static_cast<int>(dataset.front().target.size());
    BatchSource source = [&dataset, in_dim, out_dim, &config](Rng& rng, RealBatch& x, RealBatch& t) {
        x = RealBatch(config.batch_size, in_dim);
        t = RealBatch(config.batch_size, out_dim);
        for (int i = 0; i < config.batch_size; ++i) {
            const TrainingSample& s = dataset[rng.uniform_int(dataset.size())];
            if (static_cast<int>(s.input.size()) != in_dim || static_cast<int>(s.target.size()) != out_dim)
                throw std::invalid_argument("train: ragged dataset");
            std::copy(s.input.begin(), s.input.end(), x.row(i));
            std::copy(s.target.begin(), s.target.end(), t.row(i));
        }
    };
    return train_stream(net, source, config);
}

}  // namespace mimovq
