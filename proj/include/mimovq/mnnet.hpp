#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "detector.hpp"
#include "equalizer.hpp"
#include "mapping.hpp"
#include "network.hpp"
#include "training.hpp"

// Modular detection lattice with successive interference cancellation.
//
// Super-layer m (1-based, m = 1..M) holds m modules (m,k), k = 0..m-1; module
// (m,k) works on the system with streams {0..m-1}\{k} already cancelled, so
// M-m+1 streams remain and its shared network sees a 2N(M-m+2)-wide input
// (realified residual CSI + residual signal) and emits L^(M-m+1) scores.
//
// Wiring: the top module (m, m-1) decodes its first two residual streams
// (globals m-1 and m) and spawns two children — (m+1, m) cancelling stream
// m-1, and (m+1, m-1) cancelling stream m.  Every other module (m, k<m-1)
// decodes residual stream m and cancels it, keeping stream k pending for its
// single child (m+1, k).  Layer-M modules each hold exactly one stream and
// emit its final estimate.  All modules of a layer share one network.

namespace mimovq {

inline constexpr int kMnnetWiringVersion = 1;

struct MnnetGraph {
    MimoConfig config;
    std::vector<DenseNetwork> layer_nets;  // one shared net per super-layer, index m-1
};

inline int mnnet_module_count(int tx_antennas) {
    if (tx_antennas < 1) throw std::invalid_argument("mnnet_module_count: tx must be positive");
    return tx_antennas * (tx_antennas + 1) / 2;
}

inline int mnnet_residual_count(const MimoConfig& config, int layer) {
    if (layer < 1 || layer > config.tx_antennas) throw std::invalid_argument("mnnet: layer out of range");
    return config.tx_antennas - layer + 1;
}

inline int mnnet_module_input_dim(const MimoConfig& config, int layer) {
    return 2 * config.rx_antennas * (mnnet_residual_count(config, layer) + 1);
}

inline std::uint64_t mnnet_module_output_dim(const MimoConfig& config, int layer) {
    const unsigned bits =
        static_cast<unsigned>(mnnet_residual_count(config, layer)) * config.constellation.bits_per_symbol;
    if (bits > 26) throw std::invalid_argument("mnnet: module head too wide");
    return 1ull << bits;
}

// Structural description of one module, for inspection and tests.
struct MnnetModuleInfo {
    int layer = 1;                // m
    int keep = 0;                 // k
    std::vector<int> cancelled;   // {0..m-1}\{k}
    std::vector<int> remaining;   // {k} u {m..M-1}, ascending
};

inline std::vector<MnnetModuleInfo> mnnet_enumerate_modules(const MimoConfig& config) {
    std::vector<MnnetModuleInfo> mods;
    const int m_tx = config.tx_antennas;
    for (int m = 1; m <= m_tx; ++m) {
        for (int k = 0; k < m; ++k) {
            MnnetModuleInfo info;
            info.layer = m;
            info.keep = k;
            for (int c = 0; c < m; ++c)
                if (c != k) info.cancelled.push_back(c);
            for (int a = 0; a < m_tx; ++a) {
                bool is_cancelled = (a < m && a != k);
                if (!is_cancelled) info.remaining.push_back(a);
            }
            mods.push_back(std::move(info));
        }
    }
    return mods;
}

inline MnnetGraph build_mnnet(const MimoConfig& config, const std::vector<int>& hidden_widths,
                              Rng& rng) {
    MnnetGraph g;
    g.config = config;
    const std::vector<int>& hidden = hidden_widths.empty() ? default_hidden_widths() : hidden_widths;
    for (int m = 1; m <= config.tx_antennas; ++m) {
        std::vector<int> dims;
        dims.push_back(mnnet_module_input_dim(config, m));
        dims.insert(dims.end(), hidden.begin(), hidden.end());
        dims.push_back(static_cast<int>(mnnet_module_output_dim(config, m)));
        g.layer_nets.push_back(make_dense_network(dims, softmax_activation(), rng));
    }
    return g;
}

// -- detection -------------------------------------------------------------------

struct BranchState {
    std::vector<cdouble> y_res;
    CMatrix h_res;
    std::vector<int> remaining;  // global stream ids, ascending
};

struct ModuleTrace {
    int layer = 1;
    int keep = 0;
    BranchState state;
    std::vector<int> decoded;  // residual symbol indices, aligned with state.remaining
};

using MnnetTrace = std::vector<ModuleTrace>;

// decoder(layer, state, net_input) -> residual symbol indices.  The production
// decoder runs the layer network; tests may inject an oracle.
using ModuleDecoder =
    std::function<std::vector<int>(int, const BranchState&, std::span<const double>)>;

namespace detail {

inline std::vector<double> module_input(const BranchState& s) {
    std::vector<cdouble> v(s.h_res.data.begin(), s.h_res.data.end());
    v.insert(v.end(), s.y_res.begin(), s.y_res.end());
    return complex_to_real(v);
}

inline BranchState cancel_stream(const BranchState& s, const Constellation& c, int position,
                                 int symbol_index) {
    BranchState out;
    out.y_res = pic_cancel(s.y_res, s.h_res, position, c.points[symbol_index]);
    out.h_res = drop_column(s.h_res, position);
    out.remaining = s.remaining;
    out.remaining.erase(out.remaining.begin() + position);
    return out;
}

}  // namespace detail

inline std::vector<int> mnnet_detect_with(const MimoConfig& config, const ChannelRealization& channel,
                                          std::span<const cdouble> y, const ModuleDecoder& decoder,
                                          MnnetTrace* trace = nullptr) {
    const int m_tx = config.tx_antennas;
    if (channel.h.cols != m_tx || channel.h.rows != config.rx_antennas)
        throw std::invalid_argument("mnnet_detect: channel dimensions do not match config");
    if (static_cast<int>(y.size()) != config.rx_antennas)
        throw std::invalid_argument("mnnet_detect: size mismatch");

    struct Pending {
        int layer;
        int keep;
        BranchState state;
    };

    std::vector<Pending> frontier;
    {
        BranchState root;
        root.y_res.assign(y.begin(), y.end());
        root.h_res = channel.h;
        for (int a = 0; a < m_tx; ++a) root.remaining.push_back(a);
        frontier.push_back({1, 0, std::move(root)});
    }

    std::vector<int> final_estimate(m_tx, -1);
    int finals_emitted = 0;

    while (!frontier.empty()) {
        std::vector<Pending> next;
        for (Pending& p : frontier) {
            const int m = p.layer;
            const std::vector<double> input = detail::module_input(p.state);
            const std::vector<int> decoded = decoder(m, p.state, input);
            if (decoded.size() != p.state.remaining.size())
                throw std::invalid_argument("mnnet_detect: decoder returned wrong arity");
            if (trace) trace->push_back({m, p.keep, p.state, decoded});

            if (m == m_tx) {
                const int stream = p.state.remaining[0];
                if (final_estimate[stream] != -1)
                    throw std::logic_error("mnnet_detect: stream estimated twice");
                final_estimate[stream] = decoded[0];
                ++finals_emitted;
                continue;
            }
            if (p.keep == m - 1) {
                // Top branch: cancel stream m-1 for one child, stream m for the other.
                next.push_back({m + 1, m,
                                detail::cancel_stream(p.state, config.constellation, 0, decoded[0])});
                next.push_back({m + 1, m - 1,
                                detail::cancel_stream(p.state, config.constellation, 1, decoded[1])});
            } else {
                // Side branch: remaining = [k, m, ...]; cancel stream m (position 1).
                next.push_back({m + 1, p.keep,
                                detail::cancel_stream(p.state, config.constellation, 1, decoded[1])});
            }
        }
        frontier = std::move(next);
    }

    if (finals_emitted != m_tx) throw std::logic_error("mnnet_detect: incomplete stream coverage");
    return final_estimate;
}

inline ModuleDecoder mnnet_network_decoder(const MnnetGraph& graph) {
    return [&graph](int layer, const BranchState& state,
                    std::span<const double> input) -> std::vector<int> {
        const DenseNetwork& net = graph.layer_nets[layer - 1];
        if (static_cast<int>(input.size()) != net.input_dim())
            throw std::invalid_argument("mnnet_detect: network input width mismatch");
        const CodebookMapping mapping = make_mapping(
            MappingKind::OneHot, static_cast<int>(state.remaining.size()), graph.config.constellation);
        return decode(mapping, forward(net, input));
    };
}

inline std::vector<int> mnnet_detect(const MnnetGraph& graph, const ChannelRealization& channel,
                                     std::span<const cdouble> y, MnnetTrace* trace = nullptr) {
    for (const DenseNetwork& net : graph.layer_nets)
        if (net.all_parameters_zero())
            throw std::invalid_argument("mnnet_detect: untrained layer network");
    return mnnet_detect_with(graph.config, channel, y, mnnet_network_decoder(graph), trace);
}

// -- training --------------------------------------------------------------------

struct TrainedMnnet {
    MnnetGraph graph;
    std::vector<std::vector<double>> layer_loss_traces;
};

// Each super-layer trains independently on freshly drawn (M-m+1) x N systems —
// the genie-cancelled residual distribution.  Optional fine-tuning afterwards
// replays full detections and updates every layer on the inputs it actually
// receives (with propagated, possibly erroneous, cancellations).
inline TrainedMnnet train_mnnet(const MimoConfig& config, double train_eb_n0_db,
                                const TrainingConfig& training, const std::vector<int>& hidden_widths,
                                int fine_tune_iterations = 0) {
    TrainedMnnet out;
    Rng init_rng(derive_seed(training.seed, 0x6d6e696eull));
    out.graph = build_mnnet(config, hidden_widths, init_rng);

    for (int m = 1; m <= config.tx_antennas; ++m) {
        const int residual = mnnet_residual_count(config, m);
        const MimoConfig sub = make_mimo_config(residual, config.rx_antennas, config.constellation.scheme);
        const CodebookMapping mapping = make_mapping(MappingKind::OneHot, residual, sub.constellation);
        const NoiseModel noise = calibrate_noise(train_eb_n0_db, sub);
        DenseNetwork& net = out.graph.layer_nets[m - 1];

        TrainingConfig layer_training = training;
        layer_training.seed = derive_seed(training.seed, 0x6c61796572ull, static_cast<std::uint64_t>(m));
        BatchSource source = [&sub, &noise, &mapping, &layer_training](Rng& rng, RealBatch& x,
                                                                       RealBatch& t) {
            std::vector<TrainingSample> batch =
                generate_dataset(rng, sub, noise, mapping, layer_training.batch_size);
            x = RealBatch(layer_training.batch_size, static_cast<int>(batch.front().input.size()));
            t = RealBatch(layer_training.batch_size, static_cast<int>(batch.front().target.size()));
            for (int i = 0; i < layer_training.batch_size; ++i) {
                std::copy(batch[i].input.begin(), batch[i].input.end(), x.row(i));
                std::copy(batch[i].target.begin(), batch[i].target.end(), t.row(i));
            }
        };
        TrainResult res = train_stream(net, source, layer_training);
        out.layer_loss_traces.push_back(std::move(res.loss_trace));
    }

    if (fine_tune_iterations > 0) {
        const NoiseModel noise = calibrate_noise(train_eb_n0_db, config);
        std::vector<NetworkOptimizer> opts;
        for (DenseNetwork& net : out.graph.layer_nets) opts.emplace_back(net, training.optimizer);
        Rng rng(derive_seed(training.seed, 0x66696e65ull));
        const int per_layer_batch = std::max(1, training.batch_size / config.tx_antennas);

        for (int it = 0; it < fine_tune_iterations; ++it) {
            // Collect per-layer sample buffers from full propagated detections.
            std::vector<std::vector<std::vector<double>>> xs(config.tx_antennas);
            std::vector<std::vector<std::vector<double>>> ts(config.tx_antennas);
            for (int b = 0; b < per_layer_batch; ++b) {
                const ChannelRealization ch = draw_channel(rng, config);
                const Transmission tr = transmit(rng, config, ch, noise);
                MnnetTrace trace;
                mnnet_detect(out.graph, ch, tr.y, &trace);
                for (const ModuleTrace& mt : trace) {
                    const CodebookMapping mapping =
                        make_mapping(MappingKind::OneHot, static_cast<int>(mt.state.remaining.size()),
                                     config.constellation);
                    std::vector<int> truth;
                    for (int a : mt.state.remaining) truth.push_back(tr.indices[a]);
                    xs[mt.layer - 1].push_back(detail::module_input(mt.state));
                    ts[mt.layer - 1].push_back(encode(mapping, truth));
                }
            }
            for (int m = 0; m < config.tx_antennas; ++m) {
                if (xs[m].empty()) continue;
                RealBatch x(static_cast<int>(xs[m].size()), static_cast<int>(xs[m][0].size()));
                RealBatch t(static_cast<int>(ts[m].size()), static_cast<int>(ts[m][0].size()));
                for (std::size_t i = 0; i < xs[m].size(); ++i) {
                    std::copy(xs[m][i].begin(), xs[m][i].end(), x.row(static_cast<int>(i)));
                    std::copy(ts[m][i].begin(), ts[m][i].end(), t.row(static_cast<int>(i)));
                }
                BackwardResult back = backward_batch(out.graph.layer_nets[m], x, t);
                opts[m].step(out.graph.layer_nets[m], back.gradients);
            }
        }
    }
    return out;
}

}  // namespace mimovq
