#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "detector.hpp"
#include "mlsd.hpp"
#include "mnnet.hpp"
#include "ops_count.hpp"

// Analysis calculators: information-theoretic compression bounds for the
// joint (CSI, signal) source, empirical vector-quantization loss of a trained
// detector, and instrumented complexity counts.

namespace mimovq {

// -- compression bounds ----------------------------------------------------------

struct CompressionReport {
    int tx_antennas = 1;
    int order = 2;
    double sigma_h_sq = 0.0;
    double rate_bound = 1.0;         // quantizing to log2(L)-bit codewords
    double rate_bound_energy = 1.0;  // quantizing to unit-energy codewords
};

inline CompressionReport compression_bound(int tx_antennas, int order, double sigma_h_sq) {
    if (tx_antennas < 1) throw std::invalid_argument("compression_bound: tx must be positive");
    if (order < 2 || (order & (order - 1)) != 0)
        throw std::invalid_argument("compression_bound: order must be a power of two >= 2");
    if (!(sigma_h_sq >= 0.0)) throw std::invalid_argument("compression_bound: negative CSI variance");
    CompressionReport r;
    r.tx_antennas = tx_antennas;
    r.order = order;
    r.sigma_h_sq = sigma_h_sq;
    const double bits = std::log2(static_cast<double>(order));
    r.rate_bound = 1.0 / (1.0 + tx_antennas * sigma_h_sq / bits);
    r.rate_bound_energy = 1.0 / (1.0 + tx_antennas * sigma_h_sq);
    return r;
}

// -- empirical quantization loss ---------------------------------------------------

enum class AnchorSpace { Input, Hidden };

struct LossDecomposition {
    double total = 0.0;        // || s - s_hat ||^2 at the winning anchor
    double signal_part = 0.0;  // received-signal coordinates
    double csi_part = 0.0;     // CSI coordinates
};

struct QuantizationLossReport {
    AnchorSpace space = AnchorSpace::Input;
    double mean_loss = 0.0;
    std::vector<LossDecomposition> samples;  // Input space only
};

// Reads the anchor vectors of a one-hot-mapped detector as the incoming weight
// rows of its final layer and Monte-Carlo-averages min_j ||s - s_hat_j||^2.
// Input-space anchors require a single affine layer (its weight rows live in
// the observation space, where the signal/CSI split is defined); deeper
// networks use AnchorSpace::Hidden, which evaluates the loss in the last
// hidden representation and has no coordinate split.
inline QuantizationLossReport empirical_quantization_loss(
    const VqDetector& det, std::size_t trials, const NoiseModel& noise, Rng& rng,
    AnchorSpace space = AnchorSpace::Input,
    const std::vector<ChannelRealization>* channel_set = nullptr) {
    if (det.mapping.kind != MappingKind::OneHot)
        throw std::invalid_argument(
            "empirical_quantization_loss: anchors are undefined for cluster mappings");
    if (det.front_end != FrontEnd::None)
        throw std::invalid_argument(
            "empirical_quantization_loss: detector must observe the raw (CSI, signal) pair");
    if (trials == 0) throw std::invalid_argument("empirical_quantization_loss: trials must be positive");
    if (space == AnchorSpace::Input && det.net.layers.size() != 1)
        throw std::invalid_argument(
            "empirical_quantization_loss: input-space anchors need a single-layer network; "
            "use AnchorSpace::Hidden for deep networks");

    const Layer& head = det.net.layers.back();
    const int anchor_dim = head.in;
    const std::size_t anchors = static_cast<std::size_t>(head.out);

    const int n_rx = det.config.rx_antennas;
    const int m_tx = det.config.tx_antennas;
    const int csi_len = n_rx * m_tx;

    QuantizationLossReport report;
    report.space = space;
    double sum = 0.0;

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const ChannelRealization* ch;
        ChannelRealization fresh;
        if (channel_set) {
            if (channel_set->empty())
                throw std::invalid_argument("empirical_quantization_loss: channel set is empty");
            ch = &(*channel_set)[rng.uniform_int(channel_set->size())];
        } else {
            fresh = draw_channel(rng, det.config);
            ch = &fresh;
        }
        const Transmission tr = transmit(rng, det.config, *ch, noise);
        std::vector<double> s = detector_input(*ch, tr.y);

        if (space == AnchorSpace::Hidden && det.net.layers.size() > 1) {
            DenseNetwork trunk;
            trunk.layers.assign(det.net.layers.begin(), det.net.layers.end() - 1);
            s = forward(trunk, s);
        }
        if (static_cast<int>(s.size()) != anchor_dim)
            throw std::invalid_argument("empirical_quantization_loss: anchor dimension mismatch");

        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < anchors; ++j) {
            const double* w = head.w.data() + j * anchor_dim;
            double d = 0.0;
            for (int k = 0; k < anchor_dim; ++k) {
                const double e = s[k] - w[k];
                d += e * e;
            }
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        sum += best_d;

        if (space == AnchorSpace::Input) {
            const double* w = head.w.data() + best * anchor_dim;
            LossDecomposition dec;
            dec.total = best_d;
            // Layout of s: [Re CSI | Re y | Im CSI | Im y].
            for (int k = 0; k < anchor_dim; ++k) {
                const double e = s[k] - w[k];
                const int pos = k % (csi_len + n_rx);
                if (pos < csi_len)
                    dec.csi_part += e * e;
                else
                    dec.signal_part += e * e;
            }
            report.samples.push_back(dec);
        }
    }
    report.mean_loss = sum / static_cast<double>(trials);
    return report;
}

// -- complexity accounting ----------------------------------------------------------

enum class DetectorKind { MF, ZF, LMMSE, MLSD, VQ, MNNET };

inline std::string to_string(DetectorKind k) {
    switch (k) {
        case DetectorKind::MF: return "mf";
        case DetectorKind::ZF: return "zf";
        case DetectorKind::LMMSE: return "lmmse";
        case DetectorKind::MLSD: return "mlsd";
        case DetectorKind::VQ: return "vq";
        case DetectorKind::MNNET: return "mnnet";
    }
    throw std::invalid_argument("unknown detector kind");
}

inline DetectorKind parse_detector_kind(const std::string& name) {
    if (name == "mf") return DetectorKind::MF;
    if (name == "zf") return DetectorKind::ZF;
    if (name == "lmmse") return DetectorKind::LMMSE;
    if (name == "mlsd") return DetectorKind::MLSD;
    if (name == "vq") return DetectorKind::VQ;
    if (name == "mnnet") return DetectorKind::MNNET;
    throw std::invalid_argument("unknown detector kind: " + name);
}

struct ComplexityReport {
    std::string detector;
    std::uint64_t detect_macs = 0;           // one detection, instrumented
    int solve_dim = 0;                       // linear-system dimension (ZF/LMMSE)
    std::uint64_t train_iteration_macs = 0;  // one training iteration (ANN detectors)
    int train_batch = 0;
};

struct ComplexityOptions {
    std::vector<int> hidden_widths{64, 32};
    int train_batch = 100;
    double eb_n0_db = 10.0;
    std::uint64_t seed = 11;
};

// Instrumented cost of one training iteration of the given super-layer's
// shared network (fresh-batch regime).
inline std::uint64_t mnnet_layer_iteration_macs(const MimoConfig& config, int layer,
                                                const ComplexityOptions& options) {
    const int residual = mnnet_residual_count(config, layer);
    const MimoConfig sub = make_mimo_config(residual, config.rx_antennas, config.constellation.scheme);
    const CodebookMapping mapping = make_mapping(MappingKind::OneHot, residual, sub.constellation);
    const NoiseModel noise = calibrate_noise(options.eb_n0_db, sub);

    Rng net_rng(derive_seed(options.seed, 0x6c6e6574ull, static_cast<std::uint64_t>(layer)));
    std::vector<int> dims;
    dims.push_back(mnnet_module_input_dim(config, layer));
    dims.insert(dims.end(), options.hidden_widths.begin(), options.hidden_widths.end());
    dims.push_back(static_cast<int>(mnnet_module_output_dim(config, layer)));
    DenseNetwork net = make_dense_network(dims, softmax_activation(), net_rng);
    NetworkOptimizer opt(net);

    Rng rng(derive_seed(options.seed, 0x6c697465ull, static_cast<std::uint64_t>(layer)));
    ops::MacCounter counter;
    {
        ops::CountScope scope(counter);
        std::vector<TrainingSample> batch =
            generate_dataset(rng, sub, noise, mapping, static_cast<std::size_t>(options.train_batch));
        RealBatch x(options.train_batch, static_cast<int>(batch.front().input.size()));
        RealBatch t(options.train_batch, static_cast<int>(batch.front().target.size()));
        for (int i = 0; i < options.train_batch; ++i) {
            std::copy(batch[i].input.begin(), batch[i].input.end(), x.row(i));
            std::copy(batch[i].target.begin(), batch[i].target.end(), t.row(i));
        }
        BackwardResult back = backward_batch(net, x, t);
        opt.step(net, back.gradients);
    }
    return counter.macs;
}

// Exact multiply-accumulate counts from instrumented runs (real MACs; one
// complex MAC books as four).  ANN detectors additionally report the cost of
// one mini-batch training iteration at the requested batch size.
inline ComplexityReport count_operations(DetectorKind kind, const MimoConfig& config,
                                         const ComplexityOptions& options = {}) {
    ComplexityReport report;
    report.detector = to_string(kind);
    const NoiseModel noise = calibrate_noise(options.eb_n0_db, config);

    Rng rng(derive_seed(options.seed, 0x636f756e74ull));
    const ChannelRealization ch = draw_channel(rng, config);
    const Transmission tr = transmit(rng, config, ch, noise);

    switch (kind) {
        case DetectorKind::MF:
        case DetectorKind::ZF:
        case DetectorKind::LMMSE: {
            const EqualizerKind eq = kind == DetectorKind::MF    ? EqualizerKind::MF
                                     : kind == DetectorKind::ZF ? EqualizerKind::ZF
                                                                : EqualizerKind::LMMSE;
            ops::MacCounter counter;
            {
                ops::CountScope scope(counter);
                const EqualizedSignal soft = equalize(eq, ch.h, tr.y, noise.variance);
                demap_hard(config.constellation, soft.x_soft);
            }
            report.detect_macs = counter.macs;
            if (kind != DetectorKind::MF) report.solve_dim = config.tx_antennas;
            break;
        }
        case DetectorKind::MLSD: {
            ops::MacCounter counter;
            {
                ops::CountScope scope(counter);
                mlsd_detect(config, ch.h, tr.y);
            }
            report.detect_macs = counter.macs;
            break;
        }
        case DetectorKind::VQ: {
            Rng net_rng(derive_seed(options.seed, 0x6e6574ull));
            VqDetector det = make_vq_detector(config, MappingKind::OneHot, FrontEnd::None,
                                              options.hidden_widths, net_rng);
            ops::MacCounter counter;
            {
                ops::CountScope scope(counter);
                vq_detect(det, ch, tr.y, noise.variance);
            }
            report.detect_macs = counter.macs;

            TrainingConfig tc;
            tc.iterations = 1;
            tc.batch_size = options.train_batch;
            tc.seed = options.seed;
            ops::MacCounter train_counter;
            {
                ops::CountScope scope(train_counter);
                train_vq_detector(config, MappingKind::OneHot, FrontEnd::None, options.eb_n0_db, tc,
                                  options.hidden_widths);
            }
            report.train_iteration_macs = train_counter.macs;
            report.train_batch = options.train_batch;
            break;
        }
        case DetectorKind::MNNET: {
            Rng net_rng(derive_seed(options.seed, 0x6e6574ull));
            MnnetGraph graph = build_mnnet(config, options.hidden_widths, net_rng);
            ops::MacCounter counter;
            {
                ops::CountScope scope(counter);
                mnnet_detect(graph, ch, tr.y);
            }
            report.detect_macs = counter.macs;
            report.train_iteration_macs =
                mnnet_layer_iteration_macs(config, 1, options);
            report.train_batch = options.train_batch;
            break;
        }
    }
    return report;
}

}  // namespace mimovq
