#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "equalizer.hpp"
#include "mapping.hpp"
#include "network.hpp"
#include "training.hpp"

// ANN detector over the vector-quantized codebook.  Two input modes:
//   FrontEnd::None — the network sees the realified (CSI, y) pair, 2N(M+1) wide
//   MF/ZF/LMMSE    — the network sees the realified equalizer output, 2M wide

namespace mimovq {

enum class FrontEnd { None, MF, ZF, LMMSE };

inline std::string to_string(FrontEnd f) {
    switch (f) {
        case FrontEnd::None: return "none";
        case FrontEnd::MF: return "mf";
        case FrontEnd::ZF: return "zf";
        case FrontEnd::LMMSE: return "lmmse";
    }
    throw std::invalid_argument("unknown front end");
}

inline FrontEnd parse_front_end(const std::string& name) {
    if (name == "none") return FrontEnd::None;
    if (name == "mf" || name == "MF") return FrontEnd::MF;
    if (name == "zf" || name == "ZF") return FrontEnd::ZF;
    if (name == "lmmse" || name == "LMMSE") return FrontEnd::LMMSE;
    throw std::invalid_argument("unknown front end: " + name);
}

struct VqDetector {
    MimoConfig config;
    CodebookMapping mapping;
    FrontEnd front_end = FrontEnd::None;
    DenseNetwork net;
};

inline int vq_input_dim(const MimoConfig& config, FrontEnd front_end) {
    return front_end == FrontEnd::None
               ? 2 * config.rx_antennas * (config.tx_antennas + 1)
               : 2 * config.tx_antennas;
}

inline ActivationSpec head_for_mapping(const CodebookMapping& mapping) {
    switch (mapping.kind) {
        case MappingKind::OneHot: return softmax_activation();
        case MappingKind::ClusterOneHot:
            return cluster_softmax_activation(mapping.tx_antennas, mapping.order);
        case MappingKind::ClusterBits: return sigmoid_activation();
    }
    throw std::invalid_argument("unknown mapping kind");
}

inline const std::vector<int>& default_hidden_widths() {
    static const std::vector<int> widths{1024, 512, 256};
    return widths;
}

// Conventional training operating point: low-order schemes learn best around
// 5 dB, denser constellations around 8 dB.  Callers may override freely.
inline double default_training_snr_db(Scheme scheme) {
    return (scheme == Scheme::PSK8 || scheme == Scheme::QAM16) ? 8.0 : 5.0;
}

inline DenseNetwork build_vq_network(const MimoConfig& config, const CodebookMapping& mapping,
                                     FrontEnd front_end, const std::vector<int>& hidden_widths,
                                     Rng& rng) {
    std::vector<int> dims;
    dims.push_back(vq_input_dim(config, front_end));
    const std::vector<int>& hidden = hidden_widths.empty() ? default_hidden_widths() : hidden_widths;
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    if (mapping.target_dim > (1u << 26)) throw std::invalid_argument("build_vq_network: head too wide");
    dims.push_back(static_cast<int>(mapping.target_dim));
    return make_dense_network(dims, head_for_mapping(mapping), rng);
}

inline VqDetector make_vq_detector(const MimoConfig& config, MappingKind mapping_kind,
                                   FrontEnd front_end, const std::vector<int>& hidden_widths,
                                   Rng& rng) {
    VqDetector det;
    det.config = config;
    det.mapping = make_mapping(mapping_kind, config.tx_antennas, config.constellation);
    det.front_end = front_end;
    det.net = build_vq_network(config, det.mapping, front_end, hidden_widths, rng);
    return det;
}

inline std::vector<double> vq_detector_input(const VqDetector& det, const ChannelRealization& channel,
                                             std::span<const cdouble> y, double noise_variance) {
    if (det.front_end == FrontEnd::None) return detector_input(channel, y);
    EqualizerKind kind;
    switch (det.front_end) {
        case FrontEnd::MF: kind = EqualizerKind::MF; break;
        case FrontEnd::ZF: kind = EqualizerKind::ZF; break;
        default: kind = EqualizerKind::LMMSE; break;
    }
    const EqualizedSignal eq = equalize(kind, channel.h, y, noise_variance);
    return complex_to_real(eq.x_soft);
}

// noise_variance is only consulted by the LMMSE front end.
inline std::vector<int> vq_detect(const VqDetector& det, const ChannelRealization& channel,
                                  std::span<const cdouble> y, double noise_variance = 0.0) {
    if (det.net.all_parameters_zero())
        throw std::invalid_argument("vq_detect: network has all-zero parameters (untrained)");
    const std::vector<double> input = vq_detector_input(det, channel, y, noise_variance);
    if (static_cast<int>(input.size()) != det.net.input_dim())
        throw std::invalid_argument("vq_detect: network input width mismatch");
    return decode(det.mapping, forward(det.net, input));
}

struct TrainedDetector {
    VqDetector detector;
    std::vector<double> loss_trace;
};

// Streams freshly generated batches at the given training SNR; when
// channel_set is provided, channels are drawn uniformly from it instead.
inline TrainedDetector train_vq_detector(const MimoConfig& config, MappingKind mapping_kind,
                                         FrontEnd front_end, double train_eb_n0_db,
                                         const TrainingConfig& training,
                                         const std::vector<int>& hidden_widths,
                                         const std::vector<ChannelRealization>* channel_set = nullptr) {
    if (channel_set && channel_set->empty())
        throw std::invalid_argument("train_vq_detector: channel set is empty");
    Rng init_rng(derive_seed(training.seed, 0x696e6974ull));
    TrainedDetector out;
    out.detector = make_vq_detector(config, mapping_kind, front_end, hidden_widths, init_rng);
    const NoiseModel noise = calibrate_noise(train_eb_n0_db, config);
    const VqDetector& det = out.detector;

    BatchSource source = [&config, &noise, &det, channel_set, &training](Rng& rng, RealBatch& x,
                                                                         RealBatch& t) {
        const int in_dim = det.net.input_dim();
        const int out_dim = det.net.output_dim();
        x = RealBatch(training.batch_size, in_dim);
        t = RealBatch(training.batch_size, out_dim);
        for (int i = 0; i < training.batch_size; ++i) {
            const ChannelRealization* ch;
            ChannelRealization fresh;
            if (channel_set) {
                ch = &(*channel_set)[rng.uniform_int(channel_set->size())];
            } else {
                fresh = draw_channel(rng, config);
                ch = &fresh;
            }
            const Transmission tr = transmit(rng, config, *ch, noise);
            const std::vector<double> input = vq_detector_input(det, *ch, tr.y, noise.variance);
            const std::vector<double> target = encode(det.mapping, tr.indices);
            std::copy(input.begin(), input.end(), x.row(i));
            std::copy(target.begin(), target.end(), t.row(i));
        }
    };
    TrainResult res = train_stream(out.detector.net, source, training);
    out.loss_trace = std::move(res.loss_trace);
    return out;
}

}  // namespace mimovq
