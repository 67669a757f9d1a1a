#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapping.hpp"
#include "signal_model.hpp"

// Labeled training data for detector networks.  Each sample pairs the
// realified (CSI, received-signal) observation with the mapping target of the
// transmitted codeword.

namespace mimovq {

struct TrainingSample {
    std::vector<double> input;   // complex_to_real([h_vec; y]), length 2N(M+1)
    std::vector<double> target;  // encode(mapping, indices)
    std::uint64_t label = 0;     // codeword index j
};

inline std::vector<double> detector_input(const ChannelRealization& channel,
                                          std::span<const cdouble> y) {
    std::vector<cdouble> s(channel.h_vec().begin(), channel.h_vec().end());
    s.insert(s.end(), y.begin(), y.end());
    return complex_to_real(s);
}

inline std::vector<TrainingSample> generate_dataset(
    Rng& rng, const MimoConfig& config, const NoiseModel& noise, const CodebookMapping& mapping,
    std::size_t count, const std::vector<ChannelRealization>* channel_set = nullptr) {
    if (count == 0) throw std::invalid_argument("generate_dataset: count must be positive");
    if (channel_set && channel_set->empty())
        throw std::invalid_argument("generate_dataset: channel set is empty");
    if (mapping.tx_antennas != config.tx_antennas || mapping.order != config.constellation.order)
        throw std::invalid_argument("generate_dataset: mapping does not match config");

    std::vector<TrainingSample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const ChannelRealization* ch;
        ChannelRealization fresh;
        if (channel_set) {
            ch = &(*channel_set)[rng.uniform_int(channel_set->size())];
        } else {
            fresh = draw_channel(rng, config);
            ch = &fresh;
        }
        const Transmission t = transmit(rng, config, *ch, noise);
        TrainingSample s;
        s.input = detector_input(*ch, t.y);
        s.target = encode(mapping, t.indices);
        s.label = codeword_index(t.indices, config.constellation.order);
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<ChannelRealization> draw_channel_set(Rng& rng, const MimoConfig& config,
                                                        std::size_t size) {
    if (size == 0) throw std::invalid_argument("draw_channel_set: size must be positive");
    std::vector<ChannelRealization> set;
    set.reserve(size);
    for (std::size_t i = 0; i < size; ++i) set.push_back(draw_channel(rng, config));
    return set;
}

// -- line-oriented export: "label  input...  target..." per sample -------------

inline void export_dataset(std::ostream& os, const std::vector<TrainingSample>& samples) {
    char buf[40];
    for (const TrainingSample& s : samples) {
        os << s.label;
        for (double v : s.input) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            os << buf;
        }
        for (double v : s.target) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            os << buf;
        }
        os << '\n';
    }
}

inline std::vector<TrainingSample> import_dataset(std::istream& is, std::size_t input_dim,
                                                  std::size_t target_dim) {
    std::vector<TrainingSample> samples;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        TrainingSample s;
        if (!(ls >> s.label)) throw std::runtime_error("import_dataset: bad label");
        s.input.resize(input_dim);
        for (double& v : s.input)
            if (!(ls >> v)) throw std::runtime_error("import_dataset: truncated input row");
        s.target.resize(target_dim);
        for (double& v : s.target)
            if (!(ls >> v)) throw std::runtime_error("import_dataset: truncated target row");
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace mimovq
