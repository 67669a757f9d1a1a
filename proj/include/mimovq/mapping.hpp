#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gray.hpp"
#include "signal_model.hpp"

// Codebook-to-target mappings.  Each maps a transmit symbol-index vector to a
// real training target and decodes a network output back to symbol indices:
//   OneHot      — one neuron per codeword (dim L^M), decode by argmax
//   ClusterOneHot — one length-L one-hot per antenna (dim M*L), per-cluster argmax
//   ClusterBits — log2(L) Gray-coded bits per antenna (dim M*log2(L)),
//                 decode by thresholding at 0.5 then Gray-decoding

namespace mimovq {

enum class MappingKind { OneHot, ClusterOneHot, ClusterBits };

inline std::string to_string(MappingKind k) {
    switch (k) {
        case MappingKind::OneHot: return "one-hot";
        case MappingKind::ClusterOneHot: return "cluster-one-hot";
        case MappingKind::ClusterBits: return "cluster-bits";
    }
    throw std::invalid_argument("unknown mapping kind");
}

inline MappingKind parse_mapping(const std::string& name) {
    if (name == "one-hot" || name == "nn" || name == "NN") return MappingKind::OneHot;
    if (name == "cluster-one-hot" || name == "clnn" || name == "CLNN") return MappingKind::ClusterOneHot;
    if (name == "cluster-bits" || name == "clknn" || name == "CLkNN" || name == "CLKNN")
        return MappingKind::ClusterBits;
    throw std::invalid_argument("unknown mapping: " + name);
}

struct CodebookMapping {
    MappingKind kind = MappingKind::OneHot;
    int tx_antennas = 1;      // M
    int order = 2;            // L
    int bits_per_symbol = 1;  // log2(L)
    std::uint64_t target_dim = 2;
};

inline CodebookMapping make_mapping(MappingKind kind, int tx, const Constellation& constellation) {
    if (tx < 1) throw std::invalid_argument("make_mapping: tx must be positive");
    CodebookMapping m;
    m.kind = kind;
    m.tx_antennas = tx;
    m.order = constellation.order;
    m.bits_per_symbol = constellation.bits_per_symbol;
    switch (kind) {
        case MappingKind::OneHot: {
            const unsigned bits = static_cast<unsigned>(tx) * constellation.bits_per_symbol;
            if (bits > 26) throw std::invalid_argument("make_mapping: one-hot target would exceed 2^26 neurons");
            m.target_dim = 1ull << bits;
            break;
        }
        case MappingKind::ClusterOneHot:
            m.target_dim = static_cast<std::uint64_t>(tx) * constellation.order;
            break;
        case MappingKind::ClusterBits:
            m.target_dim = static_cast<std::uint64_t>(tx) * constellation.bits_per_symbol;
            break;
    }
    return m;
}

inline std::vector<double> encode(const CodebookMapping& m, std::span<const int> indices) {
    if (static_cast<int>(indices.size()) != m.tx_antennas)
        throw std::invalid_argument("encode: wrong number of symbol indices");
    for (int idx : indices)
        if (idx < 0 || idx >= m.order) throw std::invalid_argument("encode: symbol index out of range");

    std::vector<double> z(m.target_dim, 0.0);
    switch (m.kind) {
        case MappingKind::OneHot:
            z[codeword_index(indices, m.order)] = 1.0;
            break;
        case MappingKind::ClusterOneHot:
            for (int a = 0; a < m.tx_antennas; ++a)
                z[static_cast<std::size_t>(a) * m.order + indices[a]] = 1.0;
            break;
        case MappingKind::ClusterBits:
            for (int a = 0; a < m.tx_antennas; ++a) {
                const std::uint32_t g = gray_code(static_cast<std::uint32_t>(indices[a]));
                for (int t = 0; t < m.bits_per_symbol; ++t) {
                    // MSB first within each cluster
                    const int bit = (g >> (m.bits_per_symbol - 1 - t)) & 1;
                    z[static_cast<std::size_t>(a) * m.bits_per_symbol + t] = bit;
                }
            }
            break;
    }
    return z;
}

inline std::vector<int> decode(const CodebookMapping& m, std::span<const double> z_hat) {
    if (z_hat.size() != m.target_dim) throw std::invalid_argument("decode: wrong output length");
    std::vector<int> indices(m.tx_antennas, 0);
    switch (m.kind) {
        case MappingKind::OneHot: {
            std::size_t best = 0;
            for (std::size_t j = 1; j < z_hat.size(); ++j)
                if (z_hat[j] > z_hat[best]) best = j;  // ties keep the smallest index
            return indices_from_codeword(best, m.tx_antennas, m.order);
        }
        case MappingKind::ClusterOneHot:
            for (int a = 0; a < m.tx_antennas; ++a) {
                const std::size_t base = static_cast<std::size_t>(a) * m.order;
                int best = 0;
                for (int l = 1; l < m.order; ++l)
                    if (z_hat[base + l] > z_hat[base + best]) best = l;
                indices[a] = best;
            }
            return indices;
        case MappingKind::ClusterBits:
            for (int a = 0; a < m.tx_antennas; ++a) {
                const std::size_t base = static_cast<std::size_t>(a) * m.bits_per_symbol;
                std::uint32_t g = 0;
                for (int t = 0; t < m.bits_per_symbol; ++t)
                    g = (g << 1) | (z_hat[base + t] > 0.5 ? 1u : 0u);
                indices[a] = static_cast<int>(gray_decode(g));
            }
            return indices;
    }
    throw std::invalid_argument("unknown mapping kind");
}

}  // namespace mimovq
