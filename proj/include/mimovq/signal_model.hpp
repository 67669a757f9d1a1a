#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "constellation.hpp"
#include "linalg.hpp"
#include "rng.hpp"

// Flat-fading MIMO link: y = H x + v with H ~ i.i.d. CN(0,1) entries,
// uniformly drawn symbol vectors, and complex AWGN calibrated from Eb/N0.

namespace mimovq {

struct MimoConfig {
    int tx_antennas = 1;  // M
    int rx_antennas = 1;  // N
    Constellation constellation;
    std::uint64_t codebook_size = 2;  // L^M
};

inline MimoConfig make_mimo_config(int tx, int rx, Scheme scheme) {
    if (tx < 1 || rx < 1) throw std::invalid_argument("make_mimo_config: antenna counts must be positive");
    MimoConfig c;
    c.tx_antennas = tx;
    c.rx_antennas = rx;
    c.constellation = build_constellation(scheme);
    if (tx * c.constellation.bits_per_symbol > 62)
        throw std::invalid_argument("make_mimo_config: codebook size overflows 64 bits");
    c.codebook_size = 1ull << (static_cast<unsigned>(tx) * c.constellation.bits_per_symbol);
    return c;
}

// -- complex/real conversion -------------------------------------------------

// [Re(s); Im(s)] stacking: a length-K complex vector becomes length 2K.
inline std::vector<double> complex_to_real(std::span<const cdouble> s) {
    std::vector<double> out(2 * s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = s[i].real();
        out[s.size() + i] = s[i].imag();
    }
    return out;
}

inline std::vector<cdouble> real_to_complex(std::span<const double> r) {
    if (r.size() % 2 != 0) throw std::invalid_argument("real_to_complex: odd length");
    const std::size_t k = r.size() / 2;
    std::vector<cdouble> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = cdouble(r[i], r[k + i]);
    return out;
}

// Real-valued matrix equivalent [[Re H, -Im H], [Im H, Re H]] stored row-major;
// satisfies complex_to_real(H x) = real_equivalent(H) * complex_to_real(x).
struct RealEquivalent {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// -- channel ------------------------------------------------------------------

struct ChannelRealization {
    CMatrix h;  // N x M

    // Column-major vectorization (CSI vector fed to detectors).
    std::span<const cdouble> h_vec() const { return {h.data.data(), h.data.size()}; }

    RealEquivalent real_equivalent() const {
        RealEquivalent r;
        r.rows = 2 * h.rows;
        r.cols = 2 * h.cols;
        r.data.assign(static_cast<std::size_t>(r.rows) * r.cols, 0.0);
        for (int i = 0; i < h.rows; ++i) {
            for (int j = 0; j < h.cols; ++j) {
                const cdouble z = h(i, j);
                r.at(i, j) = z.real();
                r.at(i, j + h.cols) = -z.imag();
                r.at(i + h.rows, j) = z.imag();
                r.at(i + h.rows, j + h.cols) = z.real();
            }
        }
        return r;
    }
};

inline ChannelRealization channel_from_h_vec(std::span<const cdouble> v, int rx, int tx) {
    if (static_cast<int>(v.size()) != rx * tx)
        throw std::invalid_argument("channel_from_h_vec: size mismatch");
    ChannelRealization ch;
    ch.h = CMatrix(rx, tx);
    for (std::size_t i = 0; i < v.size(); ++i) ch.h.data[i] = v[i];
    return ch;
}

// i.i.d. CN(0,1) entries: each real part N(0, 1/2).
inline ChannelRealization draw_channel(Rng& rng, const MimoConfig& config) {
    ChannelRealization ch;
    ch.h = CMatrix(config.rx_antennas, config.tx_antennas);
    const double s = std::sqrt(0.5);
    for (cdouble& z : ch.h.data) {
        double re, im;
        rng.gaussian_pair(re, im);
        z = cdouble(s * re, s * im);
    }
    return ch;
}

// -- noise calibration ---------------------------------------------------------

struct NoiseModel {
    double eb_n0_db = 0.0;
    double variance = 0.0;  // total complex noise variance per receive antenna
};

// Unit symbol energy and unit channel gain per entry give Eb = 1/log2(L) per
// receive antenna per transmit stream; N0 = variance follows directly.
inline NoiseModel calibrate_noise(double eb_n0_db, const MimoConfig& config) {
    if (std::isnan(eb_n0_db)) throw std::invalid_argument("calibrate_noise: Eb/N0 is NaN");
    NoiseModel n;
    n.eb_n0_db = eb_n0_db;
    const double linear = std::pow(10.0, eb_n0_db / 10.0);
    n.variance = 1.0 / (config.constellation.bits_per_symbol * linear);
    return n;
}

// -- transmission ---------------------------------------------------------------

struct Transmission {
    std::vector<int> indices;  // per-antenna symbol indices
    std::vector<cdouble> y;    // received vector
};

inline std::vector<cdouble> points_of(const MimoConfig& config, std::span<const int> indices) {
    std::vector<cdouble> x(indices.size());
    for (std::size_t m = 0; m < indices.size(); ++m) x[m] = config.constellation.points[indices[m]];
    return x;
}

inline Transmission transmit(Rng& rng, const MimoConfig& config, const ChannelRealization& channel,
                             const NoiseModel& noise) {
    if (channel.h.rows != config.rx_antennas || channel.h.cols != config.tx_antennas)
        throw std::invalid_argument("transmit: channel dimensions do not match config");
    Transmission t;
    t.indices.resize(config.tx_antennas);
    for (int m = 0; m < config.tx_antennas; ++m)
        t.indices[m] = static_cast<int>(rng.uniform_int(config.constellation.order));
    t.y = mat_vec(channel.h, points_of(config, t.indices));
    const double s = std::sqrt(noise.variance / 2.0);  // per real dimension
    for (cdouble& z : t.y) {
        double re, im;
        rng.gaussian_pair(re, im);
        z += cdouble(s * re, s * im);
    }
    return t;
}

// -- codeword indexing -----------------------------------------------------------

// Mixed-radix index over per-antenna symbol indices; antenna 0 is the most
// significant digit.  j ranges over [0, L^M).
inline std::uint64_t codeword_index(std::span<const int> indices, int order) {
    std::uint64_t j = 0;
    for (int idx : indices) {
        if (idx < 0 || idx >= order) throw std::invalid_argument("codeword_index: symbol index out of range");
        j = j * order + static_cast<std::uint64_t>(idx);
    }
    return j;
}

inline std::vector<int> indices_from_codeword(std::uint64_t j, int tx, int order) {
    std::vector<int> idx(tx);
    for (int m = tx - 1; m >= 0; --m) {
        idx[m] = static_cast<int>(j % order);
        j /= order;
    }
    if (j != 0) throw std::invalid_argument("indices_from_codeword: index out of range");
    return idx;
}

}  // namespace mimovq
