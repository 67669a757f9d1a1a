#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gray.hpp"
#include "linalg.hpp"

// Unit-average-energy constellations with Gray bit labels.  points[k] is the
// symbol transmitted for symbol index k, bit_patterns[k] its bit label; any
// two geometrically adjacent points differ in exactly one bit.

namespace mimovq {

enum class Scheme { BPSK, QPSK, PSK8, QAM16 };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::BPSK: return "BPSK";
        case Scheme::QPSK: return "QPSK";
        case Scheme::PSK8: return "8PSK";
        case Scheme::QAM16: return "16QAM";
    }
    throw std::invalid_argument("unknown scheme");
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "BPSK" || name == "bpsk") return Scheme::BPSK;
    if (name == "QPSK" || name == "qpsk") return Scheme::QPSK;
    if (name == "8PSK" || name == "8psk" || name == "PSK8" || name == "psk8") return Scheme::PSK8;
    if (name == "16QAM" || name == "16qam" || name == "QAM16" || name == "qam16") return Scheme::QAM16;
    throw std::invalid_argument("unknown scheme: " + name);
}

struct Constellation {
    Scheme scheme = Scheme::BPSK;
    int order = 2;            // L
    int bits_per_symbol = 1;  // log2(L)
    std::vector<cdouble> points;
    std::vector<std::uint32_t> bit_patterns;
};

namespace detail {

inline Constellation build_psk(Scheme scheme, int order, double phase_offset) {
    Constellation c;
    c.scheme = scheme;
    c.order = order;
    c.bits_per_symbol = std::countr_zero(static_cast<unsigned>(order));
    c.points.resize(order);
    c.bit_patterns.resize(order);
    for (int k = 0; k < order; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / order + phase_offset;
        c.points[k] = cdouble(std::cos(phi), std::sin(phi));
        c.bit_patterns[k] = gray_code(static_cast<std::uint32_t>(k));
    }
    return c;
}

inline Constellation build_qam16() {
    Constellation c;
    c.scheme = Scheme::QAM16;
    c.order = 16;
    c.bits_per_symbol = 4;
    c.points.resize(16);
    c.bit_patterns.resize(16);
    const double levels[4] = {-3.0, -1.0, 1.0, 3.0};
    const double scale = 1.0 / std::sqrt(10.0);  // mean of a^2+b^2 over the +/-1,+/-3 grid is 10
    for (int ki = 0; ki < 4; ++ki) {
        for (int kq = 0; kq < 4; ++kq) {
            const int k = ki * 4 + kq;
            c.points[k] = cdouble(levels[ki] * scale, levels[kq] * scale);
            // Per-axis 2-bit Gray labels; neighbors along either axis differ in one bit.
            c.bit_patterns[k] = (gray_code(static_cast<std::uint32_t>(ki)) << 2) |
                                gray_code(static_cast<std::uint32_t>(kq));
        }
    }
    return c;
}

}  // namespace detail

inline Constellation build_constellation(Scheme scheme) {
    switch (scheme) {
        case Scheme::BPSK: return detail::build_psk(Scheme::BPSK, 2, 0.0);
        case Scheme::QPSK: return detail::build_psk(Scheme::QPSK, 4, std::numbers::pi / 4.0);
        case Scheme::PSK8: return detail::build_psk(Scheme::PSK8, 8, 0.0);
        case Scheme::QAM16: return detail::build_qam16();
    }
    throw std::invalid_argument("unknown scheme");
}

// Nearest constellation point by Euclidean distance, ties to the smallest index.
inline int nearest_index(const Constellation& c, cdouble z) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < c.order; ++k) {
        const double dr = z.real() - c.points[k].real();
        const double di = z.imag() - c.points[k].imag();
        const double d = dr * dr + di * di;
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    ops::add_macs(2ull * c.order);
    return best;
}

inline int bit_errors_between(const Constellation& c, int true_index, int detected_index) {
    return std::popcount(c.bit_patterns[true_index] ^ c.bit_patterns[detected_index]);
}

}  // namespace mimovq
