#pragma once

#include <cstdint>

namespace mimovq {

// Reflected binary Gray code and its inverse.
inline std::uint32_t gray_code(std::uint32_t i) { return i ^ (i >> 1); }

inline std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t b = g;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) b ^= b >> shift;
    return b;
}

}  // namespace mimovq
