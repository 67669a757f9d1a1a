#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "constellation.hpp"
#include "linalg.hpp"
#include "signal_model.hpp"

// Exhaustive maximum-likelihood sequence detection:
//   argmin over all L^M candidate symbol vectors of ||y - H x||^2.
// Candidates are walked in reflected mixed-radix Gray order so exactly one
// antenna's symbol index changes (by +/-1) per step; the residual y - H x is
// updated incrementally, making per-hypothesis cost independent of M.
// Exact ties resolve to the smallest mixed-radix codeword index.

namespace mimovq {

struct BudgetExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMlsdCandidateBudget = 1ull << 24;

struct MlsdResult {
    std::vector<int> indices;
    double metric = 0.0;  // ||y - H x_hat||^2
};

inline MlsdResult mlsd_detect(const MimoConfig& config, const CMatrix& h,
                              std::span<const cdouble> y) {
    const int m_tx = config.tx_antennas;
    const int order = config.constellation.order;
    if (h.cols != m_tx || h.rows != config.rx_antennas)
        throw std::invalid_argument("mlsd_detect: channel dimensions do not match config");
    if (static_cast<int>(y.size()) != h.rows) throw std::invalid_argument("mlsd_detect: size mismatch");
    if (config.codebook_size > kMlsdCandidateBudget)
        throw BudgetExceededError("mlsd_detect: candidate count exceeds the 2^24 search budget");

    const std::vector<cdouble>& pts = config.constellation.points;

    // Start at the all-zeros index vector.
    std::vector<int> digits(m_tx, 0);
    std::vector<cdouble> residual(y.begin(), y.end());
    for (int m = 0; m < m_tx; ++m) {
        auto col = h.col(m);
        for (int r = 0; r < h.rows; ++r) residual[r] -= col[r] * pts[0];
    }
    ops::add_macs(4ull * h.rows * m_tx);

    auto index_of = [&](const std::vector<int>& d) { return codeword_index(d, order); };

    MlsdResult best;
    best.indices = digits;
    best.metric = norm_sq(residual);
    std::uint64_t best_index = index_of(digits);

    // Loopless reflected mixed-radix Gray generation (focus pointers).
    std::vector<int> focus(m_tx + 1);
    std::vector<int> dir(m_tx, 1);
    for (int i = 0; i <= m_tx; ++i) focus[i] = i;

    while (true) {
        const int j = focus[0];
        focus[0] = 0;
        if (j == m_tx) break;
        const int old_sym = digits[j];
        digits[j] += dir[j];
        const int new_sym = digits[j];
        if (new_sym == 0 || new_sym == order - 1) {
            dir[j] = -dir[j];
            focus[j] = focus[j + 1];
            focus[j + 1] = j + 1;
        }

        // residual = y - H x  =>  changing antenna j adds h_j (old - new).
        const cdouble delta = pts[old_sym] - pts[new_sym];
        auto col = h.col(j);
        for (int r = 0; r < h.rows; ++r) residual[r] += col[r] * delta;
        ops::add_macs(4ull * h.rows);
        const double metric = norm_sq(residual);

        if (metric < best.metric) {
            best.metric = metric;
            best.indices = digits;
            best_index = index_of(digits);
        } else if (metric == best.metric) {
            const std::uint64_t idx = index_of(digits);
            if (idx < best_index) {
                best.indices = digits;
                best_index = idx;
            }
        }
    }
    return best;
}

}  // namespace mimovq
