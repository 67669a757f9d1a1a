#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "constellation.hpp"
#include "linalg.hpp"
#include "signal_model.hpp"

// Linear front ends and symbol-wise decisions.
//   MF    : x_soft = D^-1 H^H y with D = diag(H^H H)   (MRC for M = 1)
//   ZF    : x_soft = (H^H H)^-1 H^H y                   (errors out on rank loss)
//   LMMSE : x_soft = (H^H H + sigma_v^2 I)^-1 H^H y

namespace mimovq {

enum class EqualizerKind { MF, ZF, LMMSE };

inline std::string to_string(EqualizerKind k) {
    switch (k) {
        case EqualizerKind::MF: return "mf";
        case EqualizerKind::ZF: return "zf";
        case EqualizerKind::LMMSE: return "lmmse";
    }
    throw std::invalid_argument("unknown equalizer");
}

struct EqualizedSignal {
    EqualizerKind equalizer = EqualizerKind::MF;
    std::vector<cdouble> x_soft;
};

inline EqualizedSignal mf_equalize(const CMatrix& h, std::span<const cdouble> y) {
    EqualizedSignal out;
    out.equalizer = EqualizerKind::MF;
    out.x_soft = adjoint_vec(h, y);
    for (int m = 0; m < h.cols; ++m) {
        const double d = norm_sq(h.col(m));
        if (!(d > 0.0)) throw SingularMatrixError("mf_equalize: zero-norm channel column");
        out.x_soft[m] /= d;
    }
    ops::add_macs(2ull * h.cols);
    return out;
}

inline EqualizedSignal zf_equalize(const CMatrix& h, std::span<const cdouble> y) {
    if (h.rows < h.cols)
        throw SingularMatrixError("zf_equalize: more transmit than receive antennas");
    EqualizedSignal out;
    out.equalizer = EqualizerKind::ZF;
    out.x_soft = solve_hermitian(gram(h), adjoint_vec(h, y));
    return out;
}

inline EqualizedSignal lmmse_equalize(const CMatrix& h, std::span<const cdouble> y,
                                      double noise_variance) {
    if (!(noise_variance >= 0.0))
        throw std::invalid_argument("lmmse_equalize: negative noise variance");
    CMatrix g = gram(h);
    for (int m = 0; m < g.cols; ++m) g(m, m) += noise_variance;
    EqualizedSignal out;
    out.equalizer = EqualizerKind::LMMSE;
    out.x_soft = solve_hermitian(std::move(g), adjoint_vec(h, y));
    return out;
}

inline EqualizedSignal equalize(EqualizerKind kind, const CMatrix& h, std::span<const cdouble> y,
                                double noise_variance) {
    switch (kind) {
        case EqualizerKind::MF: return mf_equalize(h, y);
        case EqualizerKind::ZF: return zf_equalize(h, y);
        case EqualizerKind::LMMSE: return lmmse_equalize(h, y, noise_variance);
    }
    throw std::invalid_argument("unknown equalizer");
}

// Per-entry nearest-point decision; ties go to the smallest symbol index.
inline std::vector<int> demap_hard(const Constellation& c, std::span<const cdouble> x_soft) {
    std::vector<int> idx(x_soft.size());
    for (std::size_t m = 0; m < x_soft.size(); ++m) idx[m] = nearest_index(c, x_soft[m]);
    return idx;
}

// Parallel interference cancellation step: subtract the contribution of
// stream m assuming its symbol value is x_hat_m.
inline std::vector<cdouble> pic_cancel(std::span<const cdouble> y, const CMatrix& h, int m,
                                       cdouble x_hat_m) {
    if (m < 0 || m >= h.cols) throw std::invalid_argument("pic_cancel: stream out of range");
    if (static_cast<int>(y.size()) != h.rows) throw std::invalid_argument("pic_cancel: size mismatch");
    std::vector<cdouble> residual(y.begin(), y.end());
    auto col = h.col(m);
    for (int r = 0; r < h.rows; ++r) residual[r] -= col[r] * x_hat_m;
    ops::add_macs(4ull * h.rows);
    return residual;
}

}  // namespace mimovq
