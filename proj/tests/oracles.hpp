#pragma once

// Independent reference implementations the tests check the library against.
// Everything here is deliberately coded with a different algorithm or shape
// than the production code: Gaussian elimination instead of Cholesky, odometer
// enumeration instead of reflected-Gray stepping, naive per-neuron loops
// instead of batched matrix products.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <mimovq/mimovq.hpp>

namespace oracle {

using mimovq::cdouble;

// -- dense complex algebra ------------------------------------------------------

inline std::vector<cdouble> matvec(const mimovq::CMatrix& h, std::span<const cdouble> x) {
    std::vector<cdouble> y(h.rows, cdouble(0.0, 0.0));
    for (int r = 0; r < h.rows; ++r)
        for (int c = 0; c < h.cols; ++c) y[r] += h(r, c) * x[c];
    return y;
}

// A x = b by Gaussian elimination with partial pivoting.
inline std::vector<cdouble> gauss_solve(std::vector<std::vector<cdouble>> a, std::vector<cdouble> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-13) throw std::runtime_error("gauss_solve: singular");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cdouble f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<cdouble> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        cdouble s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
        x[ri] = s / a[ri][ri];
    }
    return x;
}

// H^H H + reg I and H^H y by explicit conjugated loops.
inline std::vector<std::vector<cdouble>> normal_matrix(const mimovq::CMatrix& h, double reg) {
    std::vector<std::vector<cdouble>> a(h.cols, std::vector<cdouble>(h.cols, cdouble(0, 0)));
    for (int i = 0; i < h.cols; ++i)
        for (int j = 0; j < h.cols; ++j) {
            for (int r = 0; r < h.rows; ++r) a[i][j] += std::conj(h(r, i)) * h(r, j);
            if (i == j) a[i][j] += reg;
        }
    return a;
}

inline std::vector<cdouble> adjoint_times(const mimovq::CMatrix& h, std::span<const cdouble> y) {
    std::vector<cdouble> v(h.cols, cdouble(0, 0));
    for (int c = 0; c < h.cols; ++c)
        for (int r = 0; r < h.rows; ++r) v[c] += std::conj(h(r, c)) * y[r];
    return v;
}

inline std::vector<cdouble> mf_formula(const mimovq::CMatrix& h, std::span<const cdouble> y) {
    std::vector<cdouble> out(h.cols);
    for (int c = 0; c < h.cols; ++c) {
        cdouble num(0, 0);
        double den = 0.0;
        for (int r = 0; r < h.rows; ++r) {
            num += std::conj(h(r, c)) * y[r];
            den += std::norm(h(r, c));
        }
        out[c] = num / den;
    }
    return out;
}

inline std::vector<cdouble> zf_formula(const mimovq::CMatrix& h, std::span<const cdouble> y) {
    return gauss_solve(normal_matrix(h, 0.0), adjoint_times(h, y));
}

inline std::vector<cdouble> lmmse_formula(const mimovq::CMatrix& h, std::span<const cdouble> y,
                                          double noise_variance) {
    return gauss_solve(normal_matrix(h, noise_variance), adjoint_times(h, y));
}

// -- exhaustive detection --------------------------------------------------------

// Enumerates codeword indices j = 0..L^M-1 in order; antenna 0 is the most
// significant digit.  First strict improvement wins, so ties resolve to the
// smallest j by construction.
inline std::vector<int> brute_force_mlsd(const mimovq::MimoConfig& config, const mimovq::CMatrix& h,
                                         std::span<const cdouble> y) {
    const int m = config.tx_antennas;
    const int order = config.constellation.order;
    const auto& points = config.constellation.points;
    std::uint64_t total = 1;
    for (int i = 0; i < m; ++i) total *= static_cast<std::uint64_t>(order);

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_indices(m, 0);
    std::vector<int> digits(m);
    for (std::uint64_t j = 0; j < total; ++j) {
        std::uint64_t rem = j;
        for (int a = m - 1; a >= 0; --a) {
            digits[a] = static_cast<int>(rem % order);
            rem /= order;
        }
        double metric = 0.0;
        for (int r = 0; r < h.rows; ++r) {
            cdouble acc = y[r];
            for (int c = 0; c < m; ++c) acc -= h(r, c) * points[digits[c]];
            metric += std::norm(acc);
        }
        if (metric < best) {
            best = metric;
            best_indices = digits;
        }
    }
    return best_indices;
}

// QPSK with pi/4 offset: quadrant decides the index.
inline int qpsk_quadrant_index(cdouble z) {
    const bool re_pos = z.real() >= 0.0;
    const bool im_pos = z.imag() >= 0.0;
    if (re_pos && im_pos) return 0;
    if (!re_pos && im_pos) return 1;
    if (!re_pos && !im_pos) return 2;
    return 3;
}

// -- neural network -------------------------------------------------------------

inline std::vector<double> activation_oracle(const mimovq::ActivationSpec& act,
                                             const std::vector<double>& z) {
    using mimovq::Activation;
    std::vector<double> out(z.size());
    switch (act.kind) {
        case Activation::Relu:
            for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
            return out;
        case Activation::Linear: return z;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < z.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-z[i]));
            return out;
        case Activation::Softmax:
        case Activation::ClusterSoftmax: {
            const std::size_t width =
                act.kind == Activation::Softmax ? z.size() : static_cast<std::size_t>(act.cluster_size);
            for (std::size_t g = 0; g < z.size(); g += width) {
                double mx = z[g];
                for (std::size_t i = g; i < g + width; ++i) mx = std::max(mx, z[i]);
                double sum = 0.0;
                for (std::size_t i = g; i < g + width; ++i) sum += std::exp(z[i] - mx);
                for (std::size_t i = g; i < g + width; ++i) out[i] = std::exp(z[i] - mx) / sum;
            }
            return out;
        }
    }
    throw std::invalid_argument("activation_oracle: unknown kind");
}

inline std::vector<double> forward_oracle(const mimovq::DenseNetwork& net,
                                          std::vector<double> a) {
    for (const mimovq::Layer& l : net.layers) {
        std::vector<double> z(l.out, 0.0);
        for (int o = 0; o < l.out; ++o) {
            double s = l.b[o];
            for (int i = 0; i < l.in; ++i) s += l.w[static_cast<std::size_t>(o) * l.in + i] * a[i];
            z[o] = s;
        }
        a = activation_oracle(l.activation, z);
    }
    return a;
}

inline double loss_oracle(const std::vector<double>& out, const std::vector<double>& target,
                          const mimovq::ActivationSpec& head) {
    using mimovq::Activation;
    double s = 0.0;
    switch (head.kind) {
        case Activation::Softmax:
        case Activation::ClusterSoftmax:
            for (std::size_t i = 0; i < out.size(); ++i)
                if (target[i] != 0.0) s -= target[i] * std::log(std::max(out[i], 1e-12));
            return s;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < out.size(); ++i)
                s -= target[i] * std::log(std::max(out[i], 1e-12)) +
                     (1.0 - target[i]) * std::log(std::max(1.0 - out[i], 1e-12));
            return s;
        case Activation::Linear:
            for (std::size_t i = 0; i < out.size(); ++i)
                s += 0.5 * (out[i] - target[i]) * (out[i] - target[i]);
            return s;
        default: throw std::invalid_argument("loss_oracle: not a head");
    }
}

inline double loss_at(const mimovq::DenseNetwork& net, const std::vector<double>& x,
                      const std::vector<double>& t) {
    return loss_oracle(forward_oracle(net, x), t, net.layers.back().activation);
}

// Central finite differences over every weight and bias.
struct FdGradients {
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> b;
};

inline FdGradients finite_difference_gradients(mimovq::DenseNetwork net, const std::vector<double>& x,
                                               const std::vector<double>& t, double step) {
    FdGradients g;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        std::vector<double> gw(net.layers[li].w.size());
        for (std::size_t k = 0; k < gw.size(); ++k) {
            const double keep = net.layers[li].w[k];
            net.layers[li].w[k] = keep + step;
            const double up = loss_at(net, x, t);
            net.layers[li].w[k] = keep - step;
            const double down = loss_at(net, x, t);
            net.layers[li].w[k] = keep;
            gw[k] = (up - down) / (2.0 * step);
        }
        std::vector<double> gb(net.layers[li].b.size());
        for (std::size_t k = 0; k < gb.size(); ++k) {
            const double keep = net.layers[li].b[k];
            net.layers[li].b[k] = keep + step;
            const double up = loss_at(net, x, t);
            net.layers[li].b[k] = keep - step;
            const double down = loss_at(net, x, t);
            net.layers[li].b[k] = keep;
            gb[k] = (up - down) / (2.0 * step);
        }
        g.w.push_back(std::move(gw));
        g.b.push_back(std::move(gb));
    }
    return g;
}

// -- closed forms ----------------------------------------------------------------

// Diversity-2 maximum-ratio combining of BPSK over Rayleigh fading:
// BER = ((1-mu)/2)^2 (2+mu), mu = sqrt(g/(1+g)), g the mean per-branch SNR.
inline double mrc2_bpsk_ber(double eb_n0_db) {
    const double g = std::pow(10.0, eb_n0_db / 10.0);
    const double mu = std::sqrt(g / (1.0 + g));
    const double h = (1.0 - mu) / 2.0;
    return h * h * (2.0 + mu);
}

// Gray sequence for 4-bit indices, tabulated by hand.
inline const int* gray16_table() {
    static const int table[16] = {0, 1, 3, 2, 6, 7, 5, 4, 12, 13, 15, 14, 10, 11, 9, 8};
    return table;
}

inline double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace oracle
