#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "core.hpp"
#include "decision.hpp"

namespace lgmd {

/// 5x5 lateral-inhibition mask: weight 0.25/distance, nothing to the center cell.
inline const std::array<double, 25>& inhibition_kernel() {
    static const std::array<double, 25> k = [] {
        std::array<double, 25> w{};
        for (int j = -2; j <= 2; ++j)
            for (int i = -2; i <= 2; ++i)
                w[(j + 2) * 5 + (i + 2)] =
                    (i == 0 && j == 0) ? 0.0 : 0.25 / std::sqrt(double(i * i + j * j));
        return w;
    }();
    return k;
}

/// 3x3 grouping mask, uniform 1/9.
inline const std::array<double, 9>& grouping_kernel() {
    static const std::array<double, 9> k = [] {
        std::array<double, 9> w{};
        w.fill(1.0 / 9.0);
        return w;
    }();
    return k;
}

namespace detail {

template <int R, std::size_t N>
Matrix correlate_zero_pad(const Matrix& in, const std::array<double, N>& kernel) {
    static_assert(N == (2 * R + 1) * (2 * R + 1));
    Matrix out(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int j = -R; j <= R; ++j) {
                const int yy = y + j;
                if (yy < 0 || yy >= in.height) continue;
                for (int i = -R; i <= R; ++i) {
                    const int xx = x + i;
                    if (xx < 0 || xx >= in.width) continue;
                    acc += in.at(xx, yy) * kernel[(j + R) * (2 * R + 1) + (i + R)];
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

}  // namespace detail

/// Photoreceptor layer: luminance change between consecutive frames.
/// The excitatory layer is this same matrix and is never copied.
inline Matrix p_layer(const Frame& cur, const Frame& prev) {
    if (!cur.same_shape(prev)) throw std::invalid_argument("p_layer: frame dimensions differ");
    Matrix out(cur.width, cur.height);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = double(cur.luminance[i]) - double(prev.luminance[i]);
    return out;
}

/// Inhibition spread of the previous frame's P matrix (one-frame delay).
inline Matrix i_layer(const Matrix& prev_p) {
    return detail::correlate_zero_pad<2>(prev_p, inhibition_kernel());
}

/// Excitation minus weighted inhibition; opposite signs pass excitation through.
inline Matrix s_layer(const Matrix& e, const Matrix& i, double w_i) {
    if (!e.same_shape(i)) throw std::invalid_argument("s_layer: matrix dimensions differ");
    Matrix out(e.width, e.height);
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double ev = e.values[n], iv = i.values[n];
        out.values[n] = (ev * iv <= 0.0) ? ev : ev - iv * w_i;
    }
    return out;
}

/// Passing coefficients: 3x3 neighborhood mean of the S layer.
inline Matrix ce_layer(const Matrix& s) {
    return detail::correlate_zero_pad<1>(s, grouping_kernel());
}

/// Grouping: scale excitation by its passing coefficient, then gate decayed cells.
inline Matrix g_layer(const Matrix& s, const Matrix& ce, double c_w, double t_de) {
    if (!s.same_shape(ce)) throw std::invalid_argument("g_layer: matrix dimensions differ");
    double max_abs = 0.0;
    for (double v : ce.values) max_abs = std::max(max_abs, std::abs(v / c_w));
    const double omega = 0.01 + max_abs;
    Matrix out(s.width, s.height);
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double g = s.values[n] * ce.values[n] / omega;
        out.values[n] = (g >= t_de) ? g : 0.0;
    }
    return out;
}

/// Membrane potential: sum of absolute gated excitations.
inline double membrane_potential(const Matrix& g) {
    double k = 0.0;
    for (double v : g.values) k += std::abs(v);
    return k;
}

/// Excitation readout. The literal mode keeps the printed normalization, whose
/// output never leaves [-2e-6, 2e-6] with the default constants; the
/// reconstructed mode is a percent-scaled sigmoid under which T_s is reachable.
inline double normalize(double k_f, const Params& p) {
    const double root = std::sqrt(k_f);
    if (p.norm_mode == NormMode::literal)
        return std::tanh(root - p.n_cell * p.C_1) / (p.n_cell * p.C_2);
    return 100.0 * std::max(0.0, std::tanh((root - p.C_1) / p.C_2));
}

/// FFI membrane level: mean absolute luminance change, one frame delayed.
inline double ffi_level(const Matrix& prev_p, int n_cell) {
    double sum = 0.0;
    for (double v : prev_p.values) sum += std::abs(v);
    return sum / n_cell;
}

/// Rolling state of one detector stream.
struct LayerState {
    Frame prev_luminance;
    Matrix prev_p;
    SpikeWindow spike_window;
    long frame_index = 0;
};

inline LayerState make_layer_state(int width, int height, const Params& p) {
    LayerState st;
    st.prev_luminance = Frame(width, height);
    st.prev_p = Matrix(width, height);
    st.spike_window = SpikeWindow(p.n_sp);
    st.frame_index = 0;
    return st;
}

/// Full per-frame cascade. The first frame of a stream yields all-zero
/// outputs; decision booleans come from the decision module.
inline FrameResult pipeline_step(LayerState& state, const Frame& frame, const Params& p) {
    if (frame.width != state.prev_p.width || frame.height != state.prev_p.height)
        throw std::invalid_argument("pipeline_step: frame does not match state dimensions");

    FrameResult res;
    if (state.frame_index == 0) {
        state.prev_luminance = frame;
        state.spike_window.push(false);
        ++state.frame_index;
        return res;
    }

    Matrix p_f = p_layer(frame, state.prev_luminance);
    const Matrix i_f = i_layer(state.prev_p);
    const Matrix s_f = s_layer(p_f, i_f, p.W_I);
    const Matrix ce_f = ce_layer(s_f);
    const Matrix g_f = g_layer(s_f, ce_f, p.C_w, p.T_de);

    res.k_raw = membrane_potential(g_f);
    res.kappa = normalize(res.k_raw, p);
    res.ffi = ffi_level(state.prev_p, p.n_cell);
    res.spike = spike(res.kappa, p.T_s);
    state.spike_window.push(res.spike);
    res.c_lgmd = collision_confirm(state.spike_window, p.n_sp);
    res.c_ffi = ffi_trigger(res.ffi, p.T_FFI);

    state.prev_luminance = frame;
    state.prev_p = std::move(p_f);
    ++state.frame_index;
    return res;
}

}  // namespace lgmd
