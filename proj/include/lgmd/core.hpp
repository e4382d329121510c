#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lgmd {

/// 8-bit luminance image, row-major.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> luminance;

    Frame() = default;
    Frame(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), luminance(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return luminance[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return luminance[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return luminance.size(); }
    bool same_shape(const Frame& o) const { return width == o.width && height == o.height; }

    friend bool operator==(const Frame& a, const Frame& b) {
        return a.width == b.width && a.height == b.height && a.luminance == b.luminance;
    }
};

/// Signed working matrix for the network layers, row-major.
struct Matrix {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return values.size(); }
    bool same_shape(const Matrix& o) const { return width == o.width && height == o.height; }
};

enum class NormMode { literal, reconstructed };
enum class BorderMode { zero_pad };

/// Network constants (Table-1 values by default) plus engine options.
struct Params {
    double W_I = 1.0;     // inhibition coefficient
    double C_w = 4.0;     // grouping decay constant
    double T_FFI = 90.0;  // FFI threshold
    double T_de = 500.0;  // grouping decay threshold
    double T_s = 35.0;    // spiking threshold
    int n_cell = 7128;    // cells per frame
    int n_sp = 5;         // consecutive spikes for a collision decision
    double C_1 = 150.0;   // normalization constant
    double C_2 = 80.0;    // normalization constant
    int r = 2;            // inhibition radius (the 5x5 kernel)
    NormMode norm_mode = NormMode::reconstructed;
    BorderMode border_mode = BorderMode::zero_pad;
};

constexpr int kDefaultFrameWidth = 99;
constexpr int kDefaultFrameHeight = 72;

inline Params params_default() { return Params{}; }

/// Collects every violated invariant; empty result means the set is usable
/// with a frame_w x frame_h input.
inline std::vector<std::string> params_validate(const Params& p, int frame_w, int frame_h) {
    std::vector<std::string> v;
    auto positive = [&v](double x, const char* name) {
        if (!(x > 0.0)) v.push_back(std::string(name) + " must be positive");
    };
    positive(p.W_I, "W_I");
    positive(p.C_w, "C_w");
    positive(p.T_FFI, "T_FFI");
    positive(p.T_de, "T_de");
    positive(p.T_s, "T_s");
    positive(p.C_1, "C_1");
    positive(p.C_2, "C_2");
    if (p.n_sp <= 0) v.push_back("n_sp must be positive");
    if (p.n_cell <= 0) v.push_back("n_cell must be positive");
    if (p.r != 2) v.push_back("r must be 2 (5x5 inhibition kernel)");
    if (frame_w < 2 * p.r + 1 || frame_h < 2 * p.r + 1)
        v.push_back("frame smaller than " + std::to_string(2 * p.r + 1) + "x" +
                    std::to_string(2 * p.r + 1));
    if (p.n_cell != frame_w * frame_h)
        v.push_back("n_cell != " + std::to_string(frame_w * frame_h));
    return v;
}

/// Per-frame outputs of the detector.
struct FrameResult {
    double k_raw = 0.0;  // membrane potential K_f
    double kappa = 0.0;  // normalized excitation
    double ffi = 0.0;    // F_f, mean absolute luminance change of the previous frame
    bool spike = false;
    bool c_lgmd = false;
    bool c_ffi = false;
};

}  // namespace lgmd
