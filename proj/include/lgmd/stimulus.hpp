#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace lgmd {

enum class StimulusKind { looming, translate, grating, rotate };

inline const char* stimulus_kind_name(StimulusKind k) {
    switch (k) {
        case StimulusKind::looming: return "looming";
        case StimulusKind::translate: return "translate";
        case StimulusKind::grating: return "grating";
        default: return "rotate";
    }
}

/// Parameters for the synthetic test stimuli. Per-kind factory defaults are
/// calibrated so the detector reproduces the qualitative selectivity results
/// under the default network constants.
struct StimulusSpec {
    StimulusKind kind = StimulusKind::looming;
    int frames = 90;
    int width = kDefaultFrameWidth;
    int height = kDefaultFrameHeight;
    double object_luminance = 0.0;
    double background_luminance = 255.0;
    double edge_softness = 0.8;  // px; camera-like edge spread, 0 = hard edges

    // looming: angular size as fraction of frame width
    double loom_start_frac = 0.10;
    double loom_end_frac = 0.95;

    // translate
    double translate_size_px = 40.0;
    double translate_speed_px = 0.6;

    // grating
    int grating_period_px = 24;
    int grating_drift_px = 12;

    // rotate: banded stripe panorama
    int rotate_pan_px = 12;
    int rotate_stripe_period_px = 24;
    int rotate_band_rows = 8;

    std::uint32_t seed = 7;
};

inline StimulusSpec default_spec(StimulusKind kind) {
    StimulusSpec s;
    s.kind = kind;
    switch (kind) {
        case StimulusKind::looming:
        case StimulusKind::translate:
            break;  // struct defaults
        case StimulusKind::grating:
        case StimulusKind::rotate:
            s.frames = 60;
            s.object_luminance = 60.0;
            s.background_luminance = 160.0;
            s.edge_softness = 0.0;
            break;
    }
    return s;
}

inline std::vector<std::string> validate_spec(const StimulusSpec& s) {
    std::vector<std::string> v;
    if (s.frames < 1) v.push_back("frames must be >= 1");
    if (s.width < 5 || s.height < 5) v.push_back("frame smaller than 5x5");
    auto lum_ok = [](double l) { return l >= 0.0 && l <= 255.0; };
    if (!lum_ok(s.object_luminance) || !lum_ok(s.background_luminance))
        v.push_back("luminance outside [0,255]");
    if (s.edge_softness < 0.0) v.push_back("edge_softness must be >= 0");
    switch (s.kind) {
        case StimulusKind::looming:
            if (!(s.loom_start_frac < s.loom_end_frac))
                v.push_back("looming start size must be smaller than end size");
            if (s.loom_start_frac <= 0.0 || s.loom_end_frac > 1.0)
                v.push_back("looming sizes must lie within frame bounds");
            break;
        case StimulusKind::translate:
            if (s.translate_size_px <= 0.0 || s.translate_size_px > s.width)
                v.push_back("translate size must lie within frame bounds");
            if (s.translate_speed_px < 0.0) v.push_back("translate speed must be >= 0");
            break;
        case StimulusKind::grating:
            if (s.grating_period_px < 2 || s.grating_period_px > s.width)
                v.push_back("grating period must lie within frame bounds");
            if (s.grating_drift_px < 0) v.push_back("grating drift must be >= 0");
            break;
        case StimulusKind::rotate:
            if (s.rotate_pan_px < 0) v.push_back("rotate pan must be >= 0");
            if (s.rotate_stripe_period_px < 2) v.push_back("stripe period must be >= 2");
            if (s.rotate_band_rows < 1) v.push_back("band rows must be >= 1");
            break;
    }
    return v;
}

namespace detail {

inline std::uint8_t quantize(double v) {
    const double r = std::floor(v + 0.5);
    return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

inline double edge_profile(double z) {  // cumulative normal
    return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0)));
}

/// Axis-aligned rectangle with separable soft edges; coverage 1 inside.
inline Frame soft_rect(int w, int h, double cx, double cy, double ex, double ey, double obj,
                       double bg, double sigma) {
    std::vector<double> fx(w), fy(h);
    for (int x = 0; x < w; ++x) {
        const double c = x + 0.5;
        fx[x] = sigma <= 0.0
                    ? double(c >= cx - ex / 2 && c < cx + ex / 2)
                    : edge_profile((c - (cx - ex / 2)) / sigma) -
                          edge_profile((c - (cx + ex / 2)) / sigma);
    }
    for (int y = 0; y < h; ++y) {
        const double c = y + 0.5;
        fy[y] = sigma <= 0.0
                    ? double(c >= cy - ey / 2 && c < cy + ey / 2)
                    : edge_profile((c - (cy - ey / 2)) / sigma) -
                          edge_profile((c - (cy + ey / 2)) / sigma);
    }
    Frame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f.at(x, y) = quantize(bg + (obj - bg) * fx[x] * fy[y]);
    return f;
}

inline void require_valid(const StimulusSpec& s, StimulusKind kind) {
    if (s.kind != kind) throw std::invalid_argument("stimulus spec has the wrong kind");
    const auto v = validate_spec(s);
    if (!v.empty()) throw std::invalid_argument("invalid stimulus spec: " + v.front());
}

}  // namespace detail

/// Constant-velocity approach of a dark square: edge length follows a
/// 1/(remaining frames) profile and reaches the end size on the final frame,
/// the nominal contact frame.
inline std::vector<Frame> gen_looming(const StimulusSpec& s) {
    detail::require_valid(s, StimulusKind::looming);
    const double e_start = s.loom_start_frac * s.width;
    const double e_end = s.loom_end_frac * s.width;
    const double denom = e_end - e_start;
    const double b = s.frames > 1 ? (s.frames - 1) * e_end / denom : 1.0;
    const double a = e_start * b;
    std::vector<Frame> seq;
    seq.reserve(s.frames);
    for (int t = 0; t < s.frames; ++t) {
        const double e = s.frames > 1 ? a / (b - t) : e_start;
        seq.push_back(detail::soft_rect(s.width, s.height, s.width / 2.0, s.height / 2.0, e, e,
                                        s.object_luminance, s.background_luminance,
                                        s.edge_softness));
    }
    return seq;
}

/// Fixed-size square moving horizontally at constant speed.
inline std::vector<Frame> gen_translate(const StimulusSpec& s) {
    detail::require_valid(s, StimulusKind::translate);
    const double x0 = -s.translate_size_px / 2 + 2.0;
    std::vector<Frame> seq;
    seq.reserve(s.frames);
    for (int t = 0; t < s.frames; ++t)
        seq.push_back(detail::soft_rect(s.width, s.height, x0 + s.translate_speed_px * t,
                                        s.height / 2.0, s.translate_size_px, s.translate_size_px,
                                        s.object_luminance, s.background_luminance,
                                        s.edge_softness));
    return seq;
}

/// Full-field vertical square-wave grating drifting horizontally.
inline std::vector<Frame> gen_grating(const StimulusSpec& s) {
    detail::require_valid(s, StimulusKind::grating);
    std::vector<Frame> seq;
    seq.reserve(s.frames);
    for (int t = 0; t < s.frames; ++t) {
        Frame f(s.width, s.height);
        for (int x = 0; x < s.width; ++x) {
            const int phase =
                static_cast<int>((long(x) + long(s.grating_drift_px) * t) % s.grating_period_px);
            const std::uint8_t tone = detail::quantize(phase < s.grating_period_px / 2
                                                           ? s.background_luminance
                                                           : s.object_luminance);
            for (int y = 0; y < s.height; ++y) f.at(x, y) = tone;
        }
        seq.push_back(std::move(f));
    }
    return seq;
}

/// Whole-field pan across a seeded panorama of stripe bands with random
/// phases, emulating the image motion of ego-rotation in a textured room.
inline std::vector<Frame> gen_rotate(const StimulusSpec& s) {
    detail::require_valid(s, StimulusKind::rotate);
    const int pano_w = s.width + s.rotate_pan_px * s.frames;
    const int period = s.rotate_stripe_period_px;
    std::mt19937 rng(s.seed);
    std::vector<std::uint8_t> pano(static_cast<std::size_t>(pano_w) * s.height);
    const std::uint8_t hi = detail::quantize(s.background_luminance);
    const std::uint8_t lo = detail::quantize(s.object_luminance);
    for (int y0 = 0; y0 < s.height; y0 += s.rotate_band_rows) {
        const int phase = static_cast<int>(rng() % static_cast<std::uint32_t>(period));
        const int y1 = std::min(y0 + s.rotate_band_rows, s.height);
        for (int x = 0; x < pano_w; ++x) {
            const std::uint8_t tone = ((x + phase) % period) < period / 2 ? hi : lo;
            for (int y = y0; y < y1; ++y) pano[static_cast<std::size_t>(y) * pano_w + x] = tone;
        }
    }
    std::vector<Frame> seq;
    seq.reserve(s.frames);
    for (int t = 0; t < s.frames; ++t) {
        Frame f(s.width, s.height);
        const int off = s.rotate_pan_px * t;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x)
                f.at(x, y) = pano[static_cast<std::size_t>(y) * pano_w + x + off];
        seq.push_back(std::move(f));
    }
    return seq;
}

inline std::vector<Frame> generate(const StimulusSpec& s) {
    switch (s.kind) {
        case StimulusKind::looming: return gen_looming(s);
        case StimulusKind::translate: return gen_translate(s);
        case StimulusKind::grating: return gen_grating(s);
        default: return gen_rotate(s);
    }
}

}  // namespace lgmd
