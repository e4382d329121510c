#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arena.hpp"
#include "core.hpp"
#include "decision.hpp"
#include "stimulus.hpp"

namespace lgmd {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FrameFormat { pgm, raw_y8 };

namespace detail {

inline std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

// PGM header tokens separated by whitespace; '#' starts a comment to end of line.
inline std::string pgm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw IoError(path + ": truncated PGM header");
    return tok;
}

inline int parse_int(const std::string& s, const std::string& context) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError(context + ": expected integer, got '" + s + "'");
    return v;
}

}  // namespace detail

inline void write_pgm(const Frame& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "P5\n" << f.width << " " << f.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(f.luminance.data()),
              static_cast<std::streamsize>(f.size()));
    if (!out) throw IoError(path + ": write failed");
}

inline Frame read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": no such file");
    if (detail::pgm_token(in, path) != "P5") throw IoError(path + ": not a binary PGM (P5)");
    const int w = detail::parse_int(detail::pgm_token(in, path), path + " width");
    const int h = detail::parse_int(detail::pgm_token(in, path), path + " height");
    const int maxval = detail::parse_int(detail::pgm_token(in, path), path + " maxval");
    if (maxval != 255) throw IoError(path + ": unsupported maxval " + std::to_string(maxval));
    if (w <= 0 || h <= 0) throw IoError(path + ": bad dimensions");
    Frame f(w, h);
    in.read(reinterpret_cast<char*>(f.luminance.data()), static_cast<std::streamsize>(f.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.size()))
        throw IoError(path + ": truncated pixel data at byte offset " +
                      std::to_string(in.gcount()));
    return f;
}

inline Frame read_y8(const std::string& path, int width, int height) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError(path + ": no such file");
    const auto bytes = static_cast<long long>(in.tellg());
    const long long expect = static_cast<long long>(width) * height;
    if (bytes != expect)
        throw IoError(path + ": raw_y8 size " + std::to_string(bytes) + " bytes, expected " +
                      std::to_string(expect));
    in.seekg(0);
    Frame f(width, height);
    in.read(reinterpret_cast<char*>(f.luminance.data()), expect);
    return f;
}

/// Box-filter area average; destination must not exceed the source.
inline Frame downsample(const Frame& src, int dst_w, int dst_h) {
    if (dst_w > src.width || dst_h > src.height)
        throw std::invalid_argument("downsample: upscaling requested");
    if (src.width == dst_w && src.height == dst_h) return src;
    Frame out(dst_w, dst_h);
    const double sx = double(src.width) / dst_w;
    const double sy = double(src.height) / dst_h;
    for (int y = 0; y < dst_h; ++y) {
        const double y0 = y * sy, y1 = (y + 1) * sy;
        for (int x = 0; x < dst_w; ++x) {
            const double x0 = x * sx, x1 = (x + 1) * sx;
            double acc = 0.0;
            for (int yy = int(std::floor(y0)); yy < int(std::ceil(y1)); ++yy) {
                const double wy = std::min<double>(y1, yy + 1) - std::max<double>(y0, yy);
                for (int xx = int(std::floor(x0)); xx < int(std::ceil(x1)); ++xx) {
                    const double wx = std::min<double>(x1, xx + 1) - std::max<double>(x0, xx);
                    acc += wx * wy * src.at(std::min(xx, src.width - 1), std::min(yy, src.height - 1));
                }
            }
            const double mean = acc / (sx * sy);
            out.at(x, y) = static_cast<std::uint8_t>(
                std::clamp(std::floor(mean + 0.5), 0.0, 255.0));
        }
    }
    return out;
}

/// Frames from an explicit file list; inputs larger than the configured size
/// are box-filtered down to it.
inline std::vector<Frame> read_frames(const std::vector<std::string>& files, FrameFormat format,
                                      int width, int height) {
    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (const auto& f : files) {
        if (!std::filesystem::exists(f)) throw IoError(f + ": no such file");
        Frame fr = format == FrameFormat::pgm ? read_pgm(f) : read_y8(f, width, height);
        if (fr.width != width || fr.height != height) fr = downsample(fr, width, height);
        frames.push_back(std::move(fr));
    }
    return frames;
}

/// Frames from a directory (matching files, lexicographic order) or one file.
inline std::vector<Frame> read_frames(const std::string& path, FrameFormat format, int width,
                                      int height) {
    namespace fs = std::filesystem;
    const std::string ext = format == FrameFormat::pgm ? ".pgm" : ".y8";
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path))
            if (e.is_regular_file() && e.path().extension() == ext)
                files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
    } else if (fs::exists(path)) {
        files.push_back(path);
    } else {
        throw IoError(path + ": no such file or directory");
    }
    return read_frames(files, format, width, height);
}

struct TraceRow {
    long frame = 0;
    double k_raw = 0.0;
    double kappa = 0.0;
    double ffi = 0.0;
    bool spike = false;
    bool c_lgmd = false;
    bool c_ffi = false;
    std::string task;  // empty outside the simulator
    std::optional<double> x;
    std::optional<double> y;
};

inline constexpr const char* kTraceHeader = "frame,K,kappa,F,spike,c_lgmd,c_ffi,task,x,y";

inline void write_trace(const std::vector<TraceRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << kTraceHeader << "\n";
    for (const auto& r : rows) {
        out << r.frame << ',' << detail::shortest(r.k_raw) << ',' << detail::shortest(r.kappa)
            << ',' << detail::shortest(r.ffi) << ',' << int(r.spike) << ',' << int(r.c_lgmd)
            << ',' << int(r.c_ffi) << ',' << r.task << ',';
        if (r.x) out << detail::shortest(*r.x);
        out << ',';
        if (r.y) out << detail::shortest(*r.y);
        out << '\n';
    }
    if (!out) throw IoError(path + ": write failed");
}

inline std::vector<TraceRow> read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": no such file");
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw IoError(path + ": missing trace header");
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            cols.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cols.size() != 10) throw IoError(path + ": malformed row '" + line + "'");
        TraceRow r;
        r.frame = std::stol(cols[0]);
        r.k_raw = std::stod(cols[1]);
        r.kappa = std::stod(cols[2]);
        r.ffi = std::stod(cols[3]);
        r.spike = cols[4] == "1";
        r.c_lgmd = cols[5] == "1";
        r.c_ffi = cols[6] == "1";
        r.task = cols[7];
        if (!cols[8].empty()) r.x = std::stod(cols[8]);
        if (!cols[9].empty()) r.y = std::stod(cols[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Flat key = value configuration files ('#' comments, unknown keys rejected).
// ---------------------------------------------------------------------------

struct Config {
    Params params;
    int frame_width = kDefaultFrameWidth;
    int frame_height = kDefaultFrameHeight;
    SimConfig sim;
    StimulusSpec stim_overrides_applied_to(StimulusKind kind) const {
        StimulusSpec s = default_spec(kind);
        for (const auto& [k, v] : stim_overrides) apply_stim_key(s, k, v);
        return s;
    }
    std::vector<std::pair<std::string, double>> stim_overrides;
    std::uint32_t stim_seed_override = 0;
    bool stim_seed_set = false;

    static void apply_stim_key(StimulusSpec& s, const std::string& key, double v) {
        if (key == "stim_frames") s.frames = int(v);
        else if (key == "stim_object") s.object_luminance = v;
        else if (key == "stim_background") s.background_luminance = v;
        else if (key == "stim_softness") s.edge_softness = v;
        else if (key == "stim_loom_start") s.loom_start_frac = v;
        else if (key == "stim_loom_end") s.loom_end_frac = v;
        else if (key == "stim_size") s.translate_size_px = v;
        else if (key == "stim_speed") s.translate_speed_px = v;
        else if (key == "stim_period") s.grating_period_px = int(v);
        else if (key == "stim_drift") s.grating_drift_px = int(v);
        else if (key == "stim_pan") s.rotate_pan_px = int(v);
        else if (key == "stim_stripe_period") s.rotate_stripe_period_px = int(v);
        else if (key == "stim_band_rows") s.rotate_band_rows = int(v);
        else if (key == "stim_seed") s.seed = static_cast<std::uint32_t>(v);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// key = value lines; returns (key, value, line number) triples.
inline std::vector<std::tuple<std::string, std::string, int>> parse_kv_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": no such file");
    std::vector<std::tuple<std::string, std::string, int>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw IoError(path + ":" + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(key, val, lineno);
    }
    return out;
}

inline double parse_double(const std::string& path, int lineno, const std::string& val) {
    try {
        std::size_t used = 0;
        const double d = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
        return d;
    } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) + ": bad numeric value '" + val + "'");
    }
}

}  // namespace detail

inline const std::vector<std::string>& stim_override_keys() {
    static const std::vector<std::string> keys = {
        "stim_frames", "stim_object", "stim_background", "stim_softness", "stim_loom_start",
        "stim_loom_end", "stim_size", "stim_speed", "stim_period", "stim_drift",
        "stim_pan", "stim_stripe_period", "stim_band_rows", "stim_seed"};
    return keys;
}

/// Parses network + simulator + stimulus settings; unspecified keys keep
/// defaults, unknown keys and validation violations are errors.
inline Config load_config(const std::string& path) {
    Config cfg;
    for (const auto& [key, val, lineno] : detail::parse_kv_file(path)) {
        auto num = [&, l = lineno, v = val] { return detail::parse_double(path, l, v); };
        if (key == "W_I") cfg.params.W_I = num();
        else if (key == "C_w") cfg.params.C_w = num();
        else if (key == "T_FFI") cfg.params.T_FFI = num();
        else if (key == "T_de") cfg.params.T_de = num();
        else if (key == "T_s") cfg.params.T_s = num();
        else if (key == "n_cell") cfg.params.n_cell = int(num());
        else if (key == "n_sp") cfg.params.n_sp = int(num());
        else if (key == "C_1") cfg.params.C_1 = num();
        else if (key == "C_2") cfg.params.C_2 = num();
        else if (key == "r") cfg.params.r = int(num());
        else if (key == "frame_width") cfg.frame_width = int(num());
        else if (key == "frame_height") cfg.frame_height = int(num());
        else if (key == "norm_mode") {
            if (val == "literal") cfg.params.norm_mode = NormMode::literal;
            else if (val == "reconstructed") cfg.params.norm_mode = NormMode::reconstructed;
            else throw IoError(path + ":" + std::to_string(lineno) + ": unknown norm_mode '" + val + "'");
        } else if (key == "border_mode") {
            if (val != "zero_pad")
                throw IoError(path + ":" + std::to_string(lineno) + ": unknown border_mode '" + val + "'");
        } else if (key == "fps") cfg.sim.fps = num();
        else if (key == "tau") cfg.sim.tau = num();
        else if (key == "cruise_speed") cfg.sim.cruise_speed = num();
        else if (key == "lateral_shift") cfg.sim.lateral_shift = num();
        else if (key == "slowdown_factor") cfg.sim.slowdown_factor = num();
        else if (key == "heading_rate_deg") cfg.sim.heading_rate = num() * kPi / 180.0;
        else if (key == "reach_tol") cfg.sim.reach_tol = num();
        else if (key == "max_frames") cfg.sim.max_frames = int(num());
        else if (key == "patrol") cfg.sim.patrol = num() != 0.0;
        else {
            const auto& sk = stim_override_keys();
            if (std::find(sk.begin(), sk.end(), key) != sk.end()) {
                cfg.stim_overrides.emplace_back(key, num());
            } else {
                throw IoError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        }
    }
    const auto v = params_validate(cfg.params, cfg.frame_width, cfg.frame_height);
    if (!v.empty()) {
        std::string msg = path + ": invalid configuration:";
        for (const auto& s : v) msg += " " + s + ";";
        throw IoError(msg);
    }
    if (cfg.sim.fps <= 0 || cfg.sim.tau <= 0 || cfg.sim.cruise_speed <= 0 ||
        cfg.sim.max_frames <= 0)
        throw IoError(path + ": fps, tau, cruise_speed and max_frames must be positive");
    return cfg;
}

inline void save_config(const Params& p, int frame_w, int frame_h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "W_I = " << detail::shortest(p.W_I) << "\n";
    out << "C_w = " << detail::shortest(p.C_w) << "\n";
    out << "T_FFI = " << detail::shortest(p.T_FFI) << "\n";
    out << "T_de = " << detail::shortest(p.T_de) << "\n";
    out << "T_s = " << detail::shortest(p.T_s) << "\n";
    out << "n_cell = " << p.n_cell << "\n";
    out << "n_sp = " << p.n_sp << "\n";
    out << "C_1 = " << detail::shortest(p.C_1) << "\n";
    out << "C_2 = " << detail::shortest(p.C_2) << "\n";
    out << "r = " << p.r << "\n";
    out << "norm_mode = " << (p.norm_mode == NormMode::literal ? "literal" : "reconstructed")
        << "\n";
    out << "border_mode = zero_pad\n";
    out << "frame_width = " << frame_w << "\n";
    out << "frame_height = " << frame_h << "\n";
}

/// Arena description file, same flat format.
inline ArenaWorld load_arena(const std::string& path) {
    ArenaWorld w;
    for (const auto& [key, val, lineno] : detail::parse_kv_file(path)) {
        const double v = detail::parse_double(path, lineno, val);
        if (key == "room_w") w.room_w = v;
        else if (key == "room_h") w.room_h = v;
        else if (key == "box_x") w.box_cx = v;
        else if (key == "box_y") w.box_cy = v;
        else if (key == "box_size") w.box_half = v / 2.0;
        else if (key == "box_height") w.box_height = v;
        else if (key == "box_period") w.box_period = v;
        else if (key == "box_jitter") w.box_jitter = v;
        else if (key == "box_tone_a") w.box_tone_a = v;
        else if (key == "box_tone_b") w.box_tone_b = v;
        else if (key == "wall_period") w.wall_period = v;
        else if (key == "wall_height") w.wall_height = v;
        else if (key == "wall_tone_a") w.wall_tone_a = v;
        else if (key == "wall_tone_b") w.wall_tone_b = v;
        else if (key == "background") w.background = v;
        else if (key == "cam_height") w.cam_height = v;
        else if (key == "start_x") w.start.x = v;
        else if (key == "start_y") w.start.y = v;
        else if (key == "dest_x") w.destination.x = v;
        else if (key == "dest_y") w.destination.y = v;
        else if (key == "vehicle_radius") w.vehicle_radius = v;
        else if (key == "texture_seed") w.texture_seed = static_cast<std::uint32_t>(v);
        else throw IoError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    const auto errs = validate_world(w);
    if (!errs.empty()) {
        std::string msg = path + ": invalid arena:";
        for (const auto& s : errs) msg += " " + s + ";";
        throw IoError(msg);
    }
    return w;
}

}  // namespace lgmd
