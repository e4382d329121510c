// Command-line frontend: offline detection, stimulus generation, closed-loop
// arena simulation and a throughput benchmark.
//
// Exit codes: 0 success (sim: reached), 1 usage/config/io error,
// 2 detect confirmed a collision, 3 sim collided, 4 sim timeout/out-of-bounds.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lgmd/lgmd.hpp"

namespace fs = std::filesystem;
using namespace lgmd;

namespace {

Config load_config_or_default(const std::string& path) {
    if (path.empty()) return Config{};
    return load_config(path);
}

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%05d.pgm", index);
    return buf;
}

int run_detect(const std::string& input, const std::string& format, const std::string& config_path,
               const std::string& trace_path) {
    const Config cfg = load_config_or_default(config_path);
    const FrameFormat fmt = format == "y8" ? FrameFormat::raw_y8 : FrameFormat::pgm;
    const auto frames = read_frames(input, fmt, cfg.frame_width, cfg.frame_height);
    if (frames.empty()) throw IoError(input + ": no frames found");

    LayerState state = make_layer_state(cfg.frame_width, cfg.frame_height, cfg.params);
    std::vector<TraceRow> rows;
    rows.reserve(frames.size());
    long spikes = 0, first_lgmd = -1, first_ffi = -1;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const FrameResult r = pipeline_step(state, frames[i], cfg.params);
        spikes += r.spike;
        if (first_lgmd < 0 && r.c_lgmd) first_lgmd = long(i);
        if (first_ffi < 0 && r.c_ffi) first_ffi = long(i);
        rows.push_back({long(i), r.k_raw, r.kappa, r.ffi, r.spike, r.c_lgmd, r.c_ffi, "",
                        std::nullopt, std::nullopt});
    }
    if (!trace_path.empty()) write_trace(rows, trace_path);
    std::cout << "frames=" << frames.size() << " spikes=" << spikes
              << " first_c_lgmd=" << first_lgmd << " first_c_ffi=" << first_ffi << "\n";
    return first_lgmd >= 0 ? 2 : 0;
}

int run_stim(const std::string& kind_name, int frames_opt, long seed_opt,
             const std::string& config_path, const std::string& out_dir) {
    StimulusKind kind;
    if (kind_name == "looming") kind = StimulusKind::looming;
    else if (kind_name == "translate") kind = StimulusKind::translate;
    else if (kind_name == "grating") kind = StimulusKind::grating;
    else if (kind_name == "rotate") kind = StimulusKind::rotate;
    else throw IoError("unknown stimulus kind '" + kind_name + "'");

    const Config cfg = load_config_or_default(config_path);
    StimulusSpec spec = cfg.stim_overrides_applied_to(kind);
    spec.width = cfg.frame_width;
    spec.height = cfg.frame_height;
    if (frames_opt > 0) spec.frames = frames_opt;
    if (seed_opt >= 0) spec.seed = static_cast<std::uint32_t>(seed_opt);
    const auto errs = validate_spec(spec);
    if (!errs.empty()) throw IoError("invalid stimulus spec: " + errs.front());

    fs::create_directories(out_dir);
    const auto seq = generate(spec);
    for (std::size_t i = 0; i < seq.size(); ++i)
        write_pgm(seq[i], (fs::path(out_dir) / frame_name(int(i))).string());

    std::ofstream man(fs::path(out_dir) / "manifest.txt");
    man << "kind = " << stimulus_kind_name(kind) << "\n";
    man << "frames = " << spec.frames << "\n";
    man << "width = " << spec.width << "\n";
    man << "height = " << spec.height << "\n";
    man << "object = " << spec.object_luminance << "\n";
    man << "background = " << spec.background_luminance << "\n";
    man << "softness = " << spec.edge_softness << "\n";
    switch (kind) {
        case StimulusKind::looming:
            man << "loom_start = " << spec.loom_start_frac << "\n";
            man << "loom_end = " << spec.loom_end_frac << "\n";
            break;
        case StimulusKind::translate:
            man << "size = " << spec.translate_size_px << "\n";
            man << "speed = " << spec.translate_speed_px << "\n";
            break;
        case StimulusKind::grating:
            man << "period = " << spec.grating_period_px << "\n";
            man << "drift = " << spec.grating_drift_px << "\n";
            break;
        case StimulusKind::rotate:
            man << "pan = " << spec.rotate_pan_px << "\n";
            man << "stripe_period = " << spec.rotate_stripe_period_px << "\n";
            man << "band_rows = " << spec.rotate_band_rows << "\n";
            man << "seed = " << spec.seed << "\n";
            break;
    }
    std::cout << "wrote " << seq.size() << " frames to " << out_dir << "\n";
    return 0;
}

std::vector<TraceRow> trace_rows(const EpisodeTrace& trace) {
    std::vector<TraceRow> rows;
    rows.reserve(trace.records.size());
    for (const auto& rec : trace.records)
        rows.push_back({rec.frame, rec.result.k_raw, rec.result.kappa, rec.result.ffi,
                        rec.result.spike, rec.result.c_lgmd, rec.result.c_ffi,
                        task_name(rec.task), rec.pose.position.x, rec.pose.position.y});
    return rows;
}

int outcome_exit(Outcome o) {
    switch (o) {
        case Outcome::reached: return 0;
        case Outcome::collided: return 3;
        default: return 4;
    }
}

int run_sim(const std::string& arena_path, const std::string& config_path, long seed,
            const std::string& trace_path, const std::string& frames_out, int episodes,
            bool no_detect) {
    if (episodes > 1 && !frames_out.empty())
        throw IoError("--frames-out conflicts with --episodes > 1");
    const Config cfg = load_config_or_default(config_path);
    ArenaWorld world = arena_path.empty() ? ArenaWorld{} : load_arena(arena_path);
    SimConfig sim = cfg.sim;
    sim.detect = !no_detect;

    int exit_code = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        const long ep_seed = seed + ep;
        ArenaWorld w = world;
        std::mt19937 rng(static_cast<std::uint32_t>(ep_seed));
        std::uniform_real_distribution<double> offs(-0.5, 0.5);
        w.start.y += offs(rng);

        const EpisodeTrace trace = run_episode(w, cfg.params, sim);
        const TrajectoryReport rep = check_trajectory(trace, w, sim.fps);

        if (!trace_path.empty()) {
            std::string path = trace_path;
            if (episodes > 1) {
                const auto dot = path.rfind('.');
                const std::string suffix = "_seed" + std::to_string(ep_seed);
                path = dot == std::string::npos ? path + suffix
                                                : path.substr(0, dot) + suffix + path.substr(dot);
            }
            write_trace(trace_rows(trace), path);
        }
        if (!frames_out.empty()) {
            fs::create_directories(frames_out);
            for (const auto& rec : trace.records)
                write_pgm(render_view(rec.pose, w, kDefaultFrameWidth, kDefaultFrameHeight),
                          (fs::path(frames_out) / frame_name(rec.frame)).string());
        }
        std::cout << "episode seed=" << ep_seed << " outcome=" << outcome_name(trace.outcome)
                  << " frames=" << trace.end_frame << " start_y=" << w.start.y
                  << " min_clearance=" << rep.min_clearance
                  << " detection_frame=" << rep.detection_frame
                  << " frames_before_impact=" << rep.frames_before_impact
                  << " maneuvers=" << rep.maneuvers
                  << (rep.detected ? "" : " undetected") << "\n";
        exit_code = std::max(exit_code, outcome_exit(trace.outcome));
    }
    return exit_code;
}

int run_bench(long frames, const std::string& config_path) {
    if (frames <= 0) throw IoError("bench: --frames must be positive");
    const Config cfg = load_config_or_default(config_path);
    const Params& params = cfg.params;
    StimulusSpec spec = default_spec(StimulusKind::looming);
    spec.width = cfg.frame_width;
    spec.height = cfg.frame_height;
    spec.frames = 200;
    const auto seq = gen_looming(spec);

    LayerState state = make_layer_state(spec.width, spec.height, params);
    double checksum = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (long i = 0; i < frames; ++i) {
        const FrameResult r = pipeline_step(state, seq[i % seq.size()], params);
        checksum += r.k_raw;
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    const double fps = frames / secs;
    std::printf("frames=%ld elapsed_s=%.3f frames_per_second=%.1f us_per_frame=%.2f checksum=%.0f\n",
                frames, secs, fps, 1e6 * secs / frames, checksum);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LGMD looming detector: offline replay, stimuli, arena simulation, benchmark"};
    app.require_subcommand(1);

    std::string input, format = "pgm", config_path, trace_path;
    auto* detect = app.add_subcommand("detect", "run the detector over recorded frames");
    detect->add_option("--input", input, "frame directory or single file")->required();
    detect->add_option("--format", format, "pgm|y8")->check(CLI::IsMember({"pgm", "y8"}));
    detect->add_option("--config", config_path, "key=value configuration file");
    detect->add_option("--trace", trace_path, "output CSV trace");

    std::string kind, out_dir;
    int stim_frames = 0;
    long stim_seed = -1;
    auto* stim = app.add_subcommand("stim", "generate a synthetic stimulus sequence");
    stim->add_option("--kind", kind, "looming|translate|grating|rotate")->required();
    stim->add_option("--frames", stim_frames, "frame count override");
    stim->add_option("--seed", stim_seed, "texture seed override");
    stim->add_option("--config", config_path, "key=value configuration file");
    stim->add_option("--out", out_dir, "output directory")->required();

    std::string arena_path, frames_out;
    long sim_seed = 1;
    int episodes = 1;
    bool no_detect = false;
    auto* sim = app.add_subcommand("sim", "closed-loop arena episode");
    sim->add_option("--arena", arena_path, "arena description file");
    sim->add_option("--config", config_path, "key=value configuration file");
    sim->add_option("--seed", sim_seed, "episode seed (start-offset sampling)");
    sim->add_option("--trace", trace_path, "output CSV trace");
    sim->add_option("--frames-out", frames_out, "dump rendered frames to directory");
    sim->add_option("--episodes", episodes, "number of seeded episodes")->check(CLI::PositiveNumber);
    sim->add_flag("--no-detect", no_detect, "disable the detector (negative control)");

    long bench_frames = 0;
    auto* bench = app.add_subcommand("bench", "pipeline throughput benchmark");
    bench->add_option("--frames", bench_frames, "frames to process")->required();
    bench->add_option("--config", config_path, "key=value configuration file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) return run_detect(input, format, config_path, trace_path);
        if (stim->parsed()) return run_stim(kind, stim_frames, stim_seed, config_path, out_dir);
        if (sim->parsed())
            return run_sim(arena_path, config_path, sim_seed, trace_path, frames_out, episodes,
                           no_detect);
        if (bench->parsed()) return run_bench(bench_frames, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
