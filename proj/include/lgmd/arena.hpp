#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "decision.hpp"
#include "pipeline.hpp"

namespace lgmd {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFovH = 70.0 * kPi / 180.0;  // horizontal viewing angle

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// 2-D room with one textured box obstacle. The box checker's line phases are
/// jittered from texture_seed so edge crossings stay decorrelated; a
/// non-positive box_half means no obstacle.
struct ArenaWorld {
    double room_w = 6.0;
    double room_h = 6.0;
    double box_cx = 3.0;
    double box_cy = 3.0;
    double box_half = 0.25;
    double box_height = 1.0;
    double box_period = 0.05;
    double box_jitter = 0.3;  // fraction of box_period
    double box_tone_a = 0.0;
    double box_tone_b = 255.0;
    double wall_period = 0.5;
    double wall_height = 2.0;
    double wall_tone_a = 140.0;
    double wall_tone_b = 210.0;
    double background = 230.0;
    double cam_height = 0.5;
    Vec2 start{0.7, 3.0};
    Vec2 destination{5.3, 3.0};
    double vehicle_radius = 0.17;
    std::uint32_t texture_seed = 9;

    bool has_obstacle() const { return box_half > 0.0; }
};

inline std::vector<std::string> validate_world(const ArenaWorld& w) {
    std::vector<std::string> v;
    if (w.room_w <= 0 || w.room_h <= 0) v.push_back("room dimensions must be positive");
    if (w.vehicle_radius <= 0) v.push_back("vehicle_radius must be positive");
    if (w.has_obstacle()) {
        if (w.box_cx - w.box_half <= 0 || w.box_cx + w.box_half >= w.room_w ||
            w.box_cy - w.box_half <= 0 || w.box_cy + w.box_half >= w.room_h)
            v.push_back("obstacle must lie strictly inside the room");
        const double inflated = w.box_half + w.vehicle_radius;
        auto inside_inflated = [&](const Vec2& p) {
            return std::abs(p.x - w.box_cx) <= inflated && std::abs(p.y - w.box_cy) <= inflated;
        };
        if (inside_inflated(w.start)) v.push_back("start lies inside the inflated obstacle");
        if (inside_inflated(w.destination))
            v.push_back("destination lies inside the inflated obstacle");
    }
    auto in_room = [&](const Vec2& p) {
        return p.x >= 0 && p.x <= w.room_w && p.y >= 0 && p.y <= w.room_h;
    };
    if (!in_room(w.start)) v.push_back("start outside room bounds");
    if (!in_room(w.destination)) v.push_back("destination outside room bounds");
    return v;
}

struct Pose {
    Vec2 position;
    double heading = 0.0;  // radians, world frame
    double forward_speed = 0.0;
    double lateral_speed = 0.0;  // positive right
};

struct SimConfig {
    double fps = 30.0;
    double tau = 0.3;  // first-order velocity time constant
    double cruise_speed = 0.5;
    double lateral_shift = 1.0;
    double slowdown_factor = 0.5;
    double heading_rate = kPi / 4;  // cruise re-aim limit, rad/s
    double reach_tol = 0.15;
    int max_frames = 2000;
    bool detect = true;
    bool patrol = false;  // keep shuttling between endpoints instead of stopping
};

inline SchedulerConfig make_scheduler_config(const SimConfig& sim) {
    SchedulerConfig cfg;
    cfg.cruise_speed = sim.cruise_speed;
    cfg.slowdown_factor = sim.slowdown_factor;
    cfg.stop_frames = static_cast<int>(std::ceil(3.0 * sim.tau * sim.fps));
    cfg.shift_frames = static_cast<int>(
        std::ceil((sim.lateral_shift / sim.cruise_speed + sim.tau) * sim.fps));
    return cfg;
}

namespace detail {

inline double hash01(long k, std::uint32_t salt) {
    std::uint32_t h = static_cast<std::uint32_t>(k) * 0x9E3779B9u + salt * 0x85EBCA6Bu;
    h ^= h >> 16;
    h *= 0x045D9F3Bu;
    h ^= h >> 16;
    return h / 4294967296.0;
}

/// Cell index of u on a grid with jittered line positions.
inline long jittered_cell(double u, double period, double jitter, std::uint32_t salt) {
    const long k = static_cast<long>(std::floor(u / period));
    for (long kk = k - 1; kk <= k + 1; ++kk) {
        const double e0 = kk * period + (hash01(kk, salt) - 0.5) * jitter * period;
        const double e1 = (kk + 1) * period + (hash01(kk + 1, salt) - 0.5) * jitter * period;
        if (u >= e0 && u < e1) return kk;
    }
    return k;
}

struct RayHit {
    double dist = 0.0;
    bool box = false;
    double u = 0.0;  // texture coordinate along the hit surface
};

inline RayHit cast_ray(const ArenaWorld& w, double px, double py, double ang) {
    const double dx = std::cos(ang), dy = std::sin(ang);
    RayHit hit;
    hit.dist = std::numeric_limits<double>::max();
    auto consider_wall = [&](double t, double u) {
        if (t > 1e-9 && t < hit.dist) {
            hit.dist = t;
            hit.box = false;
            hit.u = u;
        }
    };
    if (dx < 0) consider_wall((0.0 - px) / dx, py + ((0.0 - px) / dx) * dy);
    if (dx > 0) consider_wall((w.room_w - px) / dx, py + ((w.room_w - px) / dx) * dy);
    if (dy < 0) consider_wall((0.0 - py) / dy, px + ((0.0 - py) / dy) * dx);
    if (dy > 0) consider_wall((w.room_h - py) / dy, px + ((w.room_h - py) / dy) * dx);

    if (w.has_obstacle()) {
        const double x0 = w.box_cx - w.box_half, x1 = w.box_cx + w.box_half;
        const double y0 = w.box_cy - w.box_half, y1 = w.box_cy + w.box_half;
        double tmin = -std::numeric_limits<double>::max();
        double tmax = std::numeric_limits<double>::max();
        bool ok = true, enter_on_x = false;
        if (dx != 0.0) {
            const double ta = (x0 - px) / dx, tb = (x1 - px) / dx;
            const double lo = std::min(ta, tb), hi = std::max(ta, tb);
            if (lo > tmin) { tmin = lo; enter_on_x = true; }
            tmax = std::min(tmax, hi);
        } else if (px < x0 || px > x1) {
            ok = false;
        }
        if (dy != 0.0) {
            const double ta = (y0 - py) / dy, tb = (y1 - py) / dy;
            const double lo = std::min(ta, tb), hi = std::max(ta, tb);
            if (lo > tmin) { tmin = lo; enter_on_x = false; }
            tmax = std::min(tmax, hi);
        } else if (py < y0 || py > y1) {
            ok = false;
        }
        if (ok && tmin <= tmax && tmin > 1e-9 && tmin < hit.dist) {
            hit.dist = tmin;
            hit.box = true;
            hit.u = enter_on_x ? py + tmin * dy : px + tmin * dx;
        }
    }
    return hit;
}

}  // namespace detail

/// Column raycast view: one ray per column over a 70-degree horizontal span,
/// vertical extent from the surface height over distance, two-tone checkers.
inline Frame render_view(const Pose& pose, const ArenaWorld& world, int w, int h) {
    const double px = pose.position.x, py = pose.position.y;
    if (px < 0 || px > world.room_w || py < 0 || py > world.room_h)
        throw std::invalid_argument("render_view: pose outside room bounds");
    const double fov_v = kFovH * h / w;
    std::vector<double> tan_row(h);
    for (int r = 0; r < h; ++r) tan_row[r] = std::tan(fov_v / 2 - (r + 0.5) * fov_v / h);
    const std::uint8_t bg = static_cast<std::uint8_t>(world.background);
    Frame img(w, h);
    for (int c = 0; c < w; ++c) {
        const double ang = pose.heading + kFovH / 2 - (c + 0.5) * kFovH / w;
        const auto hit = detail::cast_ray(world, px, py, ang);
        for (int r = 0; r < h; ++r) {
            const double z = world.cam_height + hit.dist * tan_row[r];
            std::uint8_t tone = bg;
            if (hit.box) {
                if (z >= 0.0 && z <= world.box_height) {
                    const long ku = detail::jittered_cell(hit.u, world.box_period,
                                                          world.box_jitter,
                                                          world.texture_seed * 2 + 1);
                    const long kz = detail::jittered_cell(z, world.box_period, world.box_jitter,
                                                          world.texture_seed * 2 + 2);
                    tone = static_cast<std::uint8_t>(((ku + kz) & 1) ? world.box_tone_b
                                                                     : world.box_tone_a);
                }
            } else if (z >= 0.0 && z <= world.wall_height) {
                const long ku = static_cast<long>(std::floor(hit.u / world.wall_period));
                const long kz = static_cast<long>(std::floor(z / world.wall_period));
                tone = static_cast<std::uint8_t>(((ku + kz) & 1) ? world.wall_tone_b
                                                                 : world.wall_tone_a);
            }
            img.at(c, r) = tone;
        }
    }
    return img;
}

/// First-order velocity tracking toward the commanded setpoints; position
/// integrates the updated velocity, heading is untouched.
inline Pose dynamics_step(const Pose& pose, const MotionCommand& cmd, double dt, double tau) {
    if (dt <= 0.0) throw std::invalid_argument("dynamics_step: dt must be positive");
    Pose out = pose;
    const double alpha = 1.0 - std::exp(-dt / tau);
    out.forward_speed += (cmd.forward_mps - out.forward_speed) * alpha;
    out.lateral_speed += (cmd.lateral_mps - out.lateral_speed) * alpha;
    const double ch = std::cos(out.heading), sh = std::sin(out.heading);
    out.position.x += (out.forward_speed * ch + out.lateral_speed * sh) * dt;
    out.position.y += (out.forward_speed * sh - out.lateral_speed * ch) * dt;
    return out;
}

enum class Outcome { reached, collided, out_of_bounds, timeout };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::reached: return "reached";
        case Outcome::collided: return "collided";
        case Outcome::out_of_bounds: return "out_of_bounds";
        default: return "timeout";
    }
}

struct EpisodeRecord {
    int frame = 0;
    Pose pose;
    FrameResult result;
    Task task = Task::cruise;
    double avoid_progress = 0.0;
};

struct EpisodeTrace {
    std::vector<EpisodeRecord> records;
    Outcome outcome = Outcome::timeout;
    int end_frame = 0;
};

namespace detail {

inline bool inside_inflated(const ArenaWorld& w, const Vec2& p) {
    if (!w.has_obstacle()) return false;
    const double inflated = w.box_half + w.vehicle_radius;
    return std::abs(p.x - w.box_cx) <= inflated && std::abs(p.y - w.box_cy) <= inflated;
}

inline double wrap_angle(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    return a;
}

}  // namespace detail

/// Closed loop at fps frames per second of simulated time:
/// render -> detector -> scheduler -> dynamics, until an outcome.
inline EpisodeTrace run_episode(const ArenaWorld& world, const Params& params,
                                const SimConfig& sim) {
    {
        const auto wv = validate_world(world);
        if (!wv.empty()) throw std::invalid_argument("invalid arena: " + wv.front());
        const auto pv = params_validate(params, kDefaultFrameWidth, kDefaultFrameHeight);
        if (!pv.empty()) throw std::invalid_argument("invalid params: " + pv.front());
    }
    const double dt = 1.0 / sim.fps;
    const SchedulerConfig sched_cfg = make_scheduler_config(sim);

    EpisodeTrace trace;
    Pose pose;
    pose.position = world.start;
    Vec2 target = world.destination;
    pose.heading = std::atan2(target.y - pose.position.y, target.x - pose.position.x);

    LayerState state = make_layer_state(kDefaultFrameWidth, kDefaultFrameHeight, params);
    TaskState ts;

    for (int f = 0; f < sim.max_frames; ++f) {
        const Vec2 p = pose.position;
        if (p.x < 0 || p.x > world.room_w || p.y < 0 || p.y > world.room_h) {
            trace.outcome = Outcome::out_of_bounds;
            trace.end_frame = f;
            return trace;
        }
        if (detail::inside_inflated(world, p) || p.x < world.vehicle_radius ||
            p.x > world.room_w - world.vehicle_radius || p.y < world.vehicle_radius ||
            p.y > world.room_h - world.vehicle_radius) {
            trace.outcome = Outcome::collided;
            trace.end_frame = f;
            return trace;
        }
        if (std::hypot(p.x - target.x, p.y - target.y) <= sim.reach_tol) {
            if (!sim.patrol) {
                trace.outcome = Outcome::reached;
                trace.end_frame = f;
                return trace;
            }
            swap_cruise_target(ts);
            target = ts.cruise_target == CruiseTarget::destination ? world.destination
                                                                   : world.start;
        }

        const Frame view = render_view(pose, world, kDefaultFrameWidth, kDefaultFrameHeight);
        FrameResult res = pipeline_step(state, view, params);
        const bool c_lgmd = sim.detect && res.c_lgmd;
        const bool c_ffi = sim.detect && res.c_ffi;
        const MotionCommand cmd = scheduler_step(ts, c_lgmd, c_ffi, sched_cfg);

        trace.records.push_back({f, pose, res, ts.task, ts.avoid_progress});

        if (ts.task == Task::cruise) {
            const double desired =
                std::atan2(target.y - pose.position.y, target.x - pose.position.x);
            const double lim = sim.heading_rate * dt;
            const double dh = detail::wrap_angle(desired - pose.heading);
            pose.heading += std::max(-lim, std::min(lim, dh));
        }
        pose = dynamics_step(pose, cmd, dt, sim.tau);
    }
    trace.outcome = Outcome::timeout;
    trace.end_frame = sim.max_frames;
    return trace;
}

struct TrajectoryReport {
    Outcome outcome = Outcome::timeout;
    double min_clearance = std::numeric_limits<double>::infinity();
    bool detected = false;
    int detection_frame = -1;
    double frames_before_impact = -1.0;  // projected at the detection frame
    int maneuvers = 0;
};

/// Euclidean clearance between the vehicle disc and the box footprint.
inline double obstacle_clearance(const ArenaWorld& w, const Vec2& p) {
    if (!w.has_obstacle()) return std::numeric_limits<double>::infinity();
    const double dx = std::max(std::abs(p.x - w.box_cx) - w.box_half, 0.0);
    const double dy = std::max(std::abs(p.y - w.box_cy) - w.box_half, 0.0);
    return std::hypot(dx, dy) - w.vehicle_radius;
}

inline TrajectoryReport check_trajectory(const EpisodeTrace& trace, const ArenaWorld& world,
                                         double fps = 30.0) {
    TrajectoryReport rep;
    rep.outcome = trace.outcome;
    Task prev = Task::cruise;
    for (const auto& rec : trace.records) {
        rep.min_clearance = std::min(rep.min_clearance, obstacle_clearance(world, rec.pose.position));
        if (rec.task == Task::avoid && prev != Task::avoid) ++rep.maneuvers;
        if (!rep.detected && rec.result.c_lgmd) {
            rep.detected = true;
            rep.detection_frame = rec.frame;
            const double vx = rec.pose.forward_speed * std::cos(rec.pose.heading) +
                              rec.pose.lateral_speed * std::sin(rec.pose.heading);
            const double vy = rec.pose.forward_speed * std::sin(rec.pose.heading) -
                              rec.pose.lateral_speed * std::cos(rec.pose.heading);
            const double speed = std::hypot(vx, vy);
            if (world.has_obstacle() && speed > 1e-9) {
                const auto hit = detail::cast_ray(world, rec.pose.position.x,
                                                  rec.pose.position.y, std::atan2(vy, vx));
                if (hit.box)
                    rep.frames_before_impact =
                        std::max(0.0, hit.dist - world.vehicle_radius) / speed * fps;
            }
        }
        prev = rec.task;
    }
    return rep;
}

}  // namespace lgmd
