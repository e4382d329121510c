#pragma once

#include <algorithm>
#include <cmath>
#include <deque>

namespace lgmd {

/// Rolling spike history; holds at most `capacity` entries, oldest evicted.
class SpikeWindow {
public:
    SpikeWindow() = default;
    explicit SpikeWindow(int capacity) : capacity_(capacity) {}

    void push(bool spike) {
        entries_.push_back(spike);
        while (static_cast<int>(entries_.size()) > capacity_) entries_.pop_front();
    }
    int size() const { return static_cast<int>(entries_.size()); }
    int capacity() const { return capacity_; }
    bool newest(int i) const { return entries_[entries_.size() - 1 - i]; }

private:
    int capacity_ = 5;
    std::deque<bool> entries_;
};

inline bool spike(double kappa, double t_s) { return kappa >= t_s; }

/// True iff the window holds at least n_sp entries and the newest n_sp are all true.
inline bool collision_confirm(const SpikeWindow& w, int n_sp) {
    if (w.size() < n_sp) return false;
    for (int i = 0; i < n_sp; ++i)
        if (!w.newest(i)) return false;
    return true;
}

inline bool ffi_trigger(double f_f, double t_ffi) { return f_f >= t_ffi; }

enum class Task { cruise, avoid, slowdown };

inline const char* task_name(Task t) {
    switch (t) {
        case Task::cruise: return "cruise";
        case Task::avoid: return "avoid";
        default: return "slowdown";
    }
}

/// Velocity setpoints in the vehicle frame; lateral positive is rightward.
struct MotionCommand {
    double forward_mps = 0.0;
    double lateral_mps = 0.0;
};

struct SchedulerConfig {
    double cruise_speed = 0.5;
    double slowdown_factor = 0.5;
    int stop_frames = 27;   // braking segment of the avoid maneuver
    int shift_frames = 69;  // lateral segment of the avoid maneuver
};

enum class CruiseTarget { destination, start };

struct TaskState {
    Task task = Task::cruise;
    double avoid_progress = 0.0;  // lateral-shift fraction, nonzero only while avoiding
    CruiseTarget cruise_target = CruiseTarget::destination;

    // internals
    bool prev_c_lgmd = false;
    bool avoid_stopping = false;
    int phase_frames_left = 0;
    double slow_speed = 0.0;
};

/// One scheduler tick. FFI outranks the LGMD; an avoid runs to completion and
/// ignores further excitation; a new maneuver needs a fresh rising edge of
/// c_lgmd seen while cruising.
inline MotionCommand scheduler_step(TaskState& ts, bool c_lgmd, bool c_ffi,
                                    const SchedulerConfig& cfg) {
    const bool rising = c_lgmd && !ts.prev_c_lgmd;
    ts.prev_c_lgmd = c_lgmd;

    switch (ts.task) {
        case Task::cruise:
            if (c_ffi) {
                ts.task = Task::slowdown;
                ts.slow_speed = cfg.cruise_speed * cfg.slowdown_factor;
                return {ts.slow_speed, 0.0};
            }
            if (rising) {
                ts.task = Task::avoid;
                ts.avoid_stopping = true;
                ts.phase_frames_left = cfg.stop_frames;
                ts.avoid_progress = 0.0;
                return {0.0, 0.0};
            }
            return {cfg.cruise_speed, 0.0};

        case Task::slowdown:
            if (c_ffi) {
                ts.slow_speed *= cfg.slowdown_factor;
                return {ts.slow_speed, 0.0};
            }
            ts.task = Task::cruise;
            return {cfg.cruise_speed, 0.0};

        case Task::avoid:
        default:
            if (ts.avoid_stopping) {
                if (--ts.phase_frames_left == 0) {
                    ts.avoid_stopping = false;
                    ts.phase_frames_left = cfg.shift_frames;
                }
                return {0.0, 0.0};
            }
            --ts.phase_frames_left;
            ts.avoid_progress =
                1.0 - static_cast<double>(ts.phase_frames_left) / cfg.shift_frames;
            if (ts.phase_frames_left == 0) {
                ts.task = Task::cruise;
                ts.avoid_progress = 0.0;
                return {cfg.cruise_speed, 0.0};
            }
            return {0.0, cfg.cruise_speed};
    }
}

inline void swap_cruise_target(TaskState& ts) {
    ts.cruise_target = ts.cruise_target == CruiseTarget::destination ? CruiseTarget::start
                                                                     : CruiseTarget::destination;
}

}  // namespace lgmd
