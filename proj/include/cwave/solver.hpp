#pragma once

#include <optional>
#include <vector>

#include "cwave/frames.hpp"
#include "cwave/specialfn.hpp"

namespace cwave::solver {

/// Smooth compactly supported profile: exp(1 - 1/(1-s^2)) for |s| < 1,
/// zero otherwise; value 1 at s = 0.
double bump(double s);

/// Initial data: component amplitudes applied to bump(r/R). The first
/// equation requires u1 >= u0 >= 0; the damped-equation data must be
/// nontrivial in the component the blow-up hypotheses name (v0 under
/// scale-invariant damping, v1 otherwise).
struct DataProfile {
    double R = 1.0;
    double u0_amp = 0.5;
    double u1_amp = 1.0;
    double v0_amp = 1.0;
    double v1_amp = 1.0;
};

struct GridSpec {
    double dr = 1.0 / 64;
    double r_max = 0.0;  // 0 = auto: R + t_max + margin
};

struct TimeSpec {
    double cfl = 0.5;
    double dt0 = 0.0;  // 0 = cfl * dr
    double t_max = 10.0;
    double blowup_threshold = 1e8;  // relative to the initial velocity peak
    double dt_floor = 1e-9;
    double growth_limit = 1.1;  // retry with dt/2 when the peak grows faster
};

struct SnapshotSpec {
    double dt_snap = 0.0;  // 0 = 50 * dt0
    bool enabled = true;
};

struct ModelConfig {
    int n = 1;
    frames::ExponentPair exps{2.0, 2.0};
    DampingSpec damping;  // second equation; the first carries constant damping 1
    double epsilon = 0.3;
    DataProfile data;
    GridSpec grid;
    TimeSpec time;
    SnapshotSpec snap;
    bool nonlinear = true;  // false switches both source terms off (diagnostics)

    void validate() const;
    double dt0() const { return time.dt0 > 0.0 ? time.dt0 : time.cfl * grid.dr; }
    double dt_snap() const { return snap.dt_snap > 0.0 ? snap.dt_snap : 50.0 * dt0(); }
    double r_max() const;
};

/// Collocated fields on the uniform radial grid r_i = i dr at time t.
/// Everything beyond `r_active` (support bound R + t plus margin) is zero.
struct RadialState {
    double t = 0.0;
    double dr = 0.0;
    double r_active = 0.0;
    std::vector<double> u, du, v, dv;

    size_t size() const { return u.size(); }
    int active_nodes() const;
    double peak_velocity() const;
};

enum class RunStatus { CompletedToTmax, BlowupDetected, StepFloorHit };
const char* status_name(RunStatus s);

struct BlowupReport {
    RunStatus status = RunStatus::CompletedToTmax;
    std::optional<double> t_blowup_estimate;
    double max_abs_du = 0.0;  // running maxima over the whole run
    double max_abs_dv = 0.0;
    double initial_peak = 0.0;
    double last_t = 0.0;
    double last_dt = 0.0;
    long steps = 0;
};

struct RunResult {
    BlowupReport report;
    std::vector<RadialState> snapshots;  // truncated to the active window
};

RadialState init_state(const ModelConfig& config);

/// One explicit time step (kick-drift-kick on the first-order system;
/// damping handled pointwise semi-implicitly, radial Laplacian regularized
/// to n d_rr at the origin). Requires dt <= cfl * dr.
RadialState step(const RadialState& state, const ModelConfig& config, double dt);

/// Integrate with adaptive step halving and blow-up detection. The blow-up
/// time estimate comes from a least-squares fit of 1/peak ~ k (T* - t) over
/// the last stable window.
RunResult run(const ModelConfig& config);

}  // namespace cwave::solver
