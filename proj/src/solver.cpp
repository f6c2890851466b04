#include "cwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace cwave::solver {

namespace {
constexpr double kTiny = 1e-300;
}

double bump(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::CompletedToTmax: return "completed_to_tmax";
        case RunStatus::BlowupDetected: return "blowup_detected";
        case RunStatus::StepFloorHit: return "step_floor_hit";
    }
    return "?";
}

void ModelConfig::validate() const {
    if (n < 1) throw std::invalid_argument("ModelConfig: n must be >= 1");
    exps.validate();
    damping.validate();
    if (!(epsilon >= 0.0))
        throw std::invalid_argument("ModelConfig: epsilon must be >= 0");
    if (!(data.R > 0.0)) throw std::invalid_argument("ModelConfig: R must be > 0");
    if (!(data.u0_amp >= 0.0) || !(data.u1_amp >= 0.0) || !(data.v0_amp >= 0.0) ||
        !(data.v1_amp >= 0.0))
        throw std::invalid_argument(
            "ModelConfig: data hypothesis violated: all components must be nonnegative");
    if (data.u1_amp < data.u0_amp)
        throw std::invalid_argument(
            "ModelConfig: data hypothesis violated: u1 >= u0 is required");
    if (damping.mode == DampingMode::ScaleInvariant && !(data.v0_amp > 0.0))
        throw std::invalid_argument(
            "ModelConfig: data hypothesis violated: v0 must be nontrivial under "
            "scale-invariant damping");
    if ((damping.mode == DampingMode::Scattering || damping.mode == DampingMode::None) &&
        !(data.v1_amp > 0.0))
        throw std::invalid_argument(
            "ModelConfig: data hypothesis violated: v1 must be nontrivial when the "
            "damping coefficient is integrable");
    if (!(grid.dr > 0.0)) throw std::invalid_argument("ModelConfig: dr must be > 0");
    if (!(time.cfl > 0.0) || time.cfl * std::sqrt(static_cast<double>(n)) > 1.0)
        throw std::invalid_argument("ModelConfig: cfl must lie in (0, 1/sqrt(n)]");
    if (!(time.t_max > 0.0)) throw std::invalid_argument("ModelConfig: t_max must be > 0");
    if (!(time.blowup_threshold > 0.0))
        throw std::invalid_argument("ModelConfig: blowup_threshold must be > 0");
    if (!(time.dt_floor > 0.0))
        throw std::invalid_argument("ModelConfig: dt_floor must be > 0");
    if (!(time.growth_limit > 1.0))
        throw std::invalid_argument("ModelConfig: growth_limit must be > 1");
    if (time.dt0 > 0.0 && time.dt0 > time.cfl * grid.dr * (1.0 + 1e-12))
        throw std::invalid_argument("ModelConfig: dt0 violates dt <= cfl * dr");
    if (grid.r_max > 0.0 && grid.r_max < data.R + 4.0 * grid.dr)
        throw std::invalid_argument("ModelConfig: r_max too small for the data support");
}

double ModelConfig::r_max() const {
    if (grid.r_max > 0.0) return grid.r_max;
    return data.R + time.t_max + 6.0 * grid.dr;
}

int RadialState::active_nodes() const {
    const int limit = static_cast<int>(u.size());
    const int want = static_cast<int>(std::ceil(r_active / dr)) + 2;
    return std::min(limit, std::max(want, 3));
}

double RadialState::peak_velocity() const {
    double m = 0.0;
    const int a = active_nodes();
    for (int i = 0; i < a; ++i)
        m = std::max(m, std::max(std::abs(du[i]), std::abs(dv[i])));
    return m;
}

RadialState init_state(const ModelConfig& config) {
    config.validate();
    RadialState s;
    s.t = 0.0;
    s.dr = config.grid.dr;
    const int nodes = static_cast<int>(std::floor(config.r_max() / s.dr)) + 1;
    s.u.assign(nodes, 0.0);
    s.du.assign(nodes, 0.0);
    s.v.assign(nodes, 0.0);
    s.dv.assign(nodes, 0.0);
    for (int i = 0; i < nodes; ++i) {
        const double shape = bump(i * s.dr / config.data.R);
        s.u[i] = config.epsilon * config.data.u0_amp * shape;
        s.du[i] = config.epsilon * config.data.u1_amp * shape;
        s.v[i] = config.epsilon * config.data.v0_amp * shape;
        s.dv[i] = config.epsilon * config.data.v1_amp * shape;
    }
    s.r_active = config.data.R + 2.0 * s.dr;
    return s;
}

namespace {

struct Scratch {
    std::vector<double> lap_u, lap_v, du_half, dv_half, du_old, dv_old;
    void resize(size_t m) {
        lap_u.resize(m);
        lap_v.resize(m);
        du_half.resize(m);
        dv_half.resize(m);
        du_old.resize(m);
        dv_old.resize(m);
    }
};

// Window copy used to undo a rejected step; step_inplace touches [0, m).
struct Backup {
    double t = 0.0, r_active = 0.0;
    std::vector<double> u, du, v, dv;
    void save(const RadialState& s, int m) {
        t = s.t;
        r_active = s.r_active;
        u.assign(s.u.begin(), s.u.begin() + m);
        du.assign(s.du.begin(), s.du.begin() + m);
        v.assign(s.v.begin(), s.v.begin() + m);
        dv.assign(s.dv.begin(), s.dv.begin() + m);
    }
    void restore(RadialState& s) const {
        s.t = t;
        s.r_active = r_active;
        std::copy(u.begin(), u.end(), s.u.begin());
        std::copy(du.begin(), du.end(), s.du.begin());
        std::copy(v.begin(), v.end(), s.v.begin());
        std::copy(dv.begin(), dv.end(), s.dv.begin());
    }
};

// u'' + (n-1)/r u', with the symmetric limit n u'' at the origin. Nodes at
// and beyond the window are zero by finite propagation.
void radial_laplacian(const std::vector<double>& f, int m, int n, double dr,
                      std::vector<double>& out) {
    const int last = static_cast<int>(f.size()) - 1;
    const double inv_dr2 = 1.0 / (dr * dr);
    out[0] = n * 2.0 * (f[1] - f[0]) * inv_dr2;
    for (int i = 1; i < m; ++i) {
        const double right = (i < last) ? f[i + 1] : 0.0;
        const double second = (right - 2.0 * f[i] + f[i - 1]) * inv_dr2;
        const double first = (right - f[i - 1]) / (2.0 * dr);
        out[i] = second + (n - 1) * first / (i * dr);
    }
}

inline double kick(double w, double gamma, double h, double force) {
    return ((1.0 - 0.5 * gamma * h) * w + h * force) / (1.0 + 0.5 * gamma * h);
}

int step_window(const RadialState& s, double dt) {
    return std::min(static_cast<int>(s.size()),
                    static_cast<int>(std::ceil((s.r_active + dt) / s.dr)) + 3);
}

void step_inplace(RadialState& s, const ModelConfig& cfg, double dt, Scratch& scr) {
    if (dt > cfg.time.cfl * s.dr * (1.0 + 1e-12))
        throw std::invalid_argument("step: dt violates dt <= cfl * dr");
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const int m = step_window(s, dt);
    scr.resize(m);
    const double p = cfg.exps.p, q = cfg.exps.q;
    const double h = 0.5 * dt;
    const double gu = 1.0;
    const double gv0 = cfg.damping.coefficient(s.t);
    const double gv1 = cfg.damping.coefficient(s.t + dt);
    const bool nl = cfg.nonlinear;

    radial_laplacian(s.u, m, cfg.n, s.dr, scr.lap_u);
    radial_laplacian(s.v, m, cfg.n, s.dr, scr.lap_v);
    for (int i = 0; i < m; ++i) {
        scr.du_old[i] = s.du[i];
        scr.dv_old[i] = s.dv[i];
        const double src_u = nl ? std::pow(std::abs(s.dv[i]), p) : 0.0;
        const double src_v = nl ? std::pow(std::abs(s.du[i]), q) : 0.0;
        scr.du_half[i] = kick(s.du[i], gu, h, scr.lap_u[i] + src_u);
        scr.dv_half[i] = kick(s.dv[i], gv0, h, scr.lap_v[i] + src_v);
    }
    for (int i = 0; i < m; ++i) {
        s.u[i] += dt * scr.du_half[i];
        s.v[i] += dt * scr.dv_half[i];
    }
    radial_laplacian(s.u, m, cfg.n, s.dr, scr.lap_u);
    radial_laplacian(s.v, m, cfg.n, s.dr, scr.lap_v);
    for (int i = 0; i < m; ++i) {
        // Velocities extrapolated from the half step keep the source terms
        // second order without coupling the two pointwise solves.
        const double du_end = 2.0 * scr.du_half[i] - scr.du_old[i];
        const double dv_end = 2.0 * scr.dv_half[i] - scr.dv_old[i];
        const double src_u = nl ? std::pow(std::abs(dv_end), p) : 0.0;
        const double src_v = nl ? std::pow(std::abs(du_end), q) : 0.0;
        s.du[i] = kick(scr.du_half[i], gu, h, scr.lap_u[i] + src_u);
        s.dv[i] = kick(scr.dv_half[i], gv1, h, scr.lap_v[i] + src_v);
    }
    s.t += dt;
    s.r_active = std::min(s.r_active + dt, (s.size() - 1) * s.dr);
    // Exact-support bookkeeping: the solution vanishes beyond R + t, so
    // anything past the tracked bound is scheme leakage (the two Laplacian
    // applications per step propagate two cells) and is cleared.
    const int first_outside =
        std::max(0, static_cast<int>(std::floor(s.r_active / s.dr)) + 1);
    for (int i = first_outside; i < m; ++i) {
        s.u[i] = 0.0;
        s.du[i] = 0.0;
        s.v[i] = 0.0;
        s.dv[i] = 0.0;
    }
}

RadialState truncate_to_active(const RadialState& s) {
    RadialState out;
    out.t = s.t;
    out.dr = s.dr;
    out.r_active = s.r_active;
    const size_t m = static_cast<size_t>(s.active_nodes());
    out.u.assign(s.u.begin(), s.u.begin() + m);
    out.du.assign(s.du.begin(), s.du.begin() + m);
    out.v.assign(s.v.begin(), s.v.begin() + m);
    out.dv.assign(s.dv.begin(), s.dv.begin() + m);
    return out;
}

// Least-squares line through (t, 1/peak); the zero crossing extrapolates
// the blow-up time.
std::optional<double> reciprocal_fit(const std::vector<std::pair<double, double>>& hist,
                                     double peak_cut) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, pk] : hist)
        if (pk >= peak_cut) pts.emplace_back(t, 1.0 / pk);
    if (pts.size() > 400) pts.erase(pts.begin(), pts.end() - 400);
    if (pts.size() < 5) return std::nullopt;
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& [t, y] : pts) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double det = n * stt - st * st;
    if (std::abs(det) < kTiny) return std::nullopt;
    const double slope = (n * sty - st * sy) / det;
    const double intercept = (sy * stt - st * sty) / det;
    if (!(slope < 0.0)) return std::nullopt;
    return -intercept / slope;
}

}  // namespace

RadialState step(const RadialState& state, const ModelConfig& config, double dt) {
    RadialState out = state;
    Scratch scr;
    step_inplace(out, config, dt, scr);
    return out;
}

RunResult run(const ModelConfig& config) {
    config.validate();
    RunResult result;
    RadialState state = init_state(config);
    Scratch scr;
    Backup backup;

    const double dt0 = config.dt0();
    const double dt_snap = config.dt_snap();
    double dt = dt0;

    result.report.initial_peak = state.peak_velocity();
    const double threshold_abs =
        config.time.blowup_threshold * result.report.initial_peak;
    const bool detect = result.report.initial_peak > 0.0;

    std::vector<std::pair<double, double>> history;
    history.emplace_back(state.t, result.report.initial_peak);
    result.report.max_abs_du = result.report.max_abs_dv = 0.0;
    if (config.snap.enabled) result.snapshots.push_back(truncate_to_active(state));
    double next_snap = dt_snap;

    double prev_peak = result.report.initial_peak;
    long floor_steps = 0;
    bool done = false;
    while (!done && state.t < config.time.t_max - 1e-12) {
        const double dt_step = std::min(dt, config.time.t_max - state.t);
        const int window = step_window(state, dt_step);
        backup.save(state, window);
        step_inplace(state, config, dt_step, scr);
        const double pk = state.peak_velocity();

        const bool finite = std::isfinite(pk);
        const bool hit_threshold = detect && finite && pk >= threshold_abs;
        const bool grew_fast = detect && finite && prev_peak > kTiny &&
                               pk > config.time.growth_limit * prev_peak;
        const bool can_halve = 0.5 * dt_step >= config.time.dt_floor;
        if (!hit_threshold && (!finite || grew_fast) && can_halve) {
            backup.restore(state);
            dt = 0.5 * dt_step;
            continue;
        }
        if (!finite) {
            // Unresolvable even at the floor: treat as the blow-up signal,
            // keeping the last finite state.
            backup.restore(state);
            result.report.status = RunStatus::BlowupDetected;
            break;
        }
        if (grew_fast && !can_halve && !hit_threshold) {
            // Accept floor-sized steps while the growth persists, but cap
            // how long that can go on without crossing the threshold.
            if (++floor_steps > 10000) {
                result.report.status = RunStatus::StepFloorHit;
                break;
            }
        }

        ++result.report.steps;
        prev_peak = pk;
        history.emplace_back(state.t, pk);
        const int active = state.active_nodes();
        for (int i = 0; i < active; ++i) {
            result.report.max_abs_du =
                std::max(result.report.max_abs_du, std::abs(state.du[i]));
            result.report.max_abs_dv =
                std::max(result.report.max_abs_dv, std::abs(state.dv[i]));
        }
        if (config.snap.enabled && state.t >= next_snap - 1e-12) {
            result.snapshots.push_back(truncate_to_active(state));
            next_snap += dt_snap;
        }
        if (hit_threshold) {
            result.report.status = RunStatus::BlowupDetected;
            done = true;
        }
    }

    result.report.last_t = state.t;
    result.report.last_dt = dt;
    if (result.report.status == RunStatus::BlowupDetected) {
        const double cut = std::max(threshold_abs / 100.0, kTiny);
        const auto fitted = reciprocal_fit(history, cut);
        result.report.t_blowup_estimate = std::max(fitted.value_or(state.t), state.t);
    }
    if (config.snap.enabled &&
        (result.snapshots.empty() || result.snapshots.back().t < state.t - 1e-12))
        result.snapshots.push_back(truncate_to_active(state));
    return result;
}

}  // namespace cwave::solver
