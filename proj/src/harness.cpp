#include "cwave/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cwave::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    LineFit f;
    const double det = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy * sxx - sx * sxy) / det;
    const double ss_res_num = (syy - sy * sy / n) - f.slope * (sxy - sx * sy / n);
    const double ss_tot = syy - sy * sy / n;
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res_num / ss_tot : 1.0;
    return f;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

void SweepPlan::validate() const {
    base.validate();
    if (epsilons.empty()) throw std::invalid_argument("SweepPlan: epsilon list is empty");
    for (double e : epsilons)
        if (!(e > 0.0)) throw std::invalid_argument("SweepPlan: epsilons must be positive");
    for (size_t i = 1; i < epsilons.size(); ++i)
        if (!(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("SweepPlan: epsilons must be strictly decreasing");
    if (parallelism < 1)
        throw std::invalid_argument("SweepPlan: parallelism must be >= 1");
}

SweepResult sweep(const SweepPlan& plan, const FramesParams& fp) {
    plan.validate();
    SweepResult out;
    const auto classifier = frames::classify(plan.base.n, plan.base.damping, plan.base.exps);

    frames::LifespanEnvelope env;
    bool have_env = false;
    if (classifier.regime == frames::Regime::OutOfRange) {
        out.warning = "classifier out of range: blow-up is not guaranteed";
    } else {
        const auto schedule = frames::build_schedule(fp.T0, plan.base.exps, fp.j_max);
        const auto constants =
            frames::iteration_constants(schedule, classifier, fp.base, fp.j_max);
        env = frames::envelope(classifier, constants);
        have_env = true;
    }

    const size_t n_runs = plan.epsilons.size();
    out.records.resize(n_runs);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n_runs) return;
            solver::ModelConfig cfg = plan.base;
            cfg.epsilon = plan.epsilons[i];
            cfg.snap.enabled = false;
            auto rr = solver::run(cfg);
            LifespanRecord rec;
            rec.epsilon = cfg.epsilon;
            rec.status = rr.report.status;
            rec.t_blowup = rr.report.t_blowup_estimate;
            rec.envelope_value = have_env
                                     ? env.bound(cfg.epsilon)
                                     : std::numeric_limits<double>::quiet_NaN();
            out.records[i] = rec;
        }
    };
    const int jobs = std::min<int>(plan.parallelism, static_cast<int>(n_runs));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    out.inconclusive = std::none_of(out.records.begin(), out.records.end(),
                                    [](const LifespanRecord& r) {
                                        return r.t_blowup.has_value();
                                    });
    return out;
}

ScalingFit fit_scaling(const std::vector<LifespanRecord>& records,
                       const frames::BlowupClassifier& classifier, double slack) {
    ScalingFit fit;
    fit.slack = slack;
    std::vector<const LifespanRecord*> used;
    for (const auto& r : records)
        if (r.t_blowup.has_value() && *r.t_blowup > 0.0) used.push_back(&r);
    fit.points_used = static_cast<int>(used.size());
    if (used.size() < 4) {
        fit.note = "fewer than 4 uncensored records";
        fit.verdict = Verdict::Inconclusive;
        return fit;
    }

    if (classifier.regime == frames::Regime::Subcritical) {
        fit.target_slope = 1.0 / classifier.theta;
        std::vector<double> x, y;
        for (const auto* r : used) {
            x.push_back(std::log(1.0 / r->epsilon));
            y.push_back(std::log(*r->t_blowup));
        }
        const auto line = least_squares(x, y);
        fit.slope = line.slope;
        fit.intercept = line.intercept;
        fit.r2 = line.r2;

        // Envelope calibrated on the largest epsilon (the first uncensored
        // record has the largest epsilon: input order is descending).
        const auto* cal = *std::max_element(
            used.begin(), used.end(), [](const LifespanRecord* a, const LifespanRecord* b) {
                return a->epsilon < b->epsilon;
            });
        fit.C_hat = *cal->t_blowup * std::pow(cal->epsilon, fit.target_slope);
        fit.envelope_ok = true;
        for (const auto* r : used) {
            const double env = fit.C_hat * std::pow(r->epsilon, -fit.target_slope);
            if (*r->t_blowup > env * (1.0 + 1e-9)) fit.envelope_ok = false;
        }
        fit.verdict = (fit.slope <= fit.target_slope + slack && fit.envelope_ok)
                          ? Verdict::Pass
                          : Verdict::Fail;
        return fit;
    }

    if (classifier.regime == frames::Regime::Critical) {
        fit.target_slope = classifier.pq - 1.0;
        fit.note = "critical fit uses ln ln T";
        std::vector<double> x, y;
        for (const auto* r : used) {
            if (*r->t_blowup <= 1.0) continue;  // ln ln undefined
            x.push_back(std::log(1.0 / r->epsilon));
            y.push_back(std::log(std::log(*r->t_blowup)));
        }
        if (x.size() < 4) {
            fit.note = "fewer than 4 records with T > 1 for the critical fit";
            fit.verdict = Verdict::Inconclusive;
            return fit;
        }
        const auto line = least_squares(x, y);
        fit.slope = line.slope;
        fit.intercept = line.intercept;
        fit.r2 = line.r2;
        fit.points_used = static_cast<int>(x.size());

        const auto* cal = *std::max_element(
            used.begin(), used.end(), [](const LifespanRecord* a, const LifespanRecord* b) {
                return a->epsilon < b->epsilon;
            });
        fit.C_hat = std::log(std::max(*cal->t_blowup, 1.0 + 1e-12)) *
                    std::pow(cal->epsilon, fit.target_slope);
        fit.envelope_ok = true;
        for (const auto* r : used) {
            const double env_ln = fit.C_hat * std::pow(r->epsilon, -fit.target_slope);
            if (std::log(std::max(*r->t_blowup, 1e-300)) > env_ln * (1.0 + 1e-9))
                fit.envelope_ok = false;
        }
        fit.verdict = (fit.slope <= fit.target_slope + slack && fit.envelope_ok)
                          ? Verdict::Pass
                          : Verdict::Fail;
        return fit;
    }

    fit.note = "out-of-range classifier: no scaling target";
    fit.verdict = Verdict::Inconclusive;
    return fit;
}

void emit_records_csv(const std::vector<LifespanRecord>& records,
                      const std::string& path) {
    std::ofstream f(path, std::ios::out | std::ios::trunc);
    if (!f) throw std::runtime_error("emit_records_csv: cannot open " + path);
    f << "epsilon,status,t_blowup,envelope_value\n";
    for (const auto& r : records) {
        f << fmt_double(r.epsilon) << ',' << solver::status_name(r.status) << ',';
        if (r.t_blowup.has_value()) f << fmt_double(*r.t_blowup);
        f << ',' << fmt_double(r.envelope_value) << '\n';
    }
    if (!f) throw std::runtime_error("emit_records_csv: write failed for " + path);
}

std::vector<LifespanRecord> parse_records_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("parse_records_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line))
        throw std::runtime_error("parse_records_csv: empty file " + path);
    if (line != "epsilon,status,t_blowup,envelope_value")
        throw std::runtime_error("parse_records_csv: unexpected header in " + path);
    std::vector<LifespanRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string eps, status, tb, env;
        std::getline(ss, eps, ',');
        std::getline(ss, status, ',');
        std::getline(ss, tb, ',');
        std::getline(ss, env, ',');
        LifespanRecord rec;
        rec.epsilon = std::stod(eps);
        if (status == "completed_to_tmax")
            rec.status = solver::RunStatus::CompletedToTmax;
        else if (status == "blowup_detected")
            rec.status = solver::RunStatus::BlowupDetected;
        else if (status == "step_floor_hit")
            rec.status = solver::RunStatus::StepFloorHit;
        else
            throw std::runtime_error("parse_records_csv: bad status " + status);
        if (!tb.empty()) rec.t_blowup = std::stod(tb);
        rec.envelope_value = std::stod(env);
        out.push_back(rec);
    }
    return out;
}

void emit_plot_script(const std::string& csv_path, const std::string& script_path,
                      const frames::BlowupClassifier& classifier, double c_hat) {
    std::ofstream f(script_path, std::ios::out | std::ios::trunc);
    if (!f) throw std::runtime_error("emit_plot_script: cannot open " + script_path);
    f << "#!/usr/bin/env python3\n"
         "# Log-log lifespan plot with the calibrated envelope overlay.\n"
         "import csv\n"
         "import math\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "eps, T = [], []\n"
         "with open("
      << '"' << csv_path << '"'
      << ") as f:\n"
         "    for row in csv.DictReader(f):\n"
         "        if row[\"t_blowup\"]:\n"
         "            eps.append(float(row[\"epsilon\"]))\n"
         "            T.append(float(row[\"t_blowup\"]))\n"
         "\n"
         "theta = "
      << fmt_double(classifier.theta)
      << "\n"
         "c_hat = "
      << fmt_double(c_hat)
      << "\n"
         "fig, ax = plt.subplots()\n"
         "ax.loglog(eps, T, \"o\", label=\"measured lifespan\")\n"
         "if theta > 0 and c_hat > 0:\n"
         "    xs = sorted(eps)\n"
         "    ax.loglog(xs, [c_hat * x ** (-1.0 / theta) for x in xs], \"--\",\n"
         "              label=\"envelope C eps^(-1/theta)\")\n"
         "ax.set_xlabel(\"epsilon\")\n"
         "ax.set_ylabel(\"blow-up time\")\n"
         "ax.legend()\n"
         "fig.savefig(\"lifespan.png\", dpi=150)\n"
         "print(\"wrote lifespan.png\")\n";
}

FramesTable build_frames_table(int n, const DampingSpec& damping,
                               const frames::ExponentPair& exps, double eps,
                               const FramesParams& fp) {
    FramesTable t;
    t.eps = eps;
    t.classifier = frames::classify(n, damping, exps);
    if (t.classifier.regime == frames::Regime::OutOfRange)
        throw std::logic_error("build_frames_table: instance is out of range");
    t.schedule = frames::build_schedule(fp.T0, exps, fp.j_max);
    t.constants = frames::iteration_constants(t.schedule, t.classifier, fp.base, fp.j_max);
    t.envelope = frames::envelope(t.classifier, t.constants);

    // First time the lower-bound sequence (sup over j <= j_max) exceeds the
    // threshold, scanned on a geometric time grid.
    const bool critical = t.classifier.regime == frames::Regime::Critical;
    const double start = critical ? t.schedule.Lambda_limit * fp.T0
                                  : t.schedule.L_limit * fp.T0;
    t.divergence_time = kInf;
    double time = start * 1.0001;
    for (int step = 0; step < 4000; ++step) {
        double best = 0.0;
        for (int j = 0; j <= fp.j_max; ++j) {
            const double s0 = critical ? t.schedule.Lambda[j] * fp.T0
                                       : t.schedule.L[j] * fp.T0;
            if (time <= s0) continue;
            best = std::max(best, frames::lower_bound_envelope(
                                      time, j, eps, t.constants, t.classifier,
                                      t.schedule));
            if (best > fp.divergence_threshold) break;
        }
        if (best > fp.divergence_threshold) {
            t.divergence_time = time;
            break;
        }
        time *= 1.05;
    }
    return t;
}

void emit_frames_csv(const FramesTable& t, const std::string& path) {
    std::ofstream f(path, std::ios::out | std::ios::trunc);
    if (!f) throw std::runtime_error("emit_frames_csv: cannot open " + path);
    const bool critical = t.classifier.regime == frames::Regime::Critical;
    if (critical)
        f << "j,ell_j,Lambda_j,gamma_j,ln_D_j,divergence_time\n";
    else
        f << "j,ell_j,L_j,alpha_j,beta_j,ln_C_j,divergence_time\n";
    const int j_max = static_cast<int>(t.constants.ln_C.size()) - 1;
    for (int j = 0; j <= j_max; ++j) {
        f << j << ',' << fmt_double(t.schedule.ell[j]) << ',';
        if (critical)
            f << fmt_double(t.schedule.Lambda[j]) << ','
              << fmt_double(t.constants.gamma[j]) << ','
              << fmt_double(t.constants.ln_D[j]);
        else
            f << fmt_double(t.schedule.L[j]) << ',' << fmt_double(t.constants.alpha[j])
              << ',' << fmt_double(t.constants.beta[j]) << ','
              << fmt_double(t.constants.ln_C[j]);
        f << ',' << fmt_double(t.divergence_time) << '\n';
    }
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::stringstream all(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(all, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        auto num = [&]() { return std::stod(val); };

        if (key == "n") cfg.model.n = static_cast<int>(num());
        else if (key == "p") { cfg.model.exps.p = num(); cfg.p_text = val; }
        else if (key == "q") { cfg.model.exps.q = num(); cfg.q_text = val; }
        else if (key == "damping.mode") {
            if (val == "none") cfg.model.damping.mode = DampingMode::None;
            else if (val == "classical") cfg.model.damping.mode = DampingMode::Classical;
            else if (val == "scale_invariant")
                cfg.model.damping.mode = DampingMode::ScaleInvariant;
            else if (val == "scattering") cfg.model.damping.mode = DampingMode::Scattering;
            else
                throw std::runtime_error("config: unknown damping.mode '" + val + "'");
        }
        else if (key == "damping.mu") cfg.model.damping.mu = num();
        else if (key == "damping.b0") cfg.model.damping.b0 = num();
        else if (key == "damping.kappa") cfg.model.damping.kappa = num();
        else if (key == "epsilon") cfg.model.epsilon = num();
        else if (key == "epsilons") cfg.epsilons = parse_double_list(val);
        else if (key == "data.R") cfg.model.data.R = num();
        else if (key == "data.u0_amp") cfg.model.data.u0_amp = num();
        else if (key == "data.u1_amp") cfg.model.data.u1_amp = num();
        else if (key == "data.v0_amp") cfg.model.data.v0_amp = num();
        else if (key == "data.v1_amp") cfg.model.data.v1_amp = num();
        else if (key == "grid.dr") cfg.model.grid.dr = num();
        else if (key == "grid.r_max") cfg.model.grid.r_max = num();
        else if (key == "time.cfl") cfg.model.time.cfl = num();
        else if (key == "time.dt0") cfg.model.time.dt0 = num();
        else if (key == "time.t_max") cfg.model.time.t_max = num();
        else if (key == "time.blowup_threshold") cfg.model.time.blowup_threshold = num();
        else if (key == "time.dt_floor") cfg.model.time.dt_floor = num();
        else if (key == "snapshot.dt") cfg.model.snap.dt_snap = num();
        else if (key == "frames.T0") cfg.frames.T0 = num();
        else if (key == "frames.j_max") cfg.frames.j_max = static_cast<int>(num());
        else if (key == "frames.K1") cfg.frames.base.K1 = num();
        else if (key == "frames.C") cfg.frames.base.C = num();
        else if (key == "frames.K") cfg.frames.base.K = num();
        else if (key == "frames.threshold") cfg.frames.divergence_threshold = num();
        else if (key == "fit.slack") cfg.fit_slack = num();
        else if (key == "sweep.jobs") cfg.jobs = static_cast<int>(num());
        else
            throw std::runtime_error("config: unknown key '" + key + "'");
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace cwave::harness
