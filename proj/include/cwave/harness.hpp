#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwave/frames.hpp"
#include "cwave/functionals.hpp"
#include "cwave/solver.hpp"

namespace cwave::harness {

/// Iteration-machinery inputs that accompany a model instance: start time
/// for the slicing, table depth, base constants (fits or overrides), and
/// the divergence threshold used by the frames table.
struct FramesParams {
    double T0 = 1.0;
    int j_max = 40;
    frames::BaseConstants base;
    double divergence_threshold = 1e6;
};

struct SweepPlan {
    solver::ModelConfig base;
    std::vector<double> epsilons;
    int parallelism = 1;

    void validate() const;
};

struct LifespanRecord {
    double epsilon = 0.0;
    solver::RunStatus status = solver::RunStatus::CompletedToTmax;
    std::optional<double> t_blowup;  // absent = censored at t_max
    double envelope_value = 0.0;
};

struct SweepResult {
    std::vector<LifespanRecord> records;
    bool inconclusive = false;  // every run censored
    std::string warning;        // set for out-of-range instances
};

/// One solver run per epsilon, fanned out over `parallelism` workers;
/// records come back in input order regardless of scheduling.
SweepResult sweep(const SweepPlan& plan, const FramesParams& fp = {});

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdict_name(Verdict v);

/// Upper-bound-consistency fit of the lifespan scaling:
///   subcritical: ln T vs ln(1/eps), pass iff slope <= 1/theta + slack and
///     every uncensored point sits under C_hat eps^{-1/theta} calibrated on
///     the largest epsilon;
///   critical: ln ln T vs ln(1/eps) with target slope pq - 1 + slack.
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    double slack = 0.5;
    double target_slope = 0.0;
    double C_hat = 0.0;
    int points_used = 0;
    bool envelope_ok = false;
    std::string note;
};
ScalingFit fit_scaling(const std::vector<LifespanRecord>& records,
                       const frames::BlowupClassifier& classifier, double slack = 0.5);

void emit_records_csv(const std::vector<LifespanRecord>& records,
                      const std::string& path);
std::vector<LifespanRecord> parse_records_csv(const std::string& path);

/// Text plot script (python/matplotlib) rendering the log-log lifespan
/// points and the calibrated envelope overlay from an emitted CSV.
void emit_plot_script(const std::string& csv_path, const std::string& script_path,
                      const frames::BlowupClassifier& classifier, double c_hat);

/// Per-j frames table (CSV) for one instance plus the divergence time: the
/// first t at which the lower-bound sequence exceeds the threshold.
struct FramesTable {
    frames::BlowupClassifier classifier;
    frames::FrameSchedule schedule;
    frames::IterationConstants constants;
    frames::LifespanEnvelope envelope;
    double divergence_time = 0.0;  // +inf when the threshold is never crossed
    double eps = 0.0;
};
FramesTable build_frames_table(int n, const DampingSpec& damping,
                               const frames::ExponentPair& exps, double eps,
                               const FramesParams& fp);
void emit_frames_csv(const FramesTable& table, const std::string& path);

/// Flat key = value configuration file (see README for the key set);
/// '#' starts a comment, unknown keys are hard errors.
struct Config {
    solver::ModelConfig model;
    std::vector<double> epsilons;
    FramesParams frames;
    double fit_slack = 0.5;
    int jobs = 1;
    std::string p_text = "2";  // raw exponent strings, kept for the
    std::string q_text = "2";  // exact-rational frames path
};
Config parse_config_file(const std::string& path);
Config parse_config_text(const std::string& text);

}  // namespace cwave::harness
