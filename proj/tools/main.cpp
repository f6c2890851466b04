// couplewave: numerical laboratory for a weakly coupled damped wave system
// with derivative-type nonlinearities. Subcommands: verify, simulate,
// sweep, frames.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cwave/harness.hpp"
#include "cwave/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

int run_verify(const std::string& config_path, const std::string& out_dir) {
    cwave::QuadratureSpec quad;
    double dr = 1.0 / 64;
    if (!config_path.empty()) {
        const auto cfg = cwave::harness::parse_config_file(config_path);
        dr = cfg.model.grid.dr;
    }
    auto records = cwave::verify::specialfn_suite(quad);
    auto si = cwave::verify::functional_suite(cwave::verify::golden_scale_invariant(dr));
    auto sc = cwave::verify::functional_suite(cwave::verify::golden_scattering(dr));
    records.insert(records.end(), si.begin(), si.end());
    records.insert(records.end(), sc.begin(), sc.end());

    std::cout << cwave::verify::format_records_text(records);
    const auto csv = out_path(out_dir, "verify_report.csv");
    cwave::verify::write_records_csv(records, csv);
    std::cout << "report written to " << csv << "\n";

    const auto fits = cwave::verify::fit_golden_constants(dr);
    std::cout << "fitted constants (feed back via frames.K1 / frames.C / frames.K):\n";
    if (fits.scale_invariant.valid)
        std::cout << "  scale-invariant: K0 = " << fits.scale_invariant.K0
                  << ", K1 = " << fits.scale_invariant.K1
                  << ", C_hat = " << fits.scale_invariant_frames.C_hat
                  << ", K_hat = " << fits.scale_invariant_frames.K_hat << "\n";
    if (fits.scattering.valid)
        std::cout << "  scattering: K1 = " << fits.scattering.K1
                  << ", K2 = " << fits.scattering.K2
                  << ", K3 = " << fits.scattering.K3
                  << ", C_hat = " << fits.scattering_frames.C_hat
                  << ", K_hat = " << fits.scattering_frames.K_hat << "\n";
    return cwave::verify::all_pass(records) ? 0 : 2;
}

int run_simulate(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = cwave::harness::parse_config_file(config_path);
    const auto result = cwave::solver::run(cfg.model);

    const auto snap_csv = out_path(out_dir, "snapshots.csv");
    {
        std::ofstream f(snap_csv);
        f << "t,r,u,du,v,dv\n";
        char buf[40];
        auto w = [&](double x) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            f << buf;
        };
        for (const auto& s : result.snapshots)
            for (size_t i = 0; i < s.size(); ++i) {
                w(s.t);
                f << ',';
                w(i * s.dr);
                f << ',';
                w(s.u[i]);
                f << ',';
                w(s.du[i]);
                f << ',';
                w(s.v[i]);
                f << ',';
                w(s.dv[i]);
                f << '\n';
            }
    }

    json summary = {
        {"status", cwave::solver::status_name(result.report.status)},
        {"steps", result.report.steps},
        {"last_t", result.report.last_t},
        {"last_dt", result.report.last_dt},
        {"initial_peak", result.report.initial_peak},
        {"max_abs_du", result.report.max_abs_du},
        {"max_abs_dv", result.report.max_abs_dv},
        {"n", cfg.model.n},
        {"p", cfg.model.exps.p},
        {"q", cfg.model.exps.q},
        {"epsilon", cfg.model.epsilon},
        {"dr", cfg.model.grid.dr},
        {"dt0", cfg.model.dt0()},
        {"t_max", cfg.model.time.t_max},
    };
    if (result.report.t_blowup_estimate)
        summary["t_blowup_estimate"] = *result.report.t_blowup_estimate;
    const auto log_path = out_path(out_dir, "run_summary.jsonl");
    std::ofstream log(log_path, std::ios::app);
    log << summary.dump() << "\n";

    std::cout << "status: " << cwave::solver::status_name(result.report.status) << "\n";
    if (result.report.t_blowup_estimate)
        std::cout << "t_blowup_estimate: " << *result.report.t_blowup_estimate << "\n";
    std::cout << "snapshots: " << result.snapshots.size() << " -> " << snap_csv << "\n"
              << "summary appended to " << log_path << "\n";
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir, int jobs,
              const std::string& format) {
    auto cfg = cwave::harness::parse_config_file(config_path);
    if (cfg.epsilons.empty())
        throw std::runtime_error("sweep: config must set `epsilons`");
    cwave::harness::SweepPlan plan;
    plan.base = cfg.model;
    plan.epsilons = cfg.epsilons;
    plan.parallelism = jobs > 0 ? jobs : cfg.jobs;

    const auto result = cwave::harness::sweep(plan, cfg.frames);
    if (!result.warning.empty()) std::cout << "warning: " << result.warning << "\n";

    const auto csv = out_path(out_dir, "lifespan.csv");
    cwave::harness::emit_records_csv(result.records, csv);
    std::cout << "records written to " << csv << "\n";

    const auto classifier =
        cwave::frames::classify(plan.base.n, plan.base.damping, plan.base.exps);
    const auto fit = cwave::harness::fit_scaling(result.records, classifier,
                                                 cfg.fit_slack);
    std::cout << "regime: " << cwave::frames::regime_name(classifier.regime)
              << ", theta = " << classifier.theta << "\n"
              << "fit: slope = " << fit.slope << " (target <= " << fit.target_slope
              << " + " << fit.slack << "), r2 = " << fit.r2
              << ", envelope_ok = " << (fit.envelope_ok ? "yes" : "no") << "\n"
              << "verdict: " << cwave::harness::verdict_name(fit.verdict);
    if (!fit.note.empty()) std::cout << " (" << fit.note << ")";
    std::cout << "\n";

    if (format == "plot-script") {
        const auto script = out_path(out_dir, "plot_lifespan.py");
        cwave::harness::emit_plot_script(csv, script, classifier, fit.C_hat);
        std::cout << "plot script written to " << script << "\n";
    }

    json summary = {
        {"verdict", cwave::harness::verdict_name(fit.verdict)},
        {"slope", fit.slope},
        {"r2", fit.r2},
        {"C_hat", fit.C_hat},
        {"points_used", fit.points_used},
        {"inconclusive", result.inconclusive},
    };
    std::ofstream log(out_path(out_dir, "sweep_summary.jsonl"), std::ios::app);
    log << summary.dump() << "\n";

    if (fit.verdict == cwave::harness::Verdict::Fail) return 2;
    if (fit.verdict == cwave::harness::Verdict::Inconclusive || result.inconclusive)
        return 3;
    return 0;
}

int run_frames(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = cwave::harness::parse_config_file(config_path);
    const auto table = cwave::harness::build_frames_table(
        cfg.model.n, cfg.model.damping, cfg.model.exps, cfg.model.epsilon, cfg.frames);
    const auto csv = out_path(out_dir, "frames.csv");
    cwave::harness::emit_frames_csv(table, csv);

    std::cout << "regime: " << cwave::frames::regime_name(table.classifier.regime)
              << ", theta = " << table.classifier.theta
              << ", n_eff = " << table.classifier.n_eff << "\n"
              << "envelope: constant = " << table.envelope.constant_C
              << ", exponent = " << table.envelope.exponent
              << ", bound(eps) = " << table.envelope.bound(table.eps)
              << " at eps = " << table.eps << "\n"
              << "divergence time (threshold " << cfg.frames.divergence_threshold
              << "): " << table.divergence_time << "\n"
              << "table written to " << csv << "\n";

    // Exact-rational self-check when both exponents parse as rationals.
    try {
        const auto p = cwave::parse_rational(cfg.p_text);
        const auto q = cwave::parse_rational(cfg.q_text);
        const auto pq = p * q;
        const cwave::Rational n_eff(cfg.model.n);
        bool ok = true;
        for (int j = 0; j <= std::min(cfg.frames.j_max, 40); ++j) {
            const auto a = cwave::frames::closed_forms_exact(n_eff, pq, j);
            const auto b = cwave::frames::closed_forms_by_recursion_exact(n_eff, pq, j);
            if (a.alpha != b.alpha || a.beta != b.beta || a.gamma != b.gamma) ok = false;
        }
        std::cout << "exact-rational identity check (pq = " << pq.str()
                  << "): " << (ok ? "ok" : "MISMATCH") << "\n";
        if (!ok) return 2;
    } catch (const std::exception&) {
        std::cout << "exponents not rational; skipping the exact identity check\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled damped-wave blow-up laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", format = "csv";
    int jobs = 0;

    auto* verify = app.add_subcommand("verify", "special-function and functional "
                                                "inequality property suites");
    verify->add_option("--config", config_path, "optional config (grid.dr sets the "
                                                "reference resolution)");
    verify->add_option("--out", out_dir, "output directory");

    auto* simulate = app.add_subcommand("simulate", "single radial run");
    simulate->add_option("--config", config_path, "model config")->required();
    simulate->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "epsilon sweep with lifespan fits");
    sweep->add_option("--config", config_path, "model config with `epsilons`")
        ->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "parallel runs");
    sweep->add_option("--format", format, "csv | plot-script")
        ->check(CLI::IsMember({"csv", "plot-script"}));

    auto* frames = app.add_subcommand("frames", "iteration-constant tables and "
                                                "lifespan envelope");
    frames->add_option("--config", config_path, "model config")->required();
    frames->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return run_verify(config_path, out_dir);
        if (simulate->parsed()) return run_simulate(config_path, out_dir);
        if (sweep->parsed()) return run_sweep(config_path, out_dir, jobs, format);
        if (frames->parsed()) return run_frames(config_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
