// Python bindings for the core operations: special functions, blow-up
// classification and iteration machinery, the radial solver, functional
// traces, and the sweep harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cwave/functionals.hpp"
#include "cwave/harness.hpp"
#include "cwave/verify.hpp"

namespace py = pybind11;
using namespace cwave;

PYBIND11_MODULE(_core, m) {
    m.doc() = "coupled damped-wave blow-up laboratory";

    // --- quadrature and damping -------------------------------------------
    py::class_<QuadratureSpec>(m, "QuadratureSpec")
        .def(py::init<>())
        .def_readwrite("node_count", &QuadratureSpec::node_count)
        .def_readwrite("truncation_y_max", &QuadratureSpec::truncation_y_max)
        .def_readwrite("rel_tol", &QuadratureSpec::rel_tol);

    py::enum_<DampingMode>(m, "DampingMode")
        .value("NONE", DampingMode::None)
        .value("CLASSICAL", DampingMode::Classical)
        .value("SCALE_INVARIANT", DampingMode::ScaleInvariant)
        .value("SCATTERING", DampingMode::Scattering);

    py::class_<DampingSpec>(m, "DampingSpec")
        .def(py::init<>())
        .def_static("none", &DampingSpec::none)
        .def_static("classical", &DampingSpec::classical)
        .def_static("scale_invariant", &DampingSpec::scale_invariant, py::arg("mu"))
        .def_static("scattering", &DampingSpec::scattering, py::arg("b0"),
                    py::arg("kappa"))
        .def_readwrite("mode", &DampingSpec::mode)
        .def_readwrite("mu", &DampingSpec::mu)
        .def_readwrite("b0", &DampingSpec::b0)
        .def_readwrite("kappa", &DampingSpec::kappa)
        .def("coefficient", &DampingSpec::coefficient, py::arg("t"));

    // --- special functions --------------------------------------------------
    const QuadratureSpec default_quad{};
    m.def(
        "bessel_k",
        [](double nu, double t, const QuadratureSpec& q) {
            return specialfn::bessel_k(nu, t, q);
        },
        py::arg("nu"), py::arg("t"), py::arg("quad") = default_quad);
    m.def(
        "bessel_k_derivative",
        [](double nu, double t, const QuadratureSpec& q) {
            return specialfn::bessel_k_derivative(nu, t, q);
        },
        py::arg("nu"), py::arg("t"), py::arg("quad") = default_quad);
    m.def(
        "phi",
        [](int n, double r, const QuadratureSpec& q) {
            return specialfn::phi(n, r, q);
        },
        py::arg("n"), py::arg("r"), py::arg("quad") = default_quad);
    m.def(
        "rho",
        [](double mu, double t, const QuadratureSpec& q) {
            return specialfn::rho(mu, t, q);
        },
        py::arg("mu"), py::arg("t"), py::arg("quad") = default_quad);
    m.def(
        "rho_log_derivative",
        [](double mu, double t, const QuadratureSpec& q) {
            return specialfn::rho_log_derivative(mu, t, q);
        },
        py::arg("mu"), py::arg("t"), py::arg("quad") = default_quad);
    m.def("m_weight", &specialfn::m_weight, py::arg("damping"), py::arg("t"));
    m.def(
        "phi_ball_integral",
        [](int n, double r_power, double R, double t, const QuadratureSpec& q) {
            return specialfn::phi_ball_integral(n, r_power, R, t, q);
        },
        py::arg("n"), py::arg("r_power"), py::arg("R"), py::arg("t"),
        py::arg("quad") = default_quad);

    // --- frames --------------------------------------------------------------
    py::class_<frames::ExponentPair>(m, "ExponentPair")
        .def(py::init<double, double>(), py::arg("p") = 2.0, py::arg("q") = 2.0)
        .def_readwrite("p", &frames::ExponentPair::p)
        .def_readwrite("q", &frames::ExponentPair::q)
        .def("pq", &frames::ExponentPair::pq);

    py::enum_<frames::Regime>(m, "Regime")
        .value("SUBCRITICAL", frames::Regime::Subcritical)
        .value("CRITICAL", frames::Regime::Critical)
        .value("OUT_OF_RANGE", frames::Regime::OutOfRange);

    py::class_<frames::BlowupClassifier>(m, "BlowupClassifier")
        .def_readonly("n_eff", &frames::BlowupClassifier::n_eff)
        .def_readonly("theta", &frames::BlowupClassifier::theta)
        .def_readonly("pq", &frames::BlowupClassifier::pq)
        .def_readonly("regime", &frames::BlowupClassifier::regime)
        .def_readonly("lambda_value", &frames::BlowupClassifier::lambda_value);

    m.def("classify", &frames::classify, py::arg("n"), py::arg("damping"),
          py::arg("exps"), py::arg("critical_tol") = 1e-12);

    py::class_<frames::FrameSchedule>(m, "FrameSchedule")
        .def_readonly("T0", &frames::FrameSchedule::T0)
        .def_readonly("ell", &frames::FrameSchedule::ell)
        .def_readonly("L", &frames::FrameSchedule::L)
        .def_readonly("L_limit", &frames::FrameSchedule::L_limit)
        .def_readonly("Lambda", &frames::FrameSchedule::Lambda)
        .def_readonly("Lambda_limit", &frames::FrameSchedule::Lambda_limit);

    m.def("build_schedule", &frames::build_schedule, py::arg("T0"), py::arg("exps"),
          py::arg("j_max"));

    m.def(
        "closed_forms",
        [](double n_eff, const frames::ExponentPair& exps, int j) {
            const auto t = frames::closed_forms(n_eff, exps, j);
            return py::make_tuple(t.alpha, t.beta, t.gamma);
        },
        py::arg("n_eff"), py::arg("exps"), py::arg("j"));
    m.def(
        "double_sum_identity",
        [](double pq, int j) {
            const auto d = frames::double_sum_identity(pq, j);
            return py::make_tuple(d.lhs, d.rhs);
        },
        py::arg("pq"), py::arg("j"));

    py::class_<frames::BaseConstants>(m, "BaseConstants")
        .def(py::init<>())
        .def_readwrite("K1", &frames::BaseConstants::K1)
        .def_readwrite("C", &frames::BaseConstants::C)
        .def_readwrite("K", &frames::BaseConstants::K);

    py::class_<frames::IterationConstants>(m, "IterationConstants")
        .def_readonly("ln_C", &frames::IterationConstants::ln_C)
        .def_readonly("alpha", &frames::IterationConstants::alpha)
        .def_readonly("beta", &frames::IterationConstants::beta)
        .def_readonly("ln_D", &frames::IterationConstants::ln_D)
        .def_readonly("gamma", &frames::IterationConstants::gamma)
        .def_readonly("E", &frames::IterationConstants::E)
        .def_readonly("E_tilde", &frames::IterationConstants::E_tilde)
        .def_readonly("N", &frames::IterationConstants::N)
        .def_readonly("c", &frames::IterationConstants::c)
        .def_readonly("j0", &frames::IterationConstants::j0)
        .def_readonly("j2", &frames::IterationConstants::j2);

    m.def("iteration_constants", &frames::iteration_constants, py::arg("schedule"),
          py::arg("classifier"), py::arg("base"), py::arg("j_max"));

    py::class_<frames::LifespanEnvelope>(m, "LifespanEnvelope")
        .def_readonly("regime", &frames::LifespanEnvelope::regime)
        .def_readonly("constant_C", &frames::LifespanEnvelope::constant_C)
        .def_readonly("exponent", &frames::LifespanEnvelope::exponent)
        .def("bound", &frames::LifespanEnvelope::bound, py::arg("eps"));

    m.def("envelope", &frames::envelope, py::arg("classifier"), py::arg("constants"));
    m.def("lower_bound_envelope", &frames::lower_bound_envelope, py::arg("t"),
          py::arg("j"), py::arg("eps"), py::arg("constants"), py::arg("classifier"),
          py::arg("schedule"));

    // --- solver ----------------------------------------------------------------
    py::class_<solver::DataProfile>(m, "DataProfile")
        .def(py::init<>())
        .def_readwrite("R", &solver::DataProfile::R)
        .def_readwrite("u0_amp", &solver::DataProfile::u0_amp)
        .def_readwrite("u1_amp", &solver::DataProfile::u1_amp)
        .def_readwrite("v0_amp", &solver::DataProfile::v0_amp)
        .def_readwrite("v1_amp", &solver::DataProfile::v1_amp);

    py::class_<solver::GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("dr", &solver::GridSpec::dr)
        .def_readwrite("r_max", &solver::GridSpec::r_max);

    py::class_<solver::TimeSpec>(m, "TimeSpec")
        .def(py::init<>())
        .def_readwrite("cfl", &solver::TimeSpec::cfl)
        .def_readwrite("dt0", &solver::TimeSpec::dt0)
        .def_readwrite("t_max", &solver::TimeSpec::t_max)
        .def_readwrite("blowup_threshold", &solver::TimeSpec::blowup_threshold)
        .def_readwrite("dt_floor", &solver::TimeSpec::dt_floor);

    py::class_<solver::SnapshotSpec>(m, "SnapshotSpec")
        .def(py::init<>())
        .def_readwrite("dt_snap", &solver::SnapshotSpec::dt_snap)
        .def_readwrite("enabled", &solver::SnapshotSpec::enabled);

    py::class_<solver::ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("n", &solver::ModelConfig::n)
        .def_readwrite("exps", &solver::ModelConfig::exps)
        .def_readwrite("damping", &solver::ModelConfig::damping)
        .def_readwrite("epsilon", &solver::ModelConfig::epsilon)
        .def_readwrite("data", &solver::ModelConfig::data)
        .def_readwrite("grid", &solver::ModelConfig::grid)
        .def_readwrite("time", &solver::ModelConfig::time)
        .def_readwrite("snap", &solver::ModelConfig::snap)
        .def_readwrite("nonlinear", &solver::ModelConfig::nonlinear)
        .def("validate", &solver::ModelConfig::validate);

    py::class_<solver::RadialState>(m, "RadialState")
        .def_readonly("t", &solver::RadialState::t)
        .def_readonly("dr", &solver::RadialState::dr)
        .def_readonly("r_active", &solver::RadialState::r_active)
        .def_readonly("u", &solver::RadialState::u)
        .def_readonly("du", &solver::RadialState::du)
        .def_readonly("v", &solver::RadialState::v)
        .def_readonly("dv", &solver::RadialState::dv)
        .def("peak_velocity", &solver::RadialState::peak_velocity);

    py::enum_<solver::RunStatus>(m, "RunStatus")
        .value("COMPLETED_TO_TMAX", solver::RunStatus::CompletedToTmax)
        .value("BLOWUP_DETECTED", solver::RunStatus::BlowupDetected)
        .value("STEP_FLOOR_HIT", solver::RunStatus::StepFloorHit);

    py::class_<solver::BlowupReport>(m, "BlowupReport")
        .def_readonly("status", &solver::BlowupReport::status)
        .def_readonly("t_blowup_estimate", &solver::BlowupReport::t_blowup_estimate)
        .def_readonly("max_abs_du", &solver::BlowupReport::max_abs_du)
        .def_readonly("max_abs_dv", &solver::BlowupReport::max_abs_dv)
        .def_readonly("initial_peak", &solver::BlowupReport::initial_peak)
        .def_readonly("last_t", &solver::BlowupReport::last_t)
        .def_readonly("steps", &solver::BlowupReport::steps);

    py::class_<solver::RunResult>(m, "RunResult")
        .def_readonly("report", &solver::RunResult::report)
        .def_readonly("snapshots", &solver::RunResult::snapshots);

    m.def("init_state", &solver::init_state, py::arg("config"));
    m.def("step", &solver::step, py::arg("state"), py::arg("config"), py::arg("dt"));
    m.def("run", &solver::run, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    // --- functionals -------------------------------------------------------------
    py::class_<functionals::WeightKernel>(m, "WeightKernel")
        .def("psi1", &functionals::WeightKernel::psi1, py::arg("t"), py::arg("r"))
        .def("psi2", &functionals::WeightKernel::psi2, py::arg("t"), py::arg("r"))
        .def("phi_at", &functionals::WeightKernel::phi_at, py::arg("r"))
        .def("rho_at", &functionals::WeightKernel::rho_at, py::arg("t"));

    py::class_<functionals::FunctionalTrace>(m, "FunctionalTrace")
        .def_readonly("times", &functionals::FunctionalTrace::times)
        .def_readonly("U0", &functionals::FunctionalTrace::U0)
        .def_readonly("U1", &functionals::FunctionalTrace::U1)
        .def_readonly("V0", &functionals::FunctionalTrace::V0)
        .def_readonly("V1", &functionals::FunctionalTrace::V1)
        .def_readonly("Fp", &functionals::FunctionalTrace::Fp)
        .def_readonly("Fq", &functionals::FunctionalTrace::Fq)
        .def_readonly("I_mu", &functionals::FunctionalTrace::I_mu)
        .def_readonly("J", &functionals::FunctionalTrace::J)
        .def_readonly("quad_tolerance", &functionals::FunctionalTrace::quad_tolerance);

    py::class_<functionals::TracedRun>(m, "TracedRun")
        .def_readonly("report", &functionals::TracedRun::report)
        .def_readonly("snapshots", &functionals::TracedRun::snapshots)
        .def_readonly("trace", &functionals::TracedRun::trace)
        .def_readonly("kernel", &functionals::TracedRun::kernel);

    py::class_<functionals::OdeResidualReport>(m, "OdeResidualReport")
        .def_readonly("rel_residual", &functionals::OdeResidualReport::rel_residual)
        .def_readonly("points_used", &functionals::OdeResidualReport::points_used)
        .def_readonly("cadence", &functionals::OdeResidualReport::cadence);

    py::class_<functionals::FrameReport>(m, "FrameReport")
        .def_readonly("T6_hat", &functionals::FrameReport::T6_hat)
        .def_readonly("C_hat", &functionals::FrameReport::C_hat)
        .def_readonly("K_hat", &functionals::FrameReport::K_hat)
        .def_readonly("frames_hold", &functionals::FrameReport::frames_hold)
        .def_readonly("precursor_margin", &functionals::FrameReport::precursor_margin)
        .def_readonly("K2", &functionals::FrameReport::K2)
        .def_readonly("K3", &functionals::FrameReport::K3)
        .def_readonly("scattering_margin", &functionals::FrameReport::scattering_margin)
        .def_readonly("v1_floor_from_zero", &functionals::FrameReport::v1_floor_from_zero)
        .def_readonly("note", &functionals::FrameReport::note);

    py::class_<functionals::ConstantFits>(m, "ConstantFits")
        .def_readonly("valid", &functionals::ConstantFits::valid)
        .def_readonly("note", &functionals::ConstantFits::note)
        .def_readonly("K0", &functionals::ConstantFits::K0)
        .def_readonly("K1", &functionals::ConstantFits::K1)
        .def_readonly("T3_hat", &functionals::ConstantFits::T3_hat)
        .def_readonly("K2", &functionals::ConstantFits::K2)
        .def_readonly("K3", &functionals::ConstantFits::K3);

    m.def("build_kernel", &functionals::build_kernel, py::arg("config"),
          py::arg("quad") = default_quad);
    m.def("trace", &functionals::trace, py::arg("trajectory"), py::arg("kernel"));
    m.def("run_with_trace", &functionals::run_with_trace, py::arg("config"),
          py::arg("quad") = default_quad, py::call_guard<py::gil_scoped_release>());
    m.def("check_u0_ode", &functionals::check_u0_ode, py::arg("trace"),
          py::arg("trajectory"), py::arg("kernel"));
    m.def("check_frames", &functionals::check_frames, py::arg("trace"),
          py::arg("trajectory"), py::arg("kernel"), py::arg("config"));
    m.def("holder_margin", &functionals::holder_margin, py::arg("trace"),
          py::arg("trajectory"), py::arg("kernel"), py::arg("config"));
    m.def("fit_constants", &functionals::fit_constants, py::arg("trace"),
          py::arg("kernel"));

    // --- harness --------------------------------------------------------------
    py::class_<harness::FramesParams>(m, "FramesParams")
        .def(py::init<>())
        .def_readwrite("T0", &harness::FramesParams::T0)
        .def_readwrite("j_max", &harness::FramesParams::j_max)
        .def_readwrite("base", &harness::FramesParams::base)
        .def_readwrite("divergence_threshold",
                       &harness::FramesParams::divergence_threshold);

    py::class_<harness::SweepPlan>(m, "SweepPlan")
        .def(py::init<>())
        .def_readwrite("base", &harness::SweepPlan::base)
        .def_readwrite("epsilons", &harness::SweepPlan::epsilons)
        .def_readwrite("parallelism", &harness::SweepPlan::parallelism);

    py::class_<harness::LifespanRecord>(m, "LifespanRecord")
        .def_readonly("epsilon", &harness::LifespanRecord::epsilon)
        .def_readonly("status", &harness::LifespanRecord::status)
        .def_readonly("t_blowup", &harness::LifespanRecord::t_blowup)
        .def_readonly("envelope_value", &harness::LifespanRecord::envelope_value);

    py::class_<harness::SweepResult>(m, "SweepResult")
        .def_readonly("records", &harness::SweepResult::records)
        .def_readonly("inconclusive", &harness::SweepResult::inconclusive)
        .def_readonly("warning", &harness::SweepResult::warning);

    py::enum_<harness::Verdict>(m, "Verdict")
        .value("PASS", harness::Verdict::Pass)
        .value("FAIL", harness::Verdict::Fail)
        .value("INCONCLUSIVE", harness::Verdict::Inconclusive);

    py::class_<harness::ScalingFit>(m, "ScalingFit")
        .def_readonly("slope", &harness::ScalingFit::slope)
        .def_readonly("intercept", &harness::ScalingFit::intercept)
        .def_readonly("r2", &harness::ScalingFit::r2)
        .def_readonly("verdict", &harness::ScalingFit::verdict)
        .def_readonly("target_slope", &harness::ScalingFit::target_slope)
        .def_readonly("C_hat", &harness::ScalingFit::C_hat)
        .def_readonly("envelope_ok", &harness::ScalingFit::envelope_ok)
        .def_readonly("note", &harness::ScalingFit::note);

    m.def("sweep", &harness::sweep, py::arg("plan"),
          py::arg("frames_params") = harness::FramesParams{},
          py::call_guard<py::gil_scoped_release>());
    m.def("fit_scaling", &harness::fit_scaling, py::arg("records"),
          py::arg("classifier"), py::arg("slack") = 0.5);
    m.def("emit_records_csv", &harness::emit_records_csv, py::arg("records"),
          py::arg("path"));
    m.def("parse_records_csv", &harness::parse_records_csv, py::arg("path"));
    m.def("parse_config_file", &harness::parse_config_file, py::arg("path"));

    // --- verification ------------------------------------------------------------
    py::class_<verify::Record>(m, "VerificationRecord")
        .def_readonly("check_id", &verify::Record::check_id)
        .def_readonly("statement", &verify::Record::statement)
        .def_readonly("margin", &verify::Record::margin)
        .def_readonly("pass_", &verify::Record::pass);

    m.def("specialfn_suite", &verify::specialfn_suite,
          py::arg("quad") = default_quad);
    m.def("functional_suite", &verify::functional_suite, py::arg("config"),
          py::arg("quad") = default_quad);
    m.def("golden_scale_invariant", &verify::golden_scale_invariant,
          py::arg("dr") = 1.0 / 64);
    m.def("golden_scattering", &verify::golden_scattering, py::arg("dr") = 1.0 / 64);
}
