#include <doctest.h>

#include <cmath>

#include "cwave/functionals.hpp"

using namespace cwave;
using namespace cwave::functionals;

namespace {

solver::ModelConfig si_config(double eps = 0.3, double dr = 1.0 / 32) {
    solver::ModelConfig cfg;
    cfg.n = 1;
    cfg.exps = {1.5, 1.5};
    cfg.damping = DampingSpec::scale_invariant(1.0);
    cfg.epsilon = eps;
    cfg.grid.dr = dr;
    cfg.time.t_max = 12.0;
    return cfg;
}

solver::ModelConfig scat_config(double eps = 0.3, double dr = 1.0 / 32) {
    solver::ModelConfig cfg;
    cfg.n = 1;
    cfg.exps = {2.0, 2.0};
    cfg.damping = DampingSpec::scattering(1.0, 2.0);
    cfg.epsilon = eps;
    cfg.grid.dr = dr;
    cfg.time.t_max = 12.0;
    return cfg;
}

}  // namespace

TEST_SUITE("functionals") {

TEST_CASE("kernel values and mode gating") {
    const auto cfg = si_config();
    const auto k = build_kernel(cfg);
    CHECK(k.psi1(0.0, 0.0) == doctest::Approx(2.0));  // e^0 phi(0), n = 1

    // psi2(0, 0) for n = 3, mu = 2: rho(0) phi(0) = sqrt(pi/2) e^{-1} 4 pi
    solver::ModelConfig c3 = cfg;
    c3.n = 3;
    c3.damping = DampingSpec::scale_invariant(2.0);
    c3.grid.dr = 1.0 / 16;
    c3.time.t_max = 2.0;
    const auto k3 = build_kernel(c3);
    CHECK(k3.psi2(0.0, 0.0) ==
          doctest::Approx(std::sqrt(M_PI / 2.0) * std::exp(-1.0) * 4.0 * M_PI)
              .epsilon(1e-9));

    const auto kscat = build_kernel(scat_config());
    CHECK_THROWS_AS(kscat.psi2(0.0, 0.0), std::logic_error);
    CHECK_THROWS_AS(kscat.rho_at(1.0), std::logic_error);
}

TEST_CASE("trace of the zero run is zero and rejects empty trajectories") {
    auto cfg = si_config(0.0);
    cfg.time.t_max = 1.0;
    const auto traced = run_with_trace(cfg);
    for (size_t k = 0; k < traced.trace.times.size(); ++k) {
        CHECK(traced.trace.U0[k] == 0.0);
        CHECK(traced.trace.U1[k] == 0.0);
        CHECK(traced.trace.V0[k] == 0.0);
        CHECK(traced.trace.V1[k] == 0.0);
    }
    CHECK(std::isnan(traced.trace.I_mu));
    CHECK(std::isnan(traced.trace.J));
    CHECK_THROWS_AS(trace({}, traced.kernel), std::invalid_argument);

    const auto fits = fit_constants(traced.trace, traced.kernel);
    CHECK_FALSE(fits.valid);
    CHECK(fits.note.find("empty signal") != std::string::npos);
}

TEST_CASE("U1(0) equals the weighted initial velocity") {
    const auto cfg = si_config();
    const auto traced = run_with_trace(cfg);
    // u1 profile integrated against phi with the n = 1 surface factor 2
    double expect = 0.0;
    const double dr = cfg.grid.dr;
    const auto& k = traced.kernel;
    const auto& s0 = traced.snapshots.front();
    for (size_t i = 0; i < s0.size(); ++i) {
        const bool end = (i == 0) || (i + 1 == s0.size());
        expect += s0.du[i] * k.phi_grid[i] * 2.0 * dr * (end ? 0.5 : 1.0);
    }
    CHECK(traced.trace.U1.front() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(traced.trace.U1.front() > 0.0);
}

TEST_CASE("epsilon-linearity of the fitted K0") {
    const auto t1 = run_with_trace(si_config(0.3));
    const auto t2 = run_with_trace(si_config(0.15));
    const auto f1 = fit_constants(t1.trace, t1.kernel);
    const auto f2 = fit_constants(t2.trace, t2.kernel);
    REQUIRE(f1.valid);
    REQUIRE(f2.valid);
    CHECK(f1.K0 == doctest::Approx(f2.K0).epsilon(0.10));
    CHECK(f1.K1 > 0.0);
    CHECK(f2.K1 > 0.0);
}

TEST_CASE("data weights are positive for admissible data") {
    const auto traced = run_with_trace(si_config());
    CHECK(traced.trace.I_mu > 0.0);
    CHECK(traced.trace.J > 0.0);
    const auto scat = run_with_trace(scat_config());
    CHECK(scat.trace.J > 0.0);
    CHECK(std::isnan(scat.trace.I_mu));
}

TEST_CASE("sign bounds hold along both golden runs") {
    for (const auto& cfg : {si_config(), scat_config()}) {
        const auto traced = run_with_trace(cfg);
        const auto& tr = traced.trace;
        double scale = 0.0;
        for (size_t k = 0; k < tr.times.size(); ++k)
            scale = std::max({scale, std::abs(tr.U0[k]), std::abs(tr.V0[k]),
                              std::abs(tr.V1[k])});
        const double tol = 10.0 * tr.quad_tolerance + 1e-12 * scale;
        for (size_t k = 0; k < tr.times.size(); ++k) {
            CHECK(tr.U0[k] >= -tol);
            CHECK(tr.V0[k] >= -tol);
            CHECK(tr.V1[k] >= -tol);
        }
    }
}

TEST_CASE("functional ODE residual: trivial cases and golden tolerance") {
    // linear run: sources off, so residual compares two vanishing sides
    auto lin = si_config();
    lin.nonlinear = false;
    lin.epsilon = 0.0;
    const auto zero = run_with_trace(lin);
    const auto rep0 = check_u0_ode(zero.trace, zero.snapshots, zero.kernel);
    CHECK(rep0.rel_residual == 0.0);

    const auto traced = run_with_trace(si_config());
    const auto rep = check_u0_ode(traced.trace, traced.snapshots, traced.kernel);
    CHECK(rep.rel_residual < 5e-2);

    FunctionalTrace tiny;
    tiny.times = {0.0, 0.1, 0.2};
    tiny.U0 = tiny.U1 = tiny.V0 = tiny.V1 = tiny.Fp = tiny.Fq = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(check_u0_ode(tiny, {}, traced.kernel), std::invalid_argument);
}

TEST_CASE("residual shrinks under refinement") {
    const auto coarse = run_with_trace(si_config(0.3, 1.0 / 32));
    const auto fine = run_with_trace(si_config(0.3, 1.0 / 64));
    const auto rc = check_u0_ode(coarse.trace, coarse.snapshots, coarse.kernel);
    const auto rf = check_u0_ode(fine.trace, fine.snapshots, fine.kernel);
    CHECK(rf.rel_residual < rc.rel_residual);
}

TEST_CASE("frame inequalities on the golden scale-invariant run") {
    const auto cfg = si_config();
    const auto traced = run_with_trace(cfg);
    const auto rep = check_frames(traced.trace, traced.snapshots, traced.kernel, cfg);
    CHECK(rep.frames_hold);
    CHECK(rep.C_hat > 0.0);
    CHECK(rep.K_hat > 0.0);
    CHECK(rep.precursor_margin > -0.02);

    const double holder = holder_margin(traced.trace, traced.snapshots, traced.kernel, cfg);
    CHECK(holder > -1e-6);
}

TEST_CASE("frame inequalities and the V1 floor on the golden scattering run") {
    const auto cfg = scat_config();
    const auto traced = run_with_trace(cfg);
    const auto rep = check_frames(traced.trace, traced.snapshots, traced.kernel, cfg);
    CHECK(rep.frames_hold);
    CHECK(rep.K2 > 0.0);
    CHECK(rep.K3 > 0.0);
    CHECK(rep.v1_floor_from_zero);  // the floor holds from t = 0 on
    CHECK(rep.scattering_margin >= -1e-9);
    CHECK_THROWS_AS(holder_margin(traced.trace, traced.snapshots, traced.kernel, cfg),
                    std::logic_error);
}

TEST_CASE("zero run: frame inequalities hold with equality") {
    auto cfg = scat_config(0.0);
    cfg.time.t_max = 2.0;
    const auto traced = run_with_trace(cfg);
    const auto rep = check_frames(traced.trace, traced.snapshots, traced.kernel, cfg);
    CHECK(rep.frames_hold);
    CHECK(rep.note.find("equality") != std::string::npos);
}

TEST_CASE("non-monotone trace time grids are rejected") {
    const auto cfg = si_config();
    const auto traced = run_with_trace(cfg);
    FunctionalTrace bad = traced.trace;
    if (bad.times.size() >= 3) std::swap(bad.times[1], bad.times[2]);
    CHECK_THROWS_AS(check_frames(bad, traced.snapshots, traced.kernel, cfg),
                    std::invalid_argument);
}

}  // TEST_SUITE
