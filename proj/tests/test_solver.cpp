#include <doctest.h>

#include <cmath>

#include "cwave/solver.hpp"
#include "oracles.hpp"

using namespace cwave;
using namespace cwave::solver;

namespace {

ModelConfig linear_config(double dr) {
    ModelConfig cfg;
    cfg.n = 1;
    cfg.exps = {2.0, 2.0};
    cfg.damping = DampingSpec::none();
    cfg.epsilon = 0.5;
    cfg.nonlinear = false;
    cfg.grid.dr = dr;
    cfg.time.t_max = 1.0;
    cfg.snap.enabled = false;
    return cfg;
}

ModelConfig golden_config(double eps, double dr = 1.0 / 32) {
    ModelConfig cfg;
    cfg.n = 1;
    cfg.exps = {2.0, 2.0};
    cfg.damping = DampingSpec::none();
    cfg.epsilon = eps;
    cfg.grid.dr = dr;
    cfg.time.t_max = 60.0;
    cfg.snap.enabled = false;
    return cfg;
}

double l2_error_vs_characteristics(double dr) {
    auto cfg = linear_config(dr);
    auto st = init_state(cfg);
    const double dt = cfg.dt0();
    const int steps = static_cast<int>(std::llround(1.0 / dt));
    for (int i = 0; i < steps; ++i) st = step(st, cfg, dt);
    oracles::DAlembert oracle{cfg.data.R, cfg.epsilon * cfg.data.v0_amp,
                              cfg.epsilon * cfg.data.v1_amp};
    double acc = 0.0;
    for (int i = 0; i < st.active_nodes(); ++i) {
        const double d = st.v[i] - oracle.value(st.t, i * st.dr);
        acc += d * d * st.dr;
    }
    return std::sqrt(acc);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("init_state scales data and honors the support hypothesis") {
    ModelConfig cfg = golden_config(0.4);
    auto st = init_state(cfg);
    CHECK(st.t == 0.0);
    CHECK(st.u[0] == doctest::Approx(0.4 * 0.5 * std::exp(1.0 - 1.0)).epsilon(1e-14));
    CHECK(st.du[0] == doctest::Approx(0.4 * 1.0).epsilon(1e-14));

    // supp check: zero outside the ball of radius R
    for (size_t i = 0; i < st.size(); ++i)
        if (i * st.dr > cfg.data.R) {
            CHECK(st.u[i] == 0.0);
            CHECK(st.dv[i] == 0.0);
        }

    // mass scales linearly with epsilon
    auto mass = [](const RadialState& s) {
        double acc = 0.0;
        for (size_t i = 0; i < s.size(); ++i) acc += s.u[i] * s.dr;
        return acc;
    };
    cfg.epsilon = 0.8;
    auto st2 = init_state(cfg);
    CHECK(mass(st2) == doctest::Approx(2.0 * mass(st)).epsilon(1e-12));

    // eps = 0 gives the identically zero state
    cfg.epsilon = 0.0;
    auto zero = init_state(cfg);
    CHECK(zero.peak_velocity() == 0.0);
}

TEST_CASE("init_state rejects hypothesis-violating data") {
    ModelConfig cfg = golden_config(0.3);
    cfg.data.u0_amp = 2.0;  // u1 < u0
    CHECK_THROWS_WITH_AS(init_state(cfg), doctest::Contains("u1 >= u0"),
                         std::invalid_argument);
    cfg = golden_config(0.3);
    cfg.data.v1_amp = 0.0;  // v1 trivial with integrable damping
    CHECK_THROWS_AS(init_state(cfg), std::invalid_argument);
    cfg = golden_config(0.3);
    cfg.damping = DampingSpec::scale_invariant(1.0);
    cfg.data.v0_amp = 0.0;  // v0 trivial in the scale-invariant case
    CHECK_THROWS_AS(init_state(cfg), std::invalid_argument);
    cfg = golden_config(0.3);
    cfg.data.u0_amp = -0.1;
    CHECK_THROWS_AS(init_state(cfg), std::invalid_argument);
}

TEST_CASE("zero state is an equilibrium and CFL is enforced") {
    ModelConfig cfg = golden_config(0.0);
    auto st = init_state(cfg);
    auto next = step(st, cfg, cfg.dt0());
    CHECK(next.peak_velocity() == 0.0);
    for (size_t i = 0; i < next.size(); ++i) CHECK(next.u[i] == 0.0);
    CHECK_THROWS_AS(step(st, cfg, 2.0 * cfg.grid.dr), std::invalid_argument);
}

TEST_CASE("linear evolution matches the characteristics oracle at order 2") {
    const double e1 = l2_error_vs_characteristics(1.0 / 64);
    const double e2 = l2_error_vs_characteristics(1.0 / 128);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.9);
    CHECK(e2 < e1);
}

TEST_CASE("classical damping dissipates the linear energy") {
    ModelConfig cfg = linear_config(1.0 / 64);
    cfg.damping = DampingSpec::classical();
    cfg.time.t_max = 2.0;
    auto st = init_state(cfg);
    const double dt = cfg.dt0();
    auto energy = [&](const RadialState& s, const std::vector<double>& f,
                      const std::vector<double>& df) {
        double acc = 0.0;
        for (int i = 1; i + 1 < s.active_nodes(); ++i) {
            const double grad = (f[i + 1] - f[i - 1]) / (2.0 * s.dr);
            acc += 0.5 * (df[i] * df[i] + grad * grad) * s.dr;
        }
        return acc;
    };
    double e_u = energy(st, st.u, st.du);
    double e_v = energy(st, st.v, st.dv);
    for (int i = 0; i < 256; ++i) {
        st = step(st, cfg, dt);
        if (i % 32 == 31) {
            const double eu_now = energy(st, st.u, st.du);
            const double ev_now = energy(st, st.v, st.dv);
            CHECK(eu_now <= e_u * (1.0 + 1e-10));
            CHECK(ev_now <= e_v * (1.0 + 1e-10));
            e_u = eu_now;
            e_v = ev_now;
        }
    }
}

TEST_CASE("finite speed of propagation") {
    ModelConfig cfg = golden_config(0.5, 1.0 / 32);
    cfg.time.t_max = 3.0;
    cfg.snap.enabled = true;
    cfg.snap.dt_snap = 0.5;
    auto rr = run(cfg);
    for (const auto& s : rr.snapshots) {
        double running_max = 0.0;
        for (size_t i = 0; i < s.size(); ++i)
            running_max = std::max({running_max, std::abs(s.u[i]), std::abs(s.v[i]),
                                    std::abs(s.du[i]), std::abs(s.dv[i])});
        const double support = cfg.data.R + s.t + 2.0 * s.dr;
        for (size_t i = 0; i < s.size(); ++i)
            if (i * s.dr > support) {
                CHECK(std::abs(s.u[i]) <= 1e-10 * running_max);
                CHECK(std::abs(s.v[i]) <= 1e-10 * running_max);
            }
    }
}

TEST_CASE("golden family blows up and the time is monotone in epsilon") {
    const auto r1 = run(golden_config(0.5));
    const auto r2 = run(golden_config(0.35));
    REQUIRE(r1.report.status == RunStatus::BlowupDetected);
    REQUIRE(r2.report.status == RunStatus::BlowupDetected);
    REQUIRE(r1.report.t_blowup_estimate.has_value());
    REQUIRE(r2.report.t_blowup_estimate.has_value());
    CHECK(*r1.report.t_blowup_estimate < *r2.report.t_blowup_estimate);
    CHECK(*r1.report.t_blowup_estimate == doctest::Approx(6.12).epsilon(0.05));
    CHECK(*r1.report.t_blowup_estimate >= r1.report.last_t - 1e-9);
}

TEST_CASE("blow-up estimate is insensitive to the detection threshold") {
    auto cfg = golden_config(0.5);
    const auto base = run(cfg);
    cfg.time.blowup_threshold *= 2.0;
    const auto doubled = run(cfg);
    REQUIRE(base.report.t_blowup_estimate.has_value());
    REQUIRE(doubled.report.t_blowup_estimate.has_value());
    const double rel = std::abs(*doubled.report.t_blowup_estimate -
                                *base.report.t_blowup_estimate) /
                       *base.report.t_blowup_estimate;
    CHECK(rel < 0.02);
}

TEST_CASE("eps = 0 runs to completion with a zero trajectory") {
    ModelConfig cfg = golden_config(0.0);
    cfg.time.t_max = 1.0;
    cfg.snap.enabled = true;
    const auto rr = run(cfg);
    CHECK(rr.report.status == RunStatus::CompletedToTmax);
    CHECK_FALSE(rr.report.t_blowup_estimate.has_value());
    for (const auto& s : rr.snapshots)
        CHECK(s.peak_velocity() == 0.0);
}

TEST_CASE("config validation catches bad grids and exponents") {
    ModelConfig cfg = golden_config(0.3);
    cfg.exps.p = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = golden_config(0.3);
    cfg.time.cfl = 0.9;
    cfg.n = 3;  // cfl sqrt(n) > 1
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = golden_config(0.3);
    cfg.grid.dr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
