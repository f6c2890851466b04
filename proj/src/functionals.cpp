#include "cwave/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cwave::functionals {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTiny = 1e-300;

// Trapezoid weights with the radial surface factor |S^{n-1}| r^{n-1} dr.
double surface_weight(int n, double r, double dr, bool endpoint) {
    const double radial = (n == 1) ? 1.0 : std::pow(r, n - 1);
    return specialfn::sphere_surface(n) * radial * dr * (endpoint ? 0.5 : 1.0);
}

double grid_integral(const std::vector<double>& f, const WeightKernel& k, double scale) {
    const size_t m = std::min(f.size(), k.phi_grid.size());
    double sum = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const bool endpoint = (i == 0) || (i + 1 == m);
        sum += f[i] * k.phi_grid[i] * surface_weight(k.n, i * k.dr, k.dr, endpoint);
    }
    return scale * sum;
}

// Simpson value on the same grid, used only for the self-reported error.
double grid_integral_simpson(const std::vector<double>& f, const WeightKernel& k,
                             double scale) {
    const size_t m = std::min(f.size(), k.phi_grid.size());
    if (m < 3) return grid_integral(f, k, scale);
    auto g = [&](size_t i) {
        const double radial = (k.n == 1) ? 1.0 : std::pow(i * k.dr, k.n - 1);
        return f[i] * k.phi_grid[i] * specialfn::sphere_surface(k.n) * radial;
    };
    double sum = 0.0;
    size_t i = 0;
    for (; i + 2 < m; i += 2) sum += (g(i) + 4.0 * g(i + 1) + g(i + 2)) * k.dr / 3.0;
    if (i + 1 < m) sum += 0.5 * (g(i) + g(i + 1)) * k.dr;
    return scale * sum;
}

double power_integral(const std::vector<double>& f, double e, const WeightKernel& k,
                      double scale) {
    const size_t m = std::min(f.size(), k.phi_grid.size());
    double sum = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const bool endpoint = (i == 0) || (i + 1 == m);
        sum += std::pow(std::abs(f[i]), e) * k.phi_grid[i] *
               surface_weight(k.n, i * k.dr, k.dr, endpoint);
    }
    return scale * sum;
}

void require_monotone(const std::vector<double>& times, const char* who) {
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument(std::string(who) + ": non-monotone time grid");
}

bool is_integrable_mode(DampingMode m) {
    return m == DampingMode::Scattering || m == DampingMode::None;
}

// Fit of the floor V1 >= K2 eps + K3 A with positive coefficients: a
// least-squares pass first, shrunk uniformly until dominated by V1; when
// that clips a coefficient away, fall back to the direct construction
// K2 = 0.95 min(V1)/eps, K3 = min (V1 - K2 eps)/A, which is positive
// whenever V1 stays positive.
struct FloorFit {
    bool ok = false;
    double K2 = 0.0, K3 = 0.0, margin = 0.0;
    bool from_zero = false;
};
FloorFit fit_floor(const std::vector<double>& V1, const std::vector<double>& A,
                   double eps) {
    FloorFit out;
    const size_t K = V1.size();
    if (K < 2 || !(eps > 0.0)) return out;

    double v1_min = std::numeric_limits<double>::infinity();
    for (double v : V1) v1_min = std::min(v1_min, v);
    if (!(v1_min > 0.0)) return out;

    double K2 = 0.0, K3 = 0.0;
    {
        double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
        for (size_t k = 0; k < K; ++k) {
            s11 += eps * eps;
            s12 += eps * A[k];
            s22 += A[k] * A[k];
            b1 += eps * V1[k];
            b2 += A[k] * V1[k];
        }
        const double det = s11 * s22 - s12 * s12;
        if (std::abs(det) > kTiny * std::max(1.0, s11 * s22)) {
            K2 = (b1 * s22 - b2 * s12) / det;
            K3 = (s11 * b2 - s12 * b1) / det;
        }
        double shrink = std::numeric_limits<double>::infinity();
        if (K2 > 0.0 && K3 > 0.0) {
            for (size_t k = 0; k < K; ++k) {
                const double floor_k = K2 * eps + K3 * A[k];
                if (floor_k > kTiny) shrink = std::min(shrink, V1[k] / floor_k);
            }
            if (std::isfinite(shrink) && shrink < 1.0) {
                K2 *= shrink * (1.0 - 1e-9);
                K3 *= shrink * (1.0 - 1e-9);
            }
        } else {
            K2 = K3 = 0.0;
        }
    }
    if (!(K2 > 0.0) || !(K3 > 0.0)) {
        K2 = 0.95 * v1_min / eps;
        K3 = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < K; ++k)
            if (A[k] > kTiny) K3 = std::min(K3, (V1[k] - K2 * eps) / A[k]);
        if (!std::isfinite(K3)) return out;  // no accumulated source at all
    }

    out.K2 = K2;
    out.K3 = K3;
    out.ok = K2 > 0.0 && K3 > 0.0;
    double margin = std::numeric_limits<double>::infinity();
    bool from_zero = true;
    for (size_t k = 0; k < K; ++k) {
        const double floor_k = K2 * eps + K3 * A[k];
        const double scale = std::max({V1[k], floor_k, 1e-30});
        margin = std::min(margin, (V1[k] - floor_k) / scale);
        if (V1[k] < K2 * eps * (1.0 - 1e-9)) from_zero = false;
    }
    out.margin = margin;
    out.from_zero = from_zero;
    return out;
}

}  // namespace

double WeightKernel::phi_at(double r) const { return specialfn::phi(n, r, quad); }

double WeightKernel::psi1(double t, double r) const { return std::exp(-t) * phi_at(r); }

double WeightKernel::rho_at(double t) const {
    if (!uses_psi2())
        throw std::logic_error("WeightKernel: psi2/rho need scale-invariant damping");
    return specialfn::rho(damping.mu, t, quad);
}

double WeightKernel::psi2(double t, double r) const { return rho_at(t) * phi_at(r); }

WeightKernel build_kernel(const solver::ModelConfig& config, const QuadratureSpec& quad) {
    config.validate();
    quad.validate();
    WeightKernel k;
    k.n = config.n;
    k.damping = config.damping;
    k.exps = config.exps;
    k.epsilon = config.epsilon;
    k.R = config.data.R;
    k.quad = quad;
    k.dr = config.grid.dr;
    const int nodes = static_cast<int>(std::floor(config.r_max() / k.dr)) + 1;
    k.phi_grid.resize(nodes);
    for (int i = 0; i < nodes; ++i)
        k.phi_grid[i] = specialfn::phi(k.n, i * k.dr, quad);
    return k;
}

FunctionalTrace trace(const std::vector<solver::RadialState>& trajectory,
                      const WeightKernel& kernel) {
    if (trajectory.empty())
        throw std::invalid_argument("trace: trajectory must not be empty");
    FunctionalTrace out;
    const size_t K = trajectory.size();
    out.times.resize(K);
    out.U0.resize(K);
    out.U1.resize(K);
    out.V0.resize(K);
    out.V1.resize(K);
    out.Fp.resize(K);
    out.Fq.resize(K);
    const double p = kernel.exps.p, q = kernel.exps.q;
    double budget = 0.0;
    for (size_t k = 0; k < K; ++k) {
        const auto& s = trajectory[k];
        const double e1 = std::exp(-s.t);
        const double wv = kernel.uses_psi2() ? kernel.rho_at(s.t) : e1;
        out.times[k] = s.t;
        out.U0[k] = grid_integral(s.u, kernel, e1);
        out.U1[k] = grid_integral(s.du, kernel, e1);
        out.V0[k] = grid_integral(s.v, kernel, wv);
        out.V1[k] = grid_integral(s.dv, kernel, wv);
        out.Fp[k] = power_integral(s.dv, p, kernel, e1);
        out.Fq[k] = power_integral(s.du, q, kernel, wv);
        budget = std::max(
            {budget, std::abs(out.U0[k] - grid_integral_simpson(s.u, kernel, e1)),
             std::abs(out.U1[k] - grid_integral_simpson(s.du, kernel, e1)),
             std::abs(out.V0[k] - grid_integral_simpson(s.v, kernel, wv)),
             std::abs(out.V1[k] - grid_integral_simpson(s.dv, kernel, wv))});
    }
    out.quad_tolerance = budget;

    const auto& first = trajectory.front();
    out.I_mu = kNaN;
    out.J = kNaN;
    if (kernel.epsilon > 0.0 && first.t == 0.0) {
        const double inv_eps = 1.0 / kernel.epsilon;
        std::vector<double> sum_vd(first.v.size());
        for (size_t i = 0; i < first.v.size(); ++i) sum_vd[i] = first.v[i] + first.dv[i];
        out.J = inv_eps * grid_integral(sum_vd, kernel, 1.0);
        if (kernel.uses_psi2()) {
            const double rho0 = kernel.rho_at(0.0);
            const double ratio0 =
                specialfn::rho_log_derivative(kernel.damping.mu, 0.0, kernel.quad);
            std::vector<double> mix(first.v.size());
            for (size_t i = 0; i < first.v.size(); ++i)
                mix[i] = first.dv[i] + (kernel.damping.mu - ratio0) * first.v[i];
            out.I_mu = rho0 * inv_eps * grid_integral(mix, kernel, 1.0);
        }
    }
    return out;
}

TracedRun run_with_trace(const solver::ModelConfig& config, const QuadratureSpec& quad) {
    TracedRun out;
    auto rr = solver::run(config);
    out.report = rr.report;
    out.snapshots = std::move(rr.snapshots);
    out.kernel = build_kernel(config, quad);
    out.trace = trace(out.snapshots, out.kernel);
    return out;
}

OdeResidualReport check_u0_ode(const FunctionalTrace& tr,
                               const std::vector<solver::RadialState>& trajectory,
                               const WeightKernel& kernel) {
    (void)kernel;
    const size_t K = tr.times.size();
    if (K < 5) throw std::invalid_argument("check_u0_ode: needs at least 5 snapshots");
    if (!trajectory.empty() && trajectory.size() != K)
        throw std::invalid_argument("check_u0_ode: trace/trajectory mismatch");
    require_monotone(tr.times, "check_u0_ode");

    // Longest near-uniform prefix; adaptive stepping can shift late
    // snapshots off the cadence lattice.
    const double h0 = tr.times[1] - tr.times[0];
    size_t P = K;
    for (size_t k = 2; k < K; ++k) {
        if (std::abs((tr.times[k] - tr.times[k - 1]) - h0) > 0.2 * h0) {
            P = k;
            break;
        }
    }
    if (P < 5) throw std::invalid_argument("check_u0_ode: uniform prefix too short");

    OdeResidualReport rep;
    rep.cadence = h0;
    rep.points_used = static_cast<int>(P);
    double max_res = 0.0, scale = 0.0;
    for (size_t k = 1; k + 1 < P; ++k) {
        const double h1 = tr.times[k] - tr.times[k - 1];
        const double h2 = tr.times[k + 1] - tr.times[k];
        const double denom = h1 * h2 * (h1 + h2);
        const double d2 =
            2.0 * (h1 * tr.U0[k + 1] - (h1 + h2) * tr.U0[k] + h2 * tr.U0[k - 1]) / denom;
        const double d1 = (h1 * h1 * tr.U0[k + 1] + (h2 * h2 - h1 * h1) * tr.U0[k] -
                           h2 * h2 * tr.U0[k - 1]) /
                          denom;
        const double res = d2 + 3.0 * d1 + tr.U0[k] - tr.Fp[k];
        max_res = std::max(max_res, std::abs(res));
        scale = std::max(scale, std::abs(d2) + 3.0 * std::abs(d1) + std::abs(tr.U0[k]) +
                                    std::abs(tr.Fp[k]));
    }
    rep.scale = scale;
    rep.rel_residual = scale > kTiny ? max_res / scale : 0.0;
    return rep;
}

FrameReport check_frames(const FunctionalTrace& tr,
                         const std::vector<solver::RadialState>& trajectory,
                         const WeightKernel& kernel,
                         const solver::ModelConfig& config) {
    (void)trajectory;
    require_monotone(tr.times, "check_frames");
    const size_t K = tr.times.size();
    FrameReport rep;

    double signal = 0.0;
    for (size_t k = 0; k < K; ++k)
        signal = std::max({signal, std::abs(tr.U1[k]), std::abs(tr.V1[k])});
    if (signal < 1e-14) {
        rep.frames_hold = true;
        rep.v1_floor_from_zero = true;
        rep.note = "zero trace: all inequalities hold with equality";
        return rep;
    }

    // Precursor: U1(t) >= int_0^t e^{2(s-t)} Fp ds, from t = 0.
    double worst = std::numeric_limits<double>::infinity();
    std::vector<double> P(K, 0.0);
    for (size_t k = 1; k < K; ++k) {
        double acc = 0.0;
        for (size_t j = 1; j <= k; ++j) {
            const double a = std::exp(2.0 * (tr.times[j - 1] - tr.times[k])) * tr.Fp[j - 1];
            const double b = std::exp(2.0 * (tr.times[j] - tr.times[k])) * tr.Fp[j];
            acc += 0.5 * (a + b) * (tr.times[j] - tr.times[j - 1]);
        }
        P[k] = acc;
        const double scale = std::max({std::abs(tr.U1[k]), acc, 1e-30});
        worst = std::min(worst, (tr.U1[k] - acc) / scale);
    }
    rep.precursor_margin = std::isfinite(worst) ? worst : 0.0;

    // T6 scan: five consecutive samples with both U1 and V1 positive.
    size_t k0 = K;
    for (size_t k = 0; k + 5 <= K; ++k) {
        bool ok = true;
        for (size_t j = k; j < k + 5; ++j)
            if (!(tr.U1[j] > 0.0) || !(tr.V1[j] > 0.0)) {
                ok = false;
                break;
            }
        if (ok) {
            k0 = k;
            break;
        }
    }
    if (k0 == K) {
        rep.note = "no window with persistently positive U1 and V1";
        rep.frames_hold = false;
        return rep;
    }
    rep.T6_hat = tr.times[k0];

    const double p = config.exps.p, q = config.exps.q;
    const double mu_eff = kernel.uses_psi2() ? kernel.damping.mu : 0.0;
    const double n1 = 0.5 * (config.n - 1);
    const auto wp = [&](double s) { return std::pow(1.0 + s, -n1 * (p - 1.0) - 0.5 * mu_eff * p); };
    const auto wq = [&](double s) { return std::pow(1.0 + s, -n1 * (q - 1.0) + 0.5 * mu_eff); };

    double c_hat = std::numeric_limits<double>::infinity();
    double k_hat = std::numeric_limits<double>::infinity();
    std::vector<double> J(K, 0.0);  // running integral for the V1 frame
    for (size_t k = k0 + 1; k < K; ++k) {
        double iu = 0.0;
        for (size_t j = k0 + 1; j <= k; ++j) {
            const auto vpow = [&](size_t idx) {
                return std::pow(std::max(tr.V1[idx], 0.0), p) * wp(tr.times[idx]) *
                       std::exp(2.0 * (tr.times[idx] - tr.times[k]));
            };
            iu += 0.5 * (vpow(j - 1) + vpow(j)) * (tr.times[j] - tr.times[j - 1]);
        }
        const auto upow = [&](size_t idx) {
            return std::pow(std::max(tr.U1[idx], 0.0), q) * wq(tr.times[idx]);
        };
        J[k] = J[k - 1] + 0.5 * (upow(k - 1) + upow(k)) * (tr.times[k] - tr.times[k - 1]);
        if (iu > kTiny) c_hat = std::min(c_hat, tr.U1[k] / iu);
        if (J[k] > kTiny) k_hat = std::min(k_hat, tr.V1[k] / J[k]);
    }
    if (std::isfinite(c_hat) && std::isfinite(k_hat)) {
        rep.C_hat = c_hat;
        rep.K_hat = k_hat;
        rep.frames_hold = c_hat > 0.0 && k_hat > 0.0;
    } else {
        rep.note = "frame integrals vanished on the sampled window";
        rep.frames_hold = false;
    }

    if (is_integrable_mode(config.damping.mode)) {
        std::vector<double> A(K, 0.0);
        for (size_t k = 1; k < K; ++k)
            A[k] = A[k - 1] + 0.5 * (tr.Fq[k] + tr.Fq[k - 1]) *
                                  (tr.times[k] - tr.times[k - 1]);
        const auto fit = fit_floor(tr.V1, A, kernel.epsilon);
        rep.K2 = fit.K2;
        rep.K3 = fit.K3;
        rep.scattering_margin = fit.margin;
        rep.v1_floor_from_zero = fit.from_zero;
        if (!fit.ok && rep.note.empty()) rep.note = "scattering floor fit degenerate";
    } else {
        rep.K2 = rep.K3 = rep.scattering_margin = kNaN;
        rep.v1_floor_from_zero = true;
    }
    return rep;
}

double holder_margin(const FunctionalTrace& tr,
                     const std::vector<solver::RadialState>& trajectory,
                     const WeightKernel& kernel, const solver::ModelConfig& config) {
    (void)trajectory;
    if (!kernel.uses_psi2())
        throw std::logic_error("holder_margin: needs scale-invariant damping");
    const double p = config.exps.p;
    const double pp = p / (p - 1.0);
    const size_t K = tr.times.size();
    const size_t stride = std::max<size_t>(1, K / 12);
    double worst = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < K; k += stride) {
        const double t = tr.times[k];
        const double ball = specialfn::phi_ball_integral(config.n, 1.0, config.data.R,
                                                         t, kernel.quad);
        const double cross =
            std::pow(kernel.rho_at(t), pp) * std::exp(pp * t / p) * ball;
        const double rhs = tr.Fp[k] * std::pow(cross, p / pp);
        const double lhs = std::pow(std::max(tr.V1[k], 0.0), p);
        const double scale = std::max({rhs, lhs, 1e-30});
        worst = std::min(worst, (rhs - lhs) / scale);
    }
    return worst;
}

ConstantFits fit_constants(const FunctionalTrace& tr, const WeightKernel& kernel) {
    ConstantFits out;
    const size_t K = tr.times.size();
    if (K == 0) {
        out.note = "empty trace";
        return out;
    }
    const double eps = kernel.epsilon;
    double signal = 0.0;
    for (size_t k = 0; k < K; ++k)
        signal = std::max({signal, std::abs(tr.V0[k]), std::abs(tr.V1[k])});
    if (!(eps > 0.0) || signal < 1e-14) {
        out.note = "empty signal: nothing to fit";
        return out;
    }
    const double tol = 10.0 * tr.quad_tolerance + 1e-12 * signal;
    for (size_t k = 0; k < K; ++k) {
        if (tr.V0[k] < -tol) {
            out.note = "hypothesis violation: V0 < 0 at t = " + std::to_string(tr.times[k]);
            return out;
        }
        if (tr.V1[k] < -tol) {
            out.note = "hypothesis violation: V1 < 0 at t = " + std::to_string(tr.times[k]);
            return out;
        }
    }

    double v0_min = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < K; ++k) v0_min = std::min(v0_min, tr.V0[k]);
    out.K0 = v0_min / eps;

    // Plateau onset: half of the first-half maximum of V1/eps, held for
    // five consecutive samples.
    double first_half_max = 0.0;
    for (size_t k = 0; k < std::max<size_t>(1, K / 2); ++k)
        first_half_max = std::max(first_half_max, tr.V1[k] / eps);
    const double level = 0.5 * first_half_max;
    size_t k3 = K;
    for (size_t k = 0; k + 5 <= K; ++k) {
        bool ok = true;
        for (size_t j = k; j < k + 5; ++j)
            if (tr.V1[j] / eps < level) {
                ok = false;
                break;
            }
        if (ok) {
            k3 = k;
            break;
        }
    }
    if (k3 == K) k3 = K / 2;
    out.T3_hat = tr.times[k3];
    double v1_min = std::numeric_limits<double>::infinity();
    for (size_t k = k3; k < K; ++k) v1_min = std::min(v1_min, tr.V1[k]);
    out.K1 = v1_min / eps;

    if (is_integrable_mode(kernel.damping.mode)) {
        std::vector<double> A(K, 0.0);
        for (size_t k = 1; k < K; ++k)
            A[k] = A[k - 1] +
                   0.5 * (tr.Fq[k] + tr.Fq[k - 1]) * (tr.times[k] - tr.times[k - 1]);
        const auto fit = fit_floor(tr.V1, A, eps);
        out.K2 = fit.K2;
        out.K3 = fit.K3;
    } else {
        out.K2 = out.K3 = kNaN;
    }
    out.valid = true;
    return out;
}

}  // namespace cwave::functionals
