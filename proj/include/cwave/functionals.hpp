#pragma once

#include <string>
#include <vector>

#include "cwave/solver.hpp"

namespace cwave::functionals {

/// Weight pair used by the functional quadratures:
///   psi1(t, r) = e^{-t} phi(r)
///   psi2(t, r) = rho(t) phi(r)   (scale-invariant damping only)
/// phi is tabulated on the solver grid once; rho is evaluated per time.
struct WeightKernel {
    int n = 1;
    DampingSpec damping;
    frames::ExponentPair exps;
    double epsilon = 0.0;
    double R = 1.0;
    QuadratureSpec quad;
    double dr = 0.0;
    std::vector<double> phi_grid;

    bool uses_psi2() const { return damping.mode == DampingMode::ScaleInvariant; }
    double phi_at(double r) const;
    double psi1(double t, double r) const;
    double psi2(double t, double r) const;  // throws unless scale-invariant
    double rho_at(double t) const;          // throws unless scale-invariant
};

WeightKernel build_kernel(const solver::ModelConfig& config,
                          const QuadratureSpec& quad = {});

/// Weighted space averages along a trajectory:
///   U0 = <u, psi1>, U1 = <du, psi1>, V0 = <v, psi_v>, V1 = <dv, psi_v>
/// with psi_v = psi2 under scale-invariant damping and psi1 otherwise.
/// Fp = <|dv|^p, psi1> and Fq = <|du|^q, psi_v> are the source integrals
/// the inequality checks consume. I_mu and J are the initial-data weights
/// (I_mu only in the scale-invariant case; both NaN for eps = 0 runs).
struct FunctionalTrace {
    std::vector<double> times;
    std::vector<double> U0, U1, V0, V1;
    std::vector<double> Fp, Fq;
    double I_mu = 0.0;
    double J = 0.0;
    double quad_tolerance = 0.0;  // self-reported trapezoid-vs-Simpson budget
};

FunctionalTrace trace(const std::vector<solver::RadialState>& trajectory,
                      const WeightKernel& kernel);

/// run() followed by build_kernel() and trace().
struct TracedRun {
    solver::BlowupReport report;
    std::vector<solver::RadialState> snapshots;
    WeightKernel kernel;
    FunctionalTrace trace;
};
TracedRun run_with_trace(const solver::ModelConfig& config,
                         const QuadratureSpec& quad = {});

/// Residual of U0'' + 3 U0' + U0 = <|dv|^p, psi1> in relative sup norm,
/// finite differences at the snapshot cadence (needs >= 5 snapshots).
struct OdeResidualReport {
    double rel_residual = 0.0;
    double scale = 0.0;
    int points_used = 0;
    double cadence = 0.0;
};
OdeResidualReport check_u0_ode(const FunctionalTrace& trace,
                               const std::vector<solver::RadialState>& trajectory,
                               const WeightKernel& kernel);

/// Both frame inequalities plus their precursors, evaluated by quadrature
/// over the trace. C_hat/K_hat are the largest constants keeping
///   U1(t) >= C_hat int_{T6}^t e^{2(s-t)} (1+s)^{-(n-1)(p-1)/2 - mu p/2} V1^p ds
///   V1(t) >= K_hat int_{T6}^t (1+s)^{-(n-1)(q-1)/2 + mu/2} U1^q ds
/// at every sampled t >= T6_hat (mu = 0 outside the scale-invariant case;
/// T6_hat scanned as the first time from which U1 and V1 stay positive for
/// five consecutive samples). precursor_margin is the worst relative margin
/// of U1(t) >= int_0^t e^{2(s-t)} Fp ds. For integrable damping, K2/K3 fit
/// the floor V1(t) >= K2 eps + K3 A(t), A = cumulative Fq.
struct FrameReport {
    double T6_hat = 0.0;
    double C_hat = 0.0;
    double K_hat = 0.0;
    bool frames_hold = false;
    double precursor_margin = 0.0;
    double K2 = 0.0;
    double K3 = 0.0;
    double scattering_margin = 0.0;
    bool v1_floor_from_zero = false;
    std::string note;
};
FrameReport check_frames(const FunctionalTrace& trace,
                         const std::vector<solver::RadialState>& trajectory,
                         const WeightKernel& kernel, const solver::ModelConfig& config);

/// Worst relative margin of the cross bound
///   V1(t)^p <= Fp(t) * (rho(t)^{p'} e^{p't/p} int_{B_{R+t}} phi)^{p/p'}
/// over sampled times (scale-invariant case only).
double holder_margin(const FunctionalTrace& trace,
                     const std::vector<solver::RadialState>& trajectory,
                     const WeightKernel& kernel, const solver::ModelConfig& config);

/// Plateau-scan fits of the lower-bound constants. Invalid fits (zero
/// signal, sign violations) come back with valid = false and a note
/// instead of throwing.
struct ConstantFits {
    bool valid = false;
    std::string note;
    double K0 = 0.0;
    double K1 = 0.0;
    double T3_hat = 0.0;
    double K2 = 0.0;
    double K3 = 0.0;
};
ConstantFits fit_constants(const FunctionalTrace& trace, const WeightKernel& kernel);

}  // namespace cwave::functionals
