#pragma once

#include <string>
#include <vector>

#include "cwave/functionals.hpp"
#include "cwave/harness.hpp"

namespace cwave::verify {

/// One verified statement: a stable identifier, a human-readable form of
/// the inequality or identity, the worst margin observed (sign convention:
/// nonnegative = holds), and the verdict.
struct Record {
    std::string check_id;
    std::string statement;
    double margin = 0.0;
    bool pass = false;
};

/// Property suite over the special functions: closed forms, derivative and
/// eigenfunction identities, monotonicity, damping-ratio windows, weight
/// bounds, and the ball-integral growth rate.
std::vector<Record> specialfn_suite(const QuadratureSpec& quad = {});

/// Golden instances driven by the functional suite. `dr` controls the
/// reference resolution.
solver::ModelConfig golden_scale_invariant(double dr = 1.0 / 64);
solver::ModelConfig golden_scattering(double dr = 1.0 / 64);

/// Functional inequality suite on one traced run: sign bounds, the
/// second-order functional ODE residual, precursor and frame inequalities,
/// data-weight positivity, and constant fits.
std::vector<Record> functional_suite(const solver::ModelConfig& config,
                                     const QuadratureSpec& quad = {});

/// Fitted constants from the golden runs, for feeding the frames table.
struct FittedConstants {
    functionals::ConstantFits scale_invariant;
    functionals::FrameReport scale_invariant_frames;
    functionals::ConstantFits scattering;
    functionals::FrameReport scattering_frames;
};
FittedConstants fit_golden_constants(double dr = 1.0 / 64);

void write_records_csv(const std::vector<Record>& records, const std::string& path);
std::string format_records_text(const std::vector<Record>& records);
bool all_pass(const std::vector<Record>& records);

}  // namespace cwave::verify
