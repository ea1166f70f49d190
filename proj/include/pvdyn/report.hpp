#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pvdyn/analysis.hpp"
#include "pvdyn/calibration.hpp"
#include "pvdyn/longrun.hpp"

namespace pvdyn {

/// Deterministic %.12g rendering shared by all CSV writers.
std::string format_number(double v);

std::string outcome_name(RunOutcome outcome);

/// Provenance stamped into every artifact: which calibration produced it,
/// under which adoption assumptions, by which command.
struct OutputMeta {
    std::uint64_t calibration_hash = 0;
    AdoptionModel adoption;
    std::string command;
};

OutputMeta make_meta(const CalibrationDocument& doc, std::string command);

/// '#'-prefixed provenance header shared by all CSV outputs.
void write_csv_header(std::ostream& os, const OutputMeta& meta);

void write_potential_csv(std::ostream& os, const OutputMeta& meta, const PotentialCurve& curve);

/// JSON summary of the fixed-point structure behind a potential curve.
std::string equilibria_json(const OutputMeta& meta, const PotentialCurve& curve,
                            const EquilibriumReport& report);

void write_trajectory_csv(std::ostream& os, const OutputMeta& meta, const Trajectory& traj);

void write_longrun_csv(std::ostream& os, const OutputMeta& meta, const LongRunResult& result);

void write_sweep_csv(std::ostream& os, const OutputMeta& meta,
                     const std::vector<SweepEntry>& entries);

/// One analysis threshold with its computation status: "ok",
/// "assumption-warning" (result usable, sampled premises violated),
/// "bracket-failed" or another error tag (value is NaN then).
struct ThresholdValue {
    double value = 0.0;
    std::string status = "ok";
};

struct ThresholdsReport {
    ThresholdValue theta_sharp;      // min over capacity of the best margin
    ThresholdValue a_sharp;          // charge that guarantees stability
    ThresholdValue theta_dagger;     // cost where the break-even policy tips over
    ThresholdValue a_dagger;         // minimum stabilizing charge
    ThresholdValue r_dagger;         // equilibrium capacity just above it
    ThresholdValue r_limit;          // supremum of stably reachable capacity
    ThresholdValue theta_limit;      // cost at which the supremum is attained
};

std::string thresholds_json(const OutputMeta& meta, const ThresholdsReport& report);

}  // namespace pvdyn
