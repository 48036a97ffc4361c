#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "caginalp/control.hpp"
#include "caginalp/verify.hpp"

namespace caginalp {

/// Round-trip-exact decimal formatting (17 significant digits).
std::string format_double(double v);
double parse_double(const std::string& s);

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

/// One row per mode: mode_index, eigenvalue, coefficient.
void write_field_csv(const std::filesystem::path& path, const SpectralField& field);
SpectralField read_field_csv(const std::filesystem::path& path, BasisPtr basis);

/// step, t, theta coefficients, phi coefficients.
void write_trajectory_csv(const std::filesystem::path& path, const StateTrajectory& trajectory);

/// Same layout for tangent and adjoint pairs.
void write_pair_trajectory_csv(const std::filesystem::path& path, const TimeGrid& time,
                               const std::vector<SpectralField>& a_fields,
                               const std::vector<SpectralField>& b_fields,
                               const std::string& a_name, const std::string& b_name);

/// step, t, norms, phi bounds, energy, inner iterations.
void write_diagnostics_csv(const std::filesystem::path& path, const StateTrajectory& trajectory);

/// step, t, one column per grid node; slabs 1..M.
void write_control_csv(const std::filesystem::path& path, const SpaceTimeField& field,
                       const TimeGrid& time);
SpaceTimeField read_control_csv(const std::filesystem::path& path);

void write_optimizer_csv(const std::filesystem::path& path,
                         const std::vector<IterationRecord>& history);

void write_continuation_csv(const std::filesystem::path& path,
                            const std::vector<QuenchStageRecord>& stages);
void append_continuation_row(const std::filesystem::path& path, const QuenchStageRecord& stage);

/// Single-row slope report: scales, remainders, fitted slope.
void write_remainder_csv(const std::filesystem::path& path, const RemainderReport& report);

/// key,value rows for the measured quantities plus one row per check.
void write_probe_csv(const std::filesystem::path& path, const ProbeReport& report);

/// One summary line per probe appended to a suite-level results file.
void append_probe_summary(const std::filesystem::path& path, const ProbeReport& report);

}  // namespace caginalp
