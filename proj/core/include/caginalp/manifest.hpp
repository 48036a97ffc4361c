#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "caginalp/forward.hpp"

namespace caginalp {

/// Run provenance: tool version, config digest, wall clock, file lists,
/// embedding guard flags, termination status. Written atomically at run end.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_digest;
  double wall_seconds = 0.0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  ValidityReport guard;
  std::vector<std::string> warnings;
  std::string termination = "ok";

  // Basis metadata.
  int dimension = 0;
  double length_x = 0.0, length_y = 0.0;
  int grid_points = 0;
  std::string bc_a, bc_b;
  int modes = 0;
  double lambda_min_a = 0.0, lambda_max_a = 0.0;
  double lambda_min_b = 0.0, lambda_max_b = 0.0;

  void describe_system(const SystemSetup& setup);
};

/// Write-to-temp plus rename, so a manifest is never observed half-written.
void write_manifest_atomic(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace caginalp
