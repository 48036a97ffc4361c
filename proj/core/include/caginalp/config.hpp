#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "caginalp/control.hpp"
#include "caginalp/verify.hpp"

namespace caginalp {

/// Probe selection and parameters from the [probe] section.
struct ProbeSettings {
  std::string which = "all";
  std::uint64_t seed = 1;
  int directions = 2;
  std::vector<double> eps_schedule{1e-3, 1e-4};
  int tau_halvings = 2;
  int pairs = 20;
  int levels = 4;
  double level0 = 0.1;
  int samples = 10;
  int resolution = 41;
  double amplitude = 0.5;
  ProbeThresholds thresholds;
};

/// Parsed sectioned key=value configuration. Unknown sections or keys are
/// rejected outright; every numeric key has a documented default. The raw
/// bytes are kept for the manifest digest.
class RunConfig {
public:
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text);

  const std::string& raw_bytes() const { return raw_; }

  /// modes_override > 0 rebuilds the bases with that many modes (used by the
  /// tiny-instance reduction); blocks_override >= 0 forces time_blocks.
  SystemSetup make_system(int modes_override = 0) const;
  ControlProblem make_problem(int modes_override = 0, int blocks_override = -1) const;

  /// Control field for plain simulation ([initial] control profile).
  SpaceTimeField make_control(const SystemSetup& setup) const;

  /// Initial optimizer iterate ([optimizer] u0 profile).
  SpaceTimeField make_initial_control(const SystemSetup& setup) const;

  OptimizerOptions make_optimizer_options() const;
  double anchor_weight() const;
  std::vector<double> alpha_schedule() const;
  ProbeSettings make_probe_settings() const;

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

private:
  std::string raw_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace caginalp
