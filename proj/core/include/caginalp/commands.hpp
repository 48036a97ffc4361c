#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace caginalp {

/// CLI exit codes: 0 success, 1 configuration/validation error,
/// 2 numerical failure, 3 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerification = 3;

struct CommandContext {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed_override;
  int tau_halvings = 0;
  bool quiet = false;
};

/// Resolve an output directory: the explicit one, or a fresh per-run
/// directory under $CAGINALP_OUT_ROOT (default ./runs).
std::filesystem::path resolve_out_dir(const std::filesystem::path& requested);

int cmd_simulate(const CommandContext& ctx);
int cmd_optimize(const CommandContext& ctx);
int cmd_verify(const CommandContext& ctx, const std::string& suite_selector);
int cmd_sweep(const CommandContext& ctx);

}  // namespace caginalp
