#include "caginalp/manifest.hpp"

#include <fstream>
#include <sstream>

#include "caginalp/csv.hpp"

namespace caginalp {

void RunManifest::describe_system(const SystemSetup& setup) {
  const auto& d = setup.basis_a->domain();
  dimension = d.dimension;
  length_x = d.lengths[0];
  length_y = d.dimension == 2 ? d.lengths[1] : 0.0;
  grid_points = d.grid_points_per_axis;
  bc_a = bc_name(setup.basis_a->bc());
  bc_b = bc_name(setup.basis_b->bc());
  modes = setup.basis_a->mode_count();
  lambda_min_a = setup.basis_a->eigenvalues().front();
  lambda_max_a = setup.basis_a->eigenvalues().back();
  lambda_min_b = setup.basis_b->eigenvalues().front();
  lambda_max_b = setup.basis_b->eigenvalues().back();
  guard = embedding_guard(setup.frac.rho, setup.frac.sigma);
  for (const auto& w : guard.warnings()) warnings.push_back(w);
}

void write_manifest_atomic(const std::filesystem::path& path, const RunManifest& m) {
  std::ostringstream out;
  out << "tool_version=" << m.tool_version << '\n';
  out << "config_digest=" << m.config_digest << '\n';
  out << "wall_seconds=" << format_double(m.wall_seconds) << '\n';
  out << "termination=" << m.termination << '\n';
  for (const auto& f : m.inputs) out << "input=" << f << '\n';
  for (const auto& f : m.outputs) out << "output=" << f << '\n';
  out << "guard_rho=" << format_double(m.guard.rho) << '\n';
  out << "guard_sigma=" << format_double(m.guard.sigma) << '\n';
  out << "guard_a4_ok=" << (m.guard.a4_ok ? 1 : 0) << '\n';
  out << "guard_a8_ok=" << (m.guard.a8_ok ? 1 : 0) << '\n';
  out << "guard_a10_ok=" << (m.guard.a10_ok ? 1 : 0) << '\n';
  for (const auto& w : m.warnings) out << "warning=" << w << '\n';
  out << "dimension=" << m.dimension << '\n';
  out << "length_x=" << format_double(m.length_x) << '\n';
  if (m.dimension == 2) out << "length_y=" << format_double(m.length_y) << '\n';
  out << "grid_points=" << m.grid_points << '\n';
  out << "bc_a=" << m.bc_a << '\n';
  out << "bc_b=" << m.bc_b << '\n';
  out << "modes=" << m.modes << '\n';
  out << "lambda_range_a=" << format_double(m.lambda_min_a) << ','
      << format_double(m.lambda_max_a) << '\n';
  out << "lambda_range_b=" << format_double(m.lambda_min_b) << ','
      << format_double(m.lambda_max_b) << '\n';

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw ValidationError("cannot write manifest: " + tmp.string());
    f << out.str();
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace caginalp
