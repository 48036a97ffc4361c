#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "caginalp/commands.hpp"
#include "caginalp/config.hpp"
#include "caginalp/csv.hpp"
#include "caginalp/digest.hpp"

using namespace caginalp;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("caginalp_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  const auto path = dir / name;
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kZeroConfig = R"(
[domain]
dimension = 1
length = 3.141592653589793
grid_points = 16

[operators]
bc_a = neumann
bc_b = neumann
rho = 0.5
sigma = 0.5
modes = 4

[potential]
kind = regular

[time]
final_time = 0.2
steps = 10

[initial]
theta0 = zero
phi0 = zero
r0_minus = -0.9
r0_plus = 0.9
)";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parser enforces the key schema") {
  CHECK_THROWS_AS(RunConfig::parse("[domain]\nwidth = 3\n"), ValidationError);
  CHECK_THROWS_AS(RunConfig::parse("[galaxy]\nx = 1\n"), ValidationError);
  CHECK_THROWS_AS(RunConfig::parse("[domain]\nlength = 1\nlength = 2\n"), ValidationError);
  CHECK_THROWS_AS(RunConfig::parse("length = 1\n"), ValidationError);
  CHECK_THROWS_AS(RunConfig::parse("[domain\nlength = 1\n"), ValidationError);
  CHECK_NOTHROW(RunConfig::parse("[domain]\nlength = 1.5 # with a comment\n"));
}

TEST_CASE("config builds a validated system with profiles") {
  auto cfg = RunConfig::parse(R"(
[domain]
length = 3.141592653589793
grid_points = 20

[operators]
bc_a = neumann
bc_b = neumann
modes = 5

[initial]
phi0 = mode:2:0.3
theta0 = constant:0.1
r0_minus = -0.9
r0_plus = 0.9
)");
  const auto setup = cfg.make_system();
  CHECK(setup.init.phi0.coeffs[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(setup.init.theta0.coeffs[0] == doctest::Approx(0.1 * std::sqrt(3.141592653589793)));

  auto bad = RunConfig::parse("[initial]\nphi0 = mode:9:1.0\n");
  CHECK_THROWS_AS(bad.make_system(), ValidationError);
  auto bad2 = RunConfig::parse("[operators]\nbc_a = periodic\n");
  CHECK_THROWS_AS(bad2.make_system(), ValidationError);
}

TEST_CASE("cmd_simulate produces artifacts and exit 0 on the zero instance") {
  const auto dir = temp_dir("simulate");
  const auto cfg = write_config(dir, "run.cfg", kZeroConfig);
  CommandContext ctx;
  ctx.config_path = cfg;
  ctx.out_dir = dir / "out";
  ctx.quiet = true;
  CHECK(cmd_simulate(ctx) == kExitOk);
  CHECK(fs::exists(dir / "out" / "trajectory.csv"));
  CHECK(fs::exists(dir / "out" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "out" / "manifest.txt"));
  const auto manifest = read_file(dir / "out" / "manifest.txt");
  CHECK(manifest.find("termination=ok") != std::string::npos);
  CHECK(manifest.find("config_digest=" + hex64(fnv1a64(read_file(cfg)))) != std::string::npos);
}

TEST_CASE("exit-code contract: validation 1, numerics 2, verification 3") {
  const auto dir = temp_dir("exitcodes");
  CommandContext ctx;
  ctx.quiet = true;

  ctx.config_path = write_config(dir, "bad.cfg", "[potential]\nkind = double_obstacle\n");
  ctx.out_dir = dir / "out1";
  CHECK(cmd_simulate(ctx) == kExitConfig);

  ctx.config_path = write_config(dir, "escape.cfg", R"(
[domain]
length = 3.141592653589793
grid_points = 8

[operators]
bc_a = neumann
bc_b = neumann
modes = 2

[potential]
kind = logarithmic
c1 = 2.0

[latent_heat]
form = constant
ell0 = 1.0

[time]
final_time = 4.0
steps = 2

[initial]
phi0 = constant:0.5
r0_minus = -0.9
r0_plus = 0.9
control = constant:100
)");
  ctx.out_dir = dir / "out2";
  CHECK(cmd_simulate(ctx) == kExitNumerical);
  const auto manifest = read_file(dir / "out2" / "manifest.txt");
  CHECK(manifest.find("termination=error:DomainEscape") != std::string::npos);

  // Impossible configured threshold makes the energy probe fail: exit 3.
  ctx.config_path = write_config(dir, "verify.cfg", std::string(kZeroConfig) + R"(
[probe]
which = energy
samples = 2
energy_slack = -1.0
)");
  ctx.out_dir = dir / "out3";
  CHECK(cmd_verify(ctx, "") == kExitVerification);

  ctx.config_path = write_config(dir, "sweep_bad.cfg", std::string(kZeroConfig) + R"(
[optimizer]
alpha_schedule = 0.5,0.5
)");
  ctx.out_dir = dir / "out4";
  CHECK(cmd_sweep(ctx) == kExitConfig);
}

TEST_CASE("identical config and seed give byte-identical trajectories") {
  const auto dir = temp_dir("determinism");
  const auto cfg = write_config(dir, "run.cfg", R"(
[domain]
length = 3.141592653589793
grid_points = 16

[operators]
bc_a = neumann
bc_b = neumann
modes = 4

[potential]
kind = regular

[latent_heat]
form = constant
ell0 = 0.7

[time]
final_time = 0.3
steps = 20

[initial]
theta0 = constant:0.1
phi0 = mode:2:0.2
r0_minus = -0.9
r0_plus = 0.9
control = constant:0.5
)");
  CommandContext ctx;
  ctx.config_path = cfg;
  ctx.quiet = true;
  ctx.out_dir = dir / "a";
  REQUIRE(cmd_simulate(ctx) == kExitOk);
  ctx.out_dir = dir / "b";
  REQUIRE(cmd_simulate(ctx) == kExitOk);
  CHECK(read_file(dir / "a" / "trajectory.csv") == read_file(dir / "b" / "trajectory.csv"));
  CHECK(read_file(dir / "a" / "diagnostics.csv") == read_file(dir / "b" / "diagnostics.csv"));
}

TEST_CASE("tau-halvings emits per-level trajectories and a refinement table") {
  const auto dir = temp_dir("refine");
  const auto cfg = write_config(dir, "run.cfg", kZeroConfig);
  CommandContext ctx;
  ctx.config_path = cfg;
  ctx.out_dir = dir / "out";
  ctx.quiet = true;
  ctx.tau_halvings = 2;
  CHECK(cmd_simulate(ctx) == kExitOk);
  CHECK(fs::exists(dir / "out" / "trajectory.csv"));
  CHECK(fs::exists(dir / "out" / "trajectory_L1.csv"));
  CHECK(fs::exists(dir / "out" / "trajectory_L2.csv"));
  const auto rows = read_csv(dir / "out" / "refinement.csv");
  REQUIRE(rows.size() == 3);  // header + two levels
}

TEST_CASE("csv round trips reload to equal values") {
  const auto dir = temp_dir("csv");

  SUBCASE("control field") {
    SpaceTimeField f(3, 4);
    double v = 0.1;
    for (auto& x : f.values) {
      x = v * 1.0e-17 + v;  // exercise full precision
      v += 0.7318529;
    }
    TimeGrid time{1.0, 3};
    write_control_csv(dir / "control.csv", f, time);
    const auto g = read_control_csv(dir / "control.csv");
    REQUIRE(g.steps == f.steps);
    REQUIRE(g.grid_size == f.grid_size);
    for (size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);
  }

  SUBCASE("spectral field") {
    DomainSpec dom;
    dom.lengths = {3.141592653589793, 0.0};
    dom.grid_points_per_axis = 12;
    auto basis = EigenBasis::build(dom, BoundaryCondition::Neumann, 4);
    SpectralField f(basis);
    f.coeffs = {0.123456789012345678, -1.0 / 3.0, 2.0 / 7.0, 1e-17};
    write_field_csv(dir / "field.csv", f);
    const auto g = read_field_csv(dir / "field.csv", basis);
    for (size_t j = 0; j < f.coeffs.size(); ++j) CHECK(g.coeffs[j] == f.coeffs[j]);
  }

  SUBCASE("format_double round trips") {
    for (double x : {1.0 / 3.0, 2.718281828459045, 1e-300, -0.0, 6.02214076e23})
      CHECK(parse_double(format_double(x)) == x);
  }
}

TEST_CASE("emitted trajectory and diagnostics CSVs re-parse to the in-memory values") {
  const auto dir = temp_dir("reparse");
  auto cfg = RunConfig::parse(R"(
[domain]
length = 3.141592653589793
grid_points = 16

[operators]
bc_a = neumann
bc_b = neumann
modes = 4

[latent_heat]
form = constant
ell0 = 0.7

[time]
final_time = 0.3
steps = 15

[initial]
theta0 = constant:0.1
phi0 = mode:2:0.2
r0_minus = -0.9
r0_plus = 0.9
control = constant:0.4
)");
  const auto setup = cfg.make_system();
  const auto u = cfg.make_control(setup);
  const auto traj = solve_state(setup, u);
  write_trajectory_csv(dir / "trajectory.csv", traj);
  write_diagnostics_csv(dir / "diagnostics.csv", traj);

  const auto rows = read_csv(dir / "trajectory.csv");
  REQUIRE(static_cast<int>(rows.size()) == traj.steps() + 2);
  const int n_a = setup.basis_a->mode_count();
  for (int n = 0; n <= traj.steps(); ++n) {
    const auto& row = rows[static_cast<size_t>(n) + 1];
    CHECK(parse_double(row[1]) == traj.time.node(n));
    for (int j = 0; j < n_a; ++j) {
      CHECK(parse_double(row[static_cast<size_t>(j) + 2]) ==
            traj.theta[static_cast<size_t>(n)].coeffs[static_cast<size_t>(j)]);
      CHECK(parse_double(row[static_cast<size_t>(n_a + j) + 2]) ==
            traj.phi[static_cast<size_t>(n)].coeffs[static_cast<size_t>(j)]);
    }
  }
  const auto drows = read_csv(dir / "diagnostics.csv");
  for (int n = 0; n <= traj.steps(); ++n) {
    const auto& row = drows[static_cast<size_t>(n) + 1];
    const auto& d = traj.diag[static_cast<size_t>(n)];
    CHECK(parse_double(row[2]) == d.theta_l2);
    CHECK(parse_double(row[5]) == d.phi_min);
    CHECK(parse_double(row[7]) == d.energy);
  }
}

TEST_CASE("remainder slope report is a single-row csv") {
  const auto dir = temp_dir("slopecsv");
  RemainderReport rep;
  rep.scales = {0.1, 0.01};
  rep.remainders = {1e-3, 1e-5};
  rep.slope = 2.0;
  write_remainder_csv(dir / "slope.csv", rep);
  const auto rows = read_csv(dir / "slope.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].back() == "slope");
  CHECK(parse_double(rows[1].back()) == 2.0);
  CHECK(parse_double(rows[1][0]) == 0.1);
}

TEST_CASE("cmd_optimize writes the optimizer artifacts") {
  const auto dir = temp_dir("optimize");
  const auto cfg = write_config(dir, "opt.cfg", R"(
[domain]
length = 3.141592653589793
grid_points = 12

[operators]
bc_a = neumann
bc_b = neumann
modes = 3

[potential]
kind = regular

[latent_heat]
form = constant
ell0 = 0.6

[time]
final_time = 0.3
steps = 12

[initial]
phi0 = constant:0.2
r0_minus = -0.9
r0_plus = 0.9

[control_box]
u_min = -2.0
u_max = 2.0
radius = 3.0

[cost]
beta4 = 1.0
beta5 = 0.5
theta_q = constant:0.2

[optimizer]
max_iters = 20
)");
  CommandContext ctx;
  ctx.config_path = cfg;
  ctx.out_dir = dir / "out";
  ctx.quiet = true;
  CHECK(cmd_optimize(ctx) == kExitOk);
  for (const char* f : {"optimizer.csv", "control.csv", "gradient.csv", "trajectory.csv",
                        "adjoint.csv", "manifest.txt"})
    CHECK(fs::exists(dir / "out" / f));

  const auto rows = read_csv(dir / "out" / "optimizer.csv");
  REQUIRE(rows.size() >= 2);
  // Monotone cost history.
  double prev = 1e300;
  for (size_t r = 1; r < rows.size(); ++r) {
    const double c = parse_double(rows[r][1]);
    CHECK(c <= prev + 1e-14);
    prev = c;
  }
}
