#include "caginalp/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace caginalp {

namespace {

// Full key schema; anything else is a typo and gets rejected.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"domain", {"dimension", "length", "length_x", "length_y", "grid_points"}},
      {"operators", {"bc_a", "bc_b", "rho", "sigma", "modes"}},
      {"potential", {"kind", "c1", "c2", "smoothing", "yosida_lambda", "quench_alpha"}},
      {"latent_heat", {"form", "ell0", "offset", "amplitude", "slope"}},
      {"time",
       {"final_time", "steps", "inner_tol", "max_inner", "damping", "guard_margin"}},
      {"initial", {"theta0", "phi0", "r0_minus", "r0_plus", "control"}},
      {"control_box", {"u_min", "u_max", "radius"}},
      {"cost",
       {"beta1", "beta2", "beta3", "beta4", "beta5", "phi_omega", "theta_omega", "phi_q",
        "theta_q"}},
      {"optimizer",
       {"max_iters", "armijo_c", "backtrack", "initial_step", "stationarity_tol",
        "allow_zero_beta5", "time_blocks", "u0", "anchor_weight", "alpha_schedule"}},
      {"probe",
       {"which", "seed", "directions", "eps", "tau_halvings", "pairs", "levels", "level0",
        "samples", "resolution", "amplitude", "fd_rel_tol", "fd_slope_min", "stability_drift",
        "energy_slack", "sweep_bound_factor", "remainder_slope_min", "remainder_slope_max"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

// Spatial profile grammar: zero | constant:<v> | mode:<j>:<amp>.
std::vector<double> profile_grid(const std::string& text, const EigenBasis& basis) {
  const auto parts = split(text, ':');
  const int g_total = basis.grid_size();
  std::vector<double> grid(static_cast<size_t>(g_total), 0.0);
  if (parts[0] == "zero") {
    if (parts.size() != 1) throw ValidationError("profile 'zero' takes no arguments");
    return grid;
  }
  if (parts[0] == "constant") {
    if (parts.size() != 2) throw ValidationError("profile 'constant' needs one value");
    const double v = std::stod(parts[1]);
    std::fill(grid.begin(), grid.end(), v);
    return grid;
  }
  if (parts[0] == "mode") {
    if (parts.size() != 3) throw ValidationError("profile 'mode' needs index and amplitude");
    const int j = std::stoi(parts[1]);
    const double a = std::stod(parts[2]);
    if (j < 1 || j > basis.mode_count())
      throw ValidationError("profile mode index out of range: " + parts[1]);
    for (int g = 0; g < g_total; ++g)
      grid[static_cast<size_t>(g)] = a * basis.basis_value(j - 1, g);
    return grid;
  }
  throw ValidationError("unknown profile '" + text + "' (expected zero, constant:<v>, mode:<j>:<a>)");
}

SpectralField profile_field(const std::string& text, BasisPtr basis) {
  const auto grid = profile_grid(text, *basis);
  return from_grid(grid, std::move(basis));
}

SpaceTimeField profile_space_time(const std::string& text, const EigenBasis& basis, int steps) {
  const auto grid = profile_grid(text, basis);
  SpaceTimeField f(steps, static_cast<int>(grid.size()));
  for (int n = 1; n <= steps; ++n) {
    auto row = f.row(n);
    std::copy(grid.begin(), grid.end(), row.begin());
  }
  return f;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  cfg.raw_ = text;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config line " + std::to_string(line_no) + ": malformed section");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (schema().find(section) == schema().end())
        throw ValidationError("config line " + std::to_string(line_no) + ": unknown section [" +
                              section + "]");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ValidationError("config line " + std::to_string(line_no) + ": key outside a section");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    const auto& allowed = schema().at(section);
    if (allowed.find(key) == allowed.end())
      throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                            "' in section [" + section + "]");
    if (cfg.sections_[section].count(key))
      throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                            "'");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config key " + section + "." + key + ": not a number: " + v);
  }
}

int RunConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config key " + section + "." + key + ": not an integer: " + v);
  }
}

bool RunConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = lower(get_string(section, key, ""));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config key " + section + "." + key + ": not a boolean: " + v);
}

SystemSetup RunConfig::make_system(int modes_override) const {
  DomainSpec domain;
  domain.dimension = get_int("domain", "dimension", 1);
  if (domain.dimension == 1) {
    domain.lengths[0] = get_double("domain", "length", 1.0);
  } else {
    domain.lengths[0] = get_double("domain", "length_x", get_double("domain", "length", 1.0));
    domain.lengths[1] = get_double("domain", "length_y", get_double("domain", "length", 1.0));
  }
  domain.grid_points_per_axis = get_int("domain", "grid_points", 32);
  domain.validate();

  auto parse_bc = [&](const std::string& key) {
    const std::string v = lower(get_string("operators", key, "neumann"));
    if (v == "dirichlet") return BoundaryCondition::Dirichlet;
    if (v == "neumann") return BoundaryCondition::Neumann;
    throw ValidationError("operators." + key + ": expected dirichlet or neumann, got " + v);
  };

  SystemSetup setup;
  const int modes = modes_override > 0 ? modes_override : get_int("operators", "modes", 8);
  setup.basis_a = EigenBasis::build(domain, parse_bc("bc_a"), modes);
  setup.basis_b = EigenBasis::build(domain, parse_bc("bc_b"), modes);
  setup.frac.rho = get_double("operators", "rho", 0.5);
  setup.frac.sigma = get_double("operators", "sigma", 0.5);

  const std::string kind = lower(get_string("potential", "kind", "regular"));
  if (kind == "regular") setup.potential.kind = PotentialKind::Regular;
  else if (kind == "logarithmic") setup.potential.kind = PotentialKind::Logarithmic;
  else if (kind == "double_obstacle") setup.potential.kind = PotentialKind::DoubleObstacle;
  else throw ValidationError("potential.kind: unknown kind " + kind);
  setup.potential.c1 = get_double("potential", "c1", 2.0);
  setup.potential.c2 = get_double("potential", "c2", 1.0);
  const std::string smoothing = lower(get_string("potential", "smoothing", "exact"));
  if (smoothing == "exact") setup.potential.smoothing = SmoothingMode::Exact;
  else if (smoothing == "moreau_yosida") setup.potential.smoothing = SmoothingMode::MoreauYosida;
  else if (smoothing == "deep_quench") setup.potential.smoothing = SmoothingMode::DeepQuench;
  else throw ValidationError("potential.smoothing: unknown mode " + smoothing);
  setup.potential.yosida_lambda = get_double("potential", "yosida_lambda", 0.1);
  setup.potential.quench_alpha = get_double("potential", "quench_alpha", 1.0);

  const std::string form = lower(get_string("latent_heat", "form", "constant"));
  if (form == "constant") setup.latent.form = LatentHeatForm::Constant;
  else if (form == "tanh") setup.latent.form = LatentHeatForm::Tanh;
  else throw ValidationError("latent_heat.form: unknown form " + form);
  setup.latent.ell0 = get_double("latent_heat", "ell0", 1.0);
  setup.latent.offset = get_double("latent_heat", "offset", 0.0);
  setup.latent.amplitude = get_double("latent_heat", "amplitude", 1.0);
  setup.latent.slope = get_double("latent_heat", "slope", 1.0);

  setup.time.final_time = get_double("time", "final_time", 1.0);
  setup.time.steps = get_int("time", "steps", 100);
  setup.solver.fp_tol = get_double("time", "inner_tol", 1e-12);
  setup.solver.max_inner = get_int("time", "max_inner", 400);
  setup.solver.damping = get_double("time", "damping", 1.0);
  setup.solver.guard_margin = get_double("time", "guard_margin", 1e-6);

  setup.init.theta0 = profile_field(get_string("initial", "theta0", "zero"), setup.basis_a);
  setup.init.phi0 = profile_field(get_string("initial", "phi0", "zero"), setup.basis_b);
  setup.init.r0_minus = get_double("initial", "r0_minus", -0.95);
  setup.init.r0_plus = get_double("initial", "r0_plus", 0.95);

  setup.validate();
  return setup;
}

SpaceTimeField RunConfig::make_control(const SystemSetup& setup) const {
  return profile_space_time(get_string("initial", "control", "zero"), *setup.basis_a,
                            setup.time.steps);
}

SpaceTimeField RunConfig::make_initial_control(const SystemSetup& setup) const {
  return profile_space_time(get_string("optimizer", "u0", "zero"), *setup.basis_a,
                            setup.time.steps);
}

ControlProblem RunConfig::make_problem(int modes_override, int blocks_override) const {
  ControlProblem problem;
  problem.system = make_system(modes_override);
  const int steps = problem.system.time.steps;
  const int g_total = problem.system.grid_size();

  problem.cost.beta1 = get_double("cost", "beta1", 0.0);
  problem.cost.beta2 = get_double("cost", "beta2", 0.0);
  problem.cost.beta3 = get_double("cost", "beta3", 0.0);
  problem.cost.beta4 = get_double("cost", "beta4", 0.0);
  problem.cost.beta5 = get_double("cost", "beta5", 0.0);
  if (has("cost", "phi_omega"))
    problem.cost.phi_Omega = profile_field(get_string("cost", "phi_omega", "zero"),
                                           problem.system.basis_b);
  if (has("cost", "theta_omega"))
    problem.cost.theta_Omega = profile_field(get_string("cost", "theta_omega", "zero"),
                                             problem.system.basis_a);
  if (has("cost", "phi_q"))
    problem.cost.phi_Q = profile_space_time(get_string("cost", "phi_q", "zero"),
                                            *problem.system.basis_b, steps);
  if (has("cost", "theta_q"))
    problem.cost.theta_Q = profile_space_time(get_string("cost", "theta_q", "zero"),
                                              *problem.system.basis_a, steps);

  problem.box.u_min = SpaceTimeField::constant(steps, g_total,
                                               get_double("control_box", "u_min", -1.0));
  problem.box.u_max = SpaceTimeField::constant(steps, g_total,
                                               get_double("control_box", "u_max", 1.0));
  problem.box.radius_R = get_double("control_box", "radius", 0.0);
  if (problem.box.radius_R == 0.0) {
    double env = 0.0;
    for (double v : problem.box.u_min.values) env = std::max(env, std::abs(v));
    for (double v : problem.box.u_max.values) env = std::max(env, std::abs(v));
    problem.box.radius_R = env + 1.0;
  }
  problem.time_blocks = blocks_override >= 0 ? blocks_override
                                           : get_int("optimizer", "time_blocks", 0);

  problem.validate();
  return problem;
}

OptimizerOptions RunConfig::make_optimizer_options() const {
  OptimizerOptions o;
  o.max_iters = get_int("optimizer", "max_iters", 100);
  o.armijo_c = get_double("optimizer", "armijo_c", 1e-4);
  o.backtrack = get_double("optimizer", "backtrack", 0.5);
  o.initial_step = get_double("optimizer", "initial_step", 1.0);
  o.stationarity_tol = get_double("optimizer", "stationarity_tol", 1e-6);
  o.allow_zero_beta5 = get_bool("optimizer", "allow_zero_beta5", false);
  return o;
}

double RunConfig::anchor_weight() const {
  return get_double("optimizer", "anchor_weight", 1.0);
}

std::vector<double> RunConfig::alpha_schedule() const {
  const std::string text = get_string("optimizer", "alpha_schedule", "");
  if (text.empty())
    return {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625};
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    out.push_back(std::stod(part));
  }
  return out;
}

ProbeSettings RunConfig::make_probe_settings() const {
  ProbeSettings p;
  p.which = lower(get_string("probe", "which", "all"));
  p.seed = static_cast<std::uint64_t>(get_int("probe", "seed", 1));
  p.directions = get_int("probe", "directions", 2);
  if (has("probe", "eps")) {
    p.eps_schedule.clear();
    for (const auto& part : split(get_string("probe", "eps", ""), ','))
      if (!part.empty()) p.eps_schedule.push_back(std::stod(part));
  }
  p.tau_halvings = get_int("probe", "tau_halvings", 2);
  p.pairs = get_int("probe", "pairs", 20);
  p.levels = get_int("probe", "levels", 4);
  p.level0 = get_double("probe", "level0", 0.1);
  p.samples = get_int("probe", "samples", 10);
  p.resolution = get_int("probe", "resolution", 41);
  p.amplitude = get_double("probe", "amplitude", 0.5);
  p.thresholds.fd_rel_tol = get_double("probe", "fd_rel_tol", 1e-2);
  p.thresholds.fd_slope_min = get_double("probe", "fd_slope_min", 0.9);
  p.thresholds.stability_drift = get_double("probe", "stability_drift", 0.2);
  p.thresholds.energy_slack_rel = get_double("probe", "energy_slack", 1e-10);
  p.thresholds.sweep_bound_factor = get_double("probe", "sweep_bound_factor", 10.0);
  p.thresholds.remainder_slope_min = get_double("probe", "remainder_slope_min", 1.8);
  p.thresholds.remainder_slope_max = get_double("probe", "remainder_slope_max", 2.2);
  return p;
}

}  // namespace caginalp
