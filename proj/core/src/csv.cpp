#include "caginalp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace caginalp {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool append = false) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ValidationError("trailing characters in numeric field: " + s);
    return v;
  } catch (const std::invalid_argument&) {
    throw ValidationError("not a number: " + s);
  } catch (const std::out_of_range&) {
    throw ValidationError("number out of range: " + s);
  }
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open for reading: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_line(line));
  }
  return rows;
}

void write_field_csv(const std::filesystem::path& path, const SpectralField& field) {
  field.validate();
  auto out = open_out(path);
  out << "mode_index,eigenvalue,coefficient\n";
  for (int j = 0; j < field.basis->mode_count(); ++j) {
    out << (j + 1) << ',' << format_double(field.basis->eigenvalue(j)) << ','
        << format_double(field.coeffs[static_cast<size_t>(j)]) << '\n';
  }
}

SpectralField read_field_csv(const std::filesystem::path& path, BasisPtr basis) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0].size() != 3)
    throw ValidationError("malformed field CSV: " + path.string());
  SpectralField f(std::move(basis));
  if (rows.size() - 1 != f.coeffs.size())
    throw ValidationError("field CSV mode count does not match basis");
  for (size_t r = 1; r < rows.size(); ++r)
    f.coeffs[r - 1] = parse_double(rows[r][2]);
  return f;
}

void write_trajectory_csv(const std::filesystem::path& path, const StateTrajectory& trajectory) {
  auto out = open_out(path);
  const int n_a = static_cast<int>(trajectory.theta.front().coeffs.size());
  const int n_b = static_cast<int>(trajectory.phi.front().coeffs.size());
  out << "step,t";
  for (int j = 0; j < n_a; ++j) out << ",theta_" << (j + 1);
  for (int j = 0; j < n_b; ++j) out << ",phi_" << (j + 1);
  out << '\n';
  for (int n = 0; n <= trajectory.steps(); ++n) {
    out << n << ',' << format_double(trajectory.time.node(n));
    for (double c : trajectory.theta[static_cast<size_t>(n)].coeffs)
      out << ',' << format_double(c);
    for (double c : trajectory.phi[static_cast<size_t>(n)].coeffs)
      out << ',' << format_double(c);
    out << '\n';
  }
}

void write_pair_trajectory_csv(const std::filesystem::path& path, const TimeGrid& time,
                               const std::vector<SpectralField>& a_fields,
                               const std::vector<SpectralField>& b_fields,
                               const std::string& a_name, const std::string& b_name) {
  auto out = open_out(path);
  const int n_a = static_cast<int>(a_fields.front().coeffs.size());
  const int n_b = static_cast<int>(b_fields.front().coeffs.size());
  out << "step,t";
  for (int j = 0; j < n_a; ++j) out << ',' << a_name << '_' << (j + 1);
  for (int j = 0; j < n_b; ++j) out << ',' << b_name << '_' << (j + 1);
  out << '\n';
  for (size_t n = 0; n < a_fields.size(); ++n) {
    out << n << ',' << format_double(time.node(static_cast<int>(n)));
    for (double c : a_fields[n].coeffs) out << ',' << format_double(c);
    for (double c : b_fields[n].coeffs) out << ',' << format_double(c);
    out << '\n';
  }
}

void write_diagnostics_csv(const std::filesystem::path& path, const StateTrajectory& trajectory) {
  auto out = open_out(path);
  out << "step,t,theta_l2,theta_vrho,dphi_dt_l2,min_phi,max_phi,energy,inner_iters\n";
  for (int n = 0; n <= trajectory.steps(); ++n) {
    const auto& d = trajectory.diag[static_cast<size_t>(n)];
    out << n << ',' << format_double(trajectory.time.node(n)) << ','
        << format_double(d.theta_l2) << ',' << format_double(d.theta_vrho) << ','
        << format_double(d.dphi_dt_l2) << ',' << format_double(d.phi_min) << ','
        << format_double(d.phi_max) << ',' << format_double(d.energy) << ',' << d.inner_iters
        << '\n';
  }
}

void write_control_csv(const std::filesystem::path& path, const SpaceTimeField& field,
                       const TimeGrid& time) {
  auto out = open_out(path);
  out << "step,t";
  for (int g = 0; g < field.grid_size; ++g) out << ",node_" << g;
  out << '\n';
  for (int n = 1; n <= field.steps; ++n) {
    out << n << ',' << format_double(time.node(n));
    for (double v : field.row(n)) out << ',' << format_double(v);
    out << '\n';
  }
}

SpaceTimeField read_control_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.size() < 2 || rows[0].size() < 3)
    throw ValidationError("malformed control CSV: " + path.string());
  const int steps = static_cast<int>(rows.size()) - 1;
  const int grid = static_cast<int>(rows[0].size()) - 2;
  SpaceTimeField f(steps, grid);
  for (int n = 1; n <= steps; ++n) {
    const auto& row = rows[static_cast<size_t>(n)];
    if (static_cast<int>(row.size()) != grid + 2)
      throw ValidationError("ragged control CSV: " + path.string());
    for (int g = 0; g < grid; ++g) f.at(n, g) = parse_double(row[static_cast<size_t>(g) + 2]);
  }
  return f;
}

void write_optimizer_csv(const std::filesystem::path& path,
                         const std::vector<IterationRecord>& history) {
  auto out = open_out(path);
  out << "iter,cost,stationarity,step_size,forward_solves\n";
  for (const auto& r : history) {
    out << r.iter << ',' << format_double(r.cost) << ',' << format_double(r.stationarity) << ','
        << format_double(r.step) << ',' << r.forward_solves << '\n';
  }
}

namespace {
void continuation_row(std::ofstream& out, const QuenchStageRecord& s) {
  out << format_double(s.alpha) << ',' << format_double(s.cost) << ',' << format_double(s.a_R)
      << ',' << format_double(s.b_R) << ',' << format_double(s.increment_l2q) << ','
      << format_double(s.h_alpha_integral) << ',' << format_double(s.multiplier_dual) << ','
      << format_double(s.stationarity) << ',' << s.termination << '\n';
}
constexpr const char* kContinuationHeader =
    "alpha,cost,a_R,b_R,increment_l2q,h_alpha_integral,multiplier_dual,stationarity,termination\n";
}  // namespace

void write_continuation_csv(const std::filesystem::path& path,
                            const std::vector<QuenchStageRecord>& stages) {
  auto out = open_out(path);
  out << kContinuationHeader;
  for (const auto& s : stages) continuation_row(out, s);
}

void append_continuation_row(const std::filesystem::path& path, const QuenchStageRecord& stage) {
  const bool fresh = !std::filesystem::exists(path);
  auto out = open_out(path, /*append=*/true);
  if (fresh) out << kContinuationHeader;
  continuation_row(out, stage);
}

void write_remainder_csv(const std::filesystem::path& path, const RemainderReport& report) {
  auto out = open_out(path);
  for (size_t i = 0; i < report.scales.size(); ++i) out << "scale_" << i << ',';
  for (size_t i = 0; i < report.remainders.size(); ++i) out << "remainder_" << i << ',';
  out << "slope\n";
  for (double s : report.scales) out << format_double(s) << ',';
  for (double r : report.remainders) out << format_double(r) << ',';
  out << format_double(report.slope) << '\n';
}

void write_probe_csv(const std::filesystem::path& path, const ProbeReport& report) {
  auto out = open_out(path);
  out << "kind,name,value,threshold,pass\n";
  out << "meta,probe," << report.probe << ",,\n";
  out << "meta,seed," << report.seed << ",,\n";
  out << "meta,inputs_digest," << report.inputs_digest << ",,\n";
  for (const auto& [k, v] : report.measured)
    out << "measure," << k << ',' << format_double(v) << ",,\n";
  for (const auto& c : report.checks)
    out << "check," << c.name << ',' << format_double(c.value) << ','
        << format_double(c.threshold) << ',' << (c.pass ? 1 : 0) << '\n';
}

void append_probe_summary(const std::filesystem::path& path, const ProbeReport& report) {
  const bool fresh = !std::filesystem::exists(path);
  auto out = open_out(path, /*append=*/true);
  if (fresh) out << "probe,seed,inputs_digest,pass\n";
  out << report.probe << ',' << report.seed << ',' << report.inputs_digest << ','
      << (report.pass() ? 1 : 0) << '\n';
}

}  // namespace caginalp
