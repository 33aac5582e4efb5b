#include "coevo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coevo {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

std::vector<double> parse_row(const std::string& line, const std::string& where) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= line.size()) {
    size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    const std::string tok = line.substr(pos, next - pos);
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::runtime_error("bad number '" + tok + "' in " + where);
    }
    pos = next + 1;
    if (next == line.size()) break;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path,
                          bool with_weights) {
  auto out = open_out(path);
  const int n = traj.n;
  out << "t";
  for (int i = 0; i < n; ++i) out << ",phi_" << i;
  if (with_weights)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out << ",w_" << i << "_" << j;
  out << "\n";
  for (size_t k = 0; k < traj.size(); ++k) {
    const auto& s = traj.states[k];
    out << format_double(traj.times[k]);
    for (int i = 0; i < n; ++i) out << ',' << format_double(s.phases[i]);
    if (with_weights)
      for (const double w : s.weights) out << ',' << format_double(w);
    out << "\n";
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const ModelSpec& model) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("empty trajectory csv: " + path.string());

  int n = 0;
  bool with_weights = false;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("phi_", 0) == 0) ++n;
      if (col.rfind("w_", 0) == 0) with_weights = true;
    }
  }
  if (n == 0) throw std::runtime_error("no phase columns in " + path.string());

  Trajectory traj{model, n, {}, {}};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = parse_row(line, path.string());
    const size_t expected = 1 + n + (with_weights ? static_cast<size_t>(n) * n : 0);
    if (row.size() != expected)
      throw std::runtime_error("bad column count in " + path.string());
    SystemState s;
    s.t = row[0];
    s.phases.assign(row.begin() + 1, row.begin() + 1 + n);
    if (with_weights)
      s.weights.assign(row.begin() + 1 + n, row.end());
    else
      s.weights.assign(static_cast<size_t>(n) * n, 0.0);
    traj.times.push_back(s.t);
    traj.states.push_back(std::move(s));
  }
  return traj;
}

void write_step_graphon_csv(const StepGraphon& g, const std::filesystem::path& path) {
  auto out = open_out(path);
  const int n = g.partition.n;
  out << n << "\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << format_double(g.at(i, j));
    out << "\n";
  }
}

namespace {

std::pair<int, std::vector<double>> read_square_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty kernel csv: " + path.string());
  int n = 0;
  try {
    n = std::stoi(line);
  } catch (const std::exception&) {
    throw std::runtime_error("kernel csv must start with n: " + path.string());
  }
  if (n < 1) throw std::runtime_error("kernel csv: n must be >= 1");
  std::vector<double> values;
  values.reserve(static_cast<size_t>(n) * n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = parse_row(line, path.string());
    values.insert(values.end(), row.begin(), row.end());
  }
  if (values.size() != static_cast<size_t>(n) * n)
    throw std::runtime_error("kernel csv: expected n*n values in " + path.string());
  return {n, std::move(values)};
}

}  // namespace

StepGraphon read_step_graphon_csv(const std::filesystem::path& path) {
  auto [n, values] = read_square_csv(path);
  return StepGraphon(Partition(n), std::move(values));
}

Kernel read_tabulated_kernel_csv(const std::filesystem::path& path) {
  auto [n, values] = read_square_csv(path);
  return Kernel::tabulated(std::move(values), n);
}

void write_order_parameter_csv(const Trajectory& traj,
                               const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,r,psi\n";
  for (size_t k = 0; k < traj.size(); ++k) {
    const auto op = order_parameter(traj.states[k].phases);
    out << format_double(traj.times[k]) << ',' << format_double(op.r) << ','
        << format_double(op.psi.wrapped()) << "\n";
  }
}

void write_convergence_csv(const ConvergenceReport& report,
                           const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "n,error\n";
  for (const auto& rec : report.records)
    out << rec.n << ',' << format_double(rec.error) << "\n";
}

nlohmann::json to_json(const DistanceBreakdown& d) {
  return {{"phase", d.phase_part}, {"weight", d.weight_part}, {"total", d.total()}};
}

nlohmann::json to_json(const AssumptionReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"id", c.id},
                      {"what", c.what},
                      {"pass", c.pass},
                      {"margin", c.margin},
                      {"detail", c.detail}});
  return {{"sample_density", r.sample_density},
          {"all_pass", r.all_pass()},
          {"checks", checks}};
}

nlohmann::json to_json(const PositivityReport& r) {
  return {{"inf_w0", r.inf_w0},
          {"threshold", r.threshold},
          {"condition_held", r.condition_held},
          {"min_weight", r.min_weight},
          {"min_weight_time", r.min_weight_time},
          {"claim_holds", r.claim_holds}};
}

nlohmann::json to_json(const GronwallReport& r) {
  return {{"c1", r.c1},
          {"envelope_scale", r.envelope_scale},
          {"rel_slack", r.rel_slack},
          {"pass", r.pass},
          {"tightest_margin", r.tightest_margin},
          {"tightest_time", r.tightest_time},
          {"max_ratio", r.max_ratio},
          {"snapshots", r.snapshots}};
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : r.records)
    records.push_back({{"n", rec.n}, {"dt", rec.dt}, {"error", rec.error}});
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& rate : r.rates) {
    if (rate)
      rates.push_back(*rate);
    else
      rates.push_back(nullptr);  // degenerate pair, flagged instead of divided
  }
  return {{"model_id", r.model_id},
          {"n_ref", r.n_ref},
          {"dt_ref", r.dt_ref},
          {"snapshot_interval", r.snapshot_interval},
          {"reference_label", "vs n_ref reference"},
          {"records", records},
          {"monotone", r.monotone},
          {"rates", rates},
          {"degenerate_floor", r.degenerate_floor}};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace coevo
