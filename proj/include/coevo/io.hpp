#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "coevo/analysis.hpp"
#include "coevo/dynamics.hpp"
#include "coevo/graphon.hpp"
#include "coevo/metrics.hpp"

namespace coevo {

// 17 significant digits: enough for exact double round-trips.
std::string format_double(double v);

// Trajectory CSV, header t,phi_0..phi_{n-1}[,w_00..w_{n-1}{n-1}] (row-major
// weights, written when with_weights is set).
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path,
                          bool with_weights);
// Reads the format back; n and the weight columns are inferred from the header.
Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const ModelSpec& model);

// Kernel / step-graphon CSV: first line n, then n rows of n comma-separated
// reals (row-major).
void write_step_graphon_csv(const StepGraphon& g, const std::filesystem::path& path);
StepGraphon read_step_graphon_csv(const std::filesystem::path& path);
Kernel read_tabulated_kernel_csv(const std::filesystem::path& path);

// t,r,psi per snapshot.
void write_order_parameter_csv(const Trajectory& traj,
                               const std::filesystem::path& path);

// n,error per study record.
void write_convergence_csv(const ConvergenceReport& report,
                           const std::filesystem::path& path);

nlohmann::json to_json(const DistanceBreakdown& d);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const PositivityReport& r);
nlohmann::json to_json(const GronwallReport& r);
nlohmann::json to_json(const ConvergenceReport& r);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace coevo
