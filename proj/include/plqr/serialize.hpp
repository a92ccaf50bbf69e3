#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "plqr/lqr_core.hpp"
#include "plqr/sim_engine.hpp"

// Persistence formats: gain schedules and sampled plants as JSON documents
// (row-major matrix arrays, full double precision), trajectories as CSV.
namespace plqr {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& node, Eigen::Index rows,
                                 Eigen::Index cols, const std::string& what);

nlohmann::json schedule_to_json(const GainSchedule& schedule);
GainSchedule schedule_from_json(const nlohmann::json& doc);

nlohmann::json plant_to_json(const PeriodicPlant& plant);
PeriodicPlant plant_from_json(const nlohmann::json& doc);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

// CSV columns: t,w1,w2,w3,Om1,Om2,Om3,q1,q2,q3,tw1,tw2,tw3,m1,m2,m3,b1,b2,b3
// (SI units, one row per logged sample, full double precision).
inline constexpr const char* kTrajectoryCsvHeader =
    "t,w1,w2,w3,Om1,Om2,Om3,q1,q2,q3,tw1,tw2,tw3,m1,m2,m3,b1,b2,b3";

std::string trajectory_to_csv(const Trajectory& trajectory);
Trajectory trajectory_from_csv(const std::string& text);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace plqr
