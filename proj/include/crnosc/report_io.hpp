// JSON/CSV serialization of analysis reports. Every JSON artifact embeds
// "schema_version" so downstream consumers can detect layout changes.
#pragma once

#include <json.hpp>
#include <string>

#include "crnosc/dynamics.hpp"
#include "crnosc/hopf.hpp"
#include "crnosc/network.hpp"

namespace crn {

inline constexpr int kSchemaVersion = 1;

nlohmann::ordered_json to_json(const StructureReport& rep);
nlohmann::ordered_json to_json(const StabilityReport& rep);
nlohmann::ordered_json to_json(const DetailedBalanceResult& rep);
nlohmann::ordered_json to_json(const LimitCycleReport& rep);
nlohmann::ordered_json to_json(const BistabilityReport& rep);
nlohmann::ordered_json to_json(const PermanenceReport& rep);

// Matrix/trajectory/scan CSV bodies (header line included).
std::string to_csv(const Eigen::MatrixXi& m);
std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& species);
std::string cycle_csv(const LimitCycleReport& rep, const std::vector<std::string>& species);
std::string scan_csv(const HopfScanResult& scan);
std::string boundary_csv(const HopfScanResult& scan);

// Round-trip loaders for the artifact's own CSV output.
Trajectory trajectory_from_csv(const std::string& body);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace crn
