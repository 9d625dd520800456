#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nmsse/bell.hpp"
#include "nmsse/ensemble.hpp"
#include "nmsse/trajectory.hpp"
#include "nmsse/verification.hpp"

namespace nmsse::cli {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// t, z_re, z_im, q_1..q_D, L_re, L_im, then one column per observable name.
CsvTable trajectory_table(const Trajectory& traj, const std::vector<std::string>& observable_names);
std::string write_csv(const CsvTable& table);
CsvTable read_csv(const std::string& text);

nlohmann::ordered_json ensemble_json(const EnsembleResult& result, const nlohmann::ordered_json& config_echo,
                                     double truncation_loss);
nlohmann::ordered_json bell_json(const JumpStatistics& stats, const Decomposition& dec,
                                 const nlohmann::ordered_json& config_echo);
nlohmann::ordered_json report_json(const VerificationReport& report);

// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace nmsse::cli
