#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smcva {

struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd data;
};

// All CSV artifacts: comma separated, one header row, LF line endings,
// 17 significant digits.
std::string format_real(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data);

CsvTable read_csv(const std::string& path);

// Trajectory files: header `t,<prefix>_<i>,...`, t column is the step index
// starting at t0.
void write_trajectory_csv(const std::string& path, const Eigen::MatrixXd& traj,
                          const std::string& prefix,
                          const std::vector<int>& column_indices, int t0 = 0);

}  // namespace smcva
