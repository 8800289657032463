#include "smcva/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smcva {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data) {
    if (static_cast<long>(header.size()) != data.cols())
        throw std::invalid_argument("write_csv: header/data column mismatch");
    std::ofstream out(path, std::ios::binary);   // binary keeps LF endings
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (long r = 0; r < data.rows(); ++r) {
        for (long c = 0; c < data.cols(); ++c) {
            if (c) out << ',';
            out << format_real(data(r, c));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    CsvTable table;
    std::stringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) table.header.push_back(field);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
        if (row.size() != table.header.size())
            throw std::runtime_error("read_csv: ragged row in " + path);
        rows.push_back(std::move(row));
    }
    table.data.resize(rows.size(), table.header.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.data(r, c) = rows[r][c];
    return table;
}

void write_trajectory_csv(const std::string& path, const Eigen::MatrixXd& traj,
                          const std::string& prefix,
                          const std::vector<int>& column_indices, int t0) {
    if (static_cast<long>(column_indices.size()) != traj.cols())
        throw std::invalid_argument("write_trajectory_csv: index/column mismatch");
    std::vector<std::string> header{"t"};
    for (int idx : column_indices)
        header.push_back(prefix + "_" + std::to_string(idx));
    Eigen::MatrixXd data(traj.rows(), traj.cols() + 1);
    for (long r = 0; r < traj.rows(); ++r) data(r, 0) = t0 + r;
    data.rightCols(traj.cols()) = traj;
    write_csv(path, header, data);
}

}  // namespace smcva
