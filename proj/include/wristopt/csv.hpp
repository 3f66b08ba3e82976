#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wristopt/errors.hpp"
#include "wristopt/trace.hpp"

namespace wristopt {
namespace csv {

// %.17g round-trips every finite double exactly.
inline std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> comments; // written as leading '#' lines
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& c : table.comments) out << "# " << c << "\n";
    for (std::size_t k = 0; k < table.header.size(); ++k)
        out << (k ? "," : "") << table.header[k];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << number(row[k]);
        out << "\n";
    }
}

inline Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    Table table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            table.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) table.header.push_back(cell);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline void write_trace(const std::string& path, const SimulationTrace& trace) {
    Table t;
    t.header = {"t", "q", "qdot", "tau_e", "tau_M", "q_Y", "target", "dwell_flag"};
    t.rows.reserve(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k)
        t.rows.push_back({trace.time_at(k), trace.q[k], trace.qdot[k], trace.tau_e[k],
                          trace.tau_M[k], trace.q_Y[k], trace.target[k], trace.dwell_flag[k]});
    write(path, t);
}

inline SimulationTrace read_trace(const std::string& path) {
    const Table t = read(path);
    if (t.header.size() != 8) throw ParseError("not a trace CSV: " + path);
    SimulationTrace trace;
    if (t.rows.size() >= 2)
        trace.timestep = t.rows[1][0] - t.rows[0][0];
    else if (t.rows.size() == 1)
        trace.timestep = t.rows[0][0];
    for (const auto& r : t.rows)
        trace.append(r[1], r[2], r[3], r[4], r[5], r[6], r[7] != 0.0);
    return trace;
}

} // namespace csv
} // namespace wristopt
